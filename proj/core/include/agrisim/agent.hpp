#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "agrisim/mlp.hpp"
#include "agrisim/replay.hpp"
#include "agrisim/rng.hpp"

namespace agrisim {

enum class Algorithm { DQN, DDQN, ITDQN };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm a);

// Online / target / mediator parameter triplet. All three start equal.
struct QTriplet {
    Mlp online;
    Mlp target;
    Mlp mid;
    double sigma2 = 0.01;

    static QTriplet make(int input, int hidden, int output, double sigma2, Rng& rng);
};

struct AgentPolicy {
    int id = 0;
    Algorithm algorithm = Algorithm::ITDQN;
    QTriplet q;
    ReplayBuffer buffer;
    AdamState opt;
    double epsilon = 1.0;

    AgentPolicy(int id, Algorithm algo, int input, int hidden, int output,
                double sigma2, std::size_t buffer_capacity, Rng& rng);
};

// Per-action mean of two networks; one independent Gaussian draw per
// action with variance sigma2 unless deterministic.
std::vector<double> mediated_q(const Mlp& a, const Mlp& b,
                               std::span<const double> state, double sigma2,
                               Rng& rng, bool deterministic);

// Epsilon-greedy over the algorithm's action-value estimate. Ties break
// toward the lowest action index.
enum class ActMode {
    Train,    // epsilon-greedy, stochastic mediation
    Mimicry,  // epsilon = 0, stochastic mediation
    Eval,     // epsilon = 0, deterministic mediation
};
int select_action(const AgentPolicy& agent, std::span<const double> state,
                  Rng& rng, ActMode mode = ActMode::Train);

std::vector<double> td_targets(const AgentPolicy& agent,
                               const std::vector<const Transition*>& batch,
                               double gamma, Rng& rng);

struct LearnParams {
    double gamma = 0.99;
    std::size_t batch_size = 128;
    double tau = 0.01;
    double learning_rate = 1e-4;
    double max_grad_norm = 0.0;  // <= 0: no clipping
};

// Sample, build targets, descend on the online network, then soft-update
// target and mid toward online.
double learn(AgentPolicy& agent, const LearnParams& p, Rng& rng);

// ER_i = beta1*mean + beta2*population-variance; argmax, lowest id wins ties.
int evaluate_elite(const std::vector<std::vector<double>>& reward_traces,
                   double beta1, double beta2);

// Non-elite agents blend all three networks toward the elite's with
// weight vartheta. The elite is untouched.
void imitate(std::vector<AgentPolicy>& agents, int elite_id, double vartheta);

struct ImitationSchedule {
    double vartheta = 0.1;
    int delta = 10;
    double alpha1 = 0.5;
    double alpha2 = 2.0;
    double beta1 = 1.0;
    double beta2 = 0.01;

    bool is_mimicry_episode(int episode) const {
        return delta >= 1 && episode % delta == 0;
    }
    void advance() {
        vartheta *= alpha1;
        delta = static_cast<int>(std::ceil(alpha2 * delta));
    }
};

}  // namespace agrisim
