#include "agrisim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agrisim {

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "dqn" || name == "DQN") return Algorithm::DQN;
    if (name == "ddqn" || name == "DDQN") return Algorithm::DDQN;
    if (name == "itdqn" || name == "ITDQN") return Algorithm::ITDQN;
    throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::DQN: return "dqn";
        case Algorithm::DDQN: return "ddqn";
        case Algorithm::ITDQN: return "itdqn";
    }
    return "?";
}

QTriplet QTriplet::make(int input, int hidden, int output, double sigma2, Rng& rng) {
    QTriplet q;
    q.online = Mlp::make(input, hidden, output, rng);
    q.target = q.online;
    q.mid = q.online;
    q.sigma2 = sigma2;
    return q;
}

AgentPolicy::AgentPolicy(int id_, Algorithm algo, int input, int hidden, int output,
                         double sigma2, std::size_t buffer_capacity, Rng& rng)
    : id(id_),
      algorithm(algo),
      q(QTriplet::make(input, hidden, output, sigma2, rng)),
      buffer(buffer_capacity),
      opt(AdamState::make(q.online)) {}

std::vector<double> mediated_q(const Mlp& a, const Mlp& b,
                               std::span<const double> state, double sigma2,
                               Rng& rng, bool deterministic) {
    std::vector<double> qa = a.forward(state);
    const std::vector<double> qb = b.forward(state);
    for (size_t i = 0; i < qa.size(); ++i) qa[i] = 0.5 * (qa[i] + qb[i]);
    if (!deterministic && sigma2 > 0.0) {
        std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
        for (double& x : qa) x += noise(rng);
    }
    return qa;
}

namespace {
int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}
}  // namespace

int select_action(const AgentPolicy& agent, std::span<const double> state,
                  Rng& rng, ActMode mode) {
    const int n_actions = agent.q.online.output_size();
    if (mode == ActMode::Train && agent.epsilon > 0.0) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng) < agent.epsilon) {
            std::uniform_int_distribution<int> pick(0, n_actions - 1);
            return pick(rng);
        }
    }
    std::vector<double> q;
    if (agent.algorithm == Algorithm::ITDQN) {
        q = mediated_q(agent.q.online, agent.q.mid, state, agent.q.sigma2, rng,
                       mode == ActMode::Eval);
    } else {
        q = agent.q.online.forward(state);
    }
    return argmax_lowest(q);
}

std::vector<double> td_targets(const AgentPolicy& agent,
                               const std::vector<const Transition*>& batch,
                               double gamma, Rng& rng) {
    std::vector<double> y(batch.size());
    for (size_t k = 0; k < batch.size(); ++k) {
        const Transition& tr = *batch[k];
        if (tr.done || gamma == 0.0) {
            y[k] = tr.reward;
            continue;
        }
        double bootstrap = 0.0;
        switch (agent.algorithm) {
            case Algorithm::DQN: {
                const auto qt = agent.q.target.forward(tr.next_state);
                bootstrap = *std::max_element(qt.begin(), qt.end());
                break;
            }
            case Algorithm::DDQN: {
                const auto qo = agent.q.online.forward(tr.next_state);
                const auto qt = agent.q.target.forward(tr.next_state);
                bootstrap = qt[argmax_lowest(qo)];
                break;
            }
            case Algorithm::ITDQN: {
                const auto sel = mediated_q(agent.q.online, agent.q.mid, tr.next_state,
                                            agent.q.sigma2, rng, false);
                const auto eval = mediated_q(agent.q.target, agent.q.mid, tr.next_state,
                                             agent.q.sigma2, rng, false);
                bootstrap = eval[argmax_lowest(sel)];
                break;
            }
        }
        y[k] = tr.reward + gamma * bootstrap;
    }
    return y;
}

double learn(AgentPolicy& agent, const LearnParams& p, Rng& rng) {
    const auto batch = agent.buffer.sample(p.batch_size, rng);
    const auto targets = td_targets(agent, batch, p.gamma, rng);
    std::vector<std::span<const double>> states;
    std::vector<int> actions;
    states.reserve(batch.size());
    actions.reserve(batch.size());
    for (const Transition* tr : batch) {
        states.emplace_back(tr->state);
        actions.push_back(tr->action);
    }
    const double loss = train_step(agent.q.online, agent.opt, states, actions,
                                   targets, p.learning_rate, p.max_grad_norm);
    soft_update(agent.q.target, agent.q.online, p.tau);
    soft_update(agent.q.mid, agent.q.online, p.tau);
    return loss;
}

int evaluate_elite(const std::vector<std::vector<double>>& reward_traces,
                   double beta1, double beta2) {
    if (reward_traces.empty())
        throw std::logic_error("evaluate_elite: no traces");
    int best = -1;
    double best_score = 0.0;
    for (int i = 0; i < static_cast<int>(reward_traces.size()); ++i) {
        const auto& trace = reward_traces[i];
        if (trace.empty())
            throw std::logic_error("evaluate_elite: empty trace");
        double mean = 0.0;
        for (double r : trace) mean += r;
        mean /= trace.size();
        double var = 0.0;
        for (double r : trace) var += (r - mean) * (r - mean);
        var /= trace.size();
        const double score = beta1 * mean + beta2 * var;
        if (best < 0 || score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

void imitate(std::vector<AgentPolicy>& agents, int elite_id, double vartheta) {
    if (vartheta < 0.0 || vartheta > 1.0)
        throw std::invalid_argument("imitate: vartheta outside [0,1]");
    const AgentPolicy& elite = agents.at(elite_id);
    for (AgentPolicy& a : agents) {
        if (a.id == elite.id) continue;
        soft_update(a.q.online, elite.q.online, vartheta);
        soft_update(a.q.target, elite.q.target, vartheta);
        soft_update(a.q.mid, elite.q.mid, vartheta);
    }
}

}  // namespace agrisim
