#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agrisim/rng.hpp"

namespace agrisim {

// Dense feed-forward Q-network: input -> hid -> hid -> actions, ReLU on
// hidden layers, identity output.
struct Mlp {
    struct Layer {
        int in = 0, out = 0;
        std::vector<double> w;  // out x in, row-major
        std::vector<double> b;  // out
    };
    std::vector<Layer> layers;

    static Mlp make(int input, int hidden, int output, Rng& rng);
    static Mlp make(const std::vector<int>& widths, Rng& rng);

    int input_size() const { return layers.front().in; }
    int output_size() const { return layers.back().out; }
    std::size_t parameter_count() const;

    std::vector<double> forward(std::span<const double> state) const;

    bool same_shape(const Mlp& other) const;

    // Content hash for change-detection asserts in tests.
    std::uint64_t param_hash() const;
};

// dst <- tau*src + (1-tau)*dst, entrywise.
void soft_update(Mlp& dst, const Mlp& src, double tau);

// Adaptive-moment gradient descent state, aligned with one Mlp.
struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
    long step = 0;
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;

    static AdamState make(const Mlp& net);
};

// Batch-mean squared-error loss on the taken-action outputs and its
// gradient with respect to every parameter, laid out like the Mlp.
struct Gradients {
    std::vector<std::vector<double>> w, b;
    double loss = 0.0;
};
Gradients loss_gradients(const Mlp& net,
                         const std::vector<std::span<const double>>& states,
                         const std::vector<int>& actions,
                         const std::vector<double>& targets);

// One mini-batch regression step on the taken-action outputs:
// loss = mean((target_k - Q(s_k, a_k))^2). Returns the loss.
// max_grad_norm <= 0 disables clipping.
double train_step(Mlp& net, AdamState& opt,
                  const std::vector<std::span<const double>>& states,
                  const std::vector<int>& actions,
                  const std::vector<double>& targets, double lr,
                  double max_grad_norm = 0.0);

// Flat self-describing checkpoint: magic+version, layer shapes, then
// parameters as 64-bit little-endian reals.
void save_checkpoint(const Mlp& net, const std::string& path);
Mlp load_checkpoint(const std::string& path);

}  // namespace agrisim
