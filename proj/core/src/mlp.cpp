#include "agrisim/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace agrisim {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

Mlp Mlp::make(int input, int hidden, int output, Rng& rng) {
    return make({input, hidden, hidden, output}, rng);
}

Mlp Mlp::make(const std::vector<int>& widths, Rng& rng) {
    if (widths.size() < 2) throw std::invalid_argument("Mlp: need >= 2 widths");
    Mlp net;
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        Layer layer;
        layer.in = widths[l];
        layer.out = widths[l + 1];
        const double bound = std::sqrt(1.0 / layer.in);
        std::uniform_real_distribution<double> dist(-bound, bound);
        layer.w.resize(static_cast<size_t>(layer.out) * layer.in);
        layer.b.resize(layer.out);
        for (double& x : layer.w) x = dist(rng);
        for (double& x : layer.b) x = dist(rng);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.w.size() + l.b.size();
    return n;
}

bool Mlp::same_shape(const Mlp& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (size_t i = 0; i < layers.size(); ++i)
        if (layers[i].in != other.layers[i].in || layers[i].out != other.layers[i].out)
            return false;
    return true;
}

std::uint64_t Mlp::param_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](double x) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        h = (h ^ bits) * 0x100000001b3ULL;
    };
    for (const Layer& l : layers) {
        for (double x : l.w) mix(x);
        for (double x : l.b) mix(x);
    }
    return h;
}

std::vector<double> Mlp::forward(std::span<const double> state) const {
    if (static_cast<int>(state.size()) != input_size())
        throw std::logic_error("Mlp::forward: state size mismatch");
    std::vector<double> cur(state.begin(), state.end());
    std::vector<double> next;
    for (size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        next.assign(layer.out, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double* wrow = layer.w.data() + static_cast<size_t>(o) * layer.in;
            double acc = layer.b[o];
            for (int i = 0; i < layer.in; ++i) acc += wrow[i] * cur[i];
            next[o] = acc;
        }
        if (l + 1 < layers.size())
            for (double& x : next) x = std::max(x, 0.0);
        cur.swap(next);
    }
    return cur;
}

void soft_update(Mlp& dst, const Mlp& src, double tau) {
    if (!dst.same_shape(src))
        throw std::logic_error("soft_update: shape mismatch");
    for (size_t l = 0; l < dst.layers.size(); ++l) {
        auto& d = dst.layers[l];
        const auto& s = src.layers[l];
        for (size_t i = 0; i < d.w.size(); ++i)
            d.w[i] = tau * s.w[i] + (1.0 - tau) * d.w[i];
        for (size_t i = 0; i < d.b.size(); ++i)
            d.b[i] = tau * s.b[i] + (1.0 - tau) * d.b[i];
    }
}

AdamState AdamState::make(const Mlp& net) {
    AdamState s;
    for (const auto& l : net.layers) {
        s.m_w.emplace_back(l.w.size(), 0.0);
        s.v_w.emplace_back(l.w.size(), 0.0);
        s.m_b.emplace_back(l.b.size(), 0.0);
        s.v_b.emplace_back(l.b.size(), 0.0);
    }
    return s;
}

Gradients loss_gradients(const Mlp& net,
                         const std::vector<std::span<const double>>& states,
                         const std::vector<int>& actions,
                         const std::vector<double>& targets) {
    const size_t batch = states.size();
    if (batch == 0 || actions.size() != batch || targets.size() != batch)
        throw std::invalid_argument("train_step: empty or misaligned batch");
    for (double y : targets)
        if (!std::isfinite(y))
            throw std::invalid_argument("train_step: non-finite target");

    const size_t n_layers = net.layers.size();
    Gradients g;
    g.w.resize(n_layers);
    g.b.resize(n_layers);
    auto& grad_w = g.w;
    auto& grad_b = g.b;
    for (size_t l = 0; l < n_layers; ++l) {
        grad_w[l].assign(net.layers[l].w.size(), 0.0);
        grad_b[l].assign(net.layers[l].b.size(), 0.0);
    }

    double loss = 0.0;
    std::vector<std::vector<double>> acts(n_layers + 1);
    std::vector<double> delta, delta_prev;
    for (size_t k = 0; k < batch; ++k) {
        // forward, keeping post-activation values per layer
        acts[0].assign(states[k].begin(), states[k].end());
        if (static_cast<int>(acts[0].size()) != net.input_size())
            throw std::logic_error("train_step: state size mismatch");
        for (size_t l = 0; l < n_layers; ++l) {
            const auto& layer = net.layers[l];
            acts[l + 1].assign(layer.out, 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double* wrow = layer.w.data() + static_cast<size_t>(o) * layer.in;
                double acc = layer.b[o];
                for (int i = 0; i < layer.in; ++i) acc += wrow[i] * acts[l][i];
                acts[l + 1][o] = acc;
            }
            if (l + 1 < n_layers)
                for (double& x : acts[l + 1]) x = std::max(x, 0.0);
        }

        const int a = actions[k];
        if (a < 0 || a >= net.output_size())
            throw std::logic_error("train_step: action index out of range");
        const double err = targets[k] - acts[n_layers][a];
        loss += err * err;

        // backward; only the taken action's output carries gradient
        delta.assign(net.output_size(), 0.0);
        delta[a] = -2.0 * err / batch;
        for (size_t l = n_layers; l-- > 0;) {
            const auto& layer = net.layers[l];
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                double* grow = grad_w[l].data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) grow[i] += d * acts[l][i];
                grad_b[l][o] += d;
            }
            if (l == 0) break;
            delta_prev.assign(layer.in, 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* wrow = layer.w.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) delta_prev[i] += d * wrow[i];
            }
            // ReLU mask of the layer below
            for (int i = 0; i < layer.in; ++i)
                if (acts[l][i] <= 0.0) delta_prev[i] = 0.0;
            delta.swap(delta_prev);
        }
    }
    g.loss = loss / batch;
    return g;
}

double train_step(Mlp& net, AdamState& opt,
                  const std::vector<std::span<const double>>& states,
                  const std::vector<int>& actions,
                  const std::vector<double>& targets, double lr,
                  double max_grad_norm) {
    Gradients g = loss_gradients(net, states, actions, targets);
    const size_t n_layers = net.layers.size();
    auto& grad_w = g.w;
    auto& grad_b = g.b;

    if (max_grad_norm > 0.0) {
        double sq = 0.0;
        for (size_t l = 0; l < n_layers; ++l) {
            for (double g : grad_w[l]) sq += g * g;
            for (double g : grad_b[l]) sq += g * g;
        }
        const double norm = std::sqrt(sq);
        if (norm > max_grad_norm) {
            const double scale = max_grad_norm / norm;
            for (size_t l = 0; l < n_layers; ++l) {
                for (double& g : grad_w[l]) g *= scale;
                for (double& g : grad_b[l]) g *= scale;
            }
        }
    }

    opt.step += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    auto apply = [&](std::vector<double>& param, std::vector<double>& g,
                     std::vector<double>& m, std::vector<double>& v) {
        for (size_t i = 0; i < param.size(); ++i) {
            m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
            v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            param[i] -= lr * mhat / (std::sqrt(vhat) + opt.epsilon);
        }
    };
    for (size_t l = 0; l < n_layers; ++l) {
        apply(net.layers[l].w, grad_w[l], opt.m_w[l], opt.v_w[l]);
        apply(net.layers[l].b, grad_b[l], opt.m_b[l], opt.v_b[l]);
    }
    return g.loss;
}

namespace {
constexpr char kMagic[8] = {'M', 'L', 'P', 'C', 'K', 'P', 'T', '1'};
}

void save_checkpoint(const Mlp& net, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    f.write(kMagic, sizeof kMagic);
    const std::uint32_t n = static_cast<std::uint32_t>(net.layers.size());
    f.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (const auto& l : net.layers) {
        const std::uint32_t in = l.in, out = l.out;
        f.write(reinterpret_cast<const char*>(&in), sizeof in);
        f.write(reinterpret_cast<const char*>(&out), sizeof out);
    }
    for (const auto& l : net.layers) {
        f.write(reinterpret_cast<const char*>(l.w.data()),
                static_cast<std::streamsize>(l.w.size() * sizeof(double)));
        f.write(reinterpret_cast<const char*>(l.b.data()),
                static_cast<std::streamsize>(l.b.size() * sizeof(double)));
    }
    if (!f) throw std::runtime_error("save_checkpoint: write failed: " + path);
}

Mlp load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[8];
    f.read(magic, sizeof magic);
    if (!f || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    std::uint32_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!f || n == 0 || n > 64)
        throw std::runtime_error("load_checkpoint: bad layer count in " + path);
    Mlp net;
    net.layers.resize(n);
    for (auto& l : net.layers) {
        std::uint32_t in = 0, out = 0;
        f.read(reinterpret_cast<char*>(&in), sizeof in);
        f.read(reinterpret_cast<char*>(&out), sizeof out);
        if (!f || in == 0 || out == 0)
            throw std::runtime_error("load_checkpoint: bad shape in " + path);
        l.in = static_cast<int>(in);
        l.out = static_cast<int>(out);
        l.w.resize(static_cast<size_t>(in) * out);
        l.b.resize(out);
    }
    for (auto& l : net.layers) {
        f.read(reinterpret_cast<char*>(l.w.data()),
               static_cast<std::streamsize>(l.w.size() * sizeof(double)));
        f.read(reinterpret_cast<char*>(l.b.data()),
               static_cast<std::streamsize>(l.b.size() * sizeof(double)));
    }
    if (!f) throw std::runtime_error("load_checkpoint: truncated file " + path);
    return net;
}

}  // namespace agrisim
