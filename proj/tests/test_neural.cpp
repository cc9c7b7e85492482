#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "agrisim/mlp.hpp"
#include "agrisim/replay.hpp"

using namespace agrisim;

namespace {

// Straight-line re-implementation of the forward pass.
std::vector<double> forward_oracle(const Mlp& net, const std::vector<double>& x) {
    std::vector<double> cur = x;
    for (size_t l = 0; l < net.layers.size(); ++l) {
        const auto& L = net.layers[l];
        std::vector<double> next(L.out);
        for (int o = 0; o < L.out; ++o) {
            double s = L.b[o];
            for (int i = 0; i < L.in; ++i) s += L.w[o * L.in + i] * cur[i];
            next[o] = (l + 1 < net.layers.size() && s < 0) ? 0.0 : s;
        }
        cur = std::move(next);
    }
    return cur;
}

double batch_loss(const Mlp& net, const std::vector<std::vector<double>>& states,
                  const std::vector<int>& actions,
                  const std::vector<double>& targets) {
    double loss = 0;
    for (size_t k = 0; k < states.size(); ++k) {
        const double err = targets[k] - net.forward(states[k])[actions[k]];
        loss += err * err;
    }
    return loss / states.size();
}

std::vector<double> random_state(int n, Rng& rng) {
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> s(n);
    for (double& x : s) x = d(rng);
    return s;
}

}  // namespace

TEST_CASE("forward pass matches a dual implementation") {
    Rng rng(1);
    Mlp net = Mlp::make(6, 10, 8, rng);
    CHECK(net.layers.size() == 3);
    CHECK(net.input_size() == 6);
    CHECK(net.output_size() == 8);
    for (int t = 0; t < 50; ++t) {
        const auto x = random_state(6, rng);
        const auto got = net.forward(x);
        const auto want = forward_oracle(net, x);
        REQUIRE(got.size() == 8);
        for (int o = 0; o < 8; ++o)
            CHECK(got[o] == doctest::Approx(want[o]).epsilon(1e-12));
    }
}

TEST_CASE("zero parameters give zero output") {
    Rng rng(2);
    Mlp net = Mlp::make(4, 4, 8, rng);
    for (auto& l : net.layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    for (double v : net.forward(std::vector<double>(4, 0.7)))
        CHECK(v == 0.0);
}

TEST_CASE("initialization is fan-in bounded and seed-reproducible") {
    Rng a(3), b(3), c(4);
    Mlp na = Mlp::make(4, 4, 8, a);
    Mlp nb = Mlp::make(4, 4, 8, b);
    Mlp nc = Mlp::make(4, 4, 8, c);
    CHECK(na.param_hash() == nb.param_hash());
    CHECK(na.param_hash() != nc.param_hash());
    for (const auto& l : na.layers) {
        const double bound = std::sqrt(1.0 / l.in);
        for (double w : l.w) CHECK(std::abs(w) <= bound);
        for (double bv : l.b) CHECK(std::abs(bv) <= bound);
    }
}

TEST_CASE("analytic gradients agree with central finite differences") {
    Rng rng(5);
    Mlp net = Mlp::make(4, 4, 8, rng);
    std::vector<std::vector<double>> states;
    std::vector<int> actions;
    std::vector<double> targets;
    std::uniform_int_distribution<int> act(0, 7);
    std::uniform_real_distribution<double> tgt(-2, 2);
    for (int k = 0; k < 16; ++k) {
        states.push_back(random_state(4, rng));
        actions.push_back(act(rng));
        targets.push_back(tgt(rng));
    }
    std::vector<std::span<const double>> views(states.begin(), states.end());
    const Gradients g = loss_gradients(net, views, actions, targets);
    CHECK(g.loss == doctest::Approx(batch_loss(net, states, actions, targets)));

    const double h = 1e-6;
    int checked = 0;
    for (size_t l = 0; l < net.layers.size(); ++l) {
        auto probe = [&](std::vector<double>& param, const std::vector<double>& grad) {
            std::uniform_int_distribution<size_t> pick(0, param.size() - 1);
            for (int t = 0; t < 10; ++t) {
                const size_t i = pick(rng);
                const double keep = param[i];
                param[i] = keep + h;
                const double up = batch_loss(net, states, actions, targets);
                param[i] = keep - h;
                const double dn = batch_loss(net, states, actions, targets);
                param[i] = keep;
                const double fd = (up - dn) / (2 * h);
                const double tol = std::max(1e-6, 1e-4 * std::abs(fd));
                CHECK(std::abs(grad[i] - fd) <= tol);
                ++checked;
            }
        };
        probe(net.layers[l].w, g.w[l]);
        probe(net.layers[l].b, g.b[l]);
    }
    CHECK(checked >= 60);
}

TEST_CASE("train step fits a tiny fixed batch") {
    Rng rng(6);
    Mlp net = Mlp::make(4, 8, 8, rng);
    AdamState opt = AdamState::make(net);
    std::vector<std::vector<double>> states{random_state(4, rng),
                                            random_state(4, rng)};
    std::vector<std::span<const double>> views(states.begin(), states.end());
    const std::vector<int> actions{1, 6};
    const std::vector<double> targets{0.8, -0.4};
    double first = -1, last = -1;
    for (int it = 0; it < 400; ++it) {
        last = train_step(net, opt, views, actions, targets, 1e-2);
        if (it == 0) first = last;
    }
    CHECK(first > last);
    CHECK(last < 1e-4);
    CHECK(opt.step == 400);
}

TEST_CASE("targets equal to predictions give zero loss") {
    Rng rng(7);
    Mlp net = Mlp::make(4, 4, 8, rng);
    AdamState opt = AdamState::make(net);
    std::vector<std::vector<double>> states{random_state(4, rng)};
    std::vector<std::span<const double>> views(states.begin(), states.end());
    const std::vector<int> actions{3};
    const std::vector<double> targets{net.forward(states[0])[3]};
    CHECK(train_step(net, opt, views, actions, targets, 1e-3) ==
          doctest::Approx(0.0));
}

TEST_CASE("non-finite targets are rejected") {
    Rng rng(8);
    Mlp net = Mlp::make(4, 4, 8, rng);
    AdamState opt = AdamState::make(net);
    std::vector<std::vector<double>> states{random_state(4, rng)};
    std::vector<std::span<const double>> views(states.begin(), states.end());
    CHECK_THROWS_AS(
        train_step(net, opt, views, {0}, {std::nan("")}, 1e-3),
        std::invalid_argument);
    CHECK_THROWS_AS(
        train_step(net, opt, views, {0}, {std::numeric_limits<double>::infinity()},
                   1e-3),
        std::invalid_argument);
}

TEST_CASE("soft update is the exact convex blend") {
    Rng rng(9);
    Mlp dst = Mlp::make(4, 4, 8, rng);
    Mlp src = Mlp::make(4, 4, 8, rng);
    const Mlp before = dst;
    soft_update(dst, src, 0.25);
    for (size_t l = 0; l < dst.layers.size(); ++l)
        for (size_t i = 0; i < dst.layers[l].w.size(); ++i)
            CHECK(dst.layers[l].w[i] ==
                  doctest::Approx(0.25 * src.layers[l].w[i] +
                                  0.75 * before.layers[l].w[i]));

    Mlp pinned = before;
    soft_update(pinned, src, 1.0);
    CHECK(pinned.param_hash() == src.param_hash());
    Mlp frozen = before;
    soft_update(frozen, src, 0.0);
    CHECK(frozen.param_hash() == before.param_hash());

    Mlp other = Mlp::make(5, 4, 8, rng);
    CHECK_THROWS_AS(soft_update(other, src, 0.5), std::logic_error);
}

TEST_CASE("checkpoint round trip is bit exact") {
    Rng rng(10);
    Mlp net = Mlp::make(27, 16, 8, rng);
    const std::string path = "roundtrip.ckpt";
    save_checkpoint(net, path);
    const Mlp back = load_checkpoint(path);
    CHECK(back.same_shape(net));
    CHECK(back.param_hash() == net.param_hash());
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_checkpoint("no-such-file.ckpt"), std::runtime_error);
}

TEST_CASE("replay buffer is a FIFO ring") {
    ReplayBuffer buf(4);
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
    Rng rng(11);
    CHECK_THROWS_AS(buf.sample(1, rng), std::logic_error);
    for (int i = 0; i < 5; ++i) {
        Transition t;
        t.reward = i;
        buf.push(std::move(t));
    }
    CHECK(buf.size() == 4);
    CHECK(buf.capacity() == 4);
    // transition 0 was evicted; ages run oldest to newest
    for (int age = 0; age < 4; ++age)
        CHECK(buf.at_age(age).reward == doctest::Approx(age + 1));
    CHECK_THROWS_AS(buf.sample(5, rng), std::logic_error);
    const auto batch = buf.sample(4, rng);
    for (const Transition* t : batch) CHECK(t->reward >= 1);
}

TEST_CASE("replay sampling is uniform") {
    const int n = 16;
    ReplayBuffer buf(n);
    for (int i = 0; i < n; ++i) {
        Transition t;
        t.action = i;
        buf.push(std::move(t));
    }
    Rng rng(12);
    const int draws = 100000;
    std::vector<int> counts(n, 0);
    for (int batch = 0; batch < draws / n; ++batch)
        for (const Transition* t : buf.sample(n, rng)) ++counts[t->action];
    const double expected = static_cast<double>(draws) / n;
    double chi2 = 0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 15 dof, upper 1% critical value
    CHECK(chi2 < 30.58);
}
