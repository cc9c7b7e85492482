#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "agrisim/rng.hpp"

namespace agrisim {

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

// FIFO ring buffer with uniform with-replacement sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
        ring_.reserve(capacity_);
    }

    void push(Transition t) {
        if (ring_.size() < capacity_) {
            ring_.push_back(std::move(t));
        } else {
            ring_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const {
        if (ring_.size() < batch)
            throw std::logic_error("ReplayBuffer::sample: underfilled buffer");
        std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
        std::vector<const Transition*> out(batch);
        for (auto& p : out) p = &ring_[pick(rng)];
        return out;
    }

    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }

    // Index 0 is the oldest stored transition.
    const Transition& at_age(std::size_t i) const {
        return ring_[(head_ + i) % ring_.size()];
    }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next eviction slot once full
    std::vector<Transition> ring_;
};

}  // namespace agrisim
