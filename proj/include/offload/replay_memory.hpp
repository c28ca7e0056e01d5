#pragma once

#include <stdexcept>
#include <vector>

#include "offload/rng.hpp"

namespace offload {

/// One experience tuple [S, a, R, S'] plus a terminal flag for the last
/// task of a workflow (no successor state).
struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

/// Fixed-capacity ring buffer of transitions with uniform with-replacement
/// sampling.
class ReplayMemory {
public:
    explicit ReplayMemory(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("replay capacity must be positive");
        buf_.reserve(capacity);
    }

    void push(Transition t) {
        if (static_cast<int>(buf_.size()) < capacity_) {
            buf_.push_back(std::move(t));
        } else {
            buf_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return buf_.size(); }
    int capacity() const { return capacity_; }
    bool empty() const { return buf_.empty(); }

    /// Logical indexing, oldest first.
    const Transition& at(std::size_t i) const {
        if (i >= buf_.size()) throw std::out_of_range("replay index out of range");
        if (static_cast<int>(buf_.size()) < capacity_) return buf_[i];
        return buf_[(head_ + i) % capacity_];
    }

    /// Uniform sample of batch_size transitions, with replacement.
    std::vector<const Transition*> sample(int batch_size, RandomStream& rs) const {
        if (buf_.empty()) throw std::runtime_error("cannot sample from an empty replay memory");
        std::vector<const Transition*> out;
        out.reserve(batch_size);
        for (int k = 0; k < batch_size; ++k)
            out.push_back(&buf_[rs.uniform_int(static_cast<int>(buf_.size()))]);
        return out;
    }

private:
    int capacity_;
    int head_ = 0;  // next eviction slot once full
    std::vector<Transition> buf_;
};

}  // namespace offload
