#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "qretail/common.hpp"

namespace qretail {

/// One replay tuple: (state, action index, reward, next state, terminal).
struct Experience {
  StateVector state;
  int action = 0;
  double reward = 0.0;
  StateVector next_state;
  bool terminal = false;
};

/// Fixed-capacity experience store with oldest-first eviction and uniform
/// without-replacement minibatch sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000) : capacity_(capacity) {
    if (capacity_ == 0) throw config_error("replay capacity must be positive");
  }

  void push(Experience e) {
    if (e.state.size() != e.next_state.size()) {
      throw contract_error("push: state and next_state lengths differ");
    }
    if (e.action < 0) throw contract_error("push: negative action index");
    if (!std::isfinite(e.reward)) throw contract_error("push: non-finite reward");
    entries_.push_back(std::move(e));
    if (entries_.size() > capacity_) entries_.pop_front();
    ++insert_count_;
  }

  /// Draws batch_size distinct entries uniformly. The buffer is unchanged.
  template <typename Rng>
  std::vector<Experience> sample(std::size_t batch_size, Rng& rng) const {
    if (batch_size == 0) throw contract_error("sample: batch_size must be positive");
    if (entries_.size() < batch_size) {
      throw contract_error("sample: buffer holds " +
                           std::to_string(entries_.size()) + " entries, need " +
                           std::to_string(batch_size));
    }
    std::vector<std::size_t> indices(entries_.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    // Partial Fisher-Yates: first batch_size slots end up uniform without
    // replacement.
    std::vector<Experience> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, indices.size() - 1);
      std::swap(indices[i], indices[pick(rng)]);
      batch.push_back(entries_[indices[i]]);
    }
    return batch;
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t insert_count() const { return insert_count_; }
  const Experience& at(std::size_t i) const { return entries_.at(i); }

 private:
  std::size_t capacity_;
  std::deque<Experience> entries_;
  std::uint64_t insert_count_ = 0;
};

}  // namespace qretail
