#ifndef DOCKRL_REPLAY_BUFFER_HPP_
#define DOCKRL_REPLAY_BUFFER_HPP_

#include <cstddef>
#include <vector>

#include "dockrl/agent.hpp"
#include "dockrl/rng.hpp"

namespace dockrl {

// Column-stacked minibatch.  not_done is 0 for terminal transitions.
struct TransitionBatch {
  MatrixF states;       // kObsDim x n
  MatrixF actions;      // kActDim x n
  MatrixF rewards;      // 1 x n
  MatrixF next_states;  // kObsDim x n
  MatrixF not_done;     // 1 x n
};

// Fixed-capacity ring; the oldest entry is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  // Uniform with replacement.  Throws UsageError if size() < batch_size.
  std::vector<Transition> sample(Rng& rng, std::size_t batch_size) const;
  TransitionBatch sample_batch(Rng& rng, std::size_t batch_size,
                               double reward_scale = 1.0) const;

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_.at(i); }

 private:
  std::vector<std::size_t> sample_indices(Rng& rng,
                                          std::size_t batch_size) const;
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> data_;
};

}  // namespace dockrl

#endif  // DOCKRL_REPLAY_BUFFER_HPP_
