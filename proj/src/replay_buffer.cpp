#include "dockrl/replay_buffer.hpp"

#include <string>

#include "dockrl/errors.hpp"

namespace dockrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw DomainError("replay buffer capacity must be > 0");
  data_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  if (data_.size() < capacity_) {
    data_.push_back(t);
  } else {
    data_[cursor_] = t;
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(
    Rng& rng, std::size_t batch_size) const {
  if (data_.size() < batch_size || batch_size == 0) {
    throw UsageError("replay buffer holds " + std::to_string(data_.size()) +
                     " transitions, cannot sample " +
                     std::to_string(batch_size));
  }
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(Rng& rng,
                                             std::size_t batch_size) const {
  std::vector<Transition> out;
  out.reserve(batch_size);
  for (std::size_t i : sample_indices(rng, batch_size)) out.push_back(data_[i]);
  return out;
}

TransitionBatch ReplayBuffer::sample_batch(Rng& rng, std::size_t batch_size,
                                           double reward_scale) const {
  const auto idx = sample_indices(rng, batch_size);
  const auto n = static_cast<Eigen::Index>(batch_size);
  TransitionBatch b{MatrixF(kObsDim, n), MatrixF(kActDim, n), MatrixF(1, n),
                    MatrixF(kObsDim, n), MatrixF(1, n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    const Transition& t = data_[idx[c]];
    for (int k = 0; k < kObsDim; ++k) {
      b.states(k, c) = static_cast<float>(t.state[k]);
      b.next_states(k, c) = static_cast<float>(t.next_state[k]);
    }
    for (int k = 0; k < kActDim; ++k) {
      b.actions(k, c) = static_cast<float>(t.action[k]);
    }
    b.rewards(0, c) = static_cast<float>(t.reward * reward_scale);
    b.not_done(0, c) = t.terminal ? 0.0f : 1.0f;
  }
  return b;
}

}  // namespace dockrl
