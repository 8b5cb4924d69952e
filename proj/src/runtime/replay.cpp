#include "infoasym/runtime/replay.hpp"

#include "infoasym/errors.hpp"

namespace infoasym {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidInput("replay capacity must be positive");
}

std::size_t ReplayBuffer::transitions() const {
  std::lock_guard lock(mu_);
  return transitions_;
}

std::size_t ReplayBuffer::windows() const {
  std::lock_guard lock(mu_);
  return windows_.size();
}

std::uint64_t ReplayBuffer::total_appended() const {
  std::lock_guard lock(mu_);
  return appended_;
}

void ReplayBuffer::push(Window w) {
  if (w.steps.empty()) throw InvalidInput("cannot store an empty window");
  if (w.steps.size() > capacity_) throw InvalidInput("window longer than the replay capacity");
  std::lock_guard lock(mu_);
  transitions_ += w.steps.size();
  appended_ += w.steps.size();
  windows_.push_back(std::move(w));
  while (transitions_ > capacity_) {
    transitions_ -= windows_.front().steps.size();
    windows_.pop_front();
  }
}

std::vector<Window> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  std::lock_guard lock(mu_);
  if (windows_.empty()) throw ContractViolation("sampling from an empty replay buffer");
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(windows_[rng.below(windows_.size())]);
  return out;
}

std::shared_ptr<const ParamSnapshot> SnapshotStore::latest() const {
  std::lock_guard lock(mu_);
  return current_;
}

void SnapshotStore::publish(std::shared_ptr<const ParamSnapshot> s) {
  std::lock_guard lock(mu_);
  if (current_ && s->version <= current_->version) throw ContractViolation("snapshot versions must increase");
  current_ = std::move(s);
}

}  // namespace infoasym
