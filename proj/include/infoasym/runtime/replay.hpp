#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <vector>

#include "infoasym/algorithms/trajectory.hpp"
#include "infoasym/numerics/mlp.hpp"
#include "infoasym/numerics/rng.hpp"

namespace infoasym {

/// FIFO store of complete unroll windows. Capacity counts transitions; the
/// oldest windows are evicted once the total exceeds it. Appends and samples
/// are atomic at window granularity.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t transitions() const;
  std::size_t windows() const;
  /// Total transitions ever appended.
  std::uint64_t total_appended() const;

  void push(Window w);
  /// Uniform over stored windows, with replacement.
  std::vector<Window> sample(std::size_t count, Rng& rng) const;

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::deque<Window> windows_;
  std::size_t transitions_ = 0;
  std::uint64_t appended_ = 0;
};

/// Immutable copy of the acting parameters.
struct ParamSnapshot {
  std::uint64_t version = 0;
  Mlp policy;
  Mlp default_policy;
};

/// Latest-snapshot holder. Publishing swaps a pointer; readers keep whatever
/// complete snapshot they fetched.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::shared_ptr<const ParamSnapshot> initial) : current_(std::move(initial)) {}

  std::shared_ptr<const ParamSnapshot> latest() const;
  /// Versions must increase.
  void publish(std::shared_ptr<const ParamSnapshot> s);

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const ParamSnapshot> current_;
};

}  // namespace infoasym
