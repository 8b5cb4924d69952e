#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace infoasym {

struct FeatureGroup {
  std::string name;
  std::size_t length = 0;
};

/// Per-step feature layout (named, disjoint groups in order) plus the history
/// window W. A full history vector is W per-step vectors, oldest first.
class ObservationSpec {
 public:
  ObservationSpec() = default;
  ObservationSpec(std::vector<FeatureGroup> groups, std::size_t window = 1);

  const std::vector<FeatureGroup>& groups() const noexcept { return groups_; }
  std::size_t window() const noexcept { return window_; }
  std::size_t step_size() const noexcept { return step_size_; }
  std::size_t total_size() const noexcept { return step_size_ * window_; }

  bool has_group(std::string_view name) const noexcept;
  /// Offset of a group inside one per-step vector.
  std::size_t offset_of(std::string_view name) const;
  const FeatureGroup& group(std::string_view name) const;

  ObservationSpec with_window(std::size_t window) const { return ObservationSpec(groups_, window); }

 private:
  std::vector<FeatureGroup> groups_;
  std::size_t window_ = 1;
  std::size_t step_size_ = 0;
};

enum class MaskPreset { ProprioOnly, TaskSubset, FullInformation, Nothing, LastActionOnly, Custom };

/// Which feature groups the default policy may see. Everything else is goal-directed
/// information visible only to the agent policy.
class MaskSpec {
 public:
  static MaskSpec proprio_only() { return MaskSpec(MaskPreset::ProprioOnly, {}); }
  /// Proprioception plus the listed task groups.
  static MaskSpec task_subset(std::vector<std::string> groups) { return MaskSpec(MaskPreset::TaskSubset, std::move(groups)); }
  static MaskSpec full_information() { return MaskSpec(MaskPreset::FullInformation, {}); }
  static MaskSpec nothing() { return MaskSpec(MaskPreset::Nothing, {}); }
  static MaskSpec last_action_only() { return MaskSpec(MaskPreset::LastActionOnly, {}); }
  static MaskSpec custom(std::vector<std::string> groups) { return MaskSpec(MaskPreset::Custom, std::move(groups)); }

  /// Accepts a preset name ("proprio_only", "full_information", "nothing", "last_action_only")
  /// or is built from an explicit list of group names with custom().
  static MaskSpec from_preset_name(std::string_view name);

  MaskPreset preset() const noexcept { return preset_; }
  const std::vector<std::string>& extra_groups() const noexcept { return groups_; }

  /// Visible group names in observation order. Throws ConfigError on unknown groups.
  std::vector<std::string> resolve(const ObservationSpec& spec) const;
  std::string describe() const;

 private:
  MaskSpec(MaskPreset preset, std::vector<std::string> groups) : preset_(preset), groups_(std::move(groups)) {}

  MaskPreset preset_ = MaskPreset::FullInformation;
  std::vector<std::string> groups_;
};

/// Precomputed feature indices for one (spec, mask) pair.
struct MaskIndex {
  std::vector<std::size_t> default_indices;
  std::vector<std::size_t> goal_indices;
  std::size_t full_size = 0;

  std::size_t default_size() const noexcept { return default_indices.size(); }
};

MaskIndex compile_mask(const ObservationSpec& spec, const MaskSpec& mask);

struct SplitFeatures {
  std::vector<double> default_features;  // x^D
  std::vector<double> goal_features;     // x^G
};

SplitFeatures split(std::span<const double> history, const ObservationSpec& spec, const MaskSpec& mask);
SplitFeatures split(std::span<const double> history, const MaskIndex& index);
/// x^D only.
std::vector<double> default_features(std::span<const double> history, const MaskIndex& index);
/// Inverse of split.
std::vector<double> merge(const SplitFeatures& parts, const MaskIndex& index);

/// Keeps the last W per-step feature vectors; slots before the episode start are zero.
class HistoryEncoder {
 public:
  explicit HistoryEncoder(ObservationSpec spec) : spec_(std::move(spec)) {}

  const ObservationSpec& spec() const noexcept { return spec_; }
  void reset();
  /// Appends one per-step vector and returns the full history vector.
  std::vector<double> push(std::span<const double> step_features);
  std::vector<double> current() const;

 private:
  ObservationSpec spec_;
  std::deque<std::vector<double>> steps_;
};

std::vector<double> one_hot(std::size_t index, std::size_t n);
/// Maps a cell coordinate in [0, n-1] onto [-1, 1].
double normalize_coordinate(double x, std::size_t n);

}  // namespace infoasym
