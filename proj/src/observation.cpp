#include "infoasym/observation.hpp"

#include <algorithm>

#include "infoasym/errors.hpp"

namespace infoasym {

ObservationSpec::ObservationSpec(std::vector<FeatureGroup> groups, std::size_t window)
    : groups_(std::move(groups)), window_(window) {
  if (window_ < 1) throw ConfigError("history window must be at least 1", "observation.window");
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (groups_[i].name == groups_[j].name) throw ConfigError("duplicate feature group '" + groups_[i].name + "'");
    step_size_ += groups_[i].length;
  }
}

bool ObservationSpec::has_group(std::string_view name) const noexcept {
  return std::any_of(groups_.begin(), groups_.end(), [&](const auto& g) { return g.name == name; });
}

std::size_t ObservationSpec::offset_of(std::string_view name) const {
  std::size_t offset = 0;
  for (const auto& g : groups_) {
    if (g.name == name) return offset;
    offset += g.length;
  }
  throw ConfigError("unknown feature group '" + std::string(name) + "'");
}

const FeatureGroup& ObservationSpec::group(std::string_view name) const {
  for (const auto& g : groups_)
    if (g.name == name) return g;
  throw ConfigError("unknown feature group '" + std::string(name) + "'");
}

MaskSpec MaskSpec::from_preset_name(std::string_view name) {
  if (name == "proprio_only") return proprio_only();
  if (name == "full_information") return full_information();
  if (name == "nothing") return nothing();
  if (name == "last_action_only") return last_action_only();
  throw ConfigError("unknown mask preset '" + std::string(name) + "'", "mask");
}

std::vector<std::string> MaskSpec::resolve(const ObservationSpec& spec) const {
  std::vector<std::string> wanted;
  switch (preset_) {
    case MaskPreset::ProprioOnly: wanted = {"proprio"}; break;
    case MaskPreset::TaskSubset:
      wanted = {"proprio"};
      wanted.insert(wanted.end(), groups_.begin(), groups_.end());
      break;
    case MaskPreset::FullInformation:
      for (const auto& g : spec.groups()) wanted.push_back(g.name);
      break;
    case MaskPreset::Nothing: break;
    case MaskPreset::LastActionOnly: wanted = {"last_action"}; break;
    case MaskPreset::Custom: wanted = groups_; break;
  }
  for (const auto& name : wanted)
    if (!spec.has_group(name)) throw ConfigError("mask references unknown feature group '" + name + "'", "mask");
  std::vector<std::string> ordered;
  for (const auto& g : spec.groups())
    if (std::find(wanted.begin(), wanted.end(), g.name) != wanted.end()) ordered.push_back(g.name);
  return ordered;
}

std::string MaskSpec::describe() const {
  switch (preset_) {
    case MaskPreset::ProprioOnly: return "proprio_only";
    case MaskPreset::FullInformation: return "full_information";
    case MaskPreset::Nothing: return "nothing";
    case MaskPreset::LastActionOnly: return "last_action_only";
    case MaskPreset::TaskSubset:
    case MaskPreset::Custom: {
      std::string s = preset_ == MaskPreset::TaskSubset ? "proprio" : "";
      for (const auto& g : groups_) s += (s.empty() ? "" : "+") + g;
      return s.empty() ? "nothing" : s;
    }
  }
  return "?";
}

MaskIndex compile_mask(const ObservationSpec& spec, const MaskSpec& mask) {
  const auto visible = mask.resolve(spec);
  MaskIndex index;
  index.full_size = spec.total_size();
  for (std::size_t slot = 0; slot < spec.window(); ++slot) {
    std::size_t offset = slot * spec.step_size();
    for (const auto& g : spec.groups()) {
      const bool shown = std::find(visible.begin(), visible.end(), g.name) != visible.end();
      auto& target = shown ? index.default_indices : index.goal_indices;
      for (std::size_t i = 0; i < g.length; ++i) target.push_back(offset + i);
      offset += g.length;
    }
  }
  return index;
}

SplitFeatures split(std::span<const double> history, const MaskIndex& index) {
  if (history.size() != index.full_size) throw InvalidInput("history vector does not match the observation spec");
  SplitFeatures out;
  out.default_features.reserve(index.default_indices.size());
  out.goal_features.reserve(index.goal_indices.size());
  for (auto i : index.default_indices) out.default_features.push_back(history[i]);
  for (auto i : index.goal_indices) out.goal_features.push_back(history[i]);
  return out;
}

SplitFeatures split(std::span<const double> history, const ObservationSpec& spec, const MaskSpec& mask) {
  return split(history, compile_mask(spec, mask));
}

std::vector<double> default_features(std::span<const double> history, const MaskIndex& index) {
  if (history.size() != index.full_size) throw InvalidInput("history vector does not match the observation spec");
  std::vector<double> out;
  out.reserve(index.default_indices.size());
  for (auto i : index.default_indices) out.push_back(history[i]);
  return out;
}

std::vector<double> merge(const SplitFeatures& parts, const MaskIndex& index) {
  if (parts.default_features.size() != index.default_indices.size() ||
      parts.goal_features.size() != index.goal_indices.size())
    throw InvalidInput("split parts do not match the mask");
  std::vector<double> out(index.full_size, 0.0);
  for (std::size_t i = 0; i < index.default_indices.size(); ++i) out[index.default_indices[i]] = parts.default_features[i];
  for (std::size_t i = 0; i < index.goal_indices.size(); ++i) out[index.goal_indices[i]] = parts.goal_features[i];
  return out;
}

void HistoryEncoder::reset() { steps_.clear(); }

std::vector<double> HistoryEncoder::push(std::span<const double> step_features) {
  if (step_features.size() != spec_.step_size()) throw InvalidInput("per-step features do not match the observation spec");
  steps_.emplace_back(step_features.begin(), step_features.end());
  while (steps_.size() > spec_.window()) steps_.pop_front();
  return current();
}

std::vector<double> HistoryEncoder::current() const {
  std::vector<double> out(spec_.total_size(), 0.0);
  // Newest step occupies the last slot; missing older slots stay zero.
  const std::size_t missing = spec_.window() - steps_.size();
  for (std::size_t i = 0; i < steps_.size(); ++i)
    std::copy(steps_[i].begin(), steps_[i].end(), out.begin() + static_cast<std::ptrdiff_t>((missing + i) * spec_.step_size()));
  return out;
}

std::vector<double> one_hot(std::size_t index, std::size_t n) {
  if (index >= n) throw InvalidInput("one_hot index out of range");
  std::vector<double> v(n, 0.0);
  v[index] = 1.0;
  return v;
}

double normalize_coordinate(double x, std::size_t n) {
  if (n < 2) return 0.0;
  return 2.0 * x / static_cast<double>(n - 1) - 1.0;
}

}  // namespace infoasym
