#include <doctest.h>

#include <algorithm>
#include <set>

#include "infoasym/envs/grid_nav.hpp"
#include "infoasym/errors.hpp"
#include "infoasym/numerics/rng.hpp"
#include "infoasym/observation.hpp"

using namespace infoasym;

namespace {

ObservationSpec small_spec(std::size_t window = 1) {
  return ObservationSpec({{"proprio", 4}, {"task_id", 3}}, window);
}

std::vector<double> iota_vec(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
  return v;
}

}  // namespace

TEST_SUITE("observation") {
  TEST_CASE("feature group layout") {
    const auto s = small_spec(2);
    CHECK(s.step_size() == 7);
    CHECK(s.total_size() == 14);
    CHECK(s.offset_of("task_id") == 4);
    CHECK(s.has_group("proprio"));
    CHECK_FALSE(s.has_group("box"));
    CHECK_THROWS_AS(ObservationSpec({{"a", 1}, {"a", 2}}), ConfigError);
  }

  TEST_CASE("split by preset") {
    const auto spec = small_spec();
    const auto obs = iota_vec(7);
    const auto full = split(obs, spec, MaskSpec::full_information());
    CHECK(full.default_features == obs);
    CHECK(full.goal_features.empty());
    const auto none = split(obs, spec, MaskSpec::nothing());
    CHECK(none.default_features.empty());
    CHECK(none.goal_features == obs);
    const auto prop = split(obs, spec, MaskSpec::proprio_only());
    CHECK(prop.default_features == std::vector<double>{1, 2, 3, 4});
    CHECK(prop.goal_features == std::vector<double>{5, 6, 7});
    CHECK_THROWS_AS(split(obs, spec, MaskSpec::custom({"box_position"})), ConfigError);
  }

  TEST_CASE("split is a partition at every window position") {
    const ObservationSpec spec({{"proprio", 2}, {"targets", 3}, {"task_id", 2}, {"last_action", 4}}, 3);
    const auto obs = iota_vec(spec.total_size());
    for (const auto& mask : {MaskSpec::proprio_only(), MaskSpec::task_subset({"targets"}), MaskSpec::last_action_only(),
                             MaskSpec::full_information(), MaskSpec::nothing()}) {
      const auto idx = compile_mask(spec, mask);
      const auto parts = split(obs, idx);
      std::multiset<double> all(parts.default_features.begin(), parts.default_features.end());
      all.insert(parts.goal_features.begin(), parts.goal_features.end());
      CHECK(all == std::multiset<double>(obs.begin(), obs.end()));
      CHECK(merge(parts, idx) == obs);
      // independent layout: the visible groups at each window slot
      const auto visible = mask.resolve(spec);
      std::vector<double> expect;
      for (std::size_t w = 0; w < 3; ++w)
        for (const auto& g : spec.groups())
          if (std::find(visible.begin(), visible.end(), g.name) != visible.end())
            for (std::size_t i = 0; i < g.length; ++i) expect.push_back(obs[w * spec.step_size() + spec.offset_of(g.name) + i]);
      CHECK(parts.default_features == expect);
    }
    const auto prop = MaskSpec::proprio_only().resolve(spec);
    CHECK(prop == std::vector<std::string>{"proprio"});
    const auto la = MaskSpec::last_action_only().resolve(spec);
    CHECK(la == std::vector<std::string>{"last_action"});
    const auto sub = MaskSpec::task_subset({"targets"}).resolve(spec);
    CHECK(sub == std::vector<std::string>{"proprio", "targets"});
  }

  TEST_CASE("goal features never leak into the default input") {
    const auto spec = small_spec(2);
    const auto idx = compile_mask(spec, MaskSpec::proprio_only());
    Rng rng(3);
    std::vector<double> obs(spec.total_size());
    for (auto& x : obs) x = rng.normal();
    const auto base = default_features(obs, idx);
    for (std::size_t i : idx.goal_indices) {
      auto p = obs;
      p[i] += 10.0;
      CHECK(default_features(p, idx) == base);
    }
  }

  TEST_CASE("mask presets by name") {
    CHECK(MaskSpec::from_preset_name("proprio_only").preset() == MaskPreset::ProprioOnly);
    CHECK(MaskSpec::from_preset_name("nothing").preset() == MaskPreset::Nothing);
    CHECK(MaskSpec::from_preset_name("full_information").preset() == MaskPreset::FullInformation);
    CHECK(MaskSpec::from_preset_name("last_action_only").preset() == MaskPreset::LastActionOnly);
    CHECK_THROWS_AS(MaskSpec::from_preset_name("everything"), ConfigError);
  }

  TEST_CASE("history window pads with zeros at episode start") {
    HistoryEncoder enc(small_spec(2));
    const auto first = enc.push(iota_vec(7));
    for (std::size_t i = 0; i < 7; ++i) CHECK(first[i] == 0.0);
    for (std::size_t i = 0; i < 7; ++i) CHECK(first[7 + i] == i + 1.0);
    std::vector<double> second(7, -1.0);
    const auto h = enc.push(second);
    CHECK(std::equal(h.begin(), h.begin() + 7, first.begin() + 7));
    CHECK(std::all_of(h.begin() + 7, h.end(), [](double x) { return x == -1.0; }));
    enc.reset();
    const auto cur = enc.current();
    CHECK(std::all_of(cur.begin(), cur.end(), [](double x) { return x == 0.0; }));
    CHECK_THROWS_AS(enc.push(std::vector<double>{1.0}), InvalidInput);
  }

  TEST_CASE("encoding helpers") {
    CHECK(one_hot(2, 3) == std::vector<double>{0, 0, 1});
    for (int x = 0; x < 8; ++x) CHECK(normalize_coordinate(x, 8) == doctest::Approx(2.0 * x / 7.0 - 1.0).epsilon(1e-15));
  }

  TEST_CASE("grid navigation observation fixture") {
    GridNavConfig c;
    c.num_targets = 3;
    GridNav env(c);
    GridNav::State s;
    s.agent = {3, 5};
    s.targets = {{0, 0}, {7, 7}, {1, 6}};
    s.task = 2;
    s.rng = Rng(1);
    const auto f = env.observe(s);
    const std::vector<double> expect{2 * 3 / 7.0 - 1, 2 * 5 / 7.0 - 1, -1, -1, 1, 1, 2 / 7.0 - 1, 12 / 7.0 - 1, 0, 0, 1};
    REQUIRE(f.size() == expect.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  }
}
