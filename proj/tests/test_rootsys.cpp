#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "homflow/rootsys.hpp"
#include "oracles.hpp"

using namespace homflow;
using namespace homflow::testing;

namespace {

WeightVec wv(std::vector<std::int64_t> v) {
  WeightVec w;
  for (auto x : v) w.emplace_back(x);
  return w;
}

std::vector<RootSystemType> admissible_up_to_rank_8() {
  std::vector<RootSystemType> out;
  for (char f : {'A', 'B', 'C', 'D', 'E', 'F', 'G'})
    for (int n = 1; n <= 8; ++n) {
      RootSystemType t{RootFamily(f), n};
      if (admissible_type(t)) out.push_back(t);
    }
  return out;
}

}  // namespace

TEST_CASE("type parsing and admissibility") {
  CHECK(parse_type("A1") == RootSystemType{RootFamily::A, 1});
  CHECK(parse_type("B4") == RootSystemType{RootFamily::B, 4});
  CHECK(parse_type("E8") == RootSystemType{RootFamily::E, 8});
  CHECK(parse_type("G2") == RootSystemType{RootFamily::G, 2});
  CHECK(parse_type("D12") == RootSystemType{RootFamily::D, 12});
  CHECK(type_name(parse_type("F4")) == "F4");

  // Low-rank coincidences (B1=A1, C2=B2, D3=A3) and out-of-range ranks are
  // rejected rather than silently aliased.
  CHECK_THROWS_AS(parse_type("A0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("B1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("C2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("D3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("E9"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("E5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("F5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("G3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("H3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("B"), std::invalid_argument);
  CHECK_THROWS_AS(parse_type("4B"), std::invalid_argument);
}

TEST_CASE("positive root counts match the classical closed forms") {
  for (const auto& t : admissible_up_to_rank_8()) {
    RootSystem rs = build_root_system(t);
    const int n = t.rank;
    int expect = -1;
    switch (t.family) {
      case RootFamily::A: expect = n * (n + 1) / 2; break;
      case RootFamily::B:
      case RootFamily::C: expect = n * n; break;
      case RootFamily::D: expect = n * (n - 1); break;
      case RootFamily::E: expect = (n == 6) ? 36 : (n == 7) ? 63 : 120; break;
      case RootFamily::F: expect = 24; break;
      case RootFamily::G: expect = 6; break;
    }
    INFO("type ", type_name(t));
    CHECK(int(rs.positive.size()) == expect);
    CHECK(positive_root_count(t) == expect);
    // Heights are coefficient sums, simple roots sit first at height 1.
    for (std::size_t i = 0; i < rs.positive.size(); ++i) {
      int h = 0;
      for (int c : rs.positive[i]) h += c;
      CHECK(rs.height_of(int(i)) == h);
    }
    for (int i = 0; i < n; ++i) {
      RootCoeffs simple(n, 0);
      simple[i] = 1;
      CHECK(rs.is_root(simple));
    }
  }
}

TEST_CASE("abstract roots agree with the Euclidean-coordinate realizations") {
  const char* names[] = {"A1", "A2", "A3", "A4", "B2", "B3", "B4",
                         "C3", "C4", "D4", "F4", "G2"};
  for (const char* name : names) {
    INFO("type ", name);
    RootSystem rs = build_root_system(parse_type(name));
    EuclidRoots er = euclid_roots(rs.type);
    REQUIRE(er.all.size() == 2 * rs.positive.size());

    std::unordered_set<IntVec, VecHash> image;
    for (const auto& c : rs.positive) {
      IntVec v = to_euclid(er, c);
      REQUIRE(er.set.count(v));        // each abstract root is a genuine root
      CHECK(image.insert(v).second);   // and no two map to the same vector
      image.insert(vec_neg(v));
    }
    CHECK(image.size() == er.all.size());  // together with negatives: all of them

    // Strong orthogonality agrees with the sum/difference definition applied
    // to coordinates.
    for (int i = 0; i < int(rs.positive.size()); ++i)
      for (int j = i + 1; j < int(rs.positive.size()); ++j) {
        IntVec a = to_euclid(er, rs.positive[i]);
        IntVec b = to_euclid(er, rs.positive[j]);
        CHECK(strongly_orthogonal(rs, i, j) == euclid_strongly_orthogonal(er, a, b));
        if (strongly_orthogonal(rs, i, j)) CHECK(dot(a, b) == 0);
      }
  }
}

TEST_CASE("highest roots carry the classical coefficient vectors") {
  auto expect_highest = [](const std::string& name, RootCoeffs want) {
    RootSystem rs = build_root_system(parse_type(name));
    INFO("type ", name);
    CHECK(highest_root(rs) == want);
    // The highest root has height h-1 (Coxeter number minus one), which the
    // coefficient sum reproduces; every other positive root sits at height
    // at most that.
    for (std::size_t i = 0; i < rs.positive.size(); ++i)
      CHECK(rs.height_of(int(i)) <= rs.height_of(rs.highest));
  };
  expect_highest("A1", {1});
  expect_highest("A4", {1, 1, 1, 1});
  expect_highest("B2", {1, 2});
  expect_highest("B5", {1, 2, 2, 2, 2});
  expect_highest("C3", {2, 2, 1});
  expect_highest("C5", {2, 2, 2, 2, 1});
  expect_highest("D4", {1, 2, 1, 1});
  expect_highest("D6", {1, 2, 2, 2, 1, 1});
  expect_highest("E6", {1, 2, 2, 3, 2, 1});
  expect_highest("E7", {2, 2, 3, 4, 3, 2, 1});
  expect_highest("E8", {2, 3, 4, 6, 5, 4, 3, 2});
  expect_highest("F4", {2, 3, 4, 2});
  expect_highest("G2", {3, 2});
}

TEST_CASE("dominant system beats every strongly orthogonal system (small ranks, exhaustive)") {
  const char* names[] = {"A1", "A2", "A3", "A4", "B2", "B3", "B4",
                         "C3", "C4", "D4", "F4", "G2"};
  for (const char* name : names) {
    INFO("type ", name);
    RootSystem rs = build_root_system(parse_type(name));
    StrongOrthSystem q = dominant_strong_orthogonal_system(rs);
    REQUIRE(is_strong_orthogonal_system(rs, q));
    WeightVec rho_q = root_sum(rs, q);

    auto everything = all_strong_orth_systems(rs);
    REQUIRE(!everything.empty());
    int best_height = 0;
    for (const auto& sys : everything) {
      REQUIRE(is_strong_orthogonal_system(rs, sys));
      CHECK(dominates_on_chamber(rho_q, root_sum(rs, sys)));
      best_height = std::max(best_height, total_height(rs, sys));
    }
    CHECK(total_height(rs, q) == best_height);
  }
}

TEST_CASE("dominant system root sums at small rank") {
  auto rho_of = [](const std::string& name) {
    RootSystem rs = build_root_system(parse_type(name));
    return root_sum(rs, dominant_strong_orthogonal_system(rs));
  };
  CHECK(rho_of("A1") == wv({1}));
  CHECK(rho_of("A2") == wv({1, 1}));
  CHECK(rho_of("A3") == wv({1, 2, 1}));
  CHECK(rho_of("A4") == wv({1, 2, 2, 1}));
  CHECK(rho_of("B2") == wv({2, 2}));
  CHECK(rho_of("B3") == wv({2, 3, 3}));
  CHECK(rho_of("B4") == wv({2, 4, 4, 4}));   // not the greedy highest-root cascade
  CHECK(rho_of("C3") == wv({2, 4, 3}));
  CHECK(rho_of("C4") == wv({2, 4, 6, 4}));
  CHECK(rho_of("D4") == wv({2, 4, 2, 2}));
  CHECK(rho_of("F4") == wv({4, 6, 8, 4}));
  CHECK(rho_of("G2") == wv({4, 2}));
}

TEST_CASE("dominant system sizes match the orthogonal-packing counts") {
  auto size_of = [](RootSystemType t) {
    RootSystem rs = build_root_system(t);
    return int(dominant_strong_orthogonal_system(rs).size());
  };
  for (const auto& t : admissible_up_to_rank_8()) {
    const int n = t.rank;
    int expect = -1;
    switch (t.family) {
      case RootFamily::A: expect = (n + 1) / 2; break;
      case RootFamily::B:
      case RootFamily::C: expect = n; break;
      case RootFamily::D: expect = (n % 2 == 0) ? n : n - 1; break;
      case RootFamily::E: expect = (n == 6) ? 4 : n; break;
      case RootFamily::F: expect = 4; break;
      case RootFamily::G: expect = 2; break;
    }
    INFO("type ", type_name(t));
    CHECK(size_of(t) == expect);
  }
}

TEST_CASE("decay-weight dominance over the highest root reproduces the type table") {
  for (const auto& t : admissible_up_to_rank_8()) {
    RootSystem rs = build_root_system(t);
    WeightVec xi = spherical_decay_weight(rs);
    WeightVec lambda1 = to_weight(highest_root(rs));
    INFO("type ", type_name(t));
    CHECK(strong_decay_type(t) == dominates_on_chamber(xi, lambda1));
  }
  // Spot values on both sides of the divide.
  CHECK(strong_decay_type(parse_type("B4")));
  CHECK(strong_decay_type(parse_type("D5")));
  CHECK(strong_decay_type(parse_type("E6")));
  CHECK(strong_decay_type(parse_type("F4")));
  CHECK_FALSE(strong_decay_type(parse_type("A3")));
  CHECK_FALSE(strong_decay_type(parse_type("B3")));
  CHECK_FALSE(strong_decay_type(parse_type("C5")));
  CHECK_FALSE(strong_decay_type(parse_type("G2")));
}

TEST_CASE("chamber dominance is coefficientwise") {
  CHECK(dominates_on_chamber(wv({1, 1}), wv({1, 0})));
  CHECK(dominates_on_chamber(wv({1, 1}), wv({1, 1})));
  CHECK_FALSE(dominates_on_chamber(wv({1, 0}), wv({0, 1})));
  CHECK_FALSE(dominates_on_chamber(wv({0, 1}), wv({1, 0})));
  CHECK_FALSE(dominates_on_chamber(wv({2, 0}), wv({1, 1})));
  CHECK_THROWS_AS(dominates_on_chamber(wv({1}), wv({1, 1})), std::invalid_argument);
  // Fractional comparison is exact.
  WeightVec half{Rat(1, 2)};
  WeightVec third{Rat(1, 3)};
  CHECK(dominates_on_chamber(half, third));
  CHECK_FALSE(dominates_on_chamber(third, half));
}

TEST_CASE("json summary is well-formed and self-consistent") {
  RootSystem rs = build_root_system(parse_type("B4"));
  auto j = nlohmann::json::parse(root_system_to_json(rs));
  CHECK(j.at("type") == "B4");
  CHECK(j.at("rank") == 4);
  CHECK(j.at("positive_roots").size() == 16);
  CHECK(j.at("cartan").size() == 4);
  REQUIRE(j.at("highest_root").is_array());
  CHECK(j.at("highest_root") == nlohmann::json({1, 2, 2, 2}));
  REQUIRE(j.at("dominant_orthogonal_system").is_array());
  CHECK(j.at("dominant_orthogonal_system").size() == 4);
  REQUIRE(j.at("decay_weight").is_array());
  CHECK(j.at("decay_weight")[0] == "1");
  CHECK(j.at("decay_weight")[1] == "2");
}
