#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "mdscan/contingency.hpp"
#include "mdscan/dataset.hpp"
#include "mdscan/distributions.hpp"
#include "mdscan/error.hpp"
#include "mdscan/information.hpp"
#include "mdscan/synth.hpp"
#include "oracles.hpp"

using namespace mdscan;

namespace {

const Column& col(const RawDataset& d, const std::string& name) {
  const Column* c = d.find(name);
  REQUIRE(c != nullptr);
  return *c;
}

SynthConfig small(ResponseKind kind, std::uint64_t seed = 1) {
  SynthConfig c;
  c.n_objects = 800;
  c.response = kind;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("default benchmark shape") {
  const RawDataset d = generate(SynthConfig{});
  CHECK(d.descriptors.size() == 351);
  CHECK(d.n_objects == 5000);
  CHECK(d.groups.size() == 351);
  CHECK(d.descriptors.front().name == "G1_1");
  CHECK(d.descriptors.back().name == "G7_200");
  CHECK(d.response.name == "Y");
}

TEST_CASE("responses follow their definitions") {
  for (ResponseKind kind : {ResponseKind::Sphere, ResponseKind::Xor3, ResponseKind::Checkerboard}) {
    const RawDataset d = generate(small(kind));
    const auto& x1 = col(d, "G1_1").values;
    const auto& x2 = col(d, "G1_2").values;
    const auto& x3 = col(d, "G1_3").values;
    for (std::size_t r = 0; r < d.n_objects; ++r) {
      bool want = false;
      if (kind == ResponseKind::Sphere) want = x1[r] * x1[r] + x2[r] * x2[r] + x3[r] * x3[r] > 0.9;
      if (kind == ResponseKind::Xor3) want = x1[r] * x2[r] * x3[r] < 0;
      if (kind == ResponseKind::Checkerboard)
        want = std::sin(2 * std::numbers::pi * x1[r]) * std::sin(2 * std::numbers::pi * x2[r]) *
                   std::sin(2 * std::numbers::pi * x3[r]) < 0;
      REQUIRE(d.response.values[r] == (want ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("same seed gives a bit-identical dataset, another seed does not") {
  std::ostringstream a, b, c;
  write_csv(generate(small(ResponseKind::Xor3, 5)), a);
  write_csv(generate(small(ResponseKind::Xor3, 5)), b);
  write_csv(generate(small(ResponseKind::Xor3, 6)), c);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
}

TEST_CASE("marginal ranges") {
  const RawDataset d = generate(small(ResponseKind::Sphere));
  for (std::size_t i = 0; i < d.descriptors.size(); ++i) {
    const auto& g = d.groups[i];
    for (double v : d.descriptors[i].values) {
      if (g == "G1" || g == "G5" || g == "G6") {
        CHECK(v > -1.0);
        CHECK(v < 1.0);
      }
      if (g == "G2") {
        CHECK(v > -1.15);
        CHECK(v < 1.15);
      }
    }
  }
}

TEST_CASE("G2 is G1 plus bounded noise") {
  const RawDataset d = generate(small(ResponseKind::Sphere));
  for (int j = 1; j <= 3; ++j) {
    const auto& base = col(d, "G1_" + std::to_string(j)).values;
    const auto& noisy = col(d, "G2_" + std::to_string(j)).values;
    double max_diff = 0;
    for (std::size_t r = 0; r < d.n_objects; ++r) max_diff = std::max(max_diff, std::abs(noisy[r] - base[r]));
    CHECK(max_diff <= 0.15);
    CHECK(max_diff > 0.1);
  }
}

TEST_CASE("G3 columns are exact combinations of G1 with unit sd") {
  const RawDataset d = generate(small(ResponseKind::Sphere));
  const auto& x1 = col(d, "G1_1").values;
  const auto& x2 = col(d, "G1_2").values;
  const auto& x3 = col(d, "G1_3").values;
  const auto& g = col(d, "G3_4").values;
  // Solve for the coefficients from three rows and verify on the rest.
  double a[3][4];
  for (int i = 0; i < 3; ++i) {
    a[i][0] = x1[i];
    a[i][1] = x2[i];
    a[i][2] = x3[i];
    a[i][3] = g[i];
  }
  for (int p = 0; p < 3; ++p)
    for (int i = 0; i < 3; ++i) {
      if (i == p) continue;
      const double f = a[i][p] / a[p][p];
      for (int j = 0; j < 4; ++j) a[i][j] -= f * a[p][j];
    }
  const double c1 = a[0][3] / a[0][0], c2 = a[1][3] / a[1][1], c3 = a[2][3] / a[2][2];
  double mean = 0, sq = 0;
  for (std::size_t r = 0; r < d.n_objects; ++r) {
    CHECK(g[r] == doctest::Approx(c1 * x1[r] + c2 * x2[r] + c3 * x3[r]).epsilon(1e-8));
    mean += g[r];
  }
  mean /= static_cast<double>(d.n_objects);
  for (double v : g) sq += (v - mean) * (v - mean);
  CHECK(std::sqrt(sq / static_cast<double>(d.n_objects - 1)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("random response is independent of the descriptors") {
  const RawDataset d = generate(small(ResponseKind::Random, 3));
  const DiscreteMatrix m = discretize_dataset(d, {}, 0);
  std::size_t small_p = 0;
  for (unsigned v = 0; v < m.n_variables(); ++v) {
    const Tuple t{v};
    const auto s = conditional_mutual_information(build_contingency(m, t), 0);
    if (chi2_survival(s.g_statistic, s.df) < 0.01) ++small_p;
  }
  // About 1% of 351 expected under independence.
  CHECK(small_p <= 12);
}

TEST_CASE("manifest records config and groups") {
  const SynthConfig cfg = small(ResponseKind::Checkerboard, 9);
  const RawDataset d = generate(cfg);
  std::ostringstream out;
  write_manifest(d, cfg, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["config"]["seed"] == 9);
  CHECK(j["config"]["response"] == "checkerboard");
  CHECK(j["columns"].size() == 351);
  CHECK(j["columns"][3]["group"] == "G2");
  CHECK(j["columns"][350]["name"] == "G7_200");
}

TEST_CASE("csv output reads back to the same values") {
  SynthConfig cfg = small(ResponseKind::Xor3, 2);
  cfg.group_sizes = {3, 3, 2, 2, 1, 4, 3};
  cfg.g7_support = 2;
  const RawDataset d = generate(cfg);
  std::stringstream buf;
  write_csv(d, buf);
  const RawDataset back = ingest(buf, "Y");
  REQUIRE(back.descriptors.size() == d.descriptors.size());
  for (std::size_t i = 0; i < d.descriptors.size(); ++i) CHECK(back.descriptors[i].values == d.descriptors[i].values);
  CHECK(back.response.values == d.response.values);
}

TEST_CASE("invalid synth configs are rejected") {
  SynthConfig c;
  c.group_sizes = {2, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(generate(c), Error);
  c = SynthConfig{};
  c.g7_support = 101;
  CHECK_THROWS_AS(generate(c), Error);
}

TEST_CASE("pure synergy fixture shape") {
  const RawDataset d = fixture("pure_synergy");
  CHECK(d.n_objects == 400);
  CHECK(d.descriptors.size() == 2);
  for (const auto& c : d.descriptors)
    for (double v : c.values) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("exact epistasis fixture realizes the correlated AND law") {
  const RawDataset d = fixture("epistasis_exact", 1, 600);
  std::map<std::pair<int, int>, int> joint;
  for (std::size_t r = 0; r < d.n_objects; ++r) {
    const int a = static_cast<int>(d.descriptors[0].values[r]), b = static_cast<int>(d.descriptors[1].values[r]);
    ++joint[{a, b}];
    CHECK(d.response.values[r] == static_cast<double>(a & b));
  }
  CHECK(joint[{0, 0}] == 200);
  CHECK(joint[{0, 1}] == 100);
  CHECK(joint[{1, 0}] == 100);
  CHECK(joint[{1, 1}] == 200);
  const DiscreteMatrix m = discretize_dataset(d, {}, 0);
  CHECK(std::abs(interaction_information(build_contingency(m, Tuple{0, 1}))) < 1e-12);
  CHECK_THROWS_AS(fixture("epistasis_exact", 1, 400), Error);
}

TEST_CASE("sampled epistasis fixture is positively correlated") {
  const RawDataset d = fixture("epistasis_correlated", 4, 4000);
  double same = 0;
  for (std::size_t r = 0; r < d.n_objects; ++r) same += d.descriptors[0].values[r] == d.descriptors[1].values[r];
  CHECK(same / 4000.0 == doctest::Approx(0.56).epsilon(0.05));
}

TEST_CASE("nuisance fixture: X2 matters only next to X3") {
  const RawDataset d = fixture("nuisance", 1, 400);
  const DiscreteMatrix m = discretize_dataset(d, {}, 0);
  const Tuple x2{1}, x2x3{1, 2};
  const auto alone = conditional_mutual_information(build_contingency(m, x2), 0);
  const auto paired = conditional_mutual_information(build_contingency(m, x2x3), 0);
  CHECK(chi2_survival(alone.g_statistic, alone.df) > 0.01);
  CHECK(chi2_survival(paired.g_statistic, paired.df) < 1e-4);
  CHECK(paired.cmi > 5.0 * alone.cmi);
}

TEST_CASE("strength versus importance fixture shape") {
  const RawDataset d = fixture("strength_vs_importance");
  CHECK(d.descriptors.size() == 72);
  CHECK(d.descriptors[2].name == "L1");
  CHECK(d.descriptors[71].name == "R50");
}

TEST_CASE("fixtures are pure functions of name and seed") {
  for (const auto& name : fixture_names()) {
    std::ostringstream a, b;
    write_csv(fixture(name, 3, 420), a);
    write_csv(fixture(name, 3, 420), b);
    CHECK(a.str() == b.str());
  }
  CHECK_THROWS_AS(fixture("nope"), Error);
}
