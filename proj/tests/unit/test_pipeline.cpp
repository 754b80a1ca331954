#include <doctest.h>

#include <sstream>

#include "mdscan/error.hpp"
#include "mdscan/pipeline.hpp"
#include "mdscan/report_io.hpp"
#include "mdscan/synth.hpp"

using namespace mdscan;

namespace {

const VariableReport& var(const SelectionReport& r, const std::string& name) {
  for (const auto& v : r.variables)
    if (v.name == name) return v;
  FAIL("no variable " << name);
  throw;
}

RunConfig config(unsigned k, unsigned workers = 1) {
  RunConfig c;
  c.k = k;
  c.workers = workers;
  return c;
}

RawDataset small_benchmark(ResponseKind kind, std::uint64_t seed) {
  SynthConfig s;
  s.n_objects = 1000;
  s.group_sizes = {3, 3, 4, 4, 2, 20, 20};
  s.response = kind;
  s.seed = seed;
  return generate(s);
}

std::string tsv(const SelectionReport& r) {
  std::ostringstream out;
  write_report_tsv(r, out);
  return out.str();
}

}  // namespace

TEST_CASE("pure synergy needs the pair") {
  const RawDataset d = fixture("pure_synergy", 1, 400);
  const auto one = run(d, config(1)).report;
  const auto two = run(d, config(2)).report;
  for (const char* name : {"X1", "X2"}) {
    CHECK(var(one, name).final_p > 0.05);
    CHECK(var(two, name).final_p < 1e-4);
    CHECK(var(two, name).relevant);
  }
  CHECK(two.calibration == Calibration::Direct);
}

TEST_CASE("correlated epistasis is visible alone and stronger in pair") {
  const RawDataset d = fixture("epistasis_correlated", 1, 400);
  const auto one = run(d, config(1)).report;
  const auto two = run(d, config(2)).report;
  for (const char* name : {"X1", "X2"}) {
    CHECK(var(one, name).relevant);
    CHECK(var(two, name).max_cmi > var(one, name).max_cmi);
  }
}

TEST_CASE("reports are byte-identical across worker counts") {
  const RawDataset d = small_benchmark(ResponseKind::Xor3, 3);
  RunConfig c = config(2, 1);
  c.n_shifts = 2;
  c.seed = 5;
  c.contrast_copies = 4;
  const std::string reference = tsv(run(d, c).report);
  for (unsigned w : {2u, 8u}) {
    c.workers = w;
    CHECK(tsv(run(d, c).report) == reference);
  }
}

TEST_CASE("xor benchmark at k=2 finds the base variables") {
  const RawDataset d = small_benchmark(ResponseKind::Xor3, 1);
  const auto r = run(d, config(2)).report;
  for (const char* name : {"G1_1", "G1_2", "G1_3", "G2_1", "G2_2", "G2_3"}) CHECK(var(r, name).relevant);
  CHECK(r.calibration == Calibration::Exponential);
}

TEST_CASE("contrast variables are excluded from the report") {
  const RawDataset d = small_benchmark(ResponseKind::Random, 2);
  RunConfig c = config(1);
  c.contrast_copies = 10;
  const auto r = run(d, c).report;
  CHECK(r.variables.size() == d.descriptors.size());
  for (const auto& v : r.variables) CHECK(v.name.rfind("__contrast_", 0) != 0);
}

TEST_CASE("contrast copies are permutations of existing columns") {
  const RawDataset d = small_benchmark(ResponseKind::Random, 2);
  const RawDataset e = with_contrast_variables(d, 3, 11);
  REQUIRE(e.descriptors.size() == d.descriptors.size() + 3);
  for (std::size_t i = d.descriptors.size(); i < e.descriptors.size(); ++i) {
    auto copy = e.descriptors[i].values;
    std::sort(copy.begin(), copy.end());
    bool matched = false;
    for (const auto& c : d.descriptors) {
      auto s = c.values;
      std::sort(s.begin(), s.end());
      matched = matched || s == copy;
    }
    CHECK(matched);
    CHECK(e.groups[i] == "contrast");
  }
}

TEST_CASE("refused fits fall back and signal exit code 2") {
  SynthConfig s;
  s.n_objects = 300;
  s.group_sizes = {3, 0, 0, 0, 0, 2, 0};
  s.response = ResponseKind::Sphere;
  const auto outcome = run(generate(s), config(2));
  CHECK(outcome.exit_code == 2);
  CHECK(outcome.report.calibration == Calibration::Fallback);
  CHECK(outcome.report.gamma == 4.0);
  bool warned = false;
  for (const auto& w : outcome.report.warnings) warned = warned || w.name == "gamma";
  CHECK(warned);
  std::ostringstream json;
  write_summary_json(outcome.report, json);
  CHECK(json.str().find("\"fit\"") != std::string::npos);
}

TEST_CASE("invalid run configs are rejected") {
  const RawDataset d = fixture("pure_synergy");
  RunConfig c = config(1);
  c.alpha = 1.0;
  CHECK_THROWS_AS(run(d, c), Error);
  c = config(0);
  CHECK_THROWS_AS(run(d, c), Error);
  c = config(3);
  CHECK_THROWS_AS(run(d, c), Error);
  c = config(1);
  c.bins = 1;
  CHECK_THROWS_AS(run(d, c), Error);
}
