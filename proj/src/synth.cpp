#include "mdscan/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "mdscan/error.hpp"
#include "mdscan/rng.hpp"

namespace mdscan {
namespace {

// Stream ids keep every group, purpose and column on its own substream.
constexpr std::uint64_t kValues = 100;
constexpr std::uint64_t kCoefficients = 200;
constexpr std::uint64_t kNoise = 300;
constexpr std::uint64_t kResponse = 999;
constexpr std::uint64_t kFixture = 0x46495854ULL;

std::vector<double> uniform_column(std::size_t n, CounterRng rng, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

double sample_sd(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

void scale_to_unit_sd(std::vector<double>& v) {
  const double sd = sample_sd(v);
  if (sd > 0.0)
    for (auto& x : v) x /= sd;
}

std::vector<double> combination(const std::vector<const std::vector<double>*>& sources, CounterRng& coefficients) {
  std::vector<double> out(sources.front()->size(), 0.0);
  for (const auto* src : sources) {
    const double a = coefficients.uniform(-1.0, 1.0);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += a * (*src)[r];
  }
  return out;
}

void add_noise(std::vector<double>& v, double amplitude, CounterRng rng) {
  if (amplitude <= 0.0) return;
  for (auto& x : v) x += rng.uniform(-amplitude, amplitude);
}

Column continuous(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Continuous;
  c.values = std::move(values);
  return c;
}

Column binary_response(std::vector<double> values) { return continuous("Y", std::move(values)); }

std::string format_value(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool flip(CounterRng& rng, double p) { return rng.uniform() < p; }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

}  // namespace

const char* to_string(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::Sphere: return "sphere";
    case ResponseKind::Xor3: return "xor";
    case ResponseKind::Checkerboard: return "checkerboard";
    case ResponseKind::Random: return "random";
  }
  return "?";
}

ResponseKind parse_response_kind(std::string_view text) {
  if (text == "sphere") return ResponseKind::Sphere;
  if (text == "xor" || text == "xor3") return ResponseKind::Xor3;
  if (text == "checkerboard") return ResponseKind::Checkerboard;
  if (text == "random") return ResponseKind::Random;
  fail(ErrorCode::InvalidArgument, "unknown response kind \"" + std::string(text) + "\"");
}

void validate(const SynthConfig& config) {
  if (config.n_objects < 2) fail(ErrorCode::InvalidArgument, "n_objects must be at least 2");
  if (!(config.noise_amplitude >= 0.0)) fail(ErrorCode::InvalidArgument, "noise amplitude must be non-negative");
  if (!(config.nuisance_amplitude >= 0.0)) fail(ErrorCode::InvalidArgument, "nuisance amplitude must be non-negative");
  if (config.response != ResponseKind::Random && config.group_sizes[0] < 3)
    fail(ErrorCode::InvalidArgument, "the response needs three base variables");
  if (config.group_sizes[1] > config.group_sizes[0])
    fail(ErrorCode::InvalidArgument, "G2 cannot be larger than G1");
  if ((config.group_sizes[2] > 0 || config.group_sizes[3] > 0) && config.group_sizes[0] == 0)
    fail(ErrorCode::InvalidArgument, "G3 and G4 need base variables");
  if (config.group_sizes[6] > 0 && (config.g7_support == 0 || config.g7_support > config.group_sizes[5]))
    fail(ErrorCode::InvalidArgument, "G7 support must be in [1, |G6|]");
  const std::size_t total = std::accumulate(config.group_sizes.begin(), config.group_sizes.end(), std::size_t{0});
  if (total == 0) fail(ErrorCode::InvalidArgument, "no variables requested");
}

RawDataset generate(const SynthConfig& config) {
  validate(config);
  const std::size_t n = config.n_objects;
  const auto& sizes = config.group_sizes;
  const std::uint64_t seed = config.seed;

  std::vector<std::vector<double>> g1(sizes[0]);
  for (std::size_t j = 0; j < sizes[0]; ++j) g1[j] = uniform_column(n, CounterRng(seed, kValues + 1, j), -1.0, 1.0);
  std::vector<std::vector<double>> g5(sizes[4]);
  for (std::size_t j = 0; j < sizes[4]; ++j) g5[j] = uniform_column(n, CounterRng(seed, kValues + 5, j), -1.0, 1.0);
  std::vector<std::vector<double>> g6(sizes[5]);
  for (std::size_t j = 0; j < sizes[5]; ++j) g6[j] = uniform_column(n, CounterRng(seed, kValues + 6, j), -1.0, 1.0);

  std::vector<const std::vector<double>*> base;
  for (const auto& c : g1) base.push_back(&c);
  std::vector<const std::vector<double>*> nuisance;
  for (const auto& c : g5) nuisance.push_back(&c);

  RawDataset data;
  data.n_objects = n;
  auto push = [&](std::size_t group, std::size_t j, std::vector<double> values) {
    data.descriptors.push_back(continuous("G" + std::to_string(group) + "_" + std::to_string(j + 1), std::move(values)));
    data.groups.push_back("G" + std::to_string(group));
  };

  for (std::size_t j = 0; j < sizes[0]; ++j) push(1, j, g1[j]);
  for (std::size_t j = 0; j < sizes[1]; ++j) {
    std::vector<double> v = g1[j];
    add_noise(v, config.noise_amplitude, CounterRng(seed, kNoise + 2, j));
    push(2, j, std::move(v));
  }
  for (std::size_t j = 0; j < sizes[2]; ++j) {
    CounterRng coefficients(seed, kCoefficients + 3, j);
    std::vector<double> v = combination(base, coefficients);
    scale_to_unit_sd(v);
    push(3, j, std::move(v));
  }
  for (std::size_t j = 0; j < sizes[3]; ++j) {
    // One combination over G1 and G5; nuisance coefficients are drawn from
    // the base distribution scaled by nuisance_amplitude.
    CounterRng coefficients(seed, kCoefficients + 4, j);
    std::vector<double> v = combination(base, coefficients);
    if (!nuisance.empty()) {
      const std::vector<double> m = combination(nuisance, coefficients);
      for (std::size_t r = 0; r < n; ++r) v[r] += config.nuisance_amplitude * m[r];
    }
    scale_to_unit_sd(v);
    add_noise(v, config.noise_amplitude, CounterRng(seed, kNoise + 4, j));
    push(4, j, std::move(v));
  }
  for (std::size_t j = 0; j < sizes[4]; ++j) push(5, j, g5[j]);
  for (std::size_t j = 0; j < sizes[5]; ++j) push(6, j, g6[j]);
  for (std::size_t j = 0; j < sizes[6]; ++j) {
    CounterRng coefficients(seed, kCoefficients + 7, j);
    // Each column draws its own subset of G6 (partial Fisher-Yates).
    std::vector<std::size_t> pool(sizes[5]);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<const std::vector<double>*> support;
    for (std::size_t s = 0; s < config.g7_support; ++s) {
      const std::size_t pick = s + coefficients.below(pool.size() - s);
      std::swap(pool[s], pool[pick]);
      support.push_back(&g6[pool[s]]);
    }
    std::vector<double> v = combination(support, coefficients);
    scale_to_unit_sd(v);
    add_noise(v, config.noise_amplitude, CounterRng(seed, kNoise + 7, j));
    push(7, j, std::move(v));
  }

  std::vector<double> y(n);
  if (config.response == ResponseKind::Random) {
    CounterRng rng(seed, kResponse);
    for (auto& v : y) v = rng() >> 63;
  } else {
    for (std::size_t r = 0; r < n; ++r) {
      const double x1 = g1[0][r], x2 = g1[1][r], x3 = g1[2][r];
      bool value = false;
      switch (config.response) {
        case ResponseKind::Sphere: value = x1 * x1 + x2 * x2 + x3 * x3 > 0.9; break;
        case ResponseKind::Xor3: value = x1 * x2 * x3 < 0.0; break;
        case ResponseKind::Checkerboard: {
          constexpr double tau = 2.0 * std::numbers::pi;
          value = std::sin(tau * x1) * std::sin(tau * x2) * std::sin(tau * x3) < 0.0;
          break;
        }
        case ResponseKind::Random: break;
      }
      y[r] = value ? 1.0 : 0.0;
    }
  }
  data.response = binary_response(std::move(y));
  return data;
}

std::vector<std::string> fixture_names() {
  return {"pure_synergy", "epistasis_correlated", "epistasis_exact", "nuisance", "strength_vs_importance"};
}

RawDataset fixture(std::string_view name, std::uint64_t seed, std::size_t n) {
  if (n < 6) fail(ErrorCode::InvalidArgument, "fixtures need at least 6 objects");
  CounterRng rng(seed, kFixture, fnv1a(name));
  RawDataset data;
  data.n_objects = n;
  std::vector<double> x1(n), x2(n), y(n);

  if (name == "pure_synergy") {
    // Independent fair bits, Y = (X1 == X2) with 20% label noise.
    for (std::size_t r = 0; r < n; ++r) {
      x1[r] = static_cast<double>(rng() >> 63);
      x2[r] = static_cast<double>(rng() >> 63);
      y[r] = (x1[r] == x2[r]) != flip(rng, 0.2) ? 1.0 : 0.0;
    }
  } else if (name == "epistasis_correlated") {
    // P(X1 = X2) = 0.56, Y = X1 and X2 with 5% label noise.
    constexpr double same = 0.28;
    for (std::size_t r = 0; r < n; ++r) {
      const double u = rng.uniform();
      const int cell = u < same ? 0 : u < 2 * same ? 3 : u < 0.5 + same ? 1 : 2;
      x1[r] = cell & 1;
      x2[r] = cell >> 1;
      y[r] = ((x1[r] == 1.0 && x2[r] == 1.0) != flip(rng, 0.05)) ? 1.0 : 0.0;
    }
  } else if (name == "epistasis_exact") {
    // Joint frequencies 1/3, 1/6, 1/6, 1/3 realized exactly; Y = X1 and X2.
    if (n % 6 != 0) fail(ErrorCode::InvalidArgument, "epistasis_exact needs a multiple of 6 objects");
    const std::size_t third = n / 3, sixth = n / 6;
    std::size_t r = 0;
    auto fill = [&](std::size_t count, double a, double b) {
      for (std::size_t i = 0; i < count; ++i, ++r) {
        x1[r] = a;
        x2[r] = b;
        y[r] = (a == 1.0 && b == 1.0) ? 1.0 : 0.0;
      }
    };
    fill(third, 0, 0);
    fill(sixth, 0, 1);
    fill(sixth, 1, 0);
    fill(third, 1, 1);
  } else if (name == "nuisance") {
    // X3 copies X1 or X2 with equal odds; Y = X1 with 20% label noise.
    std::vector<double> x3(n);
    for (std::size_t r = 0; r < n; ++r) {
      x1[r] = static_cast<double>(rng() >> 63);
      x2[r] = static_cast<double>(rng() >> 63);
      x3[r] = (rng() >> 63) ? x1[r] : x2[r];
      y[r] = (x1[r] == 1.0) != flip(rng, 0.2) ? 1.0 : 0.0;
    }
    data.descriptors.push_back(continuous("X1", std::move(x1)));
    data.descriptors.push_back(continuous("X2", std::move(x2)));
    data.descriptors.push_back(continuous("X3", std::move(x3)));
    data.response = binary_response(std::move(y));
    return data;
  } else if (name == "strength_vs_importance") {
    // Y = (X1 > 0.5 and X2 > 0.5); 20 combinations of X1, X2 and 50 random
    // variables; every descriptor carries 50% additive noise.
    for (std::size_t r = 0; r < n; ++r) {
      x1[r] = rng.uniform();
      x2[r] = rng.uniform();
      y[r] = (x1[r] > 0.5 && x2[r] > 0.5) ? 1.0 : 0.0;
    }
    std::vector<std::vector<double>> cols;
    std::vector<std::string> names;
    cols.push_back(x1);
    names.push_back("X1");
    cols.push_back(x2);
    names.push_back("X2");
    for (int j = 0; j < 20; ++j) {
      const double a = rng.uniform(), b = rng.uniform();
      std::vector<double> c(n);
      for (std::size_t r = 0; r < n; ++r) c[r] = (a * x1[r] + b * x2[r]) / (a + b);
      cols.push_back(std::move(c));
      names.push_back("L" + std::to_string(j + 1));
    }
    for (int j = 0; j < 50; ++j) {
      std::vector<double> c(n);
      for (auto& v : c) v = rng.uniform();
      cols.push_back(std::move(c));
      names.push_back("R" + std::to_string(j + 1));
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (auto& v : cols[c]) v += rng.uniform(-0.5, 0.5);
      data.descriptors.push_back(continuous(names[c], std::move(cols[c])));
    }
    data.response = binary_response(std::move(y));
    return data;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown fixture \"" + std::string(name) + "\"");
  }
  data.descriptors.push_back(continuous("X1", std::move(x1)));
  data.descriptors.push_back(continuous("X2", std::move(x2)));
  data.response = binary_response(std::move(y));
  return data;
}

void write_csv(const RawDataset& data, std::ostream& out) {
  validate(data);
  std::vector<const Column*> cols;
  for (const auto& c : data.descriptors) cols.push_back(&c);
  cols.push_back(&data.response);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << quote_if_needed(cols[c]->name);
  out << '\n';
  for (std::size_t r = 0; r < data.n_objects; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      const Column& col = *cols[c];
      out << (col.kind == ColumnKind::Continuous ? format_value(col.values[r]) : quote_if_needed(col.labels[r]));
    }
    out << '\n';
  }
}

void write_manifest(const RawDataset& data, const SynthConfig& config, std::ostream& out) {
  nlohmann::ordered_json j;
  j["generator"] = "mdscan synth";
  j["config"] = {{"n_objects", config.n_objects},
                 {"group_sizes", config.group_sizes},
                 {"noise_amplitude", config.noise_amplitude},
                 {"nuisance_amplitude", config.nuisance_amplitude},
                 {"g7_support", config.g7_support},
                 {"response", to_string(config.response)},
                 {"seed", config.seed}};
  j["response"] = data.response.name;
  nlohmann::ordered_json columns = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < data.descriptors.size(); ++i)
    columns.push_back({{"name", data.descriptors[i].name}, {"group", i < data.groups.size() ? data.groups[i] : ""}});
  j["columns"] = std::move(columns);
  out << j.dump(2) << '\n';
}

}  // namespace mdscan
