#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mdscan/dataset.hpp"

namespace mdscan {

enum class ResponseKind { Sphere, Xor3, Checkerboard, Random };

const char* to_string(ResponseKind kind);
ResponseKind parse_response_kind(std::string_view text);

inline constexpr std::size_t kSynthGroups = 7;

struct SynthConfig {
  std::size_t n_objects = 5000;
  // G1 base, G2 noisy base, G3 combinations of G1, G4 noisy combinations of
  // G1 and G5, G5 nuisance, G6 random, G7 noisy combinations of G6.
  std::array<std::size_t, kSynthGroups> group_sizes{3, 3, 20, 20, 5, 100, 200};
  double noise_amplitude = 0.15;
  double nuisance_amplitude = 1.0;  // G5 coefficient scale inside G4, relative to G1
  std::size_t g7_support = 10;       // G6 variables per G7 column
  ResponseKind response = ResponseKind::Sphere;
  std::uint64_t seed = 1;
};

void validate(const SynthConfig& config);

// Descriptors named G<g>_<j>, response "Y" with labels 0/1; groups filled.
RawDataset generate(const SynthConfig& config);

// Appendix-style micro datasets: "pure_synergy", "epistasis_correlated",
// "epistasis_exact", "nuisance", "strength_vs_importance".
RawDataset fixture(std::string_view name, std::uint64_t seed = 1, std::size_t n_objects = 400);
std::vector<std::string> fixture_names();

void write_csv(const RawDataset& data, std::ostream& out);

// JSON manifest: config, seed, and group of every column.
void write_manifest(const RawDataset& data, const SynthConfig& config, std::ostream& out);

}  // namespace mdscan
