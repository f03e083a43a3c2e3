#pragma once

// Synthetic fixtures with known ground truth.
//
// Random numbers come from a counter-based generator so that every draw is a
// pure function of (seed, stream, index):
//
//   mix(z)  = SplitMix64 finalizer:
//               z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//               z ^= z >> 27; z *= 0x94D049BB133111EB;
//               z ^= z >> 31
//   key     = mix(seed ^ mix(stream))
//   draw    = mix(key + (index + 1) * 0x9E3779B97F4A7C15)      (mod 2^64)
//   uniform = (draw >> 11) * 2^-53                              in [0, 1)
//
// Only integer arithmetic and exact floating-point scalings are involved, so
// the streams are identical on every platform. Reference values are pinned in
// tests/test_synth.cpp.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "efk/dynamics.hpp"
#include "efk/error.hpp"
#include "efk/matrix.hpp"

namespace efk::synth {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return mix(mix(seed ^ mix(stream)) + (index + 1) * kGolden);
}

constexpr double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(draw(seed, stream, index) >> 11) * 0x1.0p-53;
}

/// Approximately standard normal: Irwin-Hall sum of 12 uniforms minus 6
/// (mean 0, variance 1, support [-6, 6]). Uses draws 12*index .. 12*index+11.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  double acc = 0.0;
  for (std::uint64_t k = 0; k < 12; ++k) acc += uniform(seed, stream, 12 * index + k);
  return acc - 6.0;
}

struct SynthSpec {
  std::size_t countries = 1;
  std::size_t products = 1;
  double noise = 0.0;  // flip probability, [0, 1)
  std::uint64_t seed = 0;
};

/// Zero-padded code with a one-letter prefix, e.g. code('C', 7) == "C007".
inline std::string code(char prefix, std::size_t i, std::size_t width = 3) {
  std::string digits = std::to_string(i);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

/// Staircase with the most diversified country first: country i (0-based)
/// exports products 1..ceil((C - i) * P / C). Each cell is then flipped when
/// draw(seed, 0, i * P + p) < noise * 2^64. Rows or columns emptied by noise
/// are pruned.
inline BinaryCPMatrix nested_matrix(const SynthSpec& spec) {
  if (spec.countries < 1 || spec.products < 1) throw Error(ErrorKind::InvalidArgument, "need C >= 1 and P >= 1");
  if (!(spec.noise >= 0.0 && spec.noise < 1.0)) throw Error(ErrorKind::InvalidArgument, "noise must be in [0, 1)");
  const auto C = spec.countries, P = spec.products;
  const auto cutoff = static_cast<std::uint64_t>(std::ldexp(spec.noise, 64));
  std::vector<std::string> countries, products;
  for (std::size_t i = 0; i < C; ++i) countries.push_back(code('C', i + 1));
  for (std::size_t p = 0; p < P; ++p) products.push_back(code('P', p + 1));
  std::vector<std::uint8_t> cells(C * P, 0);
  for (std::size_t i = 0; i < C; ++i) {
    const std::size_t c = C - i;                 // target rank, 1 = least diversified
    const std::size_t k = (c * P + C - 1) / C;   // ceil(c * P / C)
    for (std::size_t p = 0; p < P; ++p) {
      std::uint8_t v = p < k ? 1 : 0;
      if (spec.noise > 0.0 && draw(spec.seed, 0, i * P + p) < cutoff) v ^= 1;
      cells[i * P + p] = v;
    }
  }
  return BinaryCPMatrix::from_cells(std::move(countries), std::move(products), cells);
}

/// Independent Bernoulli(fill) cells from stream 0; no pruning guarantees
/// beyond BinaryCPMatrix's own.
inline BinaryCPMatrix random_matrix(std::size_t C, std::size_t P, double fill, std::uint64_t seed) {
  if (C < 1 || P < 1) throw Error(ErrorKind::InvalidArgument, "need C >= 1 and P >= 1");
  std::vector<std::string> countries, products;
  for (std::size_t i = 0; i < C; ++i) countries.push_back(code('C', i + 1));
  for (std::size_t p = 0; p < P; ++p) products.push_back(code('P', p + 1));
  std::vector<std::uint8_t> cells(C * P);
  for (std::size_t i = 0; i < C * P; ++i) cells[i] = uniform(seed, 0, i) < fill ? 1 : 0;
  return BinaryCPMatrix::from_cells(std::move(countries), std::move(products), cells);
}

struct DriftFieldSpec {
  std::size_t countries = 10;
  std::size_t years = 10;
  double dx = 0.0, dy = 0.0;  // per-year drift, log10 units
  double noise_sd = 0.0;      // per-year noise sd on each axis
  std::uint64_t seed = 0;
  int first_year = 2000;
};

/// Countries start uniformly in x in [2.5, 4.5], y in [-1, 1] (streams 1, 2)
/// and advance each year by drift plus noise (streams 3, 4).
inline TrajectorySet drift_field(const DriftFieldSpec& spec) {
  if (spec.years < 2) throw Error(ErrorKind::InvalidArgument, "drift field needs years >= 2");
  if (spec.countries < 1) throw Error(ErrorKind::InvalidArgument, "drift field needs countries >= 1");
  if (!(spec.noise_sd >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise_sd must be >= 0");
  std::vector<TrajectoryPoint> pts;
  pts.reserve(spec.countries * spec.years);
  for (std::size_t c = 0; c < spec.countries; ++c) {
    double x = 2.5 + 2.0 * uniform(spec.seed, 1, c);
    double y = -1.0 + 2.0 * uniform(spec.seed, 2, c);
    for (std::size_t t = 0; t < spec.years; ++t) {
      pts.push_back({code('K', c + 1), spec.first_year + static_cast<int>(t), x, y, 0.0, 0.0});
      const std::uint64_t idx = c * spec.years + t;
      x += spec.dx;
      y += spec.dy;
      if (spec.noise_sd > 0.0) {
        x += spec.noise_sd * normal(spec.seed, 3, idx);
        y += spec.noise_sd * normal(spec.seed, 4, idx);
      }
    }
  }
  return TrajectorySet::from_points(std::move(pts));
}

}  // namespace efk::synth
