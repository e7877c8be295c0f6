// Published coefficient tables for the McEwan tank (N = 1.23 1/s, h = 0.25 m,
// modes 2, 4, 6, 8, 10), transcribed as printed. Rows are m, columns are k.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/error.hpp"

namespace ckdv {
namespace {

constexpr std::array<int, 5> kModes = {2, 4, 6, 8, 10};

constexpr std::array<double, 5> kPhaseSpeed = {0.05, 0.025, 0.016, 0.012, 0.0098};
constexpr std::array<double, 5> kDispersion = {0.00004, 0.000005, 0.000002, 0.000001,
                                               0.0000003};

using Table = std::array<std::array<double, 5>, 5>;

constexpr std::array<Table, 5> kNonlinear = {{
    // g^2
    {{{0, 72.3, 0, 0, 0},
      {28.9, 0, 202.4, 0, 0},
      {0, 130, 0, 390.1, 0},
      {0, 0, 289, 0, 635.7},
      {0, 0, 0, 505.7, 0}}},
    // g^4
    {{{28.9, 0, 57.8, 0, 0},
      {0, 0, 0, 144.5, 0},
      {0, 0, 0, 0, 260},
      {0, 57.8, 0, 0, 0},
      {0, 0, 144.5, 0, 0}}},
    // g^6
    {{{0, 33.7, 0, 53, 0},
      {48.2, 0, 0, 0, 125.2},
      {0, 0, 0, 0, 0},
      {-19.3, 0, 0, 0, 0},
      {0, 24, 0, 0, 0}}},
    // g^8
    {{{0, 0, 36.1, 0, 50.6},
      {0, 57.8, 0, 0, 0},
      {65, 0, 0, 0, 0},
      {0, 0, 0, 0, 0},
      {-36, 0, 0, 0, 0}}},
    // g^10
    {{{0, 0, 0, 37.6, 0},
      {0, 0, 63.6, 0, 0},
      {0, 78, 0, 0, 0},
      {80.9, 0, 0, 0, 0},
      {0, 0, 0, 0, 0}}},
}};

DiscrepancyEntry classify(std::string quantity, int n, int m, int k, double computed,
                          double reference, double tolerance, double zero_floor) {
  DiscrepancyEntry e{std::move(quantity), n, m, k, computed, reference, 0.0, tolerance,
                     Verdict::discrepant};
  if (reference == 0.0) {
    e.relative_gap = std::abs(computed) <= zero_floor
                         ? 0.0
                         : std::numeric_limits<double>::infinity();
  } else {
    e.relative_gap = std::abs(computed - reference) / std::abs(reference);
  }
  e.verdict = e.relative_gap <= tolerance ? Verdict::confirmed : Verdict::discrepant;
  return e;
}

}  // namespace

DiscrepancyLog reconcile_with_reference_tables(const ModeBasis& basis,
                                               const CoefficientSet& coeffs) {
  coeffs.validate();
  std::array<std::size_t, 5> slot{};
  for (std::size_t i = 0; i < kModes.size(); ++i) {
    const auto s = basis.slot_of(kModes[i]);
    if (!s || coeffs.mode_indices.at(*s) != kModes[i]) {
      throw ConfigError("reconciliation needs modes 2, 4, 6, 8, 10");
    }
    slot[i] = *s;
  }

  DiscrepancyLog log;
  for (std::size_t i = 0; i < kModes.size(); ++i) {
    log.entries.push_back(classify("c", kModes[i], 0, 0, basis.mode(slot[i]).phase_speed,
                                   kPhaseSpeed[i], kPhaseSpeedTolerance, 0.0));
  }
  for (std::size_t i = 0; i < kModes.size(); ++i) {
    log.entries.push_back(classify("d", kModes[i], 0, 0, coeffs.dispersion[slot[i]],
                                   kDispersion[i], kDispersionTolerance, 0.0));
  }
  // Entries below this floor count as structural zeros of the computed tensor.
  const double zero_floor = 1e-9 * std::max(1.0, coeffs.nonlinear.max_abs());
  for (std::size_t a = 0; a < kModes.size(); ++a)
    for (std::size_t b = 0; b < kModes.size(); ++b)
      for (std::size_t c = 0; c < kModes.size(); ++c) {
        const double computed = coeffs.nonlinear(slot[a], slot[b], slot[c]);
        const double reference = kNonlinear[a][b][c];
        log.entries.push_back(classify("g", kModes[a], kModes[b], kModes[c], computed,
                                       reference, kNonlinearTolerance, zero_floor));
        const bool computed_nonzero = std::abs(computed) > zero_floor;
        const bool reference_nonzero = reference != 0.0;
        if (computed_nonzero != reference_nonzero) {
          log.mask_mismatches.push_back(
              {kModes[a], kModes[b], kModes[c], computed_nonzero, reference_nonzero});
        }
      }
  return log;
}

}  // namespace ckdv
