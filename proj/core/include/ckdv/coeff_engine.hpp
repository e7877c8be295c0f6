#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ckdv/modal_basis.hpp"

namespace ckdv {

/// Dense rank-3 tensor indexed by basis slots (n, m, k).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t extent)
      : extent_(extent), data_(extent * extent * extent, 0.0) {}

  std::size_t extent() const { return extent_; }
  double& operator()(std::size_t n, std::size_t m, std::size_t k) {
    return data_[(n * extent_ + m) * extent_ + k];
  }
  double operator()(std::size_t n, std::size_t m, std::size_t k) const {
    return data_[(n * extent_ + m) * extent_ + k];
  }
  double max_abs() const;

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t extent_ = 0;
  std::vector<double> data_;
};

/// Coefficients of the coupled KdV system
///   theta^n_t + c_n theta^n_x + sigma sum g^n_{m,k} theta^m theta^k_x
///     + beta2 d_n theta^n_xxx = 0.
/// All per-mode vectors and the tensor are indexed by slot, not mode number.
/// `nonlinear` is stored without the sigma factor; the solver applies sigma.
struct CoefficientSet {
  std::vector<int> mode_indices;
  std::vector<double> phase_speed;
  std::vector<double> dispersion;
  Tensor3 nonlinear;
  double sigma = 1.0;
  double beta2 = 1.0;

  std::size_t size() const { return mode_indices.size(); }
  void validate() const;
};

/// Single-mode coefficient set, used by the synthetic benchmarks.
CoefficientSet single_mode_coefficients(double phase_speed, double nonlinear,
                                        double dispersion, int mode_index = 1);

enum class CoefficientMethod { quadrature, closed_form };

/// d_n = c_n^3 / (2 N^2)
std::vector<double> dispersion_coeffs(const ModeBasis& basis);

/// integral over [0, h] of sin(a pi z/h) cos(b pi z/h) sin(c pi z/h) dz
double triple_sine_integral(int a, int b, int c, double depth);

/// True when at least one of the triple-sine integrals entering g^n_{m,k}
/// is nonzero (one index equals the sum or difference of the other two).
bool selection_rule_allows(int n, int m, int k);

/// g^n_{m,k} = (N^2 c_n^2 / 2) int_0^h [(-1/c_m^2 + 2/c_k^2) Z^k Z^m_z
///             - Z^m Z^k_z / (c_m c_k)] Z^n dz
Tensor3 nonlinear_coeffs(const ModeBasis& basis, CoefficientMethod method,
                         int quad_points = kDefaultQuadPoints);

struct MethodAgreement {
  double max_relative_gap = 0.0;  // |q - c| / max(1, |c|)
  std::size_t worst_n = 0, worst_m = 0, worst_k = 0;
  bool within(double tol) const { return max_relative_gap <= tol; }
};

MethodAgreement compare_methods(const Tensor3& quadrature, const Tensor3& closed_form);

inline constexpr double kMethodTolerance = 1e-8;

/// Computes g by both routes; throws ConsistencyError when they disagree
/// beyond kMethodTolerance. The closed-form tensor is returned.
CoefficientSet build_coefficients(const ModeBasis& basis, double sigma = 1.0,
                                  double beta2 = 1.0);

// ---------------------------------------------------------------------------
// Reconciliation against the published McEwan-configuration tables.

enum class Verdict { confirmed, discrepant };

struct DiscrepancyEntry {
  std::string quantity;  // "c", "d" or "g"
  int n = 0, m = 0, k = 0;
  double computed = 0.0;
  double reference = 0.0;
  double relative_gap = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::discrepant;
};

struct MaskMismatch {
  int n, m, k;
  bool computed_nonzero;
  bool reference_nonzero;
};

struct DiscrepancyLog {
  std::vector<DiscrepancyEntry> entries;
  std::vector<MaskMismatch> mask_mismatches;

  std::size_t count(const std::string& quantity, Verdict v) const;
  const DiscrepancyEntry* find(const std::string& quantity, int n, int m = 0,
                               int k = 0) const;
  bool mask_matches() const { return mask_mismatches.empty(); }
};

inline constexpr double kPhaseSpeedTolerance = 0.02;
inline constexpr double kDispersionTolerance = 0.10;
inline constexpr double kNonlinearTolerance = 0.05;

/// Requires the basis/coefficients for modes (2,4,6,8,10) with N = 1.23,
/// h = 0.25. Never throws on disagreement; every table entry is classified.
DiscrepancyLog reconcile_with_reference_tables(const ModeBasis& basis,
                                               const CoefficientSet& coeffs);

void write_mode_table(std::ostream& os, const ModeBasis& basis,
                      const CoefficientSet& coeffs);
void write_nonlinear_table(std::ostream& os, const CoefficientSet& coeffs);
void write_reconciliation(std::ostream& os, const DiscrepancyLog& log);

}  // namespace ckdv
