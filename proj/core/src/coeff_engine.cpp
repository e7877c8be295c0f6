#include "ckdv/coeff_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "ckdv/error.hpp"
#include "ckdv/snapshot_io.hpp"

namespace ckdv {

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

void CoefficientSet::validate() const {
  const std::size_t n = mode_indices.size();
  if (n == 0) throw ConfigError("coefficient set: no modes");
  if (phase_speed.size() != n || dispersion.size() != n ||
      nonlinear.extent() != n) {
    throw ConfigError("coefficient set: inconsistent sizes");
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!std::isfinite(phase_speed[s]) || !std::isfinite(dispersion[s])) {
      throw ConfigError("coefficient set: non-finite c or d");
    }
  }
  if (!std::isfinite(sigma) || !std::isfinite(beta2)) {
    throw ConfigError("coefficient set: non-finite scale parameter");
  }
}

CoefficientSet single_mode_coefficients(double phase_speed, double nonlinear,
                                        double dispersion, int mode_index) {
  CoefficientSet set;
  set.mode_indices = {mode_index};
  set.phase_speed = {phase_speed};
  set.dispersion = {dispersion};
  set.nonlinear = Tensor3(1);
  set.nonlinear(0, 0, 0) = nonlinear;
  return set;
}

std::vector<double> dispersion_coeffs(const ModeBasis& basis) {
  const double n_freq = basis.stratification().buoyancy_frequency;
  std::vector<double> d;
  d.reserve(basis.size());
  for (const Mode& m : basis.modes()) {
    const double c = m.phase_speed;
    d.push_back(c * c * c / (2.0 * n_freq * n_freq));
  }
  return d;
}

namespace {

// integral over [0, h] of cos(p pi z/h) cos(q pi z/h) dz for integers p, q >= 0
double cosine_overlap(int p, int q, double depth) {
  p = std::abs(p);
  q = std::abs(q);
  if (p != q) return 0.0;
  return p == 0 ? depth : 0.5 * depth;
}

}  // namespace

double triple_sine_integral(int a, int b, int c, double depth) {
  // sin(a) sin(c) = [cos(a - c) - cos(a + c)] / 2
  return 0.5 * (cosine_overlap(a - c, b, depth) - cosine_overlap(a + c, b, depth));
}

bool selection_rule_allows(int n, int m, int k) {
  return triple_sine_integral(k, m, n, 1.0) != 0.0 ||
         triple_sine_integral(m, k, n, 1.0) != 0.0;
}

Tensor3 nonlinear_coeffs(const ModeBasis& basis, CoefficientMethod method,
                         int quad_points) {
  const std::size_t size = basis.size();
  const Stratification& strat = basis.stratification();
  const double n2 = strat.buoyancy_frequency * strat.buoyancy_frequency;
  Tensor3 g(size);
  for (std::size_t n = 0; n < size; ++n) {
    const double cn = basis.mode(n).phase_speed;
    const double prefactor = 0.5 * n2 * cn * cn;
    for (std::size_t m = 0; m < size; ++m) {
      const double cm = basis.mode(m).phase_speed;
      for (std::size_t k = 0; k < size; ++k) {
        const double ck = basis.mode(k).phase_speed;
        const double w1 = -1.0 / (cm * cm) + 2.0 / (ck * ck);
        const double w2 = 1.0 / (cm * ck);
        double integral = 0.0;
        if (method == CoefficientMethod::quadrature) {
          integral = simpson(
              [&](double z) {
                return (w1 * basis.eigenfunction(k, z) * basis.eigenfunction_dz(m, z) -
                        w2 * basis.eigenfunction(m, z) * basis.eigenfunction_dz(k, z)) *
                       basis.eigenfunction(n, z);
              },
              0.0, strat.depth, quad_points);
        } else {
          const double amp = basis.mode(n).amplitude * basis.mode(m).amplitude *
                             basis.mode(k).amplitude;
          const int in = basis.mode(n).index;
          const int im = basis.mode(m).index;
          const int ik = basis.mode(k).index;
          integral = amp * (w1 * basis.wavenumber(m) *
                                triple_sine_integral(ik, im, in, strat.depth) -
                            w2 * basis.wavenumber(k) *
                                triple_sine_integral(im, ik, in, strat.depth));
        }
        g(n, m, k) = prefactor * integral;
      }
    }
  }
  return g;
}

MethodAgreement compare_methods(const Tensor3& quadrature, const Tensor3& closed_form) {
  if (quadrature.extent() != closed_form.extent()) {
    throw ConfigError("compare_methods: tensor extents differ");
  }
  MethodAgreement out;
  const std::size_t e = closed_form.extent();
  for (std::size_t n = 0; n < e; ++n)
    for (std::size_t m = 0; m < e; ++m)
      for (std::size_t k = 0; k < e; ++k) {
        const double c = closed_form(n, m, k);
        const double gap = std::abs(quadrature(n, m, k) - c) / std::max(1.0, std::abs(c));
        if (gap > out.max_relative_gap) {
          out = {gap, n, m, k};
        }
      }
  return out;
}

CoefficientSet build_coefficients(const ModeBasis& basis, double sigma, double beta2) {
  CoefficientSet set;
  set.mode_indices = basis.indices();
  for (const Mode& m : basis.modes()) set.phase_speed.push_back(m.phase_speed);
  set.dispersion = dispersion_coeffs(basis);
  const Tensor3 closed = nonlinear_coeffs(basis, CoefficientMethod::closed_form);
  const Tensor3 quad = nonlinear_coeffs(basis, CoefficientMethod::quadrature);
  const MethodAgreement agree = compare_methods(quad, closed);
  if (!agree.within(kMethodTolerance)) {
    std::ostringstream msg;
    msg << "nonlinear coefficients: quadrature and closed form disagree by "
        << agree.max_relative_gap << " at (n, m, k) = ("
        << set.mode_indices[agree.worst_n] << ", " << set.mode_indices[agree.worst_m]
        << ", " << set.mode_indices[agree.worst_k] << ")";
    throw ConsistencyError(msg.str());
  }
  set.nonlinear = closed;
  set.sigma = sigma;
  set.beta2 = beta2;
  set.validate();
  return set;
}

std::size_t DiscrepancyLog::count(const std::string& quantity, Verdict v) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(),
      [&](const DiscrepancyEntry& e) { return e.quantity == quantity && e.verdict == v; }));
}

const DiscrepancyEntry* DiscrepancyLog::find(const std::string& quantity, int n, int m,
                                             int k) const {
  for (const auto& e : entries) {
    if (e.quantity == quantity && e.n == n && e.m == m && e.k == k) return &e;
  }
  return nullptr;
}

namespace {

const char* verdict_name(Verdict v) {
  return v == Verdict::confirmed ? "CONFIRMED" : "DISCREPANT";
}

}  // namespace

void write_mode_table(std::ostream& os, const ModeBasis& basis,
                      const CoefficientSet& coeffs) {
  os << "# n\tc_n\tB_n\td_n\n";
  for (std::size_t s = 0; s < basis.size(); ++s) {
    os << basis.mode(s).index << '\t' << format_number(basis.mode(s).phase_speed) << '\t'
       << format_number(basis.mode(s).amplitude) << '\t' << format_number(coeffs.dispersion.at(s))
       << '\n';
  }
}

void write_nonlinear_table(std::ostream& os, const CoefficientSet& coeffs) {
  os << "# n\tm\tk\tg\n";
  const std::size_t e = coeffs.size();
  for (std::size_t n = 0; n < e; ++n)
    for (std::size_t m = 0; m < e; ++m)
      for (std::size_t k = 0; k < e; ++k) {
        os << coeffs.mode_indices[n] << '\t' << coeffs.mode_indices[m] << '\t'
           << coeffs.mode_indices[k] << '\t' << format_number(coeffs.nonlinear(n, m, k)) << '\n';
      }
}

void write_reconciliation(std::ostream& os, const DiscrepancyLog& log) {
  os << "# quantity\tn\tm\tk\tcomputed\treference\trelative_gap\ttolerance\tverdict\n";
  for (const auto& e : log.entries) {
    os << e.quantity << '\t' << e.n << '\t' << e.m << '\t' << e.k << '\t'
       << format_number(e.computed) << '\t' << format_number(e.reference) << '\t'
       << format_number(e.relative_gap) << '\t' << e.tolerance << '\t' << verdict_name(e.verdict)
       << '\n';
  }
  os << "# summary";
  for (const char* q : {"c", "d", "g"}) {
    os << "  " << q << ": " << log.count(q, Verdict::confirmed) << " confirmed, "
       << log.count(q, Verdict::discrepant) << " discrepant;";
  }
  os << "\n# zero/nonzero mask: "
     << (log.mask_matches() ? "matches" : "DIFFERS") << " ("
     << log.mask_mismatches.size() << " mismatched entries)\n";
  for (const auto& mm : log.mask_mismatches) {
    os << "#   g^" << mm.n << "_{" << mm.m << "," << mm.k << "}: computed "
       << (mm.computed_nonzero ? "nonzero" : "zero") << ", reference "
       << (mm.reference_nonzero ? "nonzero" : "zero") << '\n';
  }
}

}  // namespace ckdv
