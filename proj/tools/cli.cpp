#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/diagnostics.hpp"
#include "ckdv/error.hpp"
#include "ckdv/field.hpp"
#include "ckdv/fission.hpp"
#include "ckdv/oracles.hpp"
#include "ckdv/snapshot_io.hpp"
#include "ckdv/studies.hpp"

namespace fs = std::filesystem;

namespace ckdv::cli {

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::run:
      return "run";
    case Subcommand::coeffs:
      return "coeffs";
    case Subcommand::converge:
      return "converge";
    case Subcommand::verify:
      return "verify";
    case Subcommand::fission:
      return "fission";
  }
  return "";
}

namespace {

struct Flags {
  std::string config, out, run_id, modes, scheme;
  double t_end = 0.0, dx = 0.0, dt = 0.0;
  std::size_t snapshot_every = 0;
  std::vector<double> amplitudes;
};

enum FlagSet : unsigned {
  kConfig = 1u << 0,
  kOut = 1u << 1,
  kRunId = 1u << 2,
  kTEnd = 1u << 3,
  kDx = 1u << 4,
  kDt = 1u << 5,
  kModes = 1u << 6,
  kScheme = 1u << 7,
  kSnapshotEvery = 1u << 8,
  kAmplitude = 1u << 9,
};

void add_flags(CLI::App* app, Flags& f, unsigned set) {
  if (set & kConfig) app->add_option("--config", f.config, "INI scenario file");
  if (set & kOut) app->add_option("--out", f.out, "output root (default $CKDV_OUT, else out)");
  if (set & kRunId) app->add_option("--run-id", f.run_id, "output subdirectory and file prefix");
  if (set & kTEnd) app->add_option("--t-end", f.t_end, "final time, s");
  if (set & kDx) app->add_option("--dx", f.dx, "grid spacing");
  if (set & kDt) app->add_option("--dt", f.dt, "time step, s");
  if (set & kModes) app->add_option("--modes", f.modes, "comma-separated mode numbers");
  if (set & kScheme) {
    app->add_option("--scheme", f.scheme, "two-stage or one-stage")
        ->check(CLI::IsMember({"two-stage", "two_stage", "one-stage", "one_stage"}));
  }
  if (set & kSnapshotEvery) {
    app->add_option("--snapshot-every", f.snapshot_every, "snapshot interval in steps");
  }
  if (set & kAmplitude) {
    app->add_option("--amplitude", f.amplitudes, "canonical pulse amplitude U0 (repeatable)");
  }
}

template <typename T>
std::optional<T> if_given(const CLI::App* app, const std::string& name, const T& value) {
  const CLI::Option* opt = app->get_option_no_throw(name);
  if (opt && opt->count() > 0) return value;
  return std::nullopt;
}

}  // namespace

Invocation parse_invocation(int argc, const char* const* argv, const char* env_out) {
  CLI::App app{"Coupled KdV internal-wave solver", "ckdv"};
  app.require_subcommand(1);
  Flags f;
  const unsigned scenario = kConfig | kOut | kRunId;
  struct Entry {
    Subcommand sub;
    const char* help;
    unsigned flags;
  };
  const Entry entries[] = {
      {Subcommand::run, "integrate a scenario and write snapshots and fields",
       scenario | kTEnd | kDx | kDt | kModes | kScheme | kSnapshotEvery},
      {Subcommand::coeffs, "write the c, d and g tables and the reconciliation report",
       scenario | kModes},
      {Subcommand::converge, "measure convergence orders on the soliton benchmark",
       kOut | kRunId | kScheme},
      {Subcommand::verify, "run the verification checks", scenario},
      {Subcommand::fission, "soliton census of released sech^2 pulses",
       kOut | kRunId | kTEnd | kDx | kDt | kAmplitude},
  };
  std::vector<std::pair<CLI::App*, Subcommand>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(to_string(e.sub), e.help);
    add_flags(sub, f, e.flags);
    subs.emplace_back(sub, e.sub);
  }

  Invocation inv;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    inv.help = true;
    const auto chosen = app.get_subcommands();
    inv.help_text = chosen.empty() ? app.help() : chosen.front()->help();
    return inv;
  } catch (const CLI::CallForAllHelp&) {
    inv.help = true;
    inv.help_text = app.help("", CLI::AppFormatMode::All);
    return inv;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    // A leading stray word surfaces only as "subcommand required"; name it.
    if (argc > 1 && argv[1][0] != '-' && message.find(argv[1]) == std::string::npos &&
        app.get_subcommands().empty()) {
      message = "unknown subcommand or argument '" + std::string(argv[1]) + "': " + message;
    }
    throw UsageError(message);
  }

  const CLI::App* chosen = nullptr;
  for (const auto& [sub, kind] : subs) {
    if (sub->parsed()) {
      chosen = sub;
      inv.subcommand = kind;
    }
  }
  inv.config_path = f.config;
  inv.run_id = f.run_id;
  inv.out_root = !f.out.empty() ? f.out : (env_out && *env_out ? env_out : "out");
  inv.overrides.t_end = if_given(chosen, "--t-end", f.t_end);
  inv.overrides.dx = if_given(chosen, "--dx", f.dx);
  inv.overrides.dt = if_given(chosen, "--dt", f.dt);
  inv.overrides.modes = if_given(chosen, "--modes", f.modes);
  inv.overrides.scheme = if_given(chosen, "--scheme", f.scheme);
  inv.overrides.snapshot_every = if_given(chosen, "--snapshot-every", f.snapshot_every);
  inv.amplitudes = f.amplitudes;
  if (inv.subcommand == Subcommand::fission && inv.amplitudes.empty()) inv.amplitudes = {2.0, 6.0};
  if (!inv.run_id.empty() && !filesystem_safe(inv.run_id)) {
    throw UsageError("--run-id '" + inv.run_id + "' is not filesystem-safe");
  }
  return inv;
}

ScenarioConfig resolve_config(const Invocation& inv) {
  ScenarioConfig cfg = inv.config_path.empty() ? mcewan_default() : load_config(inv.config_path);
  const Overrides& o = inv.overrides;
  if (o.t_end) cfg.run.t_end = *o.t_end;
  if (o.dx) cfg.grid.dx = *o.dx;
  if (o.dt) cfg.scheme.dt = *o.dt;
  if (o.modes) cfg.modes = parse_mode_list(*o.modes);
  if (o.scheme) cfg.scheme.scheme = scheme_from_string(*o.scheme);
  if (o.snapshot_every) cfg.run.snapshot_every = *o.snapshot_every;
  if (!inv.run_id.empty()) cfg.run.run_id = inv.run_id;
  require_valid(cfg);
  return cfg;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path make_output_dir(const Invocation& inv, const std::string& run_id) {
  const fs::path dir = fs::path(inv.out_root) / run_id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
  return dir;
}

std::string with_suffix(const std::string& filename, const std::string& suffix) {
  const auto dot = filename.rfind(".dat");
  return filename.substr(0, dot) + suffix + ".dat";
}

// --- run ---------------------------------------------------------------------

int run_pipeline(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const ScenarioConfig cfg = resolve_config(inv);
  const std::string& id = cfg.run.run_id;
  const fs::path dir = make_output_dir(inv, id);

  const ModeBasis basis = make_basis(cfg);
  const CoefficientSet coeffs = make_coefficients(cfg, basis);
  const Grid grid = make_grid(cfg);
  const SchemeParams params = make_scheme_params(cfg, grid, coeffs);
  const InitialState init = build_initial_state(cfg, basis, grid);

  write_text_file(dir / (id + "_config.ini"),
                  [&](std::ostream& os) { write_config(os, cfg); });
  write_text_file(dir / (id + "_projection.dat"), [&](std::ostream& os) {
    os << "# mode\tcoefficient\tenergy_fraction\n";
    for (std::size_t s = 0; s < basis.size(); ++s) {
      os << basis.mode(s).index << '\t' << format_number(init.projection.coefficients[s]) << '\t'
         << format_number(init.energy_fraction[s]) << '\n';
    }
    os << "# profile energy\t" << format_number(init.projection.profile_energy) << '\n'
       << "# captured energy\t" << format_number(init.projection.captured_energy) << '\n'
       << "# residual fraction\t" << format_number(init.projection.residual_fraction) << '\n'
       << "# max profile residual\t" << format_number(init.max_profile_residual) << '\n'
       << "# max field residual\t" << format_number(init.max_field_residual) << '\n';
  });

  std::size_t snapshots = 0;
  double final_max = 0.0, final_wall = 0.0;
  double initial_section_gap = 0.0, initial_section_bound = 0.0;
  auto emit = [&](const ModeState& state, std::size_t step) {
    const double t = state.time;
    write_text_file(dir / snapshot_filename(id, t), [&](std::ostream& os) {
      write_snapshot(os, state, grid, params.scheme, step);
    });
    for (std::size_t s = 0; s < state.mode_count(); ++s) {
      write_text_file(dir / mode_profile_filename(id, t, state.mode_indices()[s]),
                      [&](std::ostream& os) { write_mode_profile(os, state, grid, s); });
    }
    const FieldSnapshot field = synthesize(basis, state, grid, cfg.run.z_points);
    const std::string field_name = field_filename(id, t);
    export_field(dir / field_name, field, FieldFormat::grid_text);
    const double h = cfg.strat.depth;
    export_field(dir / with_suffix(field_name, "_upper"), slice_rows(field, 0.5 * h, h),
                 FieldFormat::grid_text);
    const CrossSection section = cross_section(field, 0.0);
    write_text_file(dir / with_suffix(field_name, "_x0"),
                    [&](std::ostream& os) { write_cross_section(os, section, t); });
    if (step == 0) {
      const double phi1 = cfg.paddle.phi1(section.x_used);
      for (std::size_t q = 0; q < section.z.size(); ++q) {
        const double full = phi1 * cfg.paddle.phi2(section.z[q], cfg.strat);
        initial_section_gap = std::max(initial_section_gap, std::abs(section.psi[q] - full));
      }
      initial_section_bound = std::abs(phi1) * init.max_profile_residual;
    }
    final_max = field.max_abs();
    final_wall = field.max_wall_abs();
    ++snapshots;
  };

  AdvanceOptions options;
  options.snapshot_every = cfg.run.snapshot_every;
  options.observer = emit;

  RunMetadata meta;
  meta.run_id = id;
  meta.subcommand = "run";
  meta.resolved_config = config_to_string(cfg);
  AdvanceResult result;
  try {
    result = advance(init.state, coeffs, grid, params, cfg.run.t_end, options);
  } catch (const NonFiniteError& e) {
    const ModeState& last = e.last_finite_state();
    write_text_file(dir / (id + "_last_finite.dat"), [&](std::ostream& os) {
      write_snapshot(os, last, grid, params.scheme, e.step() - 1);
    });
    meta.summary["status"] = "non-finite";
    meta.summary["failed_step"] = std::to_string(e.step());
    meta.summary["last_finite_time"] = format_number(last.time);
    meta.wall_seconds = seconds_since(start);
    write_metadata(dir / (id + "_meta.json"), meta);
    err << "ckdv run: " << e.what() << "; last finite state written to "
        << (dir / (id + "_last_finite.dat")).string() << '\n';
    return kExitNonFinite;
  }
  for (const auto& w : result.report.warnings) err << "warning: " << w << '\n';

  const bool wall_ok = final_wall <= 1e-14 * final_max;
  const bool section_ok = initial_section_gap <= initial_section_bound * (1.0 + 1e-12);
  auto& s = meta.summary;
  s["status"] = "completed";
  s["tau"] = format_number(result.report.tau);
  s["steps"] = std::to_string(result.report.steps);
  s["snapshots"] = std::to_string(snapshots);
  s["final_max_abs_psi"] = format_number(final_max);
  s["final_max_wall_abs_psi"] = format_number(final_wall);
  s["initial_cross_section_gap"] = format_number(initial_section_gap);
  s["initial_cross_section_bound"] = format_number(initial_section_bound);
  s["captured_energy_fraction"] = format_number(1.0 - init.projection.residual_fraction);
  meta.report = &result.report;
  meta.wall_seconds = seconds_since(start);
  write_metadata(dir / (id + "_meta.json"), meta);

  out << "run " << id << ": " << result.report.steps << " steps of tau = "
      << format_number(result.report.tau) << " s to t = " << format_number(result.state.time)
      << '\n'
      << "  snapshots written: " << snapshots << " (under " << dir.string() << ")\n"
      << "  captured paddle energy: " << format_number(1.0 - init.projection.residual_fraction)
      << '\n'
      << "  final max|psi| " << format_number(final_max) << ", on walls "
      << format_number(final_wall) << (wall_ok ? " (ok)" : " (NOT zero)") << '\n'
      << "  t=0 cross-section gap " << format_number(initial_section_gap) << " vs bound "
      << format_number(initial_section_bound) << (section_ok ? " (ok)" : " (exceeded)") << '\n';
  return wall_ok && section_ok ? kExitOk : kExitCheckFailed;
}

// --- coeffs ------------------------------------------------------------------

bool is_reference_configuration(const ScenarioConfig& cfg) {
  const std::vector<int> tabulated = {2, 4, 6, 8, 10};
  return cfg.strat == Stratification{1.23, 0.25} && cfg.modes == tabulated;
}

int coeffs_pipeline(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig cfg = resolve_config(inv);
  const std::string& id = cfg.run.run_id;
  const fs::path dir = make_output_dir(inv, id);
  const ModeBasis basis = make_basis(cfg);
  const MethodAgreement agreement =
      compare_methods(nonlinear_coeffs(basis, CoefficientMethod::quadrature),
                      nonlinear_coeffs(basis, CoefficientMethod::closed_form));
  const CoefficientSet coeffs = build_coefficients(basis, cfg.scheme.sigma, cfg.scheme.beta2);

  write_text_file(dir / (id + "_config.ini"),
                  [&](std::ostream& os) { write_config(os, cfg); });
  write_text_file(dir / (id + "_modes.dat"),
                  [&](std::ostream& os) { write_mode_table(os, basis, coeffs); });
  write_text_file(dir / (id + "_nonlinear.dat"), [&](std::ostream& os) {
    os << "# quadrature vs closed form: max relative gap "
       << format_number(agreement.max_relative_gap) << '\n';
    write_nonlinear_table(os, coeffs);
  });

  out << "coeffs " << id << ": " << basis.size() << " modes, quadrature/closed-form gap "
      << format_number(agreement.max_relative_gap) << " (tolerance "
      << format_number(kMethodTolerance) << ")\n";
  if (is_reference_configuration(cfg)) {
    const DiscrepancyLog log = reconcile_with_reference_tables(basis, coeffs);
    write_text_file(dir / (id + "_reconciliation.dat"),
                    [&](std::ostream& os) { write_reconciliation(os, log); });
    for (const char* q : {"c", "d", "g"}) {
      out << "  " << q << ": " << log.count(q, Verdict::confirmed) << " confirmed, "
          << log.count(q, Verdict::discrepant) << " discrepant\n";
    }
    out << "  zero/nonzero mask mismatches: " << log.mask_mismatches.size() << '\n';
  } else {
    out << "  reconciliation skipped: tables exist only for N = 1.23, h = 0.25, modes "
           "2,4,6,8,10\n";
  }
  return agreement.within(kMethodTolerance) ? kExitOk : kExitCheckFailed;
}

// --- checks ------------------------------------------------------------------

enum class Status { pass, fail, info, skipped };

const char* status_name(Status s) {
  switch (s) {
    case Status::pass:
      return "PASS";
    case Status::fail:
      return "FAIL";
    case Status::info:
      return "INFO";
    case Status::skipped:
      return "SKIPPED";
  }
  return "";
}

struct Check {
  std::string name;
  double value = 0.0;
  std::string limit;
  Status status = Status::info;
};

class CheckList {
 public:
  void add(std::string name, double value, std::string limit, bool ok) {
    checks_.push_back({std::move(name), value, std::move(limit), ok ? Status::pass : Status::fail});
  }
  void note(std::string name, double value, std::string limit, Status status = Status::info) {
    checks_.push_back({std::move(name), value, std::move(limit), status});
  }
  bool all_passed() const {
    return std::none_of(checks_.begin(), checks_.end(),
                        [](const Check& c) { return c.status == Status::fail; });
  }
  void write(std::ostream& os) const {
    os << "# check\tvalue\tlimit\tstatus\n";
    for (const auto& c : checks_) {
      os << c.name << '\t' << format_number(c.value) << '\t' << c.limit << '\t'
         << status_name(c.status) << '\n';
    }
  }
  void summarize(std::ostream& os) const {
    for (const auto& c : checks_) {
      os << "  " << status_name(c.status) << "  " << c.name << " = " << format_number(c.value)
         << " (" << c.limit << ")\n";
    }
  }

 private:
  std::vector<Check> checks_;
};

std::string bound(const char* relation, double v) {
  return std::string(relation) + ' ' + format_number(v);
}

// --- converge ----------------------------------------------------------------

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

int converge_pipeline(const Invocation& inv, std::ostream& out) {
  const std::string id = inv.run_id.empty() ? "converge" : inv.run_id;
  const fs::path dir = make_output_dir(inv, id);
  const std::optional<Scheme> only =
      inv.overrides.scheme ? std::optional(scheme_from_string(*inv.overrides.scheme))
                           : std::nullopt;
  CheckList checks;
  if (!only || *only == Scheme::two_stage) {
    const ConvergenceReport r = two_stage_spatial_study();
    write_text_file(dir / (id + "_two_stage.dat"),
                    [&](std::ostream& os) { write_convergence_report(os, r); });
    const auto& finest = r.levels.back();
    checks.add("two-stage finest relative L2 error",
               finest.completed ? finest.relative_error : std::numeric_limits<double>::infinity(), bound("<=", 1e-3),
               finest.completed && finest.relative_error <= 1e-3);
    checks.add("two-stage spatial order", r.fit.order, "in [1.8, 2.2]",
               r.fit.asymptotic && in_band(r.fit.order, 1.8, 2.2));
    checks.add("two-stage fit residual", r.fit.residual, bound("<=", kFitResidualLimit),
               r.fit.asymptotic);
  }
  if (!only || *only == Scheme::one_stage) {
    const ConvergenceReport r = one_stage_temporal_study();
    write_text_file(dir / (id + "_one_stage.dat"),
                    [&](std::ostream& os) { write_convergence_report(os, r); });
    checks.add("one-stage temporal order", r.fit.order, "in [0.8, 1.2]",
               r.fit.asymptotic && in_band(r.fit.order, 0.8, 1.2));
    checks.add("one-stage fit residual", r.fit.residual, bound("<=", kFitResidualLimit),
               r.fit.asymptotic);
  }
  write_text_file(dir / (id + "_summary.dat"), [&](std::ostream& os) { checks.write(os); });
  out << "converge " << id << ":\n";
  checks.summarize(out);
  return checks.all_passed() ? kExitOk : kExitCheckFailed;
}

// --- verify ------------------------------------------------------------------

double orthonormality_error(const ModeBasis& basis) {
  double worst = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t n = 0; n < basis.size(); ++n) {
      const double ip = weighted_inner_product(basis.profile(j), basis.profile(n),
                                               basis.stratification());
      worst = std::max(worst, std::abs(ip - (j == n ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double odd_mode_projection(const ScenarioConfig& cfg) {
  std::vector<int> all(10);
  for (int n = 1; n <= 10; ++n) all[n - 1] = n;
  const ModeBasis basis = build_constant_n_basis(cfg.strat, all);
  PaddleProfile centred = cfg.paddle;
  centred.z0 = 0.5 * cfg.strat.depth;
  const Projection p = project_profile(centred.vertical(cfg.strat), basis);
  double worst = 0.0;
  for (std::size_t s = 0; s < basis.size(); ++s) {
    if (basis.mode(s).index % 2 == 1) worst = std::max(worst, std::abs(p.coefficients[s]));
  }
  return worst;
}

int verify_pipeline(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig cfg = resolve_config(inv);
  const std::string id = inv.run_id.empty() ? "verify" : inv.run_id;
  const fs::path dir = make_output_dir(inv, id);
  CheckList checks;

  const ModeBasis basis = make_basis(cfg);
  checks.add("basis orthonormality max error", orthonormality_error(basis), bound("<=", 1e-10),
             orthonormality_error(basis) <= 1e-10);
  const double odd = odd_mode_projection(cfg);
  checks.add("odd-mode projection of centred paddle", odd, bound("<", 1e-12), odd < 1e-12);
  const MethodAgreement agreement =
      compare_methods(nonlinear_coeffs(basis, CoefficientMethod::quadrature),
                      nonlinear_coeffs(basis, CoefficientMethod::closed_form));
  checks.add("g quadrature vs closed form", agreement.max_relative_gap,
             bound("<=", kMethodTolerance), agreement.within(kMethodTolerance));

  const SolitonBenchmark bench;
  const SolitonOracle& sol = bench.oracle;
  const double residual =
      substitution_residual(
          sol.coefficients(),
          [&](std::size_t, long double x, long double t) { return sol.value(x, t); },
          -8.0 * sol.width(), 16.0 * sol.width(), 400, 0.0)
          .relative();
  checks.add("soliton oracle residual", residual, bound("<=", kOracleResidualTolerance),
             residual <= kOracleResidualTolerance);

  const ConservationStudy cons = conservation_study();
  write_text_file(dir / (id + "_conservation.dat"), [&](std::ostream& os) {
    os << "# steps\t" << cons.steps << '\n'
       << "# max |theta|\t" << format_number(cons.max_abs_theta) << '\n'
       << "# mass change\t" << format_number(cons.mass_change) << '\n'
       << "# mass bound\t" << format_number(cons.mass_bound) << '\n'
       << "# energy drift tau\t" << format_number(cons.energy_drift_tau) << '\n'
       << "# energy drift tau/2\t" << format_number(cons.energy_drift_half) << '\n'
       << "# energy drift ratio\t" << format_number(cons.energy_ratio) << '\n'
       << "# nonlinear energy drift ratio\t" << format_number(cons.nonlinear_ratio) << '\n';
  });
  checks.add("mass change over 1e5 steps", cons.mass_change, bound("<=", cons.mass_bound),
             cons.mass_ok());
  checks.add("energy drift ratio tau / (tau/2)", cons.energy_ratio, "in [1.7, 2.3]",
             cons.energy_ok());
  checks.note("energy drift ratio with nonlinearity", cons.nonlinear_ratio, "measured");

  const std::vector<double> b_values = {0.5, 1.0, 2.0, 4.0, 8.0};
  const StabilityProbe probe = soliton_stability_probe(Scheme::two_stage, b_values);
  write_text_file(dir / (id + "_stability.dat"),
                  [&](std::ostream& os) { write_stability_probe(os, probe); });
  checks.add("stability verdicts monotone in b", probe.monotone ? 1.0 : 0.0, "== 1",
             probe.monotone);
  checks.add("largest stable b (tau = b dx^4)", probe.max_stable_b,
             bound(">=", bench.margin), probe.max_stable_b >= bench.margin);

  const std::vector<double> courant = {0.1, 0.2, 0.3, 0.5, 1.0};
  const StabilityProbe advection = advection_stability_probe(256, courant);
  write_text_file(dir / (id + "_advection.dat"),
                  [&](std::ostream& os) { write_stability_probe(os, advection); });
  checks.add("advection-only verdicts monotone", advection.monotone ? 1.0 : 0.0, "== 1",
             advection.monotone);
  checks.note("advection-only largest stable Courant number", advection.max_stable_b,
              "measured; 1 would match tau <= dx/c");

  const PairCheckReport pair = integrable_pair_check();
  write_text_file(dir / (id + "_pair.dat"), [&](std::ostream& os) { write_pair_check(os, pair); });
  if (!pair.oracle_ok) {
    checks.note("coupled pair check (" + pair.notice + ")", pair.substitution_residual,
                bound("<=", kOracleResidualTolerance), Status::skipped);
  } else {
    checks.add("coupled pair oracle residual", pair.substitution_residual,
               bound("<=", kOracleResidualTolerance), true);
    for (std::size_t n = 0; n < pair.decoupled_relative_error.size(); ++n) {
      const double e = pair.decoupled_relative_error[n];
      checks.add("decoupled mode " + std::to_string(n + 1) + " relative error", e,
                 bound("<=", 1e-2), e <= 1e-2);
    }
    const OrderFit& fit = pair.convergence.fit;
    checks.add("coupled pair spatial order", fit.order, "in [1.8, 2.2]",
               fit.asymptotic && in_band(fit.order, 1.8, 2.2));
    checks.add("time-reversal error / forward error", pair.reversal_error / pair.forward_error,
               bound("<=", 2.0), pair.reversal_error <= 2.0 * pair.forward_error);
  }

  for (double u0 : {2.0, 6.0}) {
    const FissionReport f = fission_census(canonical_fission_setup(u0));
    checks.add("fission U0=" + format_time(u0) + " detected solitons",
               static_cast<double>(f.detected_count),
               "== " + std::to_string(f.predicted_count) + " predicted",
               f.detected_count == f.predicted_count);
  }

  write_text_file(dir / (id + "_report.dat"), [&](std::ostream& os) { checks.write(os); });
  out << "verify " << id << ":\n";
  checks.summarize(out);
  return checks.all_passed() ? kExitOk : kExitCheckFailed;
}

// --- fission -----------------------------------------------------------------

int fission_pipeline(const Invocation& inv, std::ostream& out) {
  const std::string id = inv.run_id.empty() ? "fission" : inv.run_id;
  const fs::path dir = make_output_dir(inv, id);
  CheckList checks;
  for (double u0 : inv.amplitudes) {
    if (!(u0 > 0.0)) throw ConfigError("--amplitude must be > 0");
    FissionSetup setup = canonical_fission_setup(u0);
    if (inv.overrides.dx) setup.dx = *inv.overrides.dx;
    if (inv.overrides.t_end) setup.t_end = *inv.overrides.t_end;
    if (inv.overrides.dt) setup.tau = *inv.overrides.dt;
    const FissionReport r = fission_census(setup);
    write_text_file(dir / (id + "_U" + format_time(u0) + ".dat"),
                    [&](std::ostream& os) { write_fission_report(os, r); });
    checks.add("U0=" + format_time(u0) + " detected solitons",
               static_cast<double>(r.detected_count),
               "== " + std::to_string(r.resolvable_count) + " resolvable of " +
                   std::to_string(r.predicted_count) + " predicted",
               r.detected_count == r.resolvable_count);
  }
  write_text_file(dir / (id + "_summary.dat"), [&](std::ostream& os) { checks.write(os); });
  out << "fission " << id << ":\n";
  checks.summarize(out);
  return checks.all_passed() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const std::string name = "ckdv " + to_string(inv.subcommand) + ": ";
  try {
    switch (inv.subcommand) {
      case Subcommand::run:
        return run_pipeline(inv, out, err);
      case Subcommand::coeffs:
        return coeffs_pipeline(inv, out);
      case Subcommand::converge:
        return converge_pipeline(inv, out);
      case Subcommand::verify:
        return verify_pipeline(inv, out);
      case Subcommand::fission:
        return fission_pipeline(inv, out);
    }
  } catch (const ConfigError& e) {
    err << name << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << name << e.what() << '\n';
    return kExitUsage;
  } catch (const NonFiniteError& e) {
    err << name << e.what() << '\n';
    return kExitNonFinite;
  } catch (const std::exception& e) {
    err << name << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace ckdv::cli
