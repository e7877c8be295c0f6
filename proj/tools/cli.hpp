#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ckdv/scenario.hpp"

namespace ckdv::cli {

enum class Subcommand { run, coeffs, converge, verify, fission };

std::string to_string(Subcommand s);

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNonFinite = 3;

struct Overrides {
  std::optional<double> t_end;
  std::optional<double> dx;
  std::optional<double> dt;
  std::optional<std::string> modes;
  std::optional<std::string> scheme;
  std::optional<std::size_t> snapshot_every;
};

struct Invocation {
  Subcommand subcommand = Subcommand::run;
  std::string config_path;  // empty: built-in McEwan defaults
  std::string out_root;     // --out, else $CKDV_OUT, else "out"
  std::string run_id;       // empty: config run_id (run, coeffs) or the subcommand name
  Overrides overrides;
  std::vector<double> amplitudes;  // fission: canonical pulse amplitudes
  bool help = false;
  std::string help_text;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws UsageError naming the offending token. `env_out` is the value of
/// CKDV_OUT, or null when unset.
Invocation parse_invocation(int argc, const char* const* argv, const char* env_out);

/// File config (or defaults) with the flag overrides applied and validated.
ScenarioConfig resolve_config(const Invocation& inv);

/// Runs the pipeline; human-readable summary on `out`, errors on `err`.
int execute(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace ckdv::cli
