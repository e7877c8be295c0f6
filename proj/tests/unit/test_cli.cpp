#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"

namespace {

using namespace ckdv::cli;
namespace fs = std::filesystem;

Invocation parse(std::vector<const char*> args, const char* env = nullptr) {
  args.insert(args.begin(), "ckdv");
  return parse_invocation(static_cast<int>(args.size()), args.data(), env);
}

std::string usage_message(std::vector<const char*> args) {
  try {
    parse(std::move(args));
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ckdv_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Parse, RunWithConfig) {
  const Invocation inv = parse({"run", "--config", "mcewan.cfg"});
  EXPECT_EQ(inv.subcommand, Subcommand::run);
  EXPECT_EQ(inv.config_path, "mcewan.cfg");
  EXPECT_FALSE(inv.overrides.dt.has_value());
}

TEST(Parse, OverrideOrderDoesNotMatter) {
  const Invocation inv = parse({"run", "--dt", "1e-6", "--config", "mcewan.cfg"});
  EXPECT_EQ(inv.config_path, "mcewan.cfg");
  ASSERT_TRUE(inv.overrides.dt.has_value());
  EXPECT_EQ(*inv.overrides.dt, 1e-6);
}

TEST(Parse, UnknownSubcommandIsNamed) {
  EXPECT_NE(usage_message({"frobnicate"}).find("frobnicate"), std::string::npos);
}

TEST(Parse, UnknownFlagIsNamed) {
  EXPECT_NE(usage_message({"run", "--frobnicate"}).find("--frobnicate"), std::string::npos);
}

TEST(Parse, ExactlyOneSubcommand) {
  EXPECT_FALSE(usage_message({}).empty());
  EXPECT_FALSE(usage_message({"run", "coeffs"}).empty());
}

TEST(Parse, BadSchemeAndRunIdAreUsageErrors) {
  EXPECT_FALSE(usage_message({"run", "--scheme", "leapfrog"}).empty());
  EXPECT_FALSE(usage_message({"run", "--run-id", "a/b"}).empty());
}

TEST(Parse, OutputRootPrecedence) {
  EXPECT_EQ(parse({"run"}).out_root, "out");
  EXPECT_EQ(parse({"run"}, "/env").out_root, "/env");
  EXPECT_EQ(parse({"run", "--out", "/flag"}, "/env").out_root, "/flag");
}

TEST(Parse, FissionDefaultsToCanonicalPulses) {
  EXPECT_EQ(parse({"fission"}).amplitudes, (std::vector<double>{2.0, 6.0}));
  EXPECT_EQ(parse({"fission", "--amplitude", "3", "--amplitude", "1"}).amplitudes,
            (std::vector<double>{3.0, 1.0}));
}

TEST(Parse, HelpIsNotAnError) {
  const Invocation inv = parse({"--help"});
  EXPECT_TRUE(inv.help);
  EXPECT_NE(inv.help_text.find("run"), std::string::npos);
}

TEST(Resolve, FlagsBeatFileValues) {
  const fs::path dir = scratch("resolve");
  fs::create_directories(dir);
  std::ofstream(dir / "c.cfg") << "[run]\nt_end = 0.5\n[scheme]\ndt = 2e-6\n";
  const Invocation inv =
      parse({"run", "--config", (dir / "c.cfg").c_str(), "--dt", "1e-6", "--modes", "2,4"});
  const ckdv::ScenarioConfig cfg = resolve_config(inv);
  EXPECT_EQ(cfg.run.t_end, 0.5);
  EXPECT_EQ(cfg.scheme.dt, 1e-6);
  EXPECT_EQ(cfg.modes, (std::vector<int>{2, 4}));
}

TEST(Execute, ZeroFinalTimeWritesOnlyInitialSnapshot) {
  const fs::path out = scratch("t0");
  const std::string root = out.string();
  const Invocation inv = parse({"run", "--t-end", "0", "--out", root.c_str(), "--run-id", "z"});
  std::ostringstream o, e;
  EXPECT_EQ(execute(inv, o, e), kExitOk) << e.str();
  EXPECT_TRUE(fs::exists(out / "z" / "z_t0_modes.dat"));
  EXPECT_TRUE(fs::exists(out / "z" / "z_t0_field.dat"));
  EXPECT_TRUE(fs::exists(out / "z" / "z_config.ini"));
  EXPECT_TRUE(fs::exists(out / "z" / "z_meta.json"));
  std::size_t snapshots = 0;
  for (const auto& entry : fs::directory_iterator(out / "z"))
    if (entry.path().string().ends_with("_modes.dat")) ++snapshots;
  EXPECT_EQ(snapshots, 1u);
}

TEST(Execute, ConfigEchoReproducesTheRun) {
  const fs::path out = scratch("echo");
  const std::string root = out.string();
  std::ostringstream o, e;
  ASSERT_EQ(execute(parse({"run", "--t-end", "0", "--modes", "2,4", "--out", root.c_str(),
                           "--run-id", "a"}),
                    o, e),
            kExitOk);
  const std::string echo = (out / "a" / "a_config.ini").string();
  const Invocation again = parse({"run", "--config", echo.c_str(), "--out", root.c_str()});
  EXPECT_EQ(resolve_config(again).modes, (std::vector<int>{2, 4}));
}

TEST(Execute, InvalidConfigIsExitTwo) {
  const fs::path out = scratch("invalid");
  const std::string root = out.string();
  std::ostringstream o, e;
  EXPECT_EQ(execute(parse({"run", "--dx", "-1", "--out", root.c_str()}), o, e), kExitUsage);
  EXPECT_NE(e.str().find("grid.dx"), std::string::npos);
  EXPECT_EQ(execute(parse({"run", "--config", "/nonexistent.cfg", "--out", root.c_str()}), o, e),
            kExitUsage);
}

TEST(Execute, BlowUpIsExitThree) {
  const fs::path out = scratch("blowup");
  const std::string root = out.string();
  std::ostringstream o, e;
  EXPECT_EQ(execute(parse({"run", "--dt", "1e-3", "--t-end", "1", "--out", root.c_str(),
                           "--run-id", "b"}),
                    o, e),
            kExitNonFinite);
  EXPECT_TRUE(fs::exists(out / "b" / "b_last_finite.dat"));
}

TEST(Execute, CoeffsWritesTablesAndReconciliation) {
  const fs::path out = scratch("coeffs");
  const std::string root = out.string();
  std::ostringstream o, e;
  EXPECT_EQ(execute(parse({"coeffs", "--out", root.c_str()}), o, e), kExitOk);
  for (const char* f : {"mcewan_modes.dat", "mcewan_nonlinear.dat", "mcewan_reconciliation.dat"})
    EXPECT_TRUE(fs::exists(out / "mcewan" / f)) << f;
}

}  // namespace
