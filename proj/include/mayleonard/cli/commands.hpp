#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mayleonard/cli/config.hpp"

namespace mayleonard::cli {

/// Process exit codes; a stable contract for scripts.
enum ExitCode : int {
  kExitOk = 0,
  kExitAdmissibility = 1,
  kExitBlowUp = 2,
  kExitIo = 3,
  kExitSolver = 4,
  kExitVerification = 5,
  kExitUsage = 64,
};

/// Where command output goes. Diagnostics are written to `err`.
struct Streams {
  std::ostream& out;
  std::ostream& err;
  bool color = false;
  bool warn_nonpositive = false;
};

int cmd_simulate(const RunConfig& cfg, Streams io);
int cmd_special(const RunConfig& cfg, Streams io);
int cmd_solve(const SolveRequest& req, Streams io, const std::optional<std::string>& output = {});
int cmd_verify(const RunConfig& cfg, Streams io);

/// Verifies `count` generated instances starting at `first_seed`; prints one
/// summary line per seed in seed order.
int cmd_verify_batch(const RunConfig& base, std::uint64_t first_seed, int count, Streams io);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

/// The certification battery behind cmd_verify.
std::vector<CheckResult> run_checks(const RunConfig& cfg);
nlohmann::json checks_to_json(const std::vector<CheckResult>& checks);

/// JSON rendering of a solver outcome, including residuals and induced z
/// for each returned pair.
nlohmann::json solve_report(const SolveRequest& req, int& exit_code);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, Streams io);

}  // namespace mayleonard::cli
