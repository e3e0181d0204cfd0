#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nltv::cli {

enum class Command { Eval, Verify, Denoise, Gamma, Table };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitVerify = 3;
inline constexpr int kExitNonConvergence = 4;

/// Bad command line; the message names the offending flag.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::Eval;
  std::string family;
  /// Empty means the family or data default (box in 1D, disc in 2D).
  std::string kernel;
  std::string input_path;
  std::string output_path;
  std::string trace_path;
  std::optional<double> scale;
  int n = 8;
  int k = 0;
  int j = 0;
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  std::string method = "mc";
  int points = 16;
  double tol = 1e-3;
  double alpha = 0.1;
  double p = 1.0;
  std::string solver = "pd";
  std::string scheme = "auto";
  double solver_tol = 1e-8;
  double eps = 1e-8;
  int max_iter = 100'000;
  std::vector<double> scales;
  std::string table;
  int kmax = 3;
  int nmax = 16;
};

/// Parses arguments without the program name. Throws UsageError.
RunConfig parse_args(const std::vector<std::string>& args);

/// Fixed-order rendering of every field, hashed into report headers.
std::string canonical(const RunConfig& cfg);

/// Executes a parsed configuration and returns the exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run with errors mapped to exit codes.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nltv::cli
