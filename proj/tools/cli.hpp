#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "curecg/optimizer.hpp"

namespace curecg::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitNonconvergence = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitUsage = 64;

enum class Subcommand { kFit, kSimulate, kMc, kBootstrap, kResiduals };

struct RunConfig {
  Subcommand command = Subcommand::kFit;
  std::filesystem::path data;
  std::filesystem::path out;
  std::filesystem::path design;
  std::filesystem::path estimate;  // residuals: reuse a fit instead of refitting
  std::filesystem::path trace;     // fit: optional JSONL iteration log
  std::uint64_t seed = 0;
  std::optional<double> alpha;     // set = FixedAlpha
  NCGConfig optimizer{};
  std::size_t reps = 500;
  std::size_t B = 500;
  std::size_t m_sets = 5;
  unsigned threads = 0;
  bool quiet = false;
};

class UsageError : public std::runtime_error {
 public:
  UsageError(std::string message, int code = kExitUsage)
      : std::runtime_error(std::move(message)), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

// Throws UsageError naming the offending flag.  `--help` throws with code 0
// and the help text as the message.  The seed falls back to $CURECG_SEED,
// then 0.
RunConfig parse_args(int argc, const char* const* argv);

int cmd_fit(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_mc(const RunConfig& config);
int cmd_bootstrap(const RunConfig& config);
int cmd_residuals(const RunConfig& config);

// Dispatches and maps exceptions to exit codes, writing diagnostics to stderr.
int run(const RunConfig& config);
int main(int argc, const char* const* argv);

}  // namespace curecg::cli
