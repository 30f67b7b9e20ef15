#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace consol {

/// Process exit codes. Each failure class has its own code.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,    ///< malformed or invalid configuration / model input
  kExitRuntime = 3,   ///< training diverged (non-finite loss)
  kExitIo = 4,        ///< file system failure
};

enum class OracleMethod { fd, series };

std::optional<OracleMethod> parse_oracle_method(const std::string& name);

/// Trains one model and writes model.json, history.csv and summary.json
/// into `out_dir`. Nothing is written when the configuration is invalid.
int cmd_train(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& log);

/// Writes one grid table per configured snapshot time, named
/// <method>_<index>.csv, into `out_dir`.
int cmd_oracle(const std::filesystem::path& config_path, OracleMethod method,
               const std::filesystem::path& out_dir, std::ostream& log);

/// Evaluates a trained model against an oracle on random space-time points
/// and on the snapshot grids; writes a JSON report.
int cmd_compare(const std::filesystem::path& model_path, const std::filesystem::path& config_path,
                OracleMethod oracle, const std::filesystem::path& report_path,
                std::optional<std::uint64_t> seed, std::ostream& log);

/// Trains one model per soil layer and writes per-layer outputs, stitched
/// full-depth grids and a dissipation table into `out_dir`.
int cmd_case_study(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                   std::optional<std::uint64_t> seed, std::ostream& log);

}  // namespace consol
