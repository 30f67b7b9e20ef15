#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "consol/network.hpp"
#include "consol/oracles.hpp"
#include "consol/training.hpp"

namespace consol {

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);
/// Creates the directory (and parents) or throws IoError.
void ensure_directory(const std::filesystem::path& dir);

/// Shortest decimal text that parses back to the same double; "nan"/"inf"
/// for non-finite values.
std::string format_double(double v);

inline constexpr const char* kModelFormat = "consolidation-pinn-model";
inline constexpr int kModelVersion = 1;

/// Model document:
///   {"format", "version", "activation", "layer_sizes", "parameters",
///    "scaling": {"x"|"z"|"t"|"u": {"offset", "scale"}},
///    "domain": {"x_min", "x_max", "z_min", "z_max", "t0", "t1"}}
nlohmann::json model_to_json(const Model& model);
/// Throws std::invalid_argument on a malformed document.
Model model_from_json(const nlohmann::json& doc);
void write_model(const std::filesystem::path& path, const Model& model);
Model read_model(const std::filesystem::path& path);

inline constexpr const char* kHistoryHeader = "epoch,mse_f,mse_b,mse_u,total,test_metric";
inline constexpr const char* kGridHeader = "x,z,t,u";

std::string history_csv(const TrainHistory& history);
/// Rows ordered z-outer, x-inner.
std::string grid_csv(const FieldGrid& grid);
FieldGrid parse_grid_csv(const std::string& text);
TrainHistory parse_history_csv(const std::string& text);

nlohmann::json to_json(const LossBreakdown& loss);

}  // namespace consol
