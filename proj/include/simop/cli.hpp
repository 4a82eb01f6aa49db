#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "simop/evolution.hpp"
#include "simop/potential.hpp"
#include "simop/similarity.hpp"

namespace simop::cli {

enum class ExitCode : int {
  Success = 0,
  ToleranceBreach = 1,
  ConfigError = 2,
  PreconditionFailure = 3,
  NumericalFailure = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PotentialConfig {
  std::string kind = "constant";  // constant | coefficients | sample_file
  double c = 10.0;
  std::vector<std::pair<int, Block>> coefficients;
  std::string sample_file;
};

/// Initial conditions and (time-constant) forcing terms.
struct StateConfig {
  std::string kind = "decay";  // zero | decay | coefficients | sample_file | eigenvector
  std::vector<std::pair<int, Eigen::VectorXcd>> coefficients;
  std::string sample_file;
  int block = 1;  // eigenvector: outer block l, or 0 for the central cell
  int index = 0;  // eigenvector: which eigenvalue of that block
};

struct RunConfig {
  double omega = 2.0 * std::numbers::pi;
  int dim = 1;
  int half_width = 8;
  PotentialConfig potential;
  SimilarityOptions tolerances;
  std::vector<double> times{0.0, 0.5, 1.0};
  StateConfig initial;
  StateConfig forcing{.kind = "zero", .coefficients = {}, .sample_file = {}};
  int grid_points = 64;
  std::optional<int> tail_bound_n;
  double spectrum_tol = 1e-6;
  double evolution_tol = 1e-6;
  double golden_tol = 1e-10;
  double growth_horizon = 10.0;
  std::filesystem::path base_dir;  // sample files are resolved against it
};

/// Validates and fills defaults; throws ConfigError with the offending key.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved config, defaults included.
nlohmann::json manifest(const RunConfig& config);

TruncationWindow window_of(const RunConfig& config);
PotentialSpec build_potential(const RunConfig& config);
/// `sim` is needed only for the eigenvector kind.
EvolutionState build_state(const StateConfig& state, const TruncationWindow& window,
                           const SimilarityResult* sim = nullptr);

/// Runs one subcommand (spectrum, evolve, validate, diagnose) writing into `out`.
ExitCode run_command(const std::string& command, const RunConfig& config, const std::filesystem::path& out);

/// Entry point used by the executable.
int main_entry(int argc, char** argv);

}  // namespace simop::cli
