#pragma once

#include "tlearn/tasks.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tlearn::cli {

enum class Task { Complete, Classify };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);
TransformKind parse_transform_kind(std::string_view name);

/// Where the descent test takes its Lipschitz constant from.
enum class LipschitzSource { Loss, Spectral };

/// Everything one run needs. Unset optionals take task-dependent defaults,
/// resolved by the accessors below.
struct ExperimentConfig {
  Task task = Task::Complete;

  PenaltyKind penalty = PenaltyKind::Mcp;
  double lambda = 1.0;
  double gamma = 2.7;
  TransformKind transform = TransformKind::Dct;
  std::optional<int> pilot_max_outer;

  double beta = 1.0;
  std::optional<double> rho;    // 10 for complete, 100 for classify
  double xi = 0.1;
  std::optional<double> box_c;  // completion: 1.05 max |observed|; classify: 10
  LipschitzSource lipschitz = LipschitzSource::Loss;
  int max_outer = 100;
  double tol_outer = 5e-4;

  double eta = 10.0;
  double tau = 1.618;
  int max_inner = 100;
  double tol_inner = 3e-3;

  // Synthetic problem (used when no input files are given).
  std::vector<Index> dims;  // empty: 30 x 30 x 10 for complete, 10 x 10 x 3 for classify
  Index rank = 2;
  double sr = 0.4;
  double sigma = 0.01;
  Index n_train = 500;
  Index n_test = 200;
  std::uint64_t seed = 0;

  // Completion files.
  std::string observed;
  std::string mask;
  // Classification files; sample stacks use the layout of read_samples.
  std::string train_samples;
  std::string train_labels;
  std::string test_samples;
  std::string test_labels;
  // Ground truth for metrics (tensor or coefficient tensor).
  std::string truth;

  std::string output;   // recovered tensor
  std::string results;  // results JSON; empty writes to stdout

  // Grid sweep; both empty means a single solve.
  std::vector<double> grid_lambda;
  std::vector<double> grid_beta;

  double resolved_rho() const;
  Dims resolved_dims() const;
  bool synthetic() const;

  /// Re-checks every range the library would check, naming the field.
  void validate() const;

  /// Solver settings for a given (lambda, beta) pair and box bound.
  SolverSettings settings(double lambda_value, double beta_value, double box) const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace tlearn::cli
