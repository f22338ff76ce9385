#pragma once

#include "tlearn/solver.hpp"
#include "tlearn/tasks.hpp"
#include "tlearn_cli/config.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace tlearn::cli {

/// Completion instance either loaded from files or synthesized from the config.
struct CompletionInput {
  Tensor3 observed;  // zero off the mask
  Mask mask;
  std::optional<Tensor3> truth;
};

struct ClassificationInput {
  std::vector<Tensor3> train_samples;
  std::vector<int> train_labels;
  std::vector<Tensor3> test_samples;
  std::vector<int> test_labels;
  std::optional<Tensor3> truth;
};

/// Synthetic truth uses `seed`; noise and mask use seed + 1 and seed + 2.
/// The truth is low-rank under the configured transform (DCT for "data").
CompletionInput synth_completion(const ExperimentConfig& cfg);
ClassificationInput synth_classification(const ExperimentConfig& cfg);

CompletionInput load_completion(const ExperimentConfig& cfg);
ClassificationInput load_classification(const ExperimentConfig& cfg);

struct RunOutcome {
  nlohmann::json results;
  Tensor3 estimate;
  bool diverged = false;
};

/// Full pipeline for cfg.task: input, optional grid sweep, final solve,
/// metrics. A grid sweep picks the pair with the best truth metric (lowest
/// relative error for completion, highest test accuracy for classification;
/// earliest grid point on ties) and therefore needs a truth / test set.
RunOutcome run_experiment(const ExperimentConfig& cfg);

nlohmann::json trace_to_json(const SolveTrace& trace);
nlohmann::json transform_to_json(const OrthogonalTransform& u);

/// Copy of a results document with every "timing" member removed.
nlohmann::json without_timing(nlohmann::json results);

/// NaN and infinities become null.
nlohmann::json number(double v);

}  // namespace tlearn::cli
