#pragma once

#include "tlearn/loss.hpp"
#include "tlearn/penalty.hpp"
#include "tlearn/solver.hpp"
#include "tlearn/tensor.hpp"
#include "tlearn/transform.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tlearn {

// ---------------------------------------------------------------------------
// Synthetic data

/// Exactly round(sr * N) entries observed, drawn uniformly without replacement.
Mask make_mask(Dims dims, double sr, std::uint64_t seed);

/// x + sigma * N(0, 1) entrywise; sigma = 0 returns x unchanged.
Tensor3 add_gaussian_noise(const Tensor3& x, double sigma, std::uint64_t seed);

/// Per transformed slice A_k B_k^T with Gaussian n1 x r and n2 x r factors,
/// mapped back to the original domain. Transformed multi-rank is (r, ..., r).
Tensor3 synth_low_multirank(Dims dims, Index r, const OrthogonalTransform& u,
                            std::uint64_t seed);

struct CompletionProblem {
  Tensor3 ground_truth;
  double sr = 1.0;
  double sigma_noise = 0.0;
  std::uint64_t seed = 0;
};

/// Noisy, masked observation of a completion problem.
struct CompletionData {
  Tensor3 noisy;  // ground truth plus noise, every entry
  Mask mask;
  CompletionLoss loss;
};

/// Noise is drawn with `seed`, the mask with `seed + 1`; noise comes first.
CompletionData observe(const CompletionProblem& problem);

struct ClassificationProblem {
  Tensor3 coeff_truth;
  std::vector<Tensor3> train_samples;
  std::vector<int> train_labels;
  std::vector<Tensor3> test_samples;
  std::vector<int> test_labels;
  std::uint64_t seed = 0;
};

/// Norm of the synthetic logistic coefficient tensor.
inline constexpr double kLogisticCoeffNorm = 5.0;

/// Gaussian samples with labels ~ Bernoulli(sigmoid(<Z, X*>)); X* is a
/// rank-r synthetic tensor scaled to Frobenius norm 5. The draw is repeated
/// once if the training positive rate falls outside [0.3, 0.7].
ClassificationProblem synth_logistic(Dims dims, Index r, Index n_train, Index n_test,
                                     const OrthogonalTransform& u, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metrics

/// 10 log10(N (max - min)^2 / ||recovered - truth||^2), extrema of `truth`.
/// Returns +infinity for an exact match.
double psnr(const Tensor3& recovered, const Tensor3& truth);

/// Mean over frontal slices of the global-statistics SSIM. Dynamic range L
/// comes from `truth` (whole tensor); c1 = (0.01 L)^2, c2 = (0.03 L)^2.
double ssim(const Tensor3& recovered, const Tensor3& truth);

double relative_error(const Tensor3& recovered, const Tensor3& truth);

struct Prediction {
  std::vector<double> probabilities;
  std::vector<int> labels;  // 1 iff probability > 0.5
};

Prediction predict(const Tensor3& x_hat, const std::vector<Tensor3>& samples);

double test_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

// ---------------------------------------------------------------------------
// Pipelines

struct SolverSettings {
  PenaltyParams penalty{PenaltyKind::Mcp, 1.0, 2.7};
  TransformKind transform = TransformKind::Dct;
  PmmConfig pmm;
  AdmmConfig admm;
  /// Outer-iteration cap for the DCT pilot solve of the data-driven transform.
  std::optional<int> pilot_max_outer;
};

struct PipelineResult {
  SolveResult solve;
  OrthogonalTransform transform;
  std::optional<SolveTrace> pilot_trace;
};

/// Default box bound for completion: 1.05 times the largest observed magnitude.
double default_completion_box(const CompletionLoss& loss);
inline constexpr double kClassificationBox = 10.0;

/// Solves with the requested transform. For the data-driven kind, first
/// solves under DCT with the same settings and builds the transform from
/// that estimate.
PipelineResult solve_with_transform(const Loss& loss, const SolverSettings& settings,
                                    const Tensor3& x0);

/// x0 = P_Omega(Y).
PipelineResult run_completion(const CompletionLoss& loss, const SolverSettings& settings);
/// x0 = 0.
PipelineResult run_classification(const LogisticLoss& loss, const SolverSettings& settings);

}  // namespace tlearn
