#include "tlearn/tasks.hpp"

#include "tlearn/errors.hpp"
#include "tlearn/tsvd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace tlearn {

Mask make_mask(Dims dims, double sr, std::uint64_t seed) {
  if (!(sr > 0.0 && sr <= 1.0)) throw ParameterError("sampling ratio must lie in (0, 1]");
  const Index total = dims.size();
  const auto observed = static_cast<Index>(std::llround(sr * static_cast<double>(total)));
  if (observed < 1) throw ParameterError("sampling ratio observes no entries");

  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `observed` positions are a uniform sample.
  for (Index n = 0; n < observed; ++n) {
    std::uniform_int_distribution<Index> pick(n, total - 1);
    std::swap(order[static_cast<std::size_t>(n)], order[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(total), 0);
  for (Index n = 0; n < observed; ++n) flags[static_cast<std::size_t>(order[n])] = 1;
  return Mask(dims, std::move(flags));
}

Tensor3 add_gaussian_noise(const Tensor3& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ParameterError("noise level must be nonnegative");
  if (sigma == 0.0) return x;
  Tensor3 out = x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (double& v : out.data()) v += sigma * normal(rng);
  return out;
}

Tensor3 synth_low_multirank(Dims dims, Index r, const OrthogonalTransform& u,
                            std::uint64_t seed) {
  if (r < 0 || r > std::min(dims.n1, dims.n2)) {
    throw ParameterError("synthetic rank must lie in [0, min(n1, n2)]");
  }
  if (u.size() != dims.n3) throw DimensionError("synth_low_multirank: transform size mismatch");
  Tensor3 xhat(dims);
  if (r == 0) return xhat;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto draw = [&](Index rows) {
    Matrix m(rows, r);
    for (Index c = 0; c < r; ++c)
      for (Index i = 0; i < rows; ++i) m(i, c) = normal(rng);
    return m;
  };
  for (Index k = 0; k < dims.n3; ++k) {
    const Matrix a = draw(dims.n1);
    const Matrix b = draw(dims.n2);
    xhat.slice(k).noalias() = a * b.transpose();
  }
  return inverse_transform(xhat, u);
}

CompletionData observe(const CompletionProblem& problem) {
  Tensor3 noisy = add_gaussian_noise(problem.ground_truth, problem.sigma_noise, problem.seed);
  Mask mask = make_mask(problem.ground_truth.dims(), problem.sr, problem.seed + 1);
  CompletionLoss loss(noisy, mask);
  return {std::move(noisy), std::move(mask), std::move(loss)};
}

namespace {

void draw_samples(std::mt19937_64& rng, Dims dims, Index count, const Tensor3& coeff,
                  std::vector<Tensor3>& samples, std::vector<int>& labels) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  samples.clear();
  labels.clear();
  samples.reserve(static_cast<std::size_t>(count));
  labels.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    Tensor3 z(dims);
    for (double& v : z.data()) v = normal(rng);
    const double prob = sigmoid(inner(z, coeff));
    labels.push_back(uniform(rng) < prob ? 1 : 0);
    samples.push_back(std::move(z));
  }
}

double positive_rate(const std::vector<int>& labels) {
  if (labels.empty()) return 0.5;
  return static_cast<double>(std::count(labels.begin(), labels.end(), 1)) /
         static_cast<double>(labels.size());
}

}  // namespace

ClassificationProblem synth_logistic(Dims dims, Index r, Index n_train, Index n_test,
                                     const OrthogonalTransform& u, std::uint64_t seed) {
  if (n_train < 1 || n_test < 0) throw ParameterError("sample counts must be positive");
  ClassificationProblem problem;
  problem.seed = seed;
  problem.coeff_truth = synth_low_multirank(dims, r, u, seed);
  const double norm = fro_norm(problem.coeff_truth);
  if (norm > 0.0) problem.coeff_truth *= kLogisticCoeffNorm / norm;

  std::mt19937_64 rng(seed + 1);
  for (int attempt = 0; attempt < 2; ++attempt) {
    draw_samples(rng, dims, n_train, problem.coeff_truth, problem.train_samples,
                 problem.train_labels);
    draw_samples(rng, dims, n_test, problem.coeff_truth, problem.test_samples,
                 problem.test_labels);
    const double rate = positive_rate(problem.train_labels);
    if (rate >= 0.3 && rate <= 0.7) break;
  }
  return problem;
}

double psnr(const Tensor3& recovered, const Tensor3& truth) {
  require_same_dims(recovered.dims(), truth.dims(), "psnr");
  const auto values = truth.data();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (range == 0.0) throw DegenerateInputError("psnr: ground truth is constant");
  const double err = (recovered.vec() - truth.vec()).squaredNorm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(truth.size()) * range * range / err);
}

double ssim(const Tensor3& recovered, const Tensor3& truth) {
  require_same_dims(recovered.dims(), truth.dims(), "ssim");
  const auto values = truth.data();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  const double n = static_cast<double>(truth.dims().slice_size());

  double total = 0.0;
  for (Index k = 0; k < truth.n3(); ++k) {
    const auto x = truth.slice(k).reshaped();
    const auto y = recovered.slice(k).reshaped();
    const double mx = x.mean();
    const double my = y.mean();
    const double vx = (x.array() - mx).square().sum() / n;
    const double vy = (y.array() - my).square().sum() / n;
    const double cov = ((x.array() - mx) * (y.array() - my)).sum() / n;
    if (vx == 0.0) {
      throw DegenerateInputError("ssim: ground-truth slice " + std::to_string(k) +
                                 " is constant");
    }
    total += (2.0 * mx * my + c1) * (2.0 * cov + c2) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(truth.n3());
}

double relative_error(const Tensor3& recovered, const Tensor3& truth) {
  require_same_dims(recovered.dims(), truth.dims(), "relative_error");
  const double denom = fro_norm(truth);
  if (denom == 0.0) throw DegenerateInputError("relative_error: ground truth is zero");
  return fro_norm(recovered - truth) / denom;
}

Prediction predict(const Tensor3& x_hat, const std::vector<Tensor3>& samples) {
  Prediction out;
  out.probabilities.reserve(samples.size());
  out.labels.reserve(samples.size());
  for (const Tensor3& z : samples) {
    const double p = sigmoid(inner(z, x_hat));
    out.probabilities.push_back(p);
    out.labels.push_back(p > 0.5 ? 1 : 0);
  }
  return out;
}

double test_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionError("test_accuracy: label vectors differ in length");
  }
  if (truth.empty()) throw ParameterError("test_accuracy: no labels");
  double wrong = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) wrong += std::abs(predicted[j] - truth[j]);
  return 1.0 - wrong / static_cast<double>(truth.size());
}

double default_completion_box(const CompletionLoss& loss) {
  const double peak = inf_norm(loss.observed());
  return peak > 0.0 ? 1.05 * peak : 1.0;
}

namespace {

OrthogonalTransform fixed_transform(TransformKind kind, Index n3) {
  switch (kind) {
    case TransformKind::Identity:
      return identity_transform(n3);
    case TransformKind::Dct:
      return dct_transform(n3);
    default:
      throw ParameterError("transform must be identity, dct or data");
  }
}

}  // namespace

PipelineResult solve_with_transform(const Loss& loss, const SolverSettings& settings,
                                    const Tensor3& x0) {
  const Index n3 = loss.dims().n3;
  if (settings.transform != TransformKind::DataDriven) {
    OrthogonalTransform u = fixed_transform(settings.transform, n3);
    SolveResult solve = pmm_solve(loss, settings.penalty, u, settings.pmm, settings.admm, x0);
    return {std::move(solve), std::move(u), std::nullopt};
  }
  PmmConfig pilot_cfg = settings.pmm;
  if (settings.pilot_max_outer) pilot_cfg.max_outer = *settings.pilot_max_outer;
  const OrthogonalTransform dct = dct_transform(n3);
  SolveResult pilot = pmm_solve(loss, settings.penalty, dct, pilot_cfg, settings.admm, x0);
  OrthogonalTransform u = data_driven_transform(pilot.x);
  SolveResult solve = pmm_solve(loss, settings.penalty, u, settings.pmm, settings.admm, x0);
  return {std::move(solve), std::move(u), std::move(pilot.trace)};
}

PipelineResult run_completion(const CompletionLoss& loss, const SolverSettings& settings) {
  return solve_with_transform(loss, settings, loss.observed());
}

PipelineResult run_classification(const LogisticLoss& loss, const SolverSettings& settings) {
  return solve_with_transform(loss, settings, Tensor3(loss.dims()));
}

}  // namespace tlearn
