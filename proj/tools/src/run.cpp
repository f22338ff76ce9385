#include "tlearn_cli/run.hpp"

#include "tlearn/errors.hpp"
#include "tlearn/tsvd.hpp"
#include "tlearn_cli/io.hpp"

#include <chrono>
#include <cmath>

namespace tlearn::cli {

namespace {

using Clock = std::chrono::steady_clock;

OrthogonalTransform generating_transform(const ExperimentConfig& cfg, Index n3) {
  return cfg.transform == TransformKind::Identity ? identity_transform(n3) : dct_transform(n3);
}

struct Fit {
  double lambda;
  double beta;
  std::optional<PipelineResult> pipeline;
  std::optional<SolveTrace> diverged_trace;
  nlohmann::json metrics;
  double score = 0.0;  // larger is better
};

nlohmann::json completion_metrics(const Tensor3& x, const Tensor3& truth) {
  return {{"psnr", number(psnr(x, truth))},
          {"ssim", number(ssim(x, truth))},
          {"relative_error", number(relative_error(x, truth))}};
}

nlohmann::json classification_metrics(const Tensor3& x, const ClassificationInput& in) {
  nlohmann::json m;
  m["train_accuracy"] = test_accuracy(predict(x, in.train_samples).labels, in.train_labels);
  if (!in.test_samples.empty()) {
    m["test_accuracy"] = test_accuracy(predict(x, in.test_samples).labels, in.test_labels);
  }
  if (in.truth) m["relative_error"] = number(relative_error(x, *in.truth));
  return m;
}

template <typename SolveFn>
Fit fit_one(double lambda, double beta, SolveFn&& solve) {
  Fit fit{lambda, beta, std::nullopt, std::nullopt, {}, 0.0};
  try {
    fit.pipeline = solve(lambda, beta);
  } catch (const DivergenceError& e) {
    fit.diverged_trace = e.trace();
  }
  return fit;
}

nlohmann::json grid_entry(const Fit& fit) {
  nlohmann::json e = {{"lambda", fit.lambda}, {"beta", fit.beta}};
  if (!fit.pipeline) {
    e["status"] = "diverged";
    return e;
  }
  const SolveTrace& t = fit.pipeline->solve.trace;
  e["status"] = "ok";
  e["converged"] = t.converged;
  e["outer_iters"] = t.steps.size();
  e["metrics"] = fit.metrics;
  return e;
}

template <typename SolveFn, typename ScoreFn>
RunOutcome sweep_and_report(const ExperimentConfig& cfg, SolveFn&& solve, ScoreFn&& score,
                            nlohmann::json problem) {
  const auto start = Clock::now();
  std::vector<double> lambdas = cfg.grid_lambda.empty() ? std::vector{cfg.lambda} : cfg.grid_lambda;
  std::vector<double> betas = cfg.grid_beta.empty() ? std::vector{cfg.beta} : cfg.grid_beta;
  const bool sweeping = lambdas.size() * betas.size() > 1;

  nlohmann::json grid = nlohmann::json::array();
  std::optional<Fit> best;
  for (double lam : lambdas) {
    for (double b : betas) {
      Fit fit = fit_one(lam, b, solve);
      if (fit.pipeline) {
        fit.metrics = score(fit.pipeline->solve.x, fit.score);
      }
      if (sweeping) grid.push_back(grid_entry(fit));
      const bool better = fit.pipeline && (!best || !best->pipeline || fit.score > best->score);
      if (!best || better) best = std::move(fit);
    }
  }

  RunOutcome out;
  nlohmann::json& r = out.results;
  r["config"] = config_to_json(cfg);
  r["seed"] = cfg.seed;
  r["problem"] = std::move(problem);
  if (sweeping) {
    r["grid"] = std::move(grid);
    r["selected"] = {{"lambda", best->lambda}, {"beta", best->beta}};
  }
  if (!best->pipeline) {
    out.diverged = true;
    r["status"] = "diverged";
    r["trace"] = trace_to_json(*best->diverged_trace);
  } else {
    const PipelineResult& p = *best->pipeline;
    r["status"] = "ok";
    r["metrics"] = best->metrics;
    r["transform"] = transform_to_json(p.transform);
    r["trace"] = trace_to_json(p.solve.trace);
    if (p.pilot_trace) r["pilot_trace"] = trace_to_json(*p.pilot_trace);
    out.estimate = p.solve.x;
  }
  r["timing"] = {{"seconds", std::chrono::duration<double>(Clock::now() - start).count()}};
  return out;
}

RunOutcome run_completion_experiment(const ExperimentConfig& cfg) {
  const CompletionInput in = cfg.synthetic() ? synth_completion(cfg) : load_completion(cfg);
  const bool sweeping = cfg.grid_lambda.size() > 1 || cfg.grid_beta.size() > 1;
  if (sweeping && !in.truth) throw ParameterError("a grid sweep needs a ground-truth tensor");

  const CompletionLoss loss(in.observed, in.mask);
  const double box = cfg.box_c ? *cfg.box_c : default_completion_box(loss);
  auto solve = [&](double lam, double b) {
    return run_completion(loss, cfg.settings(lam, b, box));
  };
  auto score = [&](const Tensor3& x, double& s) -> nlohmann::json {
    if (!in.truth) return nlohmann::json::object();
    nlohmann::json m = completion_metrics(x, *in.truth);
    s = -relative_error(x, *in.truth);
    return m;
  };
  const Dims d = in.observed.dims();
  nlohmann::json problem = {{"dims", {d.n1, d.n2, d.n3}},
                            {"observed_count", in.mask.count()},
                            {"box_c", box},
                            {"synthetic", cfg.synthetic()}};
  return sweep_and_report(cfg, solve, score, std::move(problem));
}

RunOutcome run_classification_experiment(const ExperimentConfig& cfg) {
  const ClassificationInput in =
      cfg.synthetic() ? synth_classification(cfg) : load_classification(cfg);
  const bool sweeping = cfg.grid_lambda.size() > 1 || cfg.grid_beta.size() > 1;
  if (sweeping && in.test_samples.empty()) throw ParameterError("a grid sweep needs a test set");

  const LogisticLoss loss(in.train_samples, in.train_labels);
  const double box = cfg.box_c ? *cfg.box_c : kClassificationBox;
  std::optional<double> lipschitz;
  if (cfg.lipschitz == LipschitzSource::Spectral) lipschitz = loss.spectral_lipschitz();
  auto solve = [&](double lam, double b) {
    SolverSettings s = cfg.settings(lam, b, box);
    s.pmm.lipschitz = lipschitz;
    return run_classification(loss, s);
  };
  auto score = [&](const Tensor3& x, double& s) -> nlohmann::json {
    nlohmann::json m = classification_metrics(x, in);
    if (m.contains("test_accuracy")) s = m["test_accuracy"].get<double>();
    return m;
  };
  const Dims d = loss.dims();
  nlohmann::json problem = {{"dims", {d.n1, d.n2, d.n3}},
                            {"n_train", in.train_samples.size()},
                            {"n_test", in.test_samples.size()},
                            {"box_c", box},
                            {"synthetic", cfg.synthetic()}};
  return sweep_and_report(cfg, solve, score, std::move(problem));
}

}  // namespace

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

CompletionInput synth_completion(const ExperimentConfig& cfg) {
  const Dims d = cfg.resolved_dims();
  const OrthogonalTransform u = generating_transform(cfg, d.n3);
  CompletionProblem problem{synth_low_multirank(d, cfg.rank, u, cfg.seed), cfg.sr, cfg.sigma,
                            cfg.seed + 1};
  CompletionData data = observe(problem);
  return {data.loss.observed(), data.mask, std::move(problem.ground_truth)};
}

ClassificationInput synth_classification(const ExperimentConfig& cfg) {
  const Dims d = cfg.resolved_dims();
  ClassificationProblem p = synth_logistic(d, cfg.rank, cfg.n_train, cfg.n_test,
                                           generating_transform(cfg, d.n3), cfg.seed);
  return {std::move(p.train_samples), std::move(p.train_labels), std::move(p.test_samples),
          std::move(p.test_labels), std::move(p.coeff_truth)};
}

CompletionInput load_completion(const ExperimentConfig& cfg) {
  const Tensor3 y = read_tensor(cfg.observed);
  Mask mask = read_mask(cfg.mask);
  require_same_dims(y.dims(), mask.dims(), "observed tensor and mask");
  CompletionInput in{mask.apply(y), std::move(mask), std::nullopt};
  if (!cfg.truth.empty()) {
    in.truth = read_tensor(cfg.truth);
    require_same_dims(in.truth->dims(), y.dims(), "observed tensor and truth");
  }
  return in;
}

ClassificationInput load_classification(const ExperimentConfig& cfg) {
  const Index n3 = cfg.resolved_dims().n3;
  ClassificationInput in;
  in.train_samples = read_samples(cfg.train_samples, n3);
  in.train_labels = read_labels(cfg.train_labels);
  if (!cfg.test_samples.empty()) {
    in.test_samples = read_samples(cfg.test_samples, n3);
    in.test_labels = read_labels(cfg.test_labels);
    if (in.test_samples.size() != in.test_labels.size()) {
      throw DimensionError("test set: " + std::to_string(in.test_samples.size()) +
                           " samples but " + std::to_string(in.test_labels.size()) + " labels");
    }
  }
  if (!cfg.truth.empty()) in.truth = read_tensor(cfg.truth);
  return in;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return cfg.task == Task::Complete ? run_completion_experiment(cfg)
                                    : run_classification_experiment(cfg);
}

nlohmann::json trace_to_json(const SolveTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceEntry& e : trace.steps) {
    steps.push_back({{"iteration", e.iteration},
                     {"objective", number(e.objective)},
                     {"step_norm", number(e.step_norm)},
                     {"relative_step", number(e.relative_step)},
                     {"inner_iters", e.inner_iters},
                     {"inner_iters_to_tol", e.inner_iters_to_tol},
                     {"eta_e", number(e.kkt.eta_e)},
                     {"eta_d", number(e.kkt.eta_d)},
                     {"eta_p", number(e.kkt.eta_p)},
                     {"eta_res", number(e.kkt.eta_res)},
                     {"feasible", e.feasible},
                     {"descent_ok", e.descent_ok}});
  }
  return {{"initial_objective", number(trace.initial_objective)},
          {"initial_feasible", trace.initial_feasible},
          {"lipschitz", number(trace.lipschitz)},
          {"descent_a", number(trace.descent_a)},
          {"descent_enforced", trace.descent_enforced},
          {"converged", trace.converged},
          {"outer_iters", trace.steps.size()},
          {"warnings", trace.warnings},
          {"steps", std::move(steps)}};
}

nlohmann::json transform_to_json(const OrthogonalTransform& u) {
  nlohmann::json j = {{"kind", to_string(u.kind())}, {"size", u.size()}};
  if (u.kind() == TransformKind::DataDriven || u.kind() == TransformKind::Custom) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < u.size(); ++r) {
      std::vector<double> row(u.matrix().row(r).begin(), u.matrix().row(r).end());
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  }
  return j;
}

nlohmann::json without_timing(nlohmann::json results) {
  if (results.is_object()) {
    results.erase("timing");
    for (auto& [key, value] : results.items()) value = without_timing(std::move(value));
  } else if (results.is_array()) {
    for (auto& value : results) value = without_timing(std::move(value));
  }
  return results;
}

}  // namespace tlearn::cli
