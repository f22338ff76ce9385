#include "tlearn_cli/cli.hpp"

#include "tlearn/errors.hpp"
#include "tlearn/solver.hpp"
#include "tlearn/tsvd.hpp"
#include "tlearn_cli/config.hpp"
#include "tlearn_cli/io.hpp"
#include "tlearn_cli/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace tlearn::cli {

namespace {

namespace fs = std::filesystem;

/// Flags that override the config file when given.
struct Overrides {
  std::string config_path;
  std::optional<std::string> penalty, transform, lipschitz;
  std::optional<double> lambda, gamma, beta, rho, eta, tau, xi, box_c, sr, sigma;
  std::optional<double> tol_outer, tol_inner;
  std::optional<int> max_outer, max_inner, pilot_max_outer;
  std::optional<std::uint64_t> seed;
  std::optional<Index> rank, n_train, n_test;
  std::vector<Index> dims;
  std::optional<std::string> observed, mask, truth, output, results;
  std::optional<std::string> train_samples, train_labels, test_samples, test_labels;
  std::vector<double> grid_lambda, grid_beta;
};

void add_synthetic_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--dims", o.dims, "Tensor size n1 n2 n3")->expected(3);
  cmd->add_option("--rank", o.rank, "Transformed multi-rank of the synthetic truth");
  cmd->add_option("--sr", o.sr, "Sampling ratio");
  cmd->add_option("--sigma", o.sigma, "Noise standard deviation");
  cmd->add_option("--n-train", o.n_train, "Training samples");
  cmd->add_option("--n-test", o.n_test, "Test samples");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--transform", o.transform, "identity, dct or data");
}

void add_solver_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--penalty", o.penalty, "mcp, scad, log or convex");
  cmd->add_option("--lambda", o.lambda, "Penalty level");
  cmd->add_option("--gamma", o.gamma, "Penalty shape");
  cmd->add_option("--beta", o.beta, "Regularization weight");
  cmd->add_option("--rho", o.rho, "Proximal weight");
  cmd->add_option("--eta", o.eta, "ADMM penalty");
  cmd->add_option("--tau", o.tau, "ADMM dual step factor");
  cmd->add_option("--xi", o.xi, "Inexactness constant in (0, 1/2)");
  cmd->add_option("--box-c", o.box_c, "Entrywise bound of the feasible set");
  cmd->add_option("--lipschitz", o.lipschitz, "loss or spectral");
  cmd->add_option("--max-outer", o.max_outer, "Outer iteration cap");
  cmd->add_option("--tol-outer", o.tol_outer, "Outer relative-step tolerance");
  cmd->add_option("--max-inner", o.max_inner, "Inner iteration cap");
  cmd->add_option("--tol-inner", o.tol_inner, "Inner KKT tolerance");
  cmd->add_option("--pilot-max-outer", o.pilot_max_outer,
                  "Outer cap of the DCT pilot for the data transform");
  cmd->add_option("--grid-lambda", o.grid_lambda, "Comma-separated lambda grid")
      ->delimiter(',');
  cmd->add_option("--grid-beta", o.grid_beta, "Comma-separated beta grid")->delimiter(',');
  cmd->add_option("--truth", o.truth, "Ground-truth tensor for metrics");
  cmd->add_option("--output", o.output, "Write the estimate here (TNS1)");
  cmd->add_option("--results", o.results, "Write the results JSON here");
  add_synthetic_flags(cmd, o);
}

template <typename T>
void apply(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

template <typename T>
void apply(const std::optional<T>& flag, std::optional<T>& field) {
  if (flag) field = *flag;
}

ExperimentConfig build_config(Task task, const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_config(o.config_path);
    if (cfg.task != task) {
      throw ParameterError("config file is for task '" + std::string(to_string(cfg.task)) +
                           "' but the subcommand is '" + std::string(to_string(task)) + "'");
    }
  }
  cfg.task = task;
  if (o.penalty) cfg.penalty = parse_penalty_kind(*o.penalty);
  if (o.transform) cfg.transform = parse_transform_kind(*o.transform);
  if (o.lipschitz) {
    if (*o.lipschitz == "loss") {
      cfg.lipschitz = LipschitzSource::Loss;
    } else if (*o.lipschitz == "spectral") {
      cfg.lipschitz = LipschitzSource::Spectral;
    } else {
      throw ParameterError("--lipschitz must be 'loss' or 'spectral'");
    }
  }
  apply(o.lambda, cfg.lambda);
  apply(o.gamma, cfg.gamma);
  apply(o.beta, cfg.beta);
  apply(o.rho, cfg.rho);
  apply(o.eta, cfg.eta);
  apply(o.tau, cfg.tau);
  apply(o.xi, cfg.xi);
  apply(o.box_c, cfg.box_c);
  apply(o.sr, cfg.sr);
  apply(o.sigma, cfg.sigma);
  apply(o.tol_outer, cfg.tol_outer);
  apply(o.tol_inner, cfg.tol_inner);
  apply(o.max_outer, cfg.max_outer);
  apply(o.max_inner, cfg.max_inner);
  apply(o.pilot_max_outer, cfg.pilot_max_outer);
  apply(o.seed, cfg.seed);
  apply(o.rank, cfg.rank);
  apply(o.n_train, cfg.n_train);
  apply(o.n_test, cfg.n_test);
  if (!o.dims.empty()) cfg.dims = o.dims;
  apply(o.observed, cfg.observed);
  apply(o.mask, cfg.mask);
  apply(o.truth, cfg.truth);
  apply(o.output, cfg.output);
  apply(o.results, cfg.results);
  apply(o.train_samples, cfg.train_samples);
  apply(o.train_labels, cfg.train_labels);
  apply(o.test_samples, cfg.test_samples);
  apply(o.test_labels, cfg.test_labels);
  if (!o.grid_lambda.empty()) cfg.grid_lambda = o.grid_lambda;
  if (!o.grid_beta.empty()) cfg.grid_beta = o.grid_beta;
  cfg.validate();
  return cfg;
}

void emit_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

int run_solve(Task task, const Overrides& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = build_config(task, o);
  RunOutcome run = run_experiment(cfg);
  if (run.diverged) {
    emit_json(run.results, cfg.results, out);
    err << "error: solver diverged\n";
    return kExitDivergence;
  }
  for (const auto& w : run.results["trace"]["warnings"]) err << "warning: " << w.get<std::string>() << "\n";
  if (!cfg.output.empty()) write_tensor(cfg.output, run.estimate);
  emit_json(run.results, cfg.results, out);
  return kExitOk;
}

int run_synth(Task task, const Overrides& o, const std::string& out_dir, std::ostream& out) {
  const ExperimentConfig cfg = build_config(task, o);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  nlohmann::json manifest = {{"task", to_string(task)}, {"config", config_to_json(cfg)}};
  if (task == Task::Complete) {
    const CompletionInput in = synth_completion(cfg);
    write_tensor(dir / "truth.tns", *in.truth);
    write_tensor(dir / "observed.tns", in.observed);
    write_mask(dir / "mask.tns", in.mask);
    manifest["files"] = {{"truth", (dir / "truth.tns").string()},
                         {"observed", (dir / "observed.tns").string()},
                         {"mask", (dir / "mask.tns").string()}};
  } else {
    const ClassificationInput in = synth_classification(cfg);
    write_tensor(dir / "coeff.tns", *in.truth);
    write_samples(dir / "train_samples.tns", in.train_samples);
    write_labels(dir / "train_labels.txt", in.train_labels);
    nlohmann::json files = {{"truth", (dir / "coeff.tns").string()},
                            {"train_samples", (dir / "train_samples.tns").string()},
                            {"train_labels", (dir / "train_labels.txt").string()}};
    if (!in.test_samples.empty()) {
      write_samples(dir / "test_samples.tns", in.test_samples);
      write_labels(dir / "test_labels.txt", in.test_labels);
      files["test_samples"] = (dir / "test_samples.tns").string();
      files["test_labels"] = (dir / "test_labels.txt").string();
    }
    manifest["files"] = std::move(files);
  }
  emit_json(manifest, "", out);
  return kExitOk;
}

int run_tsvd(const std::string& input, const std::string& transform, double tol,
             const std::string& output, std::ostream& out) {
  const Tensor3 x = read_tensor(input);
  const TransformKind kind = parse_transform_kind(transform);
  const OrthogonalTransform u = kind == TransformKind::Identity ? identity_transform(x.n3())
                                : kind == TransformKind::Dct   ? dct_transform(x.n3())
                                                               : data_driven_transform(x);
  nlohmann::json sv = nlohmann::json::array();
  for (const Vector& s : transformed_singular_values(x, u)) {
    sv.push_back(std::vector<double>(s.begin(), s.end()));
  }
  const Dims d = x.dims();
  nlohmann::json j = {{"dims", {d.n1, d.n2, d.n3}},
                      {"transform", transform_to_json(u)},
                      {"singular_values", std::move(sv)},
                      {"multi_rank", multi_rank(x, u, tol).ranks},
                      {"tolerance", tol},
                      {"ttnn", ttnn(x, u)},
                      {"spectral_norm", spectral_norm_u(x, u)}};
  emit_json(j, output, out);
  return kExitOk;
}

int run_metrics(const std::string& recovered, const std::string& truth,
                const std::string& output, std::ostream& out) {
  const Tensor3 x = read_tensor(recovered);
  const Tensor3 t = read_tensor(truth);
  nlohmann::json j = {{"psnr", number(psnr(x, t))},
                      {"ssim", number(ssim(x, t))},
                      {"relative_error", number(relative_error(x, t))}};
  emit_json(j, output, out);
  return kExitOk;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank tensor completion and classification with nonconvex spectral penalties",
               "tlearn"};
  app.require_subcommand(1);

  Overrides complete_o;
  CLI::App* complete = app.add_subcommand("complete", "Recover a tensor from masked entries");
  add_solver_flags(complete, complete_o);
  complete->add_option("--observed", complete_o.observed, "Observed tensor (TNS1)");
  complete->add_option("--mask", complete_o.mask, "Mask tensor of zeros and ones (TNS1)");

  Overrides classify_o;
  CLI::App* classify = app.add_subcommand("classify", "Fit a low-rank logistic model");
  add_solver_flags(classify, classify_o);
  classify->add_option("--train-samples", classify_o.train_samples, "Training sample stack");
  classify->add_option("--train-labels", classify_o.train_labels, "Training labels");
  classify->add_option("--test-samples", classify_o.test_samples, "Test sample stack");
  classify->add_option("--test-labels", classify_o.test_labels, "Test labels");

  Overrides synth_o;
  std::string synth_task = "complete";
  std::string synth_dir;
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic problem to a directory");
  synth->add_option("--task", synth_task, "complete or classify");
  synth->add_option("--out-dir", synth_dir, "Destination directory")->required();
  add_synthetic_flags(synth, synth_o);

  std::string tsvd_input, tsvd_transform = "dct", tsvd_output;
  double tsvd_tol = 1e-10;
  CLI::App* tsvd = app.add_subcommand("tsvd", "Transformed singular values and multi-rank");
  tsvd->add_option("--input", tsvd_input, "Tensor file (TNS1)")->required();
  tsvd->add_option("--transform", tsvd_transform, "identity, dct or data");
  tsvd->add_option("--tol", tsvd_tol, "Relative rank tolerance");
  tsvd->add_option("--output", tsvd_output, "Write JSON here instead of stdout");

  std::string metrics_recovered, metrics_truth, metrics_output;
  CLI::App* metrics = app.add_subcommand("metrics", "PSNR, SSIM and relative error");
  metrics->add_option("--recovered", metrics_recovered, "Estimate (TNS1)")->required();
  metrics->add_option("--truth", metrics_truth, "Ground truth (TNS1)")->required();
  metrics->add_option("--output", metrics_output, "Write JSON here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (complete->parsed()) return run_solve(Task::Complete, complete_o, out, err);
    if (classify->parsed()) return run_solve(Task::Classify, classify_o, out, err);
    if (synth->parsed()) return run_synth(parse_task(synth_task), synth_o, synth_dir, out);
    if (tsvd->parsed()) return run_tsvd(tsvd_input, tsvd_transform, tsvd_tol, tsvd_output, out);
    if (metrics->parsed()) return run_metrics(metrics_recovered, metrics_truth, metrics_output, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int cli_run(int argc, const char* const* argv) {
  return cli_run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace tlearn::cli
