#include "tlearn_cli/config.hpp"

#include "tlearn/errors.hpp"
#include "tlearn_cli/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace tlearn::cli {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void require(bool ok, const char* field, const std::string& rule) {
  if (!ok) throw ParameterError(std::string("config field '") + field + "': requires " + rule);
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParameterError(std::string("config field '") + key + "' has the wrong type");
  }
}

template <typename T>
void take(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  take(j, key, v);
  out = v;
}

}  // namespace

std::string_view to_string(Task task) {
  return task == Task::Complete ? "complete" : "classify";
}

Task parse_task(std::string_view name) {
  const std::string s = lower(name);
  if (s == "complete") return Task::Complete;
  if (s == "classify") return Task::Classify;
  throw ParameterError("unknown task '" + std::string(name) + "'");
}

TransformKind parse_transform_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "identity") return TransformKind::Identity;
  if (s == "dct") return TransformKind::Dct;
  if (s == "data") return TransformKind::DataDriven;
  throw ParameterError("unknown transform '" + std::string(name) +
                       "' (expected identity, dct or data)");
}

double ExperimentConfig::resolved_rho() const {
  if (rho) return *rho;
  return task == Task::Complete ? 10.0 : 100.0;
}

Dims ExperimentConfig::resolved_dims() const {
  if (dims.empty()) return task == Task::Complete ? Dims{30, 30, 10} : Dims{10, 10, 3};
  return {dims[0], dims[1], dims[2]};
}

bool ExperimentConfig::synthetic() const {
  return task == Task::Complete ? observed.empty() : train_samples.empty();
}

void ExperimentConfig::validate() const {
  // Library constructors re-check these; doing it here names the field.
  require(lambda > 0.0 && std::isfinite(lambda), "lambda", "lambda > 0");
  if (penalty == PenaltyKind::Scad) require(gamma > 1.0, "gamma", "gamma > 1 for scad");
  if (penalty == PenaltyKind::Mcp || penalty == PenaltyKind::Log) {
    require(gamma > 0.0, "gamma", "gamma > 0");
  }
  require(beta >= 0.0 && std::isfinite(beta), "beta", "beta >= 0");
  require(resolved_rho() > 0.0 && std::isfinite(resolved_rho()), "rho", "rho > 0");
  require(xi > 0.0 && xi < 0.5, "xi", "0 < xi < 1/2");
  if (box_c) require(*box_c > 0.0 && std::isfinite(*box_c), "box_c", "box_c > 0");
  require(max_outer >= 0, "max_outer", "max_outer >= 0");
  require(tol_outer > 0.0, "tol_outer", "tol_outer > 0");
  require(eta > 0.0 && std::isfinite(eta), "eta", "eta > 0");
  require(tau > 0.0 && tau < (1.0 + std::sqrt(5.0)) / 2.0, "tau",
          "0 < tau < (1 + sqrt 5) / 2");
  require(max_inner >= 1, "max_inner", "max_inner >= 1");
  require(tol_inner > 0.0, "tol_inner", "tol_inner > 0");
  if (pilot_max_outer) require(*pilot_max_outer >= 0, "pilot_max_outer", "pilot_max_outer >= 0");
  require(dims.empty() || (dims.size() == 3 && std::all_of(dims.begin(), dims.end(),
                                                          [](Index d) { return d > 0; })),
          "dims", "three positive sizes");
  require(rank >= 0, "rank", "rank >= 0");
  require(sr > 0.0 && sr <= 1.0, "sr", "0 < sr <= 1");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma", "sigma >= 0");
  require(n_train >= 1, "n_train", "n_train >= 1");
  require(n_test >= 0, "n_test", "n_test >= 0");
  for (double v : grid_lambda) require(v > 0.0, "grid_lambda", "positive values");
  for (double v : grid_beta) require(v >= 0.0, "grid_beta", "nonnegative values");
  if (task == Task::Complete && !observed.empty()) {
    require(!mask.empty(), "mask", "a mask file alongside 'observed'");
  }
  if (task == Task::Classify && !train_samples.empty()) {
    require(!train_labels.empty(), "train_labels", "a label file alongside 'train_samples'");
    require(test_samples.empty() == test_labels.empty(), "test_labels",
            "test samples and labels together");
    require(!dims.empty(), "dims", "explicit dims to split sample files");
  }
}

SolverSettings ExperimentConfig::settings(double lambda_value, double beta_value,
                                          double box) const {
  SolverSettings s;
  s.penalty = PenaltyParams(penalty, lambda_value, gamma);
  s.transform = transform;
  s.pilot_max_outer = pilot_max_outer;
  s.pmm.rho = resolved_rho();
  s.pmm.beta = beta_value;
  s.pmm.box_c = box;
  s.pmm.xi = xi;
  s.pmm.max_outer = max_outer;
  s.pmm.tol_outer = tol_outer;
  s.admm.eta = eta;
  s.admm.tau = tau;
  s.admm.max_inner = max_inner;
  s.admm.tol_inner = tol_inner;
  return s;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  static const std::set<std::string> known = {
      "task", "penalty", "lambda", "gamma", "transform", "pilot_max_outer", "beta", "rho",
      "xi", "box_c", "lipschitz", "max_outer", "tol_outer", "eta", "tau", "max_inner",
      "tol_inner", "dims", "rank", "sr", "sigma", "n_train", "n_test", "seed", "observed",
      "mask", "train_samples", "train_labels", "test_samples", "test_labels", "truth",
      "output", "results", "grid_lambda", "grid_beta"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParameterError("unknown config field '" + key + "'");
  }

  ExperimentConfig cfg;
  std::string text;
  if (j.contains("task")) {
    take(j, "task", text);
    cfg.task = parse_task(text);
  }
  if (j.contains("penalty")) {
    take(j, "penalty", text);
    cfg.penalty = parse_penalty_kind(text);
  }
  if (j.contains("transform")) {
    take(j, "transform", text);
    cfg.transform = parse_transform_kind(text);
  }
  if (j.contains("lipschitz")) {
    take(j, "lipschitz", text);
    if (text == "loss") {
      cfg.lipschitz = LipschitzSource::Loss;
    } else if (text == "spectral") {
      cfg.lipschitz = LipschitzSource::Spectral;
    } else {
      throw ParameterError("config field 'lipschitz': expected 'loss' or 'spectral'");
    }
  }
  take(j, "lambda", cfg.lambda);
  take(j, "gamma", cfg.gamma);
  take(j, "pilot_max_outer", cfg.pilot_max_outer);
  take(j, "beta", cfg.beta);
  take(j, "rho", cfg.rho);
  take(j, "xi", cfg.xi);
  take(j, "box_c", cfg.box_c);
  take(j, "max_outer", cfg.max_outer);
  take(j, "tol_outer", cfg.tol_outer);
  take(j, "eta", cfg.eta);
  take(j, "tau", cfg.tau);
  take(j, "max_inner", cfg.max_inner);
  take(j, "tol_inner", cfg.tol_inner);
  take(j, "dims", cfg.dims);
  take(j, "rank", cfg.rank);
  take(j, "sr", cfg.sr);
  take(j, "sigma", cfg.sigma);
  take(j, "n_train", cfg.n_train);
  take(j, "n_test", cfg.n_test);
  take(j, "seed", cfg.seed);
  take(j, "observed", cfg.observed);
  take(j, "mask", cfg.mask);
  take(j, "train_samples", cfg.train_samples);
  take(j, "train_labels", cfg.train_labels);
  take(j, "test_samples", cfg.test_samples);
  take(j, "test_labels", cfg.test_labels);
  take(j, "truth", cfg.truth);
  take(j, "output", cfg.output);
  take(j, "results", cfg.results);
  take(j, "grid_lambda", cfg.grid_lambda);
  take(j, "grid_beta", cfg.grid_beta);
  cfg.validate();
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  const Dims d = cfg.resolved_dims();
  nlohmann::json j = {
      {"task", to_string(cfg.task)},
      {"penalty", to_string(cfg.penalty)},
      {"lambda", cfg.lambda},
      {"gamma", cfg.gamma},
      {"transform", to_string(cfg.transform)},
      {"beta", cfg.beta},
      {"rho", cfg.resolved_rho()},
      {"xi", cfg.xi},
      {"lipschitz", cfg.lipschitz == LipschitzSource::Loss ? "loss" : "spectral"},
      {"max_outer", cfg.max_outer},
      {"tol_outer", cfg.tol_outer},
      {"eta", cfg.eta},
      {"tau", cfg.tau},
      {"max_inner", cfg.max_inner},
      {"tol_inner", cfg.tol_inner},
      {"dims", {d.n1, d.n2, d.n3}},
      {"rank", cfg.rank},
      {"sr", cfg.sr},
      {"sigma", cfg.sigma},
      {"n_train", cfg.n_train},
      {"n_test", cfg.n_test},
      {"seed", cfg.seed},
  };
  j["box_c"] = cfg.box_c ? nlohmann::json(*cfg.box_c) : nlohmann::json(nullptr);
  j["pilot_max_outer"] =
      cfg.pilot_max_outer ? nlohmann::json(*cfg.pilot_max_outer) : nlohmann::json(nullptr);
  const std::pair<const char*, const std::string*> paths[] = {
      {"observed", &cfg.observed},         {"mask", &cfg.mask},
      {"train_samples", &cfg.train_samples}, {"train_labels", &cfg.train_labels},
      {"test_samples", &cfg.test_samples}, {"test_labels", &cfg.test_labels},
      {"truth", &cfg.truth},               {"output", &cfg.output},
      {"results", &cfg.results}};
  for (const auto& [key, value] : paths) {
    if (!value->empty()) j[key] = *value;
  }
  if (!cfg.grid_lambda.empty()) j["grid_lambda"] = cfg.grid_lambda;
  if (!cfg.grid_beta.empty()) j["grid_beta"] = cfg.grid_beta;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON", e.byte);
  }
  return config_from_json(j);
}

}  // namespace tlearn::cli
