#include "ism/cli.hpp"

#include "ism/baseline.hpp"
#include "ism/data_io.hpp"
#include "ism/metrics.hpp"
#include "ism/paradigms.hpp"
#include "ism/parallel.hpp"
#include "ism/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace ism {

namespace {

// Thrown for flag combinations CLI11 cannot express on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string data;
  std::string task = "supervised";
  std::string kernel;
  long long q = 0;
  std::string labels_col;
  std::string scores;
  int clusters = 0;
  double mu = 1.0;
  double delta = 0.01;
  int max_iter = 50;
  std::uint64_t seed = 0;
  int outer_iters = 10;
  std::string report;
};

struct FitArgs : CommonArgs {
  std::string out_model;
};

struct EvalArgs : CommonArgs {
  int folds = 10;
  bool baseline = false;
};

struct TransformArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string labels_col;
};

const std::map<std::string, Task> kTasks{{"supervised", Task::Supervised},
                                         {"unsupervised", Task::Unsupervised},
                                         {"semisup", Task::SemiSupervised},
                                         {"altclust", Task::Alternative}};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--data", a.data, "input CSV")->required();
  cmd->add_option("--task", a.task, "supervised | unsupervised | semisup | altclust")
      ->check(CLI::IsMember({"supervised", "unsupervised", "semisup", "altclust"}));
  cmd->add_option("--kernel", a.kernel, "kernel token, e.g. gauss:sigma=median")->required();
  cmd->add_option("--q", a.q, "output dimension")->required();
  cmd->add_option("--labels-col", a.labels_col, "label column name or 0-based index");
  cmd->add_option("--scores", a.scores, "CSV of expert scores (semisup)");
  cmd->add_option("--clusters", a.clusters, "number of clusters");
  cmd->add_option("--mu", a.mu, "coupling weight")->capture_default_str();
  cmd->add_option("--delta", a.delta, "eigenvalue convergence threshold")->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter, "iteration cap")->capture_default_str();
  cmd->add_option("--seed", a.seed, "random seed")->capture_default_str();
  cmd->add_option("--outer-iters", a.outer_iters, "clustering alternation cap")->capture_default_str();
  cmd->add_option("--report", a.report, "report output path");
}

std::optional<ColumnRef> column_ref(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return ColumnRef{static_cast<std::size_t>(std::stoull(text))};
  }
  return ColumnRef{text};
}

// Everything a fit or eval needs after the inputs are validated.
struct Prepared {
  Task task;
  Dataset data;  // standardized
  KernelSpec kernel;  // resolved on the standardized data
  Eigen::Index q;
  std::optional<Matrix> scores;
  ParadigmConfig config;
};

Prepared prepare(const CommonArgs& a, bool labels_as_reference) {
  const Task task = kTasks.at(a.task);
  const bool wants_labels = task == Task::Supervised || task == Task::Alternative;
  if (wants_labels && a.labels_col.empty()) throw UsageError("--task " + a.task + " requires --labels-col");
  if (!wants_labels && !labels_as_reference && !a.labels_col.empty()) {
    throw UsageError("--labels-col conflicts with --task " + a.task);
  }
  if (task == Task::SemiSupervised && a.scores.empty()) throw UsageError("--task semisup requires --scores");
  if (task != Task::SemiSupervised && !a.scores.empty()) throw UsageError("--scores is only valid with --task semisup");
  if (task == Task::Supervised && a.clusters != 0) throw UsageError("--clusters conflicts with --task supervised");
  if ((task == Task::Unsupervised || task == Task::SemiSupervised) && a.clusters < 2) {
    throw UsageError("--task " + a.task + " requires --clusters >= 2");
  }
  if (a.q < 1) throw UsageError("--q must be >= 1");

  Prepared p{task, {}, {}, static_cast<Eigen::Index>(a.q), std::nullopt, {}};
  const KernelSpec parsed = parse_kernel(a.kernel);
  if (task != Task::Supervised) require_similarity_kernel(parsed);

  p.data = standardize(load_csv(a.data, column_ref(a.labels_col)));
  if (!a.labels_col.empty() && !p.data.labels) throw std::runtime_error("missing label column");
  if (p.q > p.data.X.cols()) {
    throw UsageError("--q " + std::to_string(a.q) + " exceeds the feature count d=" + std::to_string(p.data.X.cols()));
  }
  p.kernel = resolve(parsed, p.data.X);

  if (!a.scores.empty()) {
    const Dataset scores = load_csv(a.scores);
    if (scores.X.rows() != p.data.X.rows()) {
      throw std::runtime_error("--scores has " + std::to_string(scores.X.rows()) + " rows but --data has " +
                               std::to_string(p.data.X.rows()));
    }
    p.scores = scores.X;
  }

  p.config.task = task;
  p.config.q = p.q;
  p.config.mu = a.mu;
  p.config.delta = a.delta;
  p.config.max_iter = a.max_iter;
  p.config.outer_iters = a.outer_iters;
  p.config.seed = a.seed;
  p.config.clusters = a.clusters;
  if (task == Task::Alternative && a.clusters == 0) {
    p.config.clusters = static_cast<int>(p.data.class_names.size());
  }
  return p;
}

void describe_run(RunReport& r, const CommonArgs& a, const Prepared& p) {
  r.set("run", "task", a.task);
  r.set("run", "kernel", to_token(p.kernel));
  r.set("run", "q", static_cast<long long>(p.q));
  r.set("run", "n", static_cast<long long>(p.data.X.rows()));
  r.set("run", "d", static_cast<long long>(p.data.X.cols()));
  r.set("run", "delta", a.delta);
  r.set("run", "max_iter", a.max_iter);
  r.set("run", "seed", static_cast<long long>(a.seed));
  if (p.task != Task::Supervised) {
    r.set("run", "clusters", p.config.clusters);
    r.set("run", "mu", a.mu);
    r.set("run", "outer_iters", a.outer_iters);
  }
  if (!p.data.standardization->constant_features.empty()) {
    r.set("run", "constant_features", static_cast<long long>(p.data.standardization->constant_features.size()));
  }
}

void describe_projection(RunReport& r, const std::string& section, const ProjectionResult& fit) {
  r.set(section, "iterations", fit.iterations);
  r.set(section, "converged", fit.converged);
  r.set(section, "cost", fit.cost);
  r.set(section, "eigenvalues", fit.eigenvalues);
  r.set(section, "eigengap", fit.eigengap);
  r.set(section, "final_angle", fit.final_angle);
  for (std::size_t t = 0; t < fit.history.size(); ++t) {
    const auto& h = fit.history[t];
    const std::string prefix = "iter." + std::to_string(t + 1) + ".";
    r.set("history", prefix + "cost", h.cost);
    r.set("history", prefix + "eigenvalue_change", h.eigenvalue_change);
    r.set("history", prefix + "max_angle", h.max_angle);
  }
}

struct Fitted {
  Matrix W;
  bool converged = false;
  ProjectionResult projection;
  GammaMatrix gamma;
  std::optional<ClusteringResult> clustering;
};

Fitted run_paradigm(const Prepared& p) {
  Fitted f;
  const auto& X = p.data.X;
  if (p.task == Task::Supervised) {
    f.gamma = gamma_supervised(*p.data.labels);
    f.projection = supervised_dr(X, *p.data.labels, p.kernel, p.q, p.config.delta, p.config.max_iter);
    f.W = f.projection.W;
    f.converged = f.projection.converged;
    return f;
  }
  ClusteringResult c;
  switch (p.task) {
    case Task::Unsupervised: c = unsupervised_dr(X, p.kernel, p.config); break;
    case Task::SemiSupervised: c = semisupervised_dr(X, *p.scores, p.kernel, p.config); break;
    case Task::Alternative: c = alternative_clustering(X, *p.data.labels, p.kernel, p.config); break;
    case Task::Supervised: break;
  }
  f.W = c.W;
  f.projection = c.last_projection;
  f.gamma = c.last_gamma;
  f.converged = c.converged && c.last_projection.converged;
  f.clustering = std::move(c);
  return f;
}

void describe_clustering(RunReport& r, const ClusteringResult& c, const Prepared& p, bool reference_labels) {
  r.set("clustering", "outer_iterations", c.outer_iterations);
  r.set("clustering", "converged", c.converged);
  r.set("clustering", "degenerate_split", c.degenerate_split);
  r.set("clustering", "objective", c.history.empty() ? 0.0 : c.history.back());
  std::vector<int> sizes(static_cast<std::size_t>(p.config.clusters), 0);
  for (int l : c.labels) {
    if (l >= 0 && l < p.config.clusters) ++sizes[static_cast<std::size_t>(l)];
  }
  std::string size_text;
  for (std::size_t k = 0; k < sizes.size(); ++k) size_text += (k ? "," : "") + std::to_string(sizes[k]);
  r.set("clustering", "cluster_sizes", size_text);
  for (std::size_t t = 0; t < c.history.size(); ++t) {
    r.set("history", "outer." + std::to_string(t + 1) + ".objective", c.history[t]);
  }
  if (c.nmi_vs_reference) r.set("metric", "nmi_vs_original", *c.nmi_vs_reference);
  if (reference_labels && p.data.labels && p.task != Task::Alternative) {
    r.set("metric", "nmi", nmi(c.labels, *p.data.labels));
  }
}

void emit(const RunReport& r, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << r.to_text();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write report " + path);
  file << r.to_text();
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Prepared p = prepare(a, false);
  const Fitted f = run_paradigm(p);

  ModelFile model;
  model.kernel_token = to_token(p.kernel);
  model.q = p.q;
  model.d = p.data.X.cols();
  model.mean = p.data.standardization->mean;
  model.stddev = p.data.standardization->stddev;
  model.W = f.W;
  save_model(model, a.out_model);

  RunReport r;
  describe_run(r, a, p);
  describe_projection(r, "result", f.projection);
  if (f.clustering) describe_clustering(r, *f.clustering, p, false);
  r.set("result", "model_converged", f.converged);
  r.set(RunReport::kTimingSection, "wall_time_ms", elapsed_ms(start));
  emit(r, a.report, out);
  return f.converged ? kExitOk : kExitNotConverged;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Prepared p = prepare(a, true);
  RunReport r;
  describe_run(r, a, p);
  bool converged = true;

  if (p.task == Task::Supervised) {
    // Cross-validation standardizes per fold, so it takes the raw features.
    const Dataset raw = load_csv(a.data, column_ref(a.labels_col));
    CrossValidationOptions cv;
    cv.folds = a.folds;
    cv.seed = a.seed;
    cv.delta = a.delta;
    cv.max_iter = a.max_iter;
    const CrossValidationResult res = cross_validate(raw.X, *raw.labels, parse_kernel(a.kernel), p.q, cv);
    std::vector<int> iterations;
    for (const auto& fold : res.folds) {
      iterations.push_back(fold.iterations);
      converged = converged && fold.converged;
    }
    std::vector<int> sorted = iterations;
    std::sort(sorted.begin(), sorted.end());
    const auto m = sorted.size();
    const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    r.set("cv", "folds", cv.folds);
    r.set("cv", "mean_accuracy", res.mean_accuracy);
    r.set("cv", "std_accuracy", res.std_accuracy);
    r.set("cv", "mean_cost", res.mean_cost);
    r.set("cv", "median_iterations", median);
    r.set("cv", "max_iterations", sorted.back());
    r.set("cv", "all_converged", converged);
    for (std::size_t k = 0; k < res.folds.size(); ++k) {
      const std::string prefix = "fold." + std::to_string(k + 1) + ".";
      r.set("cv", prefix + "accuracy", res.folds[k].accuracy);
      r.set("cv", prefix + "cost", res.folds[k].cost);
      r.set("cv", prefix + "iterations", res.folds[k].iterations);
    }
    r.set(RunReport::kTimingSection, "mean_fold_ms", 1000.0 * res.mean_seconds);
  }

  std::optional<Fitted> full;
  if (p.task != Task::Supervised || a.baseline) {
    const auto fit_start = std::chrono::steady_clock::now();
    full = run_paradigm(p);
    r.set(RunReport::kTimingSection, "ism_ms", elapsed_ms(fit_start));
    if (full->clustering) describe_clustering(r, *full->clustering, p, true);
    if (p.task != Task::Supervised) {
      describe_projection(r, "result", full->projection);
      converged = full->converged;
    }
  }

  if (a.baseline) {
    const auto base_start = std::chrono::steady_clock::now();
    const ProjectionResult base = stiefel_ascent(p.data.X, full->gamma, p.kernel, p.q, BaselineConfig{}, a.seed);
    r.set(RunReport::kTimingSection, "baseline_ms", elapsed_ms(base_start));
    const double ism_cost = full->projection.cost;
    r.set("baseline", "ism_cost", ism_cost);
    r.set("baseline", "baseline_cost", base.cost);
    r.set("baseline", "baseline_iterations", base.iterations);
    r.set("baseline", "relative_gap", (ism_cost - base.cost) / std::max(std::abs(base.cost), 1e-300));
    r.set("baseline", "ism_eigengap", full->projection.eigengap);
  }

  r.set(RunReport::kTimingSection, "wall_time_ms", elapsed_ms(start));
  emit(r, a.report, out);
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_transform(const TransformArgs& a) {
  const ModelFile model = load_model(a.model);
  const Dataset ds = load_csv(a.data, column_ref(a.labels_col));
  if (ds.X.cols() != model.d) {
    throw std::runtime_error("dimension mismatch: model has d=" + std::to_string(model.d) + " but data has d=" +
                             std::to_string(ds.X.cols()));
  }
  const Standardization stats{model.mean, model.stddev, {}};
  const Matrix Z = apply_standardization(stats, ds.X) * model.W;
  write_projection_csv(a.out, Z);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_threads_from_env();

  CLI::App app{"Interpretable kernel dimension reduction via the iterative spectral method", "ism"};
  app.require_subcommand(1, 1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "learn a projection and write a model file");
  add_common(fit_cmd, fit);
  fit_cmd->add_option("--out-model", fit.out_model, "model output path")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "cross-validate or score a paradigm");
  add_common(eval_cmd, eval);
  eval_cmd->add_option("--folds", eval.folds, "cross-validation folds")->capture_default_str();
  eval_cmd->add_flag("--baseline", eval.baseline, "also run Stiefel gradient ascent");

  TransformArgs transform;
  auto* transform_cmd = app.add_subcommand("transform", "project data with a saved model");
  transform_cmd->add_option("--model", transform.model, "model file")->required();
  transform_cmd->add_option("--data", transform.data, "input CSV")->required();
  transform_cmd->add_option("--out", transform.out, "projected CSV")->required();
  transform_cmd->add_option("--labels-col", transform.labels_col, "column to drop before projecting");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
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
    const CLI::App* active = fit_cmd->parsed() ? fit_cmd : eval_cmd->parsed() ? eval_cmd
                             : transform_cmd->parsed() ? transform_cmd : &app;
    err << active->help();
    return kExitInputError;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    return cmd_transform(transform);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace ism
