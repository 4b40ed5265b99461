#include "ism/baseline.hpp"
#include "ism/cli.hpp"
#include "ism/data_io.hpp"
#include "ism/metrics.hpp"
#include "ism/paradigms.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;

namespace {

ism::GammaMatrix as_gamma(const ism::Matrix& values) { return ism::GammaMatrix::raw(values); }

py::dict projection_dict(const ism::ProjectionResult& r) {
  py::dict d;
  d["W"] = r.W;
  d["eigenvalues"] = r.eigenvalues;
  d["cost"] = r.cost;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["eigengap"] = r.eigengap;
  d["final_angle"] = r.final_angle;
  return d;
}

py::dict clustering_dict(const ism::ClusteringResult& r) {
  py::dict d;
  d["W"] = r.W;
  d["labels"] = r.labels;
  d["embedding"] = r.Y_embed;
  d["objective_history"] = r.history;
  d["outer_iterations"] = r.outer_iterations;
  d["converged"] = r.converged;
  d["nmi_vs_original"] = r.nmi_vs_reference ? py::cast(*r.nmi_vs_reference) : py::none();
  return d;
}

ism::ParadigmConfig paradigm_config(Eigen::Index q, int clusters, double mu, double delta, int max_iter,
                                    int outer_iters, std::uint64_t seed) {
  ism::ParadigmConfig c;
  c.q = q;
  c.clusters = clusters;
  c.mu = mu;
  c.delta = delta;
  c.max_iter = max_iter;
  c.outer_iters = outer_iters;
  c.seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_ism, m) {
  m.doc() = "Iterative spectral method for interpretable kernel dimension reduction";

  m.def("valid_kernel_tokens", [] { return std::string(ism::valid_kernel_tokens()); });
  m.def("canonical_kernel", [](const std::string& token) { return ism::to_token(ism::parse_kernel(token)); },
        py::arg("kernel"));
  m.def(
      "kernel_matrix",
      [](const ism::Matrix& X, const ism::Matrix& W, const std::string& kernel) {
        return ism::kernel_matrix(X, W, ism::resolve(ism::parse_kernel(kernel), X));
      },
      py::arg("X"), py::arg("W"), py::arg("kernel"));
  m.def(
      "phi",
      [](const ism::Matrix& X, const ism::Matrix& W, const ism::Matrix& gamma, const std::string& kernel) {
        return ism::phi(X, W, as_gamma(gamma), ism::resolve(ism::parse_kernel(kernel), X)).values;
      },
      py::arg("X"), py::arg("W"), py::arg("gamma"), py::arg("kernel"));
  m.def(
      "phi0",
      [](const ism::Matrix& X, const ism::Matrix& gamma, const std::string& kernel) {
        return ism::phi0(X, as_gamma(gamma), ism::resolve(ism::parse_kernel(kernel), X)).values;
      },
      py::arg("X"), py::arg("gamma"), py::arg("kernel"));
  m.def(
      "objective_cost",
      [](const ism::Matrix& X, const ism::Matrix& W, const ism::Matrix& gamma, const std::string& kernel) {
        return ism::objective_cost(X, W, as_gamma(gamma), ism::resolve(ism::parse_kernel(kernel), X));
      },
      py::arg("X"), py::arg("W"), py::arg("gamma"), py::arg("kernel"));
  m.def("hsic", &ism::hsic, py::arg("K_X"), py::arg("K_Y"));
  m.def("gamma_supervised", [](const ism::Labels& y) { return ism::gamma_supervised(y).values; },
        py::arg("labels"));

  m.def(
      "ism_solve",
      [](const ism::Matrix& X, const ism::Matrix& gamma, const std::string& kernel, Eigen::Index q, double delta,
         int max_iter) {
        ism::IsmOptions o;
        o.delta = delta;
        o.max_iter = max_iter;
        return projection_dict(ism::ism_solve(X, as_gamma(gamma), ism::parse_kernel(kernel), q, o));
      },
      py::arg("X"), py::arg("gamma"), py::arg("kernel"), py::arg("q"), py::arg("delta") = 0.01,
      py::arg("max_iter") = 50);
  m.def(
      "stiefel_ascent",
      [](const ism::Matrix& X, const ism::Matrix& gamma, const std::string& kernel, Eigen::Index q, int iters,
         std::uint64_t seed) {
        ism::BaselineConfig c;
        c.iters = iters;
        return projection_dict(ism::stiefel_ascent(X, as_gamma(gamma), ism::parse_kernel(kernel), q, c, seed));
      },
      py::arg("X"), py::arg("gamma"), py::arg("kernel"), py::arg("q"), py::arg("iters") = 500,
      py::arg("seed") = 0);
  m.def(
      "supervised_dr",
      [](const ism::Matrix& X, const ism::Labels& y, const std::string& kernel, Eigen::Index q, double delta,
         int max_iter) {
        return projection_dict(ism::supervised_dr(X, y, ism::parse_kernel(kernel), q, delta, max_iter));
      },
      py::arg("X"), py::arg("labels"), py::arg("kernel"), py::arg("q"), py::arg("delta") = 0.01,
      py::arg("max_iter") = 50);
  m.def(
      "unsupervised_dr",
      [](const ism::Matrix& X, const std::string& kernel, Eigen::Index q, int clusters, double delta,
         int max_iter, int outer_iters, std::uint64_t seed) {
        auto c = paradigm_config(q, clusters, 1.0, delta, max_iter, outer_iters, seed);
        c.task = ism::Task::Unsupervised;
        return clustering_dict(ism::unsupervised_dr(X, ism::parse_kernel(kernel), c));
      },
      py::arg("X"), py::arg("kernel"), py::arg("q"), py::arg("clusters"), py::arg("delta") = 0.01,
      py::arg("max_iter") = 50, py::arg("outer_iters") = 10, py::arg("seed") = 0);
  m.def(
      "alternative_clustering",
      [](const ism::Matrix& X, const ism::Labels& original, const std::string& kernel, Eigen::Index q,
         int clusters, double mu, double delta, int max_iter, int outer_iters, std::uint64_t seed) {
        auto c = paradigm_config(q, clusters, mu, delta, max_iter, outer_iters, seed);
        c.task = ism::Task::Alternative;
        return clustering_dict(ism::alternative_clustering(X, original, ism::parse_kernel(kernel), c));
      },
      py::arg("X"), py::arg("original_labels"), py::arg("kernel"), py::arg("q"), py::arg("clusters"),
      py::arg("mu") = 1.0, py::arg("delta") = 0.01, py::arg("max_iter") = 50, py::arg("outer_iters") = 10,
      py::arg("seed") = 0);

  m.def("nmi", &ism::nmi, py::arg("a"), py::arg("b"));
  m.def("knn_accuracy", &ism::knn_accuracy, py::arg("X_train"), py::arg("y_train"), py::arg("X_test"),
        py::arg("y_test"), py::arg("k") = 5);
  m.def(
      "cross_validate",
      [](const ism::Matrix& X, const ism::Labels& y, const std::string& kernel, Eigen::Index q, int folds,
         std::uint64_t seed) {
        ism::CrossValidationOptions o;
        o.folds = folds;
        o.seed = seed;
        const auto r = ism::cross_validate(X, y, ism::parse_kernel(kernel), q, o);
        py::dict d;
        d["mean_accuracy"] = r.mean_accuracy;
        d["std_accuracy"] = r.std_accuracy;
        d["mean_cost"] = r.mean_cost;
        d["mean_seconds"] = r.mean_seconds;
        return d;
      },
      py::arg("X"), py::arg("labels"), py::arg("kernel"), py::arg("q"), py::arg("folds") = 10,
      py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = ism::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI command in-process; returns (exit_code, stdout, stderr).");
}
