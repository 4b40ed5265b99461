#include <doctest.h>

#include "ism/cli.hpp"
#include "ism/data_io.hpp"
#include "ism/paradigms.hpp"
#include "ism/report.hpp"
#include "synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ism;
using namespace ism::testing;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ism_unit_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kWine = data_path("wine.csv");

}  // namespace

TEST_CASE("report sections and deterministic text") {
  RunReport r;
  r.set("run", "task", "supervised");
  r.set("run", "q", 3);
  r.set("result", "cost", 0.1);
  r.set("result", "converged", true);
  r.set(RunReport::kTimingSection, "wall_time_ms", 12.5);
  CHECK(r.get("run", "q") == "3");
  CHECK(r.get("result", "converged") == "true");
  CHECK(r.has("result", "cost"));
  CHECK_FALSE(r.has("result", "missing"));
  CHECK(r.deterministic_text().find("timing") == std::string::npos);
  CHECK(r.to_text().find("[timing]") != std::string::npos);
  CHECK(r.to_lines().find("run.task=supervised\n") != std::string::npos);
  const RunReport back = RunReport::parse(r.to_text());
  CHECK(back.to_text() == r.to_text());
  CHECK(parse_double(back.get("result", "cost")).value() == 0.1);
}

TEST_CASE("fit on wine writes a model and a positive cost") {
  const auto model = scratch("wine.model");
  const auto report = scratch("wine_fit.txt");
  const Outcome o = run({"fit", "--data", kWine, "--labels-col", "class", "--task", "supervised", "--kernel",
                         "gauss:sigma=median", "--q", "3", "--out-model", model.string(), "--report",
                         report.string()});
  REQUIRE(o.code == kExitOk);
  const RunReport r = RunReport::parse(slurp(report));
  CHECK(parse_double(r.get("result", "cost")).value() > 0.0);
  CHECK(r.get("result", "converged") == "true");
  const ModelFile m = load_model(model);
  CHECK(m.d == 13);
  CHECK(m.q == 3);
}

TEST_CASE("usage errors exit with code 1") {
  Outcome o = run({"fit", "--kernel", "linear", "--q", "2", "--out-model", scratch("x.model").string()});
  CHECK(o.code == kExitInputError);
  CHECK(o.err.find("--data") != std::string::npos);

  o = run({"fit", "--data", kWine, "--task", "altclust", "--kernel", "gauss:sigma=median", "--q", "2",
           "--out-model", scratch("x.model").string()});
  CHECK(o.code == kExitInputError);

  o = run({"fit", "--data", kWine, "--labels-col", "class", "--task", "unsupervised", "--clusters", "3",
           "--kernel", "gauss:sigma=median", "--q", "2", "--out-model", scratch("x.model").string()});
  CHECK(o.code == kExitInputError);
  CHECK(o.err.find("conflicts") != std::string::npos);

  o = run({"eval", "--data", kWine, "--labels-col", "class", "--kernel", "rbf", "--q", "2"});
  CHECK(o.code == kExitInputError);
  CHECK(o.err.find(std::string(valid_kernel_tokens())) != std::string::npos);

  o = run({"fit", "--data", kWine, "--labels-col", "class", "--kernel", "linear", "--q", "20", "--out-model",
           scratch("x.model").string()});
  CHECK(o.code == kExitInputError);

  CHECK(run({}).code == kExitInputError);
}

TEST_CASE("transform of a linear model equals X W computed in process") {
  const auto model = scratch("linear.model");
  const auto projected = scratch("projected.csv");
  REQUIRE(run({"fit", "--data", kWine, "--labels-col", "class", "--kernel", "linear", "--q", "2", "--out-model",
               model.string()})
              .code == kExitOk);
  REQUIRE(run({"transform", "--model", model.string(), "--data", kWine, "--labels-col", "class", "--out",
               projected.string()})
              .code == kExitOk);

  const Dataset wine = standardize(load_wine());
  const ProjectionResult fit = supervised_dr(wine.X, *wine.labels, KernelSpec::linear(), 2);
  const ModelFile m = load_model(model);
  CHECK(m.W == fit.W);
  const Matrix expected = apply_standardization(*wine.standardization, load_wine().X) * fit.W;
  const Dataset out = load_csv(projected);
  CHECK(out.feature_names == std::vector<std::string>{"w1", "w2"});
  CHECK(out.X == expected);
}

TEST_CASE("transform rejects a dimension mismatch") {
  const auto model = scratch("linear_small.model");
  const auto small = scratch("small.csv");
  {
    std::ofstream f(small);
    f << "a,b\n1,2\n3,5\n4,4\n";
  }
  REQUIRE(run({"fit", "--data", kWine, "--labels-col", "class", "--kernel", "linear", "--q", "1", "--out-model",
               model.string()})
              .code == kExitOk);
  const Outcome o = run({"transform", "--model", model.string(), "--data", small.string(), "--out",
                         scratch("never.csv").string()});
  CHECK(o.code == kExitInputError);
  CHECK(o.err.find("d=13") != std::string::npos);
  CHECK(o.err.find("d=2") != std::string::npos);
}

TEST_CASE("eval with the linear baseline agrees with the Ky Fan optimum") {
  const auto report = scratch("baseline.txt");
  const Outcome o = run({"eval", "--data", kWine, "--labels-col", "class", "--kernel", "linear", "--q", "2",
                         "--baseline", "--report", report.string()});
  REQUIRE(o.code == kExitOk);
  const RunReport r = RunReport::parse(slurp(report));
  CHECK(r.has("cv", "mean_accuracy"));
  CHECK(r.has("cv", "std_accuracy"));
  const double ism = parse_double(r.get("baseline", "ism_cost")).value();
  const double base = parse_double(r.get("baseline", "baseline_cost")).value();
  CHECK(std::abs(ism - base) <= 1e-6 * std::abs(base));
}

TEST_CASE("reports without a path go to the output stream") {
  const Outcome o = run({"fit", "--data", kWine, "--labels-col", "class", "--kernel", "linear", "--q", "1",
                         "--out-model", scratch("stdout.model").string()});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("[result]") != std::string::npos);
}
