#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "ltn/cli/experiment.hpp"
#include "ltn/error.hpp"
#include "ltn/metrics/metrics.hpp"
#include "oracles.hpp"

using namespace ltn;
using ltn::testing::read_file;
using ltn::testing::scratch_dir;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = LTN_SOURCE_DIR;

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t lines(const fs::path& p) {
  const std::string s = read_file(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

struct Shell {
  int code;
  std::string err;
  std::string out;
};

Shell cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string("\"") + LTN_CLI_PATH + "\" " + args + " >\"" + (dir / "out.txt").string() +
                          "\" 2>\"" + (dir / "err.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return {status == 0 ? 0 : 1, read_file(dir / "err.txt"), read_file(dir / "out.txt")};
}

ExperimentConfig small_kdd(const fs::path& out) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::KddMultilabelLtn;
  c.synth_n = 300;
  c.epochs = 3;
  c.hidden = {8, 8};
  c.axioms = kRoot / "data/axioms/kdd_multilabel.axioms";
  c.queries = kRoot / "data/axioms/kdd_queries.axioms";
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("experiment names") {
  CHECK(experiment_names().size() == 5);
  CHECK(experiment_from_string("beam-regression") == ExperimentKind::BeamRegression);
  try {
    experiment_from_string("foo");
    FAIL("no error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    for (const auto& n : experiment_names()) CHECK(msg.find(n) != std::string::npos);
  }
}

TEST_CASE("config files, overrides and echo") {
  ExperimentConfig c;
  load_config_file(c, kRoot / "configs/beam_euclidean_k4.conf");
  CHECK(c.experiment == ExperimentKind::BeamRegression);
  CHECK(c.k == 4);
  CHECK(c.axioms == (kRoot / "data/axioms/beam_regression.axioms").lexically_normal());
  CHECK_NOTHROW(c.validate());
  c.set("epochs", "7");
  CHECK(c.epochs == 7);
  CHECK_THROWS(c.set("nope", "1"));
  CHECK_THROWS(c.set("epochs", "many"));
  c.set("distance", "cosine");
  CHECK_THROWS(c.validate());

  // the echo reproduces the config
  ExperimentConfig d;
  load_config_file(d, kRoot / "configs/kdd_multilabel_ltn.conf");
  const auto dir = scratch_dir("cli_echo");
  write(dir / "echo.conf", d.to_text());
  ExperimentConfig e;
  load_config_file(e, dir / "echo.conf");
  CHECK(e.to_text() == d.to_text());
  for (const auto& key : config_keys()) {
    if (key == "compare_run" || key == "validation_data" || key == "data" || key == "schema") continue;
    if (d.experiment != ExperimentKind::BeamRegression &&
        (key == "k" || key == "distance" || key == "minkowski_p" || key == "validation_n")) {
      continue;
    }
    CAPTURE(key);
    CHECK(d.to_text().find(key + "=") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::ProtocolKb;
  CHECK_THROWS(c.validate());
  c.axioms = "x.axioms";
  CHECK_NOTHROW(c.validate());
  c.compare_run = "somewhere";
  CHECK_THROWS(c.validate());
  ExperimentConfig b;
  b.experiment = ExperimentKind::BeamRegression;
  b.axioms = "a";
  b.k = 1;
  CHECK_THROWS(b.validate());
  b.k = 2;
  b.distance = "minkowski";
  b.minkowski_p = 0.5;
  CHECK_THROWS(b.validate());
}

TEST_CASE("emit_plot_data") {
  const auto dir = scratch_dir("cli_plot");
  write(dir / "m.csv", "epoch,sat_train,sat_test,acc_train,acc_test\n0,0.100000,0.200000,0.300000,0.400000\n"
                       "1,0.500000,0.600000,0.700000,0.812345\n");
  const auto files = emit_plot_data(dir / "m.csv", dir / "plots");
  REQUIRE(files.size() == 4);
  CHECK(read_file(dir / "plots/acc_test.csv") == "epoch,acc_test\n0,0.400000\n1,0.812345\n");
  write(dir / "empty.csv", "");
  CHECK_THROWS(emit_plot_data(dir / "empty.csv", dir / "plots"));
  write(dir / "bad.csv", "epoch,a\n0,1,2\n");
  CHECK_THROWS(emit_plot_data(dir / "bad.csv", dir / "plots"));
}

TEST_CASE("a small multi-label run writes its artifacts") {
  const auto dir = scratch_dir("cli_kdd");
  const RunArtifacts a = run_experiment(small_kdd(dir / "run"));
  REQUIRE(a.metrics_csvs.size() == 1);
  CHECK(lines(a.metrics_csvs[0]) == 3 + 2);
  for (const auto& f : a.all_files()) CHECK(fs::exists(f));
  const auto echo = read_key_values(a.config_echo);
  CHECK(echo.at("feature_checksum").size() == 16);
  CHECK(echo.at("experiment") == "kdd-multilabel-ltn");
  CHECK(!a.plot_files.empty());
  const MetricsLog log = read_metrics_csv(a.metrics_csvs[0]);
  CHECK(log.query_names().size() == 3);

  // a DNN run compared against it
  ExperimentConfig d = small_kdd(dir / "dnn");
  d.experiment = ExperimentKind::KddDnn;
  d.axioms.clear();
  d.queries.clear();
  d.compare_run = dir / "run";
  const RunArtifacts b = run_experiment(d);
  CHECK(b.feature_checksum == a.feature_checksum);
  CHECK(fs::exists(dir / "dnn/comparison.csv"));
  CHECK(read_file(dir / "dnn/comparison.csv").rfind("epoch,ltn_acc_train,ltn_acc_test,dnn_acc_train,dnn_acc_test\n", 0) ==
        0);

  // a different data seed makes the checksums disagree
  d.data_seed = 2;
  d.output_dir = dir / "dnn2";
  CHECK_THROWS_AS(run_experiment(d), DataError);
}

TEST_CASE("a small beam run writes fold predictions") {
  const auto dir = scratch_dir("cli_beam");
  ExperimentConfig c;
  load_config_file(c, kRoot / "configs/beam_euclidean_k2.conf");
  c.epochs = 3;
  c.output_dir = dir;
  const RunArtifacts a = run_experiment(c);
  REQUIRE(a.prediction_csvs.size() == 2);
  for (const auto& p : a.prediction_csvs) {
    CHECK(read_file(p).rfind("y,y_pred,dif\n", 0) == 0);
    CHECK(lines(p) == c.validation_n + 1);
  }
  CHECK(a.validation_rmse.size() == 2);
  CHECK(lines(dir / "folds.csv") == 3);
}

TEST_CASE("run errors") {
  const auto dir = scratch_dir("cli_errors");
  write(dir / "bad.axioms", "forall x: P(x, normal) &\n");
  ExperimentConfig c = small_kdd(dir / "o");
  c.axioms = dir / "bad.axioms";
  try {
    run_experiment(c);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  write(dir / "data.csv", "a,b\n1,2\n");
  ExperimentConfig m = small_kdd(dir / "o2");
  m.data = dir / "data.csv";
  m.schema = kRoot / "data/schemas/kdd99.schema";
  CHECK_THROWS_AS(run_experiment(m), DataError);
}

TEST_CASE("command line") {
  const auto dir = scratch_dir("cli_shell");
  write(dir / "foo.conf", "experiment=foo\n");
  Shell r = cli("run -c \"" + (dir / "foo.conf").string() + "\"", dir);
  CHECK(r.code != 0);
  CHECK(r.err.find("kdd-multilabel-ltn") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  CHECK(cli("foo", dir).code != 0);

  r = cli("kdd-multilabel-ltn -c \"" + (kRoot / "configs/kdd_multilabel_ltn.conf").string() +
              "\" --synth_n 200 --epochs 1 --hidden 4,4 --output_dir \"" + (dir / "run").string() + "\"",
          dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("metrics.csv") != std::string::npos);
  CHECK(lines(dir / "run/metrics.csv") == 3);

  r = cli("plot \"" + (dir / "run/metrics.csv").string() + "\" -o \"" + (dir / "plots").string() + "\"", dir);
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "plots/sat_train.csv"));

  r = cli("beam-regression -c \"" + (kRoot / "configs/kdd_multilabel_ltn.conf").string() + "\"", dir);
  CHECK(r.code != 0);
}
