#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "pgnn/io.hpp"
#include "pgnn/rng.hpp"

using namespace pgnn;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("pgnn_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("doubles round-trip through 17 significant digits") {
  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform(-300, 300));
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(parse_double(format_double(kInf)) == kInf);
  CHECK(parse_double(format_double(-kInf)) == -kInf);
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(parse_double("bogus"), std::runtime_error);
}

TEST_CASE("dataset csv round trip") {
  TempDir tmp;
  Dataset ds;
  ds.system = SystemId::Lorenz;
  ds.h = 0.005;
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    DataPair p;
    p.t = 0.005 * i;
    p.x = Vec(3);
    p.y = Vec(3);
    for (int d = 0; d < 3; ++d) {
      p.x(d) = rng.uniform(-50, 50);
      p.y(d) = rng.uniform(-500, 500);
    }
    ds.pairs.push_back(std::move(p));
  }
  const auto path = tmp.path / "dataset.csv";
  write_dataset_csv(path, ds);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x0,x1,x2,dx0,dx1,dx2");

  const Dataset back = read_dataset_csv(path, SystemId::Lorenz);
  REQUIRE(back.pairs.size() == ds.pairs.size());
  CHECK(back.h == ds.h);
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    CHECK(back.pairs[i].t == ds.pairs[i].t);
    CHECK(back.pairs[i].x == ds.pairs[i].x);
    CHECK(back.pairs[i].y == ds.pairs[i].y);
  }
}

TEST_CASE("trajectory csv round trip") {
  TempDir tmp;
  Trajectory traj;
  traj.t0 = 0.0;
  traj.h = 0.05;
  Rng rng(8);
  for (int k = 0; k < 30; ++k) {
    Vec x(2);
    x << rng.uniform(-3, 3), rng.uniform(-3, 3);
    traj.states.push_back(x);
  }
  const auto path = tmp.path / "traj.csv";
  write_trajectory_csv(path, traj);
  const Trajectory back = read_trajectory_csv(path);
  CHECK(back.t0 == traj.t0);
  CHECK(back.h == traj.h);
  REQUIRE(back.states.size() == traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) CHECK(back.states[k] == traj.states[k]);
}

TEST_CASE("split json round trip") {
  TempDir tmp;
  Split split;
  split.val_idx = {1, 4, 7};
  split.train_idx = {0, 2, 3, 5, 6, 8, 9};
  const auto path = tmp.path / "split.json";
  write_split_json(path, split, 42, 0.3);
  const Split back = read_split_json(path);
  CHECK(back.val_idx == split.val_idx);
  CHECK(back.train_idx == split.train_idx);
}

TEST_CASE("model json round trip is bit exact") {
  TempDir tmp;
  const NetParams params =
      init_params(benchmark_sizes(4), Activation::Relu, inject(InjectionTerm::HhY2, 2), 99);
  const auto path = tmp.path / "model.json";
  write_model_json(path, params);
  const NetParams back = read_model_json(path);
  CHECK(back.sizes == params.sizes);
  CHECK(back.activation == params.activation);
  CHECK(back.injection.layer == 2);
  CHECK(back.injection.term == InjectionTerm::HhY2);
  CHECK(back.seed == 99);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    CHECK(back.weights[l] == params.weights[l]);
    CHECK(back.biases[l] == params.biases[l]);
  }
}

TEST_CASE("loss csv round trip") {
  TempDir tmp;
  LossHistory history;
  history.train = {0.5, 0.25, 0.1};
  history.val = {0.6, 0.3, 0.15};
  const auto path = tmp.path / "loss.csv";
  write_loss_csv(path, history);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "epoch,train_loss,val_loss");

  const LossHistory back = read_loss_csv(path);
  CHECK(back.train == history.train);
  CHECK(back.val == history.val);
}

TEST_CASE("evaluation csv keeps infinities") {
  TempDir tmp;
  const std::vector<double> scores = {0.25, kInf, 1e-8};
  const auto path = tmp.path / "evaluation.csv";
  write_evaluation_csv(path, scores);
  CHECK(read_evaluation_csv(path) == scores);
}

TEST_CASE("report csv round trip") {
  TempDir tmp;
  std::vector<ReportRow> rows(2);
  rows[0].system = SystemId::LotkaVolterra;
  rows[0].term = InjectionTerm::LvXY;
  rows[0].layer = 1;
  rows[0].rfmse_mean = 0.125;
  rows[0].rfmse_std = 0.5;
  rows[0].n_diverged = 0;
  rows[0].relative_rfmse = 1.0;
  rows[1].system = SystemId::LotkaVolterra;
  rows[1].layer = 0;
  rows[1].rfmse_mean = kInf;
  rows[1].n_diverged = 10;
  rows[1].relative_rfmse = kInf;

  const auto path = tmp.path / "report.csv";
  write_report_csv(path, rows);

  std::ifstream in(path);
  std::string header, line1;
  std::getline(in, header);
  std::getline(in, line1);
  CHECK(header == "system,term,layer,rfmse_mean,rfmse_std,n_diverged,relative_rfmse");
  CHECK(line1.rfind("lotka_volterra,lv_xy,1,", 0) == 0);

  const auto back = read_report_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].term == InjectionTerm::LvXY);
  CHECK(back[0].rfmse_mean == 0.125);
  CHECK_FALSE(back[1].term.has_value());
  CHECK(back[1].rfmse_mean == kInf);
  CHECK(back[1].n_diverged == 10);
}

TEST_CASE("forecast csv writes bands and alive counts") {
  TempDir tmp;
  ForecastResult result;
  result.truth.t0 = 0.0;
  result.truth.h = 0.1;
  for (int k = 0; k < 5; ++k) {
    Vec x(2);
    x << k * 0.1, -k * 0.1;
    result.truth.states.push_back(x);
  }
  // Two members, one dying after 3 steps.
  Rollout full;
  full.traj = result.truth;
  Rollout dead;
  dead.traj.t0 = 0.0;
  dead.traj.h = 0.1;
  dead.traj.states = {result.truth.states[0], result.truth.states[1], result.truth.states[2]};
  dead.diverged = true;
  dead.diverged_step = 3;
  result.members = {full, dead};
  result.stats = ensemble_stats(result.members, 1.96);
  result.rfmse_per_member = {0.0, kInf};

  const auto path = tmp.path / "forecast.csv";
  write_forecast_csv(path, result);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,truth_0,truth_1,mean_0,mean_1,lo_0,lo_1,hi_0,hi_1,n_alive");

  const ForecastTable table = read_forecast_csv(path);
  REQUIRE(table.t.size() == 5);
  CHECK(table.n_alive == std::vector<int>{2, 2, 2, 1, 1});
  CHECK(table.mean(0, 0) == 0.0);
  CHECK(std::isnan(table.mean(3, 0)));  // stats end where the ensemble thins out
  CHECK(std::isnan(table.lo(4, 1)));
  CHECK(table.truth(4, 0) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("ensemble manifest round trip") {
  TempDir tmp;
  EnsembleManifest manifest;
  manifest.run_id = "run-42";
  manifest.system = SystemId::Duffing;
  manifest.term = InjectionTerm::DufCos;
  manifest.layer = 3;
  manifest.seeds = {42, 43, 44};
  manifest.model_files = {"a.json", "b.json", "c.json"};
  manifest.loss_files = {"a.csv", "b.csv", "c.csv"};
  manifest.forecast_file = "forecast.csv";
  manifest.evaluation_file = "evaluation.csv";
  manifest.diverged = {false, true, false};

  const auto path = tmp.path / "ensemble.json";
  write_ensemble_manifest(path, manifest);
  const EnsembleManifest back = read_ensemble_manifest(path);
  CHECK(back.run_id == manifest.run_id);
  CHECK(back.system == manifest.system);
  CHECK(back.term == manifest.term);
  CHECK(back.layer == manifest.layer);
  CHECK(back.seeds == manifest.seeds);
  CHECK(back.model_files == manifest.model_files);
  CHECK(back.loss_files == manifest.loss_files);
  CHECK(back.diverged == manifest.diverged);
}
