#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "pgnn/runner.hpp"

using namespace pgnn;
namespace fs = std::filesystem;

namespace {

struct TempRunDir {
  fs::path path;
  TempRunDir() {
    path = fs::temp_directory_path() / ("pgnn_pipeline_" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempRunDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("experiment matrix counting") {
  CHECK(matrix_configs(all_systems()).size() == 29);  // 5 baselines + 8 terms x 3 layers
  CHECK(matrix_configs({SystemId::Duffing}).size() == 7);
  CHECK(matrix_configs({SystemId::LotkaVolterra}).size() == 4);
  CHECK(matrix_configs({SystemId::LotkaVolterra}).front().label() == "baseline");
  CHECK(matrix_configs({SystemId::LotkaVolterra}).back().label() == "lv_xy_layer3");
}

TEST_CASE("run config json round trip") {
  TempRunDir tmp;
  RunConfig config;
  config.systems = {SystemId::Lorenz, SystemId::Duffing};
  config.out_dir = "somewhere";
  config.seed = 9;
  config.workers = 3;
  config.overrides.epochs = 4;
  config.overrides.rtol = 1e-7;
  const auto path = tmp.path / "config.json";
  write_run_config_json(path, config);
  const RunConfig back = run_config_from_json_file(path);
  CHECK(back.systems == config.systems);
  CHECK(back.out_dir == config.out_dir);
  CHECK(back.seed == 9);
  CHECK(back.workers == 3);
  CHECK(back.overrides.epochs == 4);
  CHECK(back.overrides.rtol == 1e-7);
  CHECK_FALSE(back.overrides.ensemble_size.has_value());
}

TEST_CASE("smoke matrix run produces a consistent run directory") {
  TempRunDir tmp;
  RunConfig config;
  config.systems = {SystemId::LotkaVolterra};
  config.out_dir = tmp.path;
  config.seed = 7;
  config.overrides.epochs = 2;
  config.overrides.ensemble_size = 2;
  config.workers = 2;

  REQUIRE(cmd_matrix(config) == 0);

  const RunPaths paths{config.out_dir};
  const SystemId lv = SystemId::LotkaVolterra;

  // Generation: 7 training trajectories of 4001 points, one test trajectory.
  {
    std::ifstream in(paths.generation_json(lv));
    REQUIRE(in.good());
    nlohmann::json gen;
    in >> gen;
    REQUIRE(gen.at("train").size() == 7);
    for (const auto& entry : gen.at("train")) {
      CHECK(entry.at("ok").get<bool>());
      CHECK(entry.at("points").get<int>() == 4001);
    }
    CHECK(gen.at("test").at("points").get<int>() == 4001);
    CHECK(gen.at("n_pairs").get<int>() == 7 * 4000);
  }

  const Dataset ds = read_dataset_csv(paths.dataset_csv(lv), lv);
  CHECK(ds.pairs.size() == 28000);
  const Split split = read_split_json(paths.split_json(lv));
  CHECK(split.val_idx.size() == 5600);  // 20% of 28000
  CHECK(split.train_idx.size() == 22400);

  const Trajectory truth = read_trajectory_csv(paths.test_trajectory_csv(lv));
  CHECK(truth.states.size() == 4001);

  // Four ensembles: baseline + lv_xy at layers 1..3, two members each.
  const auto configs = matrix_configs(config.systems);
  REQUIRE(configs.size() == 4);
  for (const auto& ec : configs) {
    const EnsembleManifest manifest = read_ensemble_manifest(paths.ensemble_manifest(ec));
    CHECK(manifest.run_id == "run-7");
    CHECK(manifest.seeds == std::vector<std::uint64_t>{7, 8});
    REQUIRE(manifest.model_files.size() == 2);
    for (const auto& rel : manifest.model_files) {
      CHECK(fs::exists(paths.root / rel));
    }
    for (const auto& rel : manifest.loss_files) {
      const LossHistory h = read_loss_csv(paths.root / rel);
      CHECK(h.train.size() == 2);
    }
    CHECK(fs::exists(paths.root / manifest.forecast_file));
    CHECK(fs::exists(paths.root / manifest.evaluation_file));
    CHECK(read_evaluation_csv(paths.root / manifest.evaluation_file).size() == 2);

    const NetParams model = read_model_json(paths.root / manifest.model_files[0]);
    CHECK(model.sizes == std::vector<int>{2, 32, 64, 32, 2});
    CHECK(model.injection.layer == ec.injection.layer);
  }

  // Report: per-system minimum relative RFMSE is exactly 1.
  const auto rows = read_report_csv(paths.report_csv(lv));
  REQUIRE(rows.size() == 4);
  double min_rel = rows[0].relative_rfmse;
  for (const auto& row : rows) min_rel = std::min(min_rel, row.relative_rfmse);
  CHECK(min_rel == 1.0);

  // Plots.
  CHECK(fs::exists(paths.plots_dir(lv) / "loss_train.svg"));
  CHECK(fs::exists(paths.plots_dir(lv) / "loss_val.svg"));
  CHECK(fs::exists(paths.plots_dir(lv) / "forecast_baseline.svg"));
  CHECK(fs::exists(paths.plots_dir(lv) / "forecast_lv_xy_layer1.svg"));

  // Run manifest references existing files only.
  {
    std::ifstream in(paths.run_manifest());
    REQUIRE(in.good());
    nlohmann::json manifest;
    in >> manifest;
    CHECK(manifest.at("run_id") == "run-7");
    CHECK(manifest.at("seed") == 7);
    REQUIRE(manifest.at("ensembles").size() == 4);
    for (const auto& e : manifest.at("ensembles")) {
      for (const auto& rel : e.at("files").at("models")) {
        CHECK(fs::exists(paths.root / rel.get<std::string>()));
      }
      for (const auto& rel : e.at("files").at("losses")) {
        CHECK(fs::exists(paths.root / rel.get<std::string>()));
      }
      CHECK(fs::exists(paths.root / e.at("files").at("forecast").get<std::string>()));
      CHECK(fs::exists(paths.root / e.at("files").at("evaluation").get<std::string>()));
      CHECK(fs::exists(paths.root / e.at("files").at("manifest").get<std::string>()));
      CHECK(e.at("diverged_members").get<int>() >= 0);
    }
  }

  // plot on a directory with missing inputs lists them and fails.
  RunConfig missing = config;
  missing.out_dir = tmp.path / "nonexistent";
  CHECK(cmd_plot(missing) == 1);
}
