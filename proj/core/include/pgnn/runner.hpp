#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pgnn/forecast.hpp"
#include "pgnn/io.hpp"
#include "pgnn/trainer.hpp"

namespace pgnn {

// Smoke-run overrides; absent fields use the benchmark settings.
struct RunOverrides {
  std::optional<int> epochs;
  std::optional<int> ensemble_size;
  std::optional<double> rtol;
  std::optional<double> atol;
};

struct RunConfig {
  std::vector<SystemId> systems;  // empty = all five
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  RunOverrides overrides;
  int workers = 0;  // training worker threads; 0 = hardware concurrency

  std::vector<SystemId> selected_systems() const;
  TrainConfig train_config() const;
  std::string run_id() const;
};

RunConfig run_config_from_json_file(const std::filesystem::path& path);
void write_run_config_json(const std::filesystem::path& path, const RunConfig& config);

// One ensemble of the experiment matrix: a system with either no injection
// (baseline) or one (term, layer) combination.
struct EnsembleConfig {
  SystemId system = SystemId::LotkaVolterra;
  InjectionConfig injection;

  std::string label() const;  // "baseline" or "<term>_layer<k>"
};

// Baseline plus (term x layer 1..3) for each selected system: 29 ensembles
// for all five systems.
std::vector<EnsembleConfig> matrix_configs(const std::vector<SystemId>& systems);

// File layout of a run directory.
struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path system_dir(SystemId system) const;
  std::filesystem::path dataset_csv(SystemId system) const;
  std::filesystem::path split_json(SystemId system) const;
  std::filesystem::path test_trajectory_csv(SystemId system) const;
  std::filesystem::path generation_json(SystemId system) const;
  std::filesystem::path ensemble_dir(const EnsembleConfig& ec) const;
  std::filesystem::path ensemble_manifest(const EnsembleConfig& ec) const;
  std::filesystem::path model_json(const EnsembleConfig& ec, int member) const;
  std::filesystem::path loss_csv(const EnsembleConfig& ec, int member) const;
  std::filesystem::path forecast_csv(const EnsembleConfig& ec) const;
  std::filesystem::path evaluation_csv(const EnsembleConfig& ec) const;
  std::filesystem::path report_csv(SystemId system) const;
  std::filesystem::path plots_dir(SystemId system) const;
  std::filesystem::path run_manifest() const;
};

// Pipeline stages. Each returns 0 on success, 1 on fatal error, and reads
// its inputs from / writes its outputs to the run directory.
int cmd_generate(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);
int cmd_report(const RunConfig& config);
int cmd_plot(const RunConfig& config);
int cmd_matrix(const RunConfig& config);  // all stages plus the run manifest

}  // namespace pgnn
