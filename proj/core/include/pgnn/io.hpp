#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pgnn/dataset.hpp"
#include "pgnn/forecast.hpp"
#include "pgnn/network.hpp"
#include "pgnn/trainer.hpp"

namespace pgnn {

// Doubles are serialised with 17 significant digits so CSV and JSON files
// round-trip bit-exactly; "inf"/"-inf"/"nan" are legal values.
std::string format_double(double value);
double parse_double(const std::string& text);

// Dataset CSV: header t,x0,...,x{d-1},dx0,...,dx{d-1}, one row per pair.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset_csv(const std::filesystem::path& path, SystemId system);

// Trajectory CSV: header t,x0,...,x{d-1}, one row per grid point.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_split_json(const std::filesystem::path& path, const Split& split,
                      std::uint64_t seed, double fraction);
Split read_split_json(const std::filesystem::path& path);

// Model JSON: sizes, activation, injection{term,layer}, seed, weights
// (row-major matrices), biases.
void write_model_json(const std::filesystem::path& path, const NetParams& params);
NetParams read_model_json(const std::filesystem::path& path);

// Loss CSV: header epoch,train_loss,val_loss, one row per epoch.
void write_loss_csv(const std::filesystem::path& path, const LossHistory& history);
LossHistory read_loss_csv(const std::filesystem::path& path);

// Forecast CSV: header t,truth_*,mean_*,lo_*,hi_*,n_alive over the full test
// horizon; band columns are nan once fewer than two members are alive.
void write_forecast_csv(const std::filesystem::path& path, const ForecastResult& result);

struct ForecastTable {
  std::vector<double> t;
  Eigen::MatrixXd truth, mean, lo, hi;  // one column per state component
  std::vector<int> n_alive;
};
ForecastTable read_forecast_csv(const std::filesystem::path& path);

// Evaluation CSV: header member,rfmse, one row per ensemble member.
void write_evaluation_csv(const std::filesystem::path& path,
                          const std::vector<double>& member_rfmse);
std::vector<double> read_evaluation_csv(const std::filesystem::path& path);

// Report CSV: header system,term,layer,rfmse_mean,rfmse_std,n_diverged,
// relative_rfmse; baseline rows use term "none" and layer 0.
void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);

struct EnsembleManifest {
  std::string run_id;
  SystemId system = SystemId::LotkaVolterra;
  std::optional<InjectionTerm> term;
  int layer = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> model_files;
  std::vector<std::string> loss_files;
  std::string forecast_file;
  std::string evaluation_file;
  std::vector<bool> diverged;  // training divergence per member
};

void write_ensemble_manifest(const std::filesystem::path& path, const EnsembleManifest& manifest);
EnsembleManifest read_ensemble_manifest(const std::filesystem::path& path);

}  // namespace pgnn
