#include "pgnn/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pgnn/svg.hpp"

namespace pgnn {

using nlohmann::json;

std::vector<SystemId> RunConfig::selected_systems() const {
  return systems.empty() ? all_systems() : systems;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig tc;
  tc.epochs = overrides.epochs.value_or(100);
  tc.ensemble_size = overrides.ensemble_size.value_or(10);
  tc.batch_size = 32;
  tc.seed = seed;
  return tc;
}

std::string RunConfig::run_id() const { return "run-" + std::to_string(seed); }

RunConfig run_config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path.string() + ": " + e.what());
  }

  RunConfig cfg;
  if (j.contains("systems")) {
    for (const auto& name : j.at("systems")) {
      cfg.systems.push_back(system_from_string(name.get<std::string>()));
    }
  }
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  if (j.contains("overrides")) {
    const json& o = j.at("overrides");
    if (o.contains("epochs")) cfg.overrides.epochs = o.at("epochs").get<int>();
    if (o.contains("ensemble_size")) cfg.overrides.ensemble_size = o.at("ensemble_size").get<int>();
    if (o.contains("rtol")) cfg.overrides.rtol = o.at("rtol").get<double>();
    if (o.contains("atol")) cfg.overrides.atol = o.at("atol").get<double>();
  }
  return cfg;
}

namespace {

json run_config_to_json(const RunConfig& config) {
  json j;
  json systems = json::array();
  for (SystemId id : config.selected_systems()) systems.push_back(to_string(id));
  j["systems"] = std::move(systems);
  j["out_dir"] = config.out_dir.string();
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  json o = json::object();
  if (config.overrides.epochs) o["epochs"] = *config.overrides.epochs;
  if (config.overrides.ensemble_size) o["ensemble_size"] = *config.overrides.ensemble_size;
  if (config.overrides.rtol) o["rtol"] = *config.overrides.rtol;
  if (config.overrides.atol) o["atol"] = *config.overrides.atol;
  j["overrides"] = std::move(o);
  return j;
}

}  // namespace

void write_run_config_json(const std::filesystem::path& path, const RunConfig& config) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << run_config_to_json(config).dump(2) << "\n";
}

std::string EnsembleConfig::label() const {
  if (!injection.active()) return "baseline";
  return to_string(*injection.term) + "_layer" + std::to_string(injection.layer);
}

std::vector<EnsembleConfig> matrix_configs(const std::vector<SystemId>& systems) {
  std::vector<EnsembleConfig> out;
  for (SystemId id : systems) {
    const SystemSpec& spec = system_spec(id);
    out.push_back({id, no_injection()});
    for (InjectionTerm term : spec.terms) {
      for (int layer = 1; layer <= 3; ++layer) {
        out.push_back({id, inject(term, layer)});
      }
    }
  }
  return out;
}

std::filesystem::path RunPaths::system_dir(SystemId system) const {
  return root / to_string(system);
}
std::filesystem::path RunPaths::dataset_csv(SystemId system) const {
  return system_dir(system) / "dataset.csv";
}
std::filesystem::path RunPaths::split_json(SystemId system) const {
  return system_dir(system) / "split.json";
}
std::filesystem::path RunPaths::test_trajectory_csv(SystemId system) const {
  return system_dir(system) / "test_trajectory.csv";
}
std::filesystem::path RunPaths::generation_json(SystemId system) const {
  return system_dir(system) / "generation.json";
}
std::filesystem::path RunPaths::ensemble_dir(const EnsembleConfig& ec) const {
  return system_dir(ec.system) / "ensembles" / ec.label();
}
std::filesystem::path RunPaths::ensemble_manifest(const EnsembleConfig& ec) const {
  return ensemble_dir(ec) / "ensemble.json";
}
std::filesystem::path RunPaths::model_json(const EnsembleConfig& ec, int member) const {
  return ensemble_dir(ec) / ("member_" + std::to_string(member) + ".model.json");
}
std::filesystem::path RunPaths::loss_csv(const EnsembleConfig& ec, int member) const {
  return ensemble_dir(ec) / ("member_" + std::to_string(member) + ".loss.csv");
}
std::filesystem::path RunPaths::forecast_csv(const EnsembleConfig& ec) const {
  return ensemble_dir(ec) / "forecast.csv";
}
std::filesystem::path RunPaths::evaluation_csv(const EnsembleConfig& ec) const {
  return ensemble_dir(ec) / "evaluation.csv";
}
std::filesystem::path RunPaths::report_csv(SystemId) const { return root / "report.csv"; }
std::filesystem::path RunPaths::plots_dir(SystemId system) const {
  return system_dir(system) / "plots";
}
std::filesystem::path RunPaths::run_manifest() const { return root / "run_manifest.json"; }

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

struct GenerationOutcome {
  std::vector<Trajectory> train;
  bool ok = true;
};

GenerationOutcome generate_system(const RunConfig& config, const RunPaths& paths,
                                  const SystemSpec& spec) {
  const double rtol = config.overrides.rtol.value_or(1e-6);
  const double atol = config.overrides.atol.value_or(1e-9);
  const double T = spec.defaults.final_time;
  const double h = spec.defaults.h;

  json gen;
  gen["system"] = to_string(spec.id);
  gen["h"] = h;
  gen["T"] = T;
  gen["rtol"] = rtol;
  gen["atol"] = atol;

  GenerationOutcome outcome;
  json train_entries = json::array();
  for (const Vec& ic : spec.defaults.train_ics) {
    json entry;
    entry["ic"] = vec_to_json(ic);
    try {
      Trajectory traj = simulate(spec, ic, T, h, rtol, atol);
      entry["ok"] = true;
      entry["points"] = traj.states.size();
      outcome.train.push_back(std::move(traj));
    } catch (const IntegrationError& e) {
      entry["ok"] = false;
      entry["error"] = e.what();
      outcome.ok = false;
    }
    train_entries.push_back(std::move(entry));
  }
  gen["train"] = std::move(train_entries);

  json test_entry;
  test_entry["ic"] = vec_to_json(spec.defaults.test_ic);
  try {
    Trajectory test = simulate(spec, spec.defaults.test_ic, T, h, rtol, atol);
    test_entry["ok"] = true;
    test_entry["points"] = test.states.size();
    write_trajectory_csv(paths.test_trajectory_csv(spec.id), test);
  } catch (const IntegrationError& e) {
    test_entry["ok"] = false;
    test_entry["error"] = e.what();
    outcome.ok = false;
  }
  gen["test"] = std::move(test_entry);

  if (!outcome.train.empty()) {
    Dataset ds = build_dataset(spec, outcome.train);
    gen["n_pairs"] = ds.pairs.size();
    write_dataset_csv(paths.dataset_csv(spec.id), ds);
    Split split = split_dataset(ds, 0.2, config.seed);
    write_split_json(paths.split_json(spec.id), split, config.seed, 0.2);
  }

  std::filesystem::create_directories(paths.system_dir(spec.id));
  std::ofstream out(paths.generation_json(spec.id));
  out << gen.dump(2) << "\n";
  return outcome;
}

EnsembleManifest train_one_ensemble(const RunConfig& config, const RunPaths& paths,
                                    const SystemSpec& spec, const EnsembleConfig& ec,
                                    const Dataset& dataset, const Split& split) {
  const TrainConfig tc = config.train_config();
  std::vector<TrainedModel> members =
      train_ensemble(dataset, split, spec, ec.injection, tc, config.workers);

  EnsembleManifest manifest;
  manifest.run_id = config.run_id();
  manifest.system = ec.system;
  manifest.term = ec.injection.term;
  manifest.layer = ec.injection.layer;
  const std::filesystem::path root = paths.root;
  for (int i = 0; i < static_cast<int>(members.size()); ++i) {
    manifest.seeds.push_back(tc.seed + static_cast<std::uint64_t>(i));
    const auto model_path = paths.model_json(ec, i);
    const auto loss_path = paths.loss_csv(ec, i);
    write_model_json(model_path, members[static_cast<std::size_t>(i)].params);
    write_loss_csv(loss_path, members[static_cast<std::size_t>(i)].history);
    manifest.model_files.push_back(std::filesystem::relative(model_path, root).string());
    manifest.loss_files.push_back(std::filesystem::relative(loss_path, root).string());
    manifest.diverged.push_back(members[static_cast<std::size_t>(i)].history.diverged);
  }
  manifest.forecast_file =
      std::filesystem::relative(paths.forecast_csv(ec), root).string();
  manifest.evaluation_file =
      std::filesystem::relative(paths.evaluation_csv(ec), root).string();
  write_ensemble_manifest(paths.ensemble_manifest(ec), manifest);
  return manifest;
}

std::vector<EnsembleConfig> system_configs(SystemId id) {
  return matrix_configs({id});
}

}  // namespace

int cmd_generate(const RunConfig& config) {
  const RunPaths paths{config.out_dir};
  bool all_ok = true;
  for (SystemId id : config.selected_systems()) {
    const SystemSpec& spec = system_spec(id);
    std::cout << "[generate] " << to_string(id) << "\n";
    GenerationOutcome outcome = generate_system(config, paths, spec);
    all_ok = all_ok && outcome.ok;
  }
  return all_ok ? 0 : 1;
}

int cmd_train(const RunConfig& config) {
  const RunPaths paths{config.out_dir};
  try {
    for (SystemId id : config.selected_systems()) {
      const SystemSpec& spec = system_spec(id);
      Dataset dataset = read_dataset_csv(paths.dataset_csv(id), id);
      Split split = read_split_json(paths.split_json(id));
      for (const EnsembleConfig& ec : system_configs(id)) {
        std::cout << "[train] " << to_string(id) << " " << ec.label() << std::endl;
        train_one_ensemble(config, paths, spec, ec, dataset, split);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "train failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_evaluate(const RunConfig& config) {
  const RunPaths paths{config.out_dir};
  try {
    for (SystemId id : config.selected_systems()) {
      const SystemSpec& spec = system_spec(id);
      Trajectory truth = read_trajectory_csv(paths.test_trajectory_csv(id));
      for (const EnsembleConfig& ec : system_configs(id)) {
        EnsembleManifest manifest = read_ensemble_manifest(paths.ensemble_manifest(ec));
        std::vector<NetParams> models;
        models.reserve(manifest.model_files.size());
        for (const auto& rel : manifest.model_files) {
          models.push_back(read_model_json(paths.root / rel));
        }
        ForecastResult result = ensemble_forecast(models, spec, truth, {}, 1.96);
        write_forecast_csv(paths.forecast_csv(ec), result);
        write_evaluation_csv(paths.evaluation_csv(ec), result.rfmse_per_member);
        std::cout << "[evaluate] " << to_string(id) << " " << ec.label() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "evaluate failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_report(const RunConfig& config) {
  const RunPaths paths{config.out_dir};
  try {
    std::vector<ReportRow> rows;
    for (SystemId id : config.selected_systems()) {
      for (const EnsembleConfig& ec : system_configs(id)) {
        ReportRow row;
        row.system = id;
        row.term = ec.injection.term;
        row.layer = ec.injection.layer;
        aggregate_rfmse(read_evaluation_csv(paths.evaluation_csv(ec)), row);
        rows.push_back(row);
      }
    }
    compute_relative_rfmse(rows);
    write_report_csv(paths.report_csv(SystemId::LotkaVolterra), rows);
  } catch (const std::exception& e) {
    std::cerr << "report failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

namespace {

// Mean over members of EMA-smoothed loss curves; members are smoothed first,
// then averaged over those still recorded at each epoch.
std::vector<double> smoothed_ensemble_curve(const std::vector<std::vector<double>>& curves) {
  std::size_t horizon = 0;
  std::vector<std::vector<double>> smoothed;
  smoothed.reserve(curves.size());
  for (const auto& c : curves) {
    if (c.empty()) continue;
    smoothed.push_back(ema_smooth(c, 0.2));
    horizon = std::max(horizon, c.size());
  }
  std::vector<double> mean(horizon, 0.0);
  for (std::size_t e = 0; e < horizon; ++e) {
    double sum = 0.0;
    int n = 0;
    for (const auto& c : smoothed) {
      if (e < c.size()) {
        sum += c[e];
        ++n;
      }
    }
    mean[e] = n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
  }
  return mean;
}

}  // namespace

int cmd_plot(const RunConfig& config) {
  const RunPaths paths{config.out_dir};
  std::vector<std::string> missing;
  try {
    for (SystemId id : config.selected_systems()) {
      const auto configs = system_configs(id);

      // Loss comparison: one curve per injection configuration.
      LinePlot train_plot, val_plot;
      train_plot.title = to_string(id) + " training loss";
      val_plot.title = to_string(id) + " validation loss";
      for (auto* p : {&train_plot, &val_plot}) {
        p->x_label = "epoch";
        p->y_label = "loss";
        p->log_y = true;
      }
      std::size_t color = 0;
      for (const EnsembleConfig& ec : configs) {
        const auto manifest_path = paths.ensemble_manifest(ec);
        if (!std::filesystem::exists(manifest_path)) {
          missing.push_back(manifest_path.string());
          continue;
        }
        EnsembleManifest manifest = read_ensemble_manifest(manifest_path);
        std::vector<std::vector<double>> train_curves, val_curves;
        for (const auto& rel : manifest.loss_files) {
          const auto loss_path = paths.root / rel;
          if (!std::filesystem::exists(loss_path)) {
            missing.push_back(loss_path.string());
            continue;
          }
          LossHistory h = read_loss_csv(loss_path);
          train_curves.push_back(std::move(h.train));
          val_curves.push_back(std::move(h.val));
        }
        if (train_curves.empty()) continue;
        const std::string c = plot_palette()[color++ % plot_palette().size()];
        auto add_series = [&](LinePlot& plot, std::vector<double> y) {
          PlotSeries s;
          s.label = ec.label();
          s.color = c;
          s.y = std::move(y);
          s.x.resize(s.y.size());
          for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] = static_cast<double>(i + 1);
          plot.series.push_back(std::move(s));
        };
        add_series(train_plot, smoothed_ensemble_curve(train_curves));
        add_series(val_plot, smoothed_ensemble_curve(val_curves));
      }
      write_svg_plot(paths.plots_dir(id) / "loss_train.svg", train_plot);
      write_svg_plot(paths.plots_dir(id) / "loss_val.svg", val_plot);

      // Forecast plots: truth, dashed ensemble mean, shaded band.
      for (const EnsembleConfig& ec : configs) {
        const auto forecast_path = paths.forecast_csv(ec);
        if (!std::filesystem::exists(forecast_path)) {
          missing.push_back(forecast_path.string());
          continue;
        }
        ForecastTable table = read_forecast_csv(forecast_path);
        LinePlot plot;
        plot.title = to_string(id) + " forecast, " + ec.label();
        plot.x_label = "time (s)";
        plot.y_label = "state";
        const int dim = static_cast<int>(table.truth.cols());
        for (int i = 0; i < dim; ++i) {
          const std::string c = plot_palette()[(i + 1) % plot_palette().size()];
          PlotBand band;
          band.x = table.t;
          band.color = c;
          band.lo.resize(table.t.size());
          band.hi.resize(table.t.size());
          for (std::size_t r = 0; r < table.t.size(); ++r) {
            band.lo[r] = table.lo(static_cast<Eigen::Index>(r), i);
            band.hi[r] = table.hi(static_cast<Eigen::Index>(r), i);
          }
          plot.bands.push_back(std::move(band));

          PlotSeries truth_series;
          truth_series.label = i == 0 ? "truth" : "";
          truth_series.color = "#000000";
          truth_series.x = table.t;
          truth_series.y.resize(table.t.size());
          for (std::size_t r = 0; r < table.t.size(); ++r) {
            truth_series.y[r] = table.truth(static_cast<Eigen::Index>(r), i);
          }
          plot.series.push_back(std::move(truth_series));

          PlotSeries mean_series;
          mean_series.label = i == 0 ? "ensemble mean" : "";
          mean_series.color = c;
          mean_series.dashed = true;
          mean_series.x = table.t;
          mean_series.y.resize(table.t.size());
          for (std::size_t r = 0; r < table.t.size(); ++r) {
            mean_series.y[r] = table.mean(static_cast<Eigen::Index>(r), i);
          }
          plot.series.push_back(std::move(mean_series));
        }
        write_svg_plot(paths.plots_dir(id) / ("forecast_" + ec.label() + ".svg"), plot);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "plot failed: " << e.what() << "\n";
    return 1;
  }
  if (!missing.empty()) {
    std::cerr << "plot: missing inputs:\n";
    for (const auto& path : missing) std::cerr << "  " << path << "\n";
    return 1;
  }
  return 0;
}

int cmd_matrix(const RunConfig& config) {
  if (int rc = cmd_generate(config); rc != 0) return rc;
  if (int rc = cmd_train(config); rc != 0) return rc;
  if (int rc = cmd_evaluate(config); rc != 0) return rc;
  if (int rc = cmd_report(config); rc != 0) return rc;
  if (int rc = cmd_plot(config); rc != 0) return rc;

  const RunPaths paths{config.out_dir};
  json manifest;
  manifest["run_id"] = config.run_id();
  manifest["seed"] = config.seed;
  manifest["config"] = run_config_to_json(config);
  json ensembles = json::array();
  for (SystemId id : config.selected_systems()) {
    for (const EnsembleConfig& ec : system_configs(id)) {
      EnsembleManifest em = read_ensemble_manifest(paths.ensemble_manifest(ec));
      json e;
      e["system"] = to_string(em.system);
      e["term"] = em.term ? json(to_string(*em.term)) : json(nullptr);
      e["layer"] = em.layer;
      e["seeds"] = em.seeds;
      json files;
      files["models"] = em.model_files;
      files["losses"] = em.loss_files;
      files["forecast"] = em.forecast_file;
      files["evaluation"] = em.evaluation_file;
      files["manifest"] =
          std::filesystem::relative(paths.ensemble_manifest(ec), paths.root).string();
      e["files"] = std::move(files);
      int n_diverged = 0;
      for (bool d : em.diverged) n_diverged += d ? 1 : 0;
      e["diverged_members"] = n_diverged;
      ensembles.push_back(std::move(e));
    }
  }
  manifest["ensembles"] = std::move(ensembles);

  std::ofstream out(paths.run_manifest());
  if (!out) {
    std::cerr << "cannot write run manifest\n";
    return 1;
  }
  out << manifest.dump(2) << "\n";
  return 0;
}

}  // namespace pgnn
