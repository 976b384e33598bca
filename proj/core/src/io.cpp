#include "pgnn/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace pgnn {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void expect_header(const std::string& got, const std::string& want,
                   const std::filesystem::path& path) {
  if (got != want) {
    throw std::runtime_error("unexpected header in " + path.string() + ": got '" + got +
                             "', want '" + want + "'");
  }
}

// JSON value that survives non-finite doubles (encoded as strings).
json jnum(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double jnum_get(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

json dump_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jnum(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd load_matrix(const json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = jnum_get(rows[i][j]);
  }
  return m;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  json j;
  in >> j;
  return j;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) {
    throw std::runtime_error("cannot parse number: '" + text + "'");
  }
  return v;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  auto out = open_out(path);
  const int dim = dataset.pairs.empty() ? 0 : static_cast<int>(dataset.pairs.front().x.size());
  out << "t";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  for (int i = 0; i < dim; ++i) out << ",dx" << i;
  out << "\n";
  for (const auto& pair : dataset.pairs) {
    out << format_double(pair.t);
    for (Eigen::Index i = 0; i < pair.x.size(); ++i) out << "," << format_double(pair.x(i));
    for (Eigen::Index i = 0; i < pair.y.size(); ++i) out << "," << format_double(pair.y(i));
    out << "\n";
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path, SystemId system) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "t" || (header.size() - 1) % 2 != 0) {
    throw std::runtime_error("malformed dataset header in " + path.string());
  }
  const int dim = static_cast<int>((header.size() - 1) / 2);

  Dataset ds;
  ds.system = system;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != 1 + 2 * dim) {
      throw std::runtime_error("malformed dataset row in " + path.string());
    }
    DataPair p;
    p.t = parse_double(fields[0]);
    p.x.resize(dim);
    p.y.resize(dim);
    for (int i = 0; i < dim; ++i) p.x(i) = parse_double(fields[1 + i]);
    for (int i = 0; i < dim; ++i) p.y(i) = parse_double(fields[1 + dim + i]);
    ds.pairs.push_back(std::move(p));
  }
  if (ds.pairs.size() >= 2 && ds.pairs[1].t > ds.pairs[0].t) {
    ds.h = ds.pairs[1].t - ds.pairs[0].t;
  }
  return ds;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  out << "t";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << format_double(traj.time_at(k));
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      out << "," << format_double(traj.states[k](i));
    }
    out << "\n";
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file: " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "t") {
    throw std::runtime_error("malformed trajectory header in " + path.string());
  }
  const int dim = static_cast<int>(header.size()) - 1;

  Trajectory traj;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != 1 + dim) {
      throw std::runtime_error("malformed trajectory row in " + path.string());
    }
    times.push_back(parse_double(fields[0]));
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x(i) = parse_double(fields[1 + i]);
    traj.states.push_back(std::move(x));
  }
  if (times.empty()) throw std::runtime_error("trajectory without rows: " + path.string());
  traj.t0 = times.front();
  traj.h = times.size() > 1 ? times[1] - times[0] : 0.0;
  return traj;
}

void write_split_json(const std::filesystem::path& path, const Split& split,
                      std::uint64_t seed, double fraction) {
  json j;
  j["seed"] = seed;
  j["fraction"] = fraction;
  j["n_pairs"] = split.train_idx.size() + split.val_idx.size();
  j["val_idx"] = split.val_idx;
  write_json_file(path, j);
}

Split read_split_json(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  Split split;
  split.val_idx = j.at("val_idx").get<std::vector<int>>();
  const std::size_t n = j.at("n_pairs").get<std::size_t>();
  std::vector<bool> is_val(n, false);
  for (int idx : split.val_idx) is_val.at(static_cast<std::size_t>(idx)) = true;
  split.train_idx.reserve(n - split.val_idx.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_val[i]) split.train_idx.push_back(static_cast<int>(i));
  }
  return split;
}

void write_model_json(const std::filesystem::path& path, const NetParams& params) {
  json j;
  j["sizes"] = params.sizes;
  j["activation"] = to_string(params.activation);
  j["injection"]["term"] = params.injection.term ? json(to_string(*params.injection.term))
                                                 : json(nullptr);
  j["injection"]["layer"] = params.injection.layer;
  j["seed"] = params.seed;
  json weights = json::array();
  for (const auto& w : params.weights) weights.push_back(dump_matrix(w));
  j["weights"] = std::move(weights);
  json biases = json::array();
  for (const auto& b : params.biases) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < b.size(); ++i) arr.push_back(jnum(b(i)));
    biases.push_back(std::move(arr));
  }
  j["biases"] = std::move(biases);
  write_json_file(path, j);
}

NetParams read_model_json(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  NetParams params;
  params.sizes = j.at("sizes").get<std::vector<int>>();
  params.activation = activation_from_string(j.at("activation").get<std::string>());
  const json& inj = j.at("injection");
  params.injection.layer = inj.at("layer").get<int>();
  if (!inj.at("term").is_null()) {
    params.injection.term = term_from_string(inj.at("term").get<std::string>());
  }
  params.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& w : j.at("weights")) params.weights.push_back(load_matrix(w));
  for (const auto& b : j.at("biases")) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(b.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = jnum_get(b[static_cast<std::size_t>(i)]);
    params.biases.push_back(std::move(v));
  }
  return params;
}

void write_loss_csv(const std::filesystem::path& path, const LossHistory& history) {
  auto out = open_out(path);
  out << "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < history.train.size(); ++e) {
    out << (e + 1) << "," << format_double(history.train[e]) << ","
        << format_double(history.val[e]) << "\n";
  }
}

LossHistory read_loss_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty loss file: " + path.string());
  expect_header(line, "epoch,train_loss,val_loss", path);
  LossHistory history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw std::runtime_error("malformed loss row in " + path.string());
    history.train.push_back(parse_double(fields[1]));
    history.val.push_back(parse_double(fields[2]));
  }
  return history;
}

void write_forecast_csv(const std::filesystem::path& path, const ForecastResult& result) {
  auto out = open_out(path);
  const int dim = static_cast<int>(result.truth.states.front().size());
  out << "t";
  for (int i = 0; i < dim; ++i) out << ",truth_" << i;
  for (int i = 0; i < dim; ++i) out << ",mean_" << i;
  for (int i = 0; i < dim; ++i) out << ",lo_" << i;
  for (int i = 0; i < dim; ++i) out << ",hi_" << i;
  out << ",n_alive\n";

  const std::size_t defined = result.stats.mean.size();
  for (std::size_t k = 0; k < result.truth.states.size(); ++k) {
    out << format_double(result.truth.time_at(k));
    for (int i = 0; i < dim; ++i) out << "," << format_double(result.truth.states[k](i));
    for (const auto* block : {&result.stats.mean, &result.stats.band_lo, &result.stats.band_hi}) {
      for (int i = 0; i < dim; ++i) {
        out << "," << (k < defined ? format_double((*block)[k](i)) : "nan");
      }
    }
    const int alive = k < result.stats.n_alive.size() ? result.stats.n_alive[k] : 0;
    out << "," << alive << "\n";
  }
}

ForecastTable read_forecast_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty forecast file: " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() < 6 || header[0] != "t" || header.back() != "n_alive" ||
      (header.size() - 2) % 4 != 0) {
    throw std::runtime_error("malformed forecast header in " + path.string());
  }
  const int dim = static_cast<int>((header.size() - 2) / 4);

  ForecastTable table;
  std::vector<std::vector<double>> raw(4 * static_cast<std::size_t>(dim));  // truth, mean, lo, hi
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("malformed forecast row in " + path.string());
    }
    table.t.push_back(parse_double(fields[0]));
    for (std::size_t c = 0; c < raw.size(); ++c) raw[c].push_back(parse_double(fields[1 + c]));
    table.n_alive.push_back(static_cast<int>(parse_double(fields.back())));
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(table.t.size());
  auto to_matrix = [&](std::size_t block) {
    Eigen::MatrixXd m(rows, dim);
    for (int i = 0; i < dim; ++i) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        m(r, i) = raw[block * dim + static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
      }
    }
    return m;
  };
  table.truth = to_matrix(0);
  table.mean = to_matrix(1);
  table.lo = to_matrix(2);
  table.hi = to_matrix(3);
  return table;
}

void write_evaluation_csv(const std::filesystem::path& path,
                          const std::vector<double>& member_rfmse) {
  auto out = open_out(path);
  out << "member,rfmse\n";
  for (std::size_t i = 0; i < member_rfmse.size(); ++i) {
    out << i << "," << format_double(member_rfmse[i]) << "\n";
  }
}

std::vector<double> read_evaluation_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty evaluation file: " + path.string());
  expect_header(line, "member,rfmse", path);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw std::runtime_error("malformed evaluation row in " + path.string());
    values.push_back(parse_double(fields[1]));
  }
  return values;
}

void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  auto out = open_out(path);
  out << "system,term,layer,rfmse_mean,rfmse_std,n_diverged,relative_rfmse\n";
  for (const auto& row : rows) {
    out << to_string(row.system) << "," << (row.term ? to_string(*row.term) : "none") << ","
        << row.layer << "," << format_double(row.rfmse_mean) << ","
        << format_double(row.rfmse_std) << "," << row.n_diverged << ","
        << format_double(row.relative_rfmse) << "\n";
  }
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty report file: " + path.string());
  expect_header(line, "system,term,layer,rfmse_mean,rfmse_std,n_diverged,relative_rfmse", path);
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) throw std::runtime_error("malformed report row in " + path.string());
    ReportRow row;
    row.system = system_from_string(fields[0]);
    if (fields[1] != "none") row.term = term_from_string(fields[1]);
    row.layer = static_cast<int>(parse_double(fields[2]));
    row.rfmse_mean = parse_double(fields[3]);
    row.rfmse_std = parse_double(fields[4]);
    row.n_diverged = static_cast<int>(parse_double(fields[5]));
    row.relative_rfmse = parse_double(fields[6]);
    rows.push_back(row);
  }
  return rows;
}

void write_ensemble_manifest(const std::filesystem::path& path, const EnsembleManifest& manifest) {
  json j;
  j["run_id"] = manifest.run_id;
  j["system"] = to_string(manifest.system);
  j["term"] = manifest.term ? json(to_string(*manifest.term)) : json(nullptr);
  j["layer"] = manifest.layer;
  j["seeds"] = manifest.seeds;
  j["model_files"] = manifest.model_files;
  j["loss_files"] = manifest.loss_files;
  j["forecast_file"] = manifest.forecast_file;
  j["evaluation_file"] = manifest.evaluation_file;
  j["diverged"] = manifest.diverged;
  write_json_file(path, j);
}

EnsembleManifest read_ensemble_manifest(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  EnsembleManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.system = system_from_string(j.at("system").get<std::string>());
  if (!j.at("term").is_null()) m.term = term_from_string(j.at("term").get<std::string>());
  m.layer = j.at("layer").get<int>();
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.model_files = j.at("model_files").get<std::vector<std::string>>();
  m.loss_files = j.at("loss_files").get<std::vector<std::string>>();
  m.forecast_file = j.at("forecast_file").get<std::string>();
  m.evaluation_file = j.at("evaluation_file").get<std::string>();
  m.diverged = j.at("diverged").get<std::vector<bool>>();
  return m;
}

}  // namespace pgnn
