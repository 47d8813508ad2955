#include "larsen/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace larsen {

std::vector<double> seven_sigmas() {
  return {2.0, 1.0, 0.5, 0.1, 0.005, 0.001, 0.0005};
}

std::vector<double> ten_sigmas() {
  return {2.0, 1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001};
}

namespace {

void check_dataset(const Dataset& ds, const std::string& what) {
  if (ds.x.rows() != ds.y.rows()) {
    throw ContractViolation(what + ": x and y row counts differ");
  }
  if (ds.y.cols() != 1) {
    throw ContractViolation(what + ": y must have exactly one column");
  }
  if (ds.column_labels.size() != static_cast<std::size_t>(ds.x.cols()) ||
      ds.noise_mask.size() != static_cast<std::size_t>(ds.x.cols())) {
    throw ContractViolation(what + ": label or mask size does not match x");
  }
}

std::string trim(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t\r\n");
  if (lo == std::string::npos) {
    return "";
  }
  std::size_t hi = s.find_last_not_of(" \t\r\n");
  return s.substr(lo, hi - lo + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cells.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') {
    cells.push_back("");
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size()) {
    throw ContractViolation("load_csv: cell '" + cell + "' at data row " +
                            std::to_string(row) + ", column '" + column +
                            "' is not a number");
  }
  if (!std::isfinite(v)) {
    throw ContractViolation("load_csv: non-finite value at data row " +
                            std::to_string(row) + ", column '" + column + "'");
  }
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) {
    throw ContractViolation("load_csv: cannot open '" + path + "'");
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw ContractViolation("load_csv: '" + path + "' is empty");
  }
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 2) {
    throw ContractViolation("load_csv: need a target column and at least one input column");
  }

  std::ptrdiff_t target_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == target_column) {
      target_idx = static_cast<std::ptrdiff_t>(i);
      break;
    }
  }
  if (target_idx < 0) {
    std::string known;
    for (const auto& h : header) {
      known += (known.empty() ? "" : ", ") + h;
    }
    throw ContractViolation("load_csv: no column named '" + target_column +
                            "' in '" + path + "' (columns: " + known + ")");
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    ++row_no;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ContractViolation("load_csv: data row " + std::to_string(row_no) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header.size()));
    }
    std::vector<double> parsed(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      parsed[i] = parse_cell(cells[i], row_no, header[i]);
    }
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) {
    throw ContractViolation("load_csv: '" + path + "' has no data rows");
  }

  Dataset ds;
  ds.name = path;
  ds.target_label = target_column;
  ds.x.resize(static_cast<Index>(rows.size()), static_cast<Index>(header.size() - 1));
  ds.y.resize(static_cast<Index>(rows.size()), 1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) != target_idx) {
      ds.column_labels.push_back(header[i]);
    }
  }
  ds.noise_mask.assign(ds.column_labels.size(), false);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Index c = 0;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (static_cast<std::ptrdiff_t>(i) == target_idx) {
        ds.y(static_cast<Index>(r), 0) = rows[r][i];
      } else {
        ds.x(static_cast<Index>(r), c++) = rows[r][i];
      }
    }
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  check_dataset(ds, "save_csv");
  std::ofstream out(path);
  if (!out) {
    throw ContractViolation("save_csv: cannot open '" + path + "' for writing");
  }
  for (const auto& label : ds.column_labels) {
    out << label << ',';
  }
  out << ds.target_label << '\n';
  char buf[40];
  for (Index r = 0; r < ds.x.rows(); ++r) {
    for (Index c = 0; c < ds.x.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.x(r, c));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", ds.y(r, 0));
    out << buf << '\n';
  }
  if (!out) {
    throw NumericFailure("save_csv: write to '" + path + "' failed");
  }
}

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& idx,
                  std::size_t lo, std::size_t hi) {
  Dataset out;
  out.name = ds.name;
  out.column_labels = ds.column_labels;
  out.target_label = ds.target_label;
  out.noise_mask = ds.noise_mask;
  out.x.resize(static_cast<Index>(hi - lo), ds.x.cols());
  out.y.resize(static_cast<Index>(hi - lo), 1);
  for (std::size_t i = lo; i < hi; ++i) {
    out.x.row(static_cast<Index>(i - lo)) = ds.x.row(static_cast<Index>(idx[i]));
    out.y.row(static_cast<Index>(i - lo)) = ds.y.row(static_cast<Index>(idx[i]));
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& ds, Index n_train, std::uint64_t seed) {
  check_dataset(ds, "split");
  if (n_train < 1 || n_train >= ds.x.rows()) {
    throw ContractViolation("split: n_train must leave both sides nonempty");
  }
  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(ds.x.rows()));
  return {take_rows(ds, perm, 0, static_cast<std::size_t>(n_train)),
          take_rows(ds, perm, static_cast<std::size_t>(n_train),
                    static_cast<std::size_t>(ds.x.rows()))};
}

std::pair<Dataset, Dataset> split_at(const Dataset& ds, Index n_train) {
  check_dataset(ds, "split_at");
  if (n_train < 1 || n_train >= ds.x.rows()) {
    throw ContractViolation("split_at: n_train must leave both sides nonempty");
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(ds.x.rows()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = i;
  }
  return {take_rows(ds, idx, 0, static_cast<std::size_t>(n_train)),
          take_rows(ds, idx, static_cast<std::size_t>(n_train), idx.size())};
}

StandardizedPair standardize(const Dataset& train, const Dataset& test) {
  check_dataset(train, "standardize: train");
  check_dataset(test, "standardize: test");
  if (train.x.cols() != test.x.cols()) {
    throw ContractViolation("standardize: train and test column counts differ");
  }
  require_finite(train.x, "standardize: train.x");
  require_finite(test.x, "standardize: test.x");
  const Index n = train.x.rows();
  const Index d = train.x.cols();

  StandardizedPair out;
  out.train = train;
  out.test = test;
  out.stats.mean = train.x.colwise().mean();
  out.stats.sd = Vector::Ones(d);
  out.stats.zero_variance.assign(static_cast<std::size_t>(d), false);

  for (Index j = 0; j < d; ++j) {
    const double mean = out.stats.mean(j);
    double sd = 0.0;
    if (n > 1) {
      sd = std::sqrt((train.x.col(j).array() - mean).square().sum() /
                     static_cast<double>(n - 1));
    }
    const bool constant = sd <= 1e-12 * std::max(1.0, std::abs(mean));
    out.stats.zero_variance[static_cast<std::size_t>(j)] = constant;
    if (!constant) {
      out.stats.sd(j) = sd;
    }
    out.train.x.col(j) = (train.x.col(j).array() - mean) / out.stats.sd(j);
    out.test.x.col(j) = (test.x.col(j).array() - mean) / out.stats.sd(j);
  }
  return out;
}

Dataset blend_noise(const Dataset& ds, const NoiseProfile& profile) {
  check_dataset(ds, "blend_noise");
  for (double s : profile.sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ContractViolation("blend_noise: sigmas must be positive and finite");
    }
  }
  if (profile.sigmas.empty()) {
    return ds;
  }

  const Index n = ds.x.rows();
  const Index d = ds.x.cols();
  const Index k = static_cast<Index>(profile.sigmas.size());

  Rng rng(profile.seed);
  Matrix wide(n, d + k);
  wide.leftCols(d) = ds.x;
  std::vector<std::string> labels = ds.column_labels;
  std::vector<bool> mask = ds.noise_mask;
  char buf[48];
  for (Index c = 0; c < k; ++c) {
    const double sigma = profile.sigmas[static_cast<std::size_t>(c)];
    for (Index r = 0; r < n; ++r) {
      wide(r, d + c) = rng.gaussian(0.0, sigma);
    }
    std::snprintf(buf, sizeof(buf), "noise%lld_s%g", static_cast<long long>(c), sigma);
    labels.push_back(buf);
    mask.push_back(true);
  }

  const std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(d + k));
  Dataset out;
  out.name = ds.name;
  out.target_label = ds.target_label;
  out.y = ds.y;
  out.x.resize(n, d + k);
  out.column_labels.resize(static_cast<std::size_t>(d + k));
  out.noise_mask.resize(static_cast<std::size_t>(d + k));
  for (Index c = 0; c < d + k; ++c) {
    const std::size_t src = perm[static_cast<std::size_t>(c)];
    out.x.col(c) = wide.col(static_cast<Index>(src));
    out.column_labels[static_cast<std::size_t>(c)] = labels[src];
    out.noise_mask[static_cast<std::size_t>(c)] = mask[src];
  }
  return out;
}

Dataset gen_two_sines(Index n, double lo, double hi, const NoiseProfile& profile) {
  if (n < 2) {
    throw ContractViolation("gen_two_sines: need at least two points");
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ContractViolation("gen_two_sines: bad interval");
  }
  Dataset ds;
  ds.name = "two-sines";
  ds.column_labels = {"u"};
  ds.noise_mask = {false};
  ds.x.resize(n, 1);
  ds.y.resize(n, 1);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    const double u = lo + step * static_cast<double>(i);
    ds.x(i, 0) = u;
    ds.y(i, 0) = std::sin(u) + std::sin(2.0 * u);
  }
  return blend_noise(ds, profile);
}

nlohmann::json dataset_manifest(const Dataset& ds) {
  check_dataset(ds, "dataset_manifest");
  nlohmann::json j;
  j["name"] = ds.name;
  j["rows"] = ds.x.rows();
  j["input_dim"] = ds.x.cols();
  j["target"] = ds.target_label;
  j["columns"] = ds.column_labels;
  std::vector<int> noise_columns;
  for (std::size_t i = 0; i < ds.noise_mask.size(); ++i) {
    if (ds.noise_mask[i]) {
      noise_columns.push_back(static_cast<int>(i));
    }
  }
  j["noise_columns"] = noise_columns;
  return j;
}

}  // namespace larsen
