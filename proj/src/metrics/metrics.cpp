#include "ltn/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ltn/error.hpp"

namespace ltn {

namespace {

void require_same_shape(const Array& a, const Array& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double hamming_accuracy(const Array& pred, const Array& truth, double threshold) {
  require_same_shape(pred, truth, "hamming_accuracy");
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("hamming_accuracy: threshold must lie in (0, 1)");
  if (pred.size() == 0) throw ShapeError("hamming_accuracy: empty input");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] >= threshold;
    const bool t = truth[i] >= 0.5;
    wrong += p != t;
  }
  return 1.0 - static_cast<double>(wrong) / static_cast<double>(pred.size());
}

double categorical_accuracy(const Array& pred, const Array& truth) {
  require_same_shape(pred, truth, "categorical_accuracy");
  if (pred.rank() != 2 || pred.dim(0) == 0) throw ShapeError("categorical_accuracy: expected a non-empty matrix");
  const auto n = pred.dim(0), c = pred.dim(1);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = pred.data().subspan(r * c, c);
    const auto trow = truth.data().subspan(r * c, c);
    const auto p = std::max_element(row.begin(), row.end()) - row.begin();
    const auto t = std::max_element(trow.begin(), trow.end()) - trow.begin();
    hits += p == t;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ShapeError("rmse: length " + std::to_string(pred.size()) + " vs " + std::to_string(truth.size()));
  }
  if (pred.empty()) throw ShapeError("rmse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

void MetricsLog::append(MetricsRecord record) {
  if (!records_.empty() && record.epoch <= records_.back().epoch) {
    throw Error("metrics: epoch " + std::to_string(record.epoch) + " does not follow epoch " +
                std::to_string(records_.back().epoch));
  }
  if (record.queries.size() != query_names_.size()) {
    throw Error("metrics: record has " + std::to_string(record.queries.size()) + " query values, schema has " +
                std::to_string(query_names_.size()));
  }
  const bool ok = in_unit(record.sat_train) && in_unit(record.sat_test) && in_unit(record.acc_train) &&
                  in_unit(record.acc_test) && std::all_of(record.queries.begin(), record.queries.end(), in_unit);
  if (!ok) throw Error("metrics: value outside [0, 1] at epoch " + std::to_string(record.epoch));
  records_.push_back(std::move(record));
}

std::vector<std::string> MetricsLog::columns() const {
  std::vector<std::string> cols = {"epoch", "sat_train", "sat_test", "acc_train", "acc_test"};
  cols.insert(cols.end(), query_names_.begin(), query_names_.end());
  return cols;
}

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_metrics_csv(const MetricsLog& log, const std::filesystem::path& path) {
  if (log.empty()) throw Error("metrics: refusing to write an empty log");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("metrics: cannot write " + path.string());
  const auto cols = log.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : log.records()) {
    out << r.epoch << ',' << format_fixed6(r.sat_train) << ',' << format_fixed6(r.sat_test) << ','
        << format_fixed6(r.acc_train) << ',' << format_fixed6(r.acc_test);
    for (double q : r.queries) out << ',' << format_fixed6(q);
    out << '\n';
  }
  if (!out) throw Error("metrics: write failed for " + path.string());
}

MetricsLog read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("metrics: cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw Error("metrics: " + path.string() + " is empty");
  const auto header = split_csv_line(line);
  const std::vector<std::string> fixed = {"epoch", "sat_train", "sat_test", "acc_train", "acc_test"};
  if (header.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), header.begin())) {
    throw Error("metrics: unexpected header in " + path.string());
  }
  MetricsLog log(std::vector<std::string>(header.begin() + 5, header.end()));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error("metrics: " + path.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " columns");
    }
    try {
      MetricsRecord r;
      r.epoch = std::stoul(cells[0]);
      r.sat_train = std::stod(cells[1]);
      r.sat_test = std::stod(cells[2]);
      r.acc_train = std::stod(cells[3]);
      r.acc_test = std::stod(cells[4]);
      for (std::size_t i = 5; i < cells.size(); ++i) r.queries.push_back(std::stod(cells[i]));
      log.append(std::move(r));
    } catch (const std::logic_error&) {
      throw Error("metrics: " + path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return log;
}

void write_prediction_csv(std::span<const double> y, std::span<const double> y_pred,
                          const std::filesystem::path& path) {
  if (y.size() != y_pred.size()) throw ShapeError("prediction table: length mismatch");
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(y[a] - y_pred[a]) > std::fabs(y[b] - y_pred[b]);
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "y,y_pred,dif\n";
  for (auto i : order) {
    out << format_fixed6(y[i]) << ',' << format_fixed6(y_pred[i]) << ',' << format_fixed6(std::fabs(y[i] - y_pred[i]))
        << '\n';
  }
}

}  // namespace ltn
