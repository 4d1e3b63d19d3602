#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ltn/tensor/array.hpp"

namespace ltn {

/// 1 - mean per-bit disagreement between `pred >= threshold` and the
/// 0/1 entries of `truth`.
double hamming_accuracy(const Array& pred, const Array& truth, double threshold = 0.5);

/// Fraction of rows whose argmax matches the argmax of `truth`.
double categorical_accuracy(const Array& pred, const Array& truth);

double rmse(std::span<const double> pred, std::span<const double> truth);

/// Accuracy-like score for regression: max(0, 1 - rmse).
inline double rmse_score(double rmse_value) { return rmse_value < 1.0 ? 1.0 - rmse_value : 0.0; }

struct MetricsRecord {
  std::size_t epoch = 0;
  double sat_train = 0.0;
  double sat_test = 0.0;
  double acc_train = 0.0;
  double acc_test = 0.0;
  std::vector<double> queries;  // one per MetricsLog::query_names entry
};

class MetricsLog {
 public:
  MetricsLog() = default;
  explicit MetricsLog(std::vector<std::string> query_names) : query_names_(std::move(query_names)) {}

  /// Rejects non-increasing epochs, values outside [0, 1] and records
  /// whose query count does not match the schema.
  void append(MetricsRecord record);

  const std::vector<std::string>& query_names() const { return query_names_; }
  const std::vector<MetricsRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::vector<std::string> columns() const;

 private:
  std::vector<std::string> query_names_;
  std::vector<MetricsRecord> records_;
};

/// Header row, then one row per epoch, values with 6 fractional digits.
void write_metrics_csv(const MetricsLog& log, const std::filesystem::path& path);
MetricsLog read_metrics_csv(const std::filesystem::path& path);

/// Per-sample regression table with columns y,y_pred,dif, sorted by dif
/// (absolute difference) descending.
void write_prediction_csv(std::span<const double> y, std::span<const double> y_pred,
                          const std::filesystem::path& path);

std::string format_fixed6(double v);

}  // namespace ltn
