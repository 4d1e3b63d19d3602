#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ltn/data/table.hpp"
#include "ltn/tensor/array.hpp"

namespace ltn {

enum class LabelScheme { None, MultiLabel, SingleLabel, Regression };

std::string to_string(LabelScheme s);

/// One input column: a one-hot block for categorical columns, a single
/// (optionally min-max scaled) value for numeric ones.
struct FeatureEncoding {
  std::string column;
  bool categorical = false;
  std::vector<std::string> vocabulary;
  bool scaled = false;
  double min = 0.0;
  double max = 1.0;

  std::size_t width() const { return categorical ? vocabulary.size() : 1; }
};

struct EncodingSpec {
  std::vector<FeatureEncoding> features;
  std::string label_column;
  LabelScheme label_scheme = LabelScheme::None;
  std::vector<std::string> labels;  // class order (classification)

  std::size_t width() const;
  std::vector<std::string> feature_names() const;
  void validate() const;
};

struct FitOptions {
  /// Feature columns in encoding order; empty means every numeric and
  /// categorical column of the schema.
  std::vector<std::string> feature_columns;
  std::string label_column;
  LabelScheme label_scheme = LabelScheme::None;
  /// Fixed vocabularies; other categorical columns get their sorted
  /// distinct values. The label column uses the entry under its name.
  std::map<std::string, std::vector<std::string>> vocabularies;
  bool scale_numeric = true;
};

EncodingSpec fit_encoding(const DatasetTable& table, const FitOptions& options);

struct Encoded {
  Array x;  // (n, width)
  Array y;  // (n, C) one-hot / multi-hot, (n, 1) targets, or (n, 0)
};

/// One-hot in vocabulary order, min-max scaling where set, regression
/// targets unscaled. Throws DataError on an out-of-vocabulary value.
Encoded encode(const DatasetTable& table, const EncodingSpec& spec);

/// Recovers the categorical values of `column` from encoded rows (argmax
/// of its one-hot block).
std::vector<std::string> decode_categorical(const Array& x, const EncodingSpec& spec, const std::string& column);

/// FNV-1a over the shape and value bits.
std::uint64_t array_checksum(const Array& a);

}  // namespace ltn
