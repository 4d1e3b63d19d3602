#include "ltn/data/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <set>

#include "ltn/error.hpp"

namespace ltn {

namespace {

const std::string& text_of(const Cell& c, const std::string& column) {
  if (!std::holds_alternative<std::string>(c)) throw DataError("column '" + column + "' has a missing value");
  return std::get<std::string>(c);
}

double number_of(const Cell& c, const std::string& column) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (!std::isfinite(v)) throw DataError("column '" + column + "' has a non-finite value");
    return v;
  }
  if (std::holds_alternative<std::string>(c)) {
    const auto& s = std::get<std::string>(c);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(v)) return v;
    throw DataError("column '" + column + "' value '" + s + "' is not a number");
  }
  throw DataError("column '" + column + "' has a missing value");
}

std::size_t vocab_index(const std::vector<std::string>& vocab, const std::string& value, const std::string& column) {
  auto it = std::find(vocab.begin(), vocab.end(), value);
  if (it == vocab.end()) throw DataError("value '" + value + "' of column '" + column + "' is not in its vocabulary");
  return static_cast<std::size_t>(it - vocab.begin());
}

std::vector<std::string> distinct_sorted(const DatasetTable& table, std::size_t c) {
  std::set<std::string> values;
  for (const auto& row : table.rows) {
    if (std::holds_alternative<std::string>(row[c])) values.insert(std::get<std::string>(row[c]));
  }
  return {values.begin(), values.end()};
}

}  // namespace

std::string to_string(LabelScheme s) {
  switch (s) {
    case LabelScheme::None: return "none";
    case LabelScheme::MultiLabel: return "multi-label";
    case LabelScheme::SingleLabel: return "single-label";
    case LabelScheme::Regression: return "regression";
  }
  return "?";
}

std::size_t EncodingSpec::width() const {
  std::size_t w = 0;
  for (const auto& f : features) w += f.width();
  return w;
}

std::vector<std::string> EncodingSpec::feature_names() const {
  std::vector<std::string> out;
  for (const auto& f : features) {
    if (f.categorical) {
      for (const auto& v : f.vocabulary) out.push_back(f.column + "=" + v);
    } else {
      out.push_back(f.column);
    }
  }
  return out;
}

void EncodingSpec::validate() const {
  for (const auto& f : features) {
    if (f.categorical && f.vocabulary.empty()) throw DataError("column '" + f.column + "' has an empty vocabulary");
    if (!f.categorical && f.scaled && !(f.min < f.max)) {
      throw DataError("column '" + f.column + "' has scaling range with min >= max");
    }
  }
  const bool classification =
      label_scheme == LabelScheme::MultiLabel || label_scheme == LabelScheme::SingleLabel;
  if (classification && labels.empty()) throw DataError("classification encoding without labels");
  if (label_scheme != LabelScheme::None && label_column.empty()) throw DataError("encoding without label column");
}

EncodingSpec fit_encoding(const DatasetTable& table, const FitOptions& options) {
  EncodingSpec spec;
  spec.label_column = options.label_column;
  spec.label_scheme = options.label_scheme;

  std::vector<std::string> columns = options.feature_columns;
  if (columns.empty()) {
    for (const auto& c : table.schema.columns) {
      if (c.kind != ColumnKind::Label) columns.push_back(c.name);
    }
  }
  for (const auto& name : columns) {
    const auto c = table.schema.index_of(name);
    const auto kind = table.schema.columns[c].kind;
    FeatureEncoding f;
    f.column = name;
    if (kind == ColumnKind::Label) throw DataError("label column '" + name + "' used as a feature");
    if (kind == ColumnKind::Categorical) {
      f.categorical = true;
      auto it = options.vocabularies.find(name);
      f.vocabulary = it != options.vocabularies.end() ? it->second : distinct_sorted(table, c);
    } else if (options.scale_numeric) {
      f.scaled = true;
      double lo = INFINITY;
      double hi = -INFINITY;
      for (const auto& row : table.rows) {
        const double v = number_of(row[c], name);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (table.rows.empty()) lo = hi = 0.0;
      f.min = lo;
      f.max = hi > lo ? hi : lo + 1.0;  // constant column encodes to 0
    }
    spec.features.push_back(std::move(f));
  }

  if (options.label_scheme == LabelScheme::MultiLabel || options.label_scheme == LabelScheme::SingleLabel) {
    const auto c = table.schema.index_of(options.label_column);
    auto it = options.vocabularies.find(options.label_column);
    spec.labels = it != options.vocabularies.end() ? it->second : distinct_sorted(table, c);
  } else if (options.label_scheme == LabelScheme::Regression) {
    table.schema.index_of(options.label_column);
  }
  spec.validate();
  return spec;
}

Encoded encode(const DatasetTable& table, const EncodingSpec& spec) {
  spec.validate();
  const std::size_t n = table.size();
  const std::size_t w = spec.width();
  std::vector<std::size_t> cols;
  for (const auto& f : spec.features) cols.push_back(table.schema.index_of(f.column));

  Array x(Shape{n, w});
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    std::size_t off = 0;
    for (std::size_t i = 0; i < spec.features.size(); ++i) {
      const auto& f = spec.features[i];
      if (f.categorical) {
        x.at(r, off + vocab_index(f.vocabulary, text_of(row[cols[i]], f.column), f.column)) = 1.0;
      } else {
        const double v = number_of(row[cols[i]], f.column);
        x.at(r, off) = f.scaled ? (v - f.min) / (f.max - f.min) : v;
      }
      off += f.width();
    }
  }

  Array y(Shape{n, 0});
  switch (spec.label_scheme) {
    case LabelScheme::None:
      break;
    case LabelScheme::MultiLabel:
    case LabelScheme::SingleLabel: {
      const auto c = table.schema.index_of(spec.label_column);
      y = Array(Shape{n, spec.labels.size()});
      for (std::size_t r = 0; r < n; ++r) {
        y.at(r, vocab_index(spec.labels, text_of(table.rows[r][c], spec.label_column), spec.label_column)) = 1.0;
      }
      break;
    }
    case LabelScheme::Regression: {
      const auto c = table.schema.index_of(spec.label_column);
      y = Array(Shape{n, 1});
      for (std::size_t r = 0; r < n; ++r) y.at(r, 0) = number_of(table.rows[r][c], spec.label_column);
      break;
    }
  }
  return {std::move(x), std::move(y)};
}

std::vector<std::string> decode_categorical(const Array& x, const EncodingSpec& spec, const std::string& column) {
  std::size_t off = 0;
  for (const auto& f : spec.features) {
    if (f.column == column) {
      if (!f.categorical) throw DataError("column '" + column + "' is not categorical");
      if (x.rank() != 2 || x.dim(1) != spec.width()) throw ShapeError("encoded matrix has the wrong width");
      std::vector<std::string> out;
      for (std::size_t r = 0; r < x.dim(0); ++r) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < f.width(); ++j) {
          if (x.at(r, off + j) > x.at(r, off + best)) best = j;
        }
        out.push_back(f.vocabulary[best]);
      }
      return out;
    }
    off += f.width();
  }
  throw DataError("column '" + column + "' is not encoded");
}

std::uint64_t array_checksum(const Array& a) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (auto d : a.shape()) mix(d);
  for (double v : a.data()) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace ltn
