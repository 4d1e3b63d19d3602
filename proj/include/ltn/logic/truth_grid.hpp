#pragma once

#include <span>
#include <string>
#include <vector>

#include "ltn/tensor/graph.hpp"

namespace ltn {

/// Truth values with one array axis per free variable axis, in `axes`
/// order. A grid without axes is a scalar.
struct TruthGrid {
  NodeId node;
  std::vector<std::string> axes;
};

enum class Connective { Not, And, Or, Implies };

/// Lower bound applied to the bases of the aggregation powers.
inline constexpr double kAggregationEpsilon = 1e-7;

/// Product-family connectives: 1 - a, a*b, a + b - a*b, 1 - a + a*b.
/// Binary connectives broadcast over the union of both grids' axes.
TruthGrid apply_connective(Graph& g, Connective kind, const TruthGrid& a, const TruthGrid* b = nullptr);

/// 1 - (mean (1 - a)^p)^(1/p) over the named axes.
TruthGrid aggregate_forall(Graph& g, const TruthGrid& values, std::span<const std::string> over, double p);

/// (mean a^p)^(1/p) over the named axes.
TruthGrid aggregate_exists(Graph& g, const TruthGrid& values, std::span<const std::string> over, double p);

/// Expands `grid` so that its axes are exactly `axes` (a superset of the
/// grid's own axes) with the given extents.
NodeId expand_to_axes(Graph& g, NodeId node, const std::vector<std::string>& from,
                      const std::vector<std::string>& to, const Shape& to_extents, std::size_t trailing = 0);

}  // namespace ltn
