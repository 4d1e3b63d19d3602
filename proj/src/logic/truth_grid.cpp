#include "ltn/logic/truth_grid.hpp"

#include <algorithm>

#include "ltn/error.hpp"

namespace ltn {

NodeId expand_to_axes(Graph& g, NodeId node, const std::vector<std::string>& from,
                      const std::vector<std::string>& to, const Shape& to_extents, std::size_t trailing) {
  if (from == to) return node;
  const Shape& in_shape = g.shape(node);
  Shape out_shape = to_extents;
  std::vector<std::size_t> axis_map;
  for (const auto& axis : from) {
    const auto pos = static_cast<std::size_t>(std::find(to.begin(), to.end(), axis) - to.begin());
    if (pos == to.size()) throw LogicError("axis '" + axis + "' missing from target grid");
    axis_map.push_back(pos);
  }
  for (std::size_t t = 0; t < trailing; ++t) {
    out_shape.push_back(in_shape[from.size() + t]);
    axis_map.push_back(to.size() + t);
  }
  return g.expand(node, std::move(out_shape), std::move(axis_map));
}

namespace {

/// Union of both axis lists (a's order, then b's new axes) and extents.
std::pair<std::vector<std::string>, Shape> union_axes(const Graph& g, const TruthGrid& a, const TruthGrid& b) {
  std::vector<std::string> axes = a.axes;
  Shape extents = g.shape(a.node);
  const Shape& bs = g.shape(b.node);
  for (std::size_t i = 0; i < b.axes.size(); ++i) {
    auto it = std::find(axes.begin(), axes.end(), b.axes[i]);
    if (it == axes.end()) {
      axes.push_back(b.axes[i]);
      extents.push_back(bs[i]);
    } else if (extents[static_cast<std::size_t>(it - axes.begin())] != bs[i]) {
      throw ShapeError("axis '" + b.axes[i] + "' has extent " +
                       std::to_string(extents[static_cast<std::size_t>(it - axes.begin())]) + " in one operand and " +
                       std::to_string(bs[i]) + " in the other");
    }
  }
  return {axes, extents};
}

std::vector<std::size_t> axis_positions(const TruthGrid& values, std::span<const std::string> over) {
  std::vector<std::size_t> pos;
  for (const auto& name : over) {
    auto it = std::find(values.axes.begin(), values.axes.end(), name);
    if (it == values.axes.end()) throw LogicError("unknown axis '" + name + "'");
    const auto p = static_cast<std::size_t>(it - values.axes.begin());
    if (std::find(pos.begin(), pos.end(), p) == pos.end()) pos.push_back(p);
  }
  std::sort(pos.begin(), pos.end(), std::greater<>());
  return pos;
}

TruthGrid aggregate(Graph& g, NodeId base, const TruthGrid& values, std::span<const std::string> over, double p) {
  if (!(p >= 1.0)) throw LogicError("aggregation exponent must be at least 1");
  const auto pos = axis_positions(values, over);
  NodeId cur = g.pow(g.clamp(base, kAggregationEpsilon, 1.0), p);
  std::vector<std::string> axes = values.axes;
  for (auto a : pos) {
    cur = g.mean(cur, a);
    axes.erase(axes.begin() + static_cast<std::ptrdiff_t>(a));
  }
  return {g.pow(cur, 1.0 / p), axes};
}

}  // namespace

TruthGrid apply_connective(Graph& g, Connective kind, const TruthGrid& a, const TruthGrid* b) {
  if (kind == Connective::Not) return {g.one_minus(a.node), a.axes};
  if (b == nullptr) throw LogicError("binary connective needs two operands");

  const auto [axes, extents] = union_axes(g, a, *b);
  NodeId x = expand_to_axes(g, a.node, a.axes, axes, extents);
  NodeId y = expand_to_axes(g, b->node, b->axes, axes, extents);
  NodeId xy = g.mul(x, y);
  switch (kind) {
    case Connective::And: return {xy, axes};
    case Connective::Or: return {g.sub(g.add(x, y), xy), axes};
    case Connective::Implies: return {g.add(g.one_minus(x), xy), axes};
    case Connective::Not: break;
  }
  return {xy, axes};
}

TruthGrid aggregate_forall(Graph& g, const TruthGrid& values, std::span<const std::string> over, double p) {
  TruthGrid r = aggregate(g, g.one_minus(values.node), values, over, p);
  r.node = g.one_minus(r.node);
  return r;
}

TruthGrid aggregate_exists(Graph& g, const TruthGrid& values, std::span<const std::string> over, double p) {
  return aggregate(g, values.node, values, over, p);
}

}  // namespace ltn
