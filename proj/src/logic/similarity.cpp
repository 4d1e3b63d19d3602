#include "ltn/logic/similarity.hpp"

#include "ltn/error.hpp"

namespace ltn {

namespace {

// Keeps the outer root differentiable when both points coincide.
constexpr double kDistanceFloor = 1e-12;
constexpr double kNoUpperBound = 1e300;

}  // namespace

std::string to_string(Distance d) {
  switch (d) {
    case Distance::Euclidean: return "euclidean";
    case Distance::Manhattan: return "manhattan";
    case Distance::Minkowski: return "minkowski";
  }
  return "?";
}

Distance distance_from_string(const std::string& s) {
  if (s == "euclidean") return Distance::Euclidean;
  if (s == "manhattan") return Distance::Manhattan;
  if (s == "minkowski") return Distance::Minkowski;
  throw Error("unknown distance '" + s + "' (valid: euclidean, manhattan, minkowski)");
}

NodeId similarity(Graph& g, Distance kind, double p, NodeId x, NodeId y) {
  const Shape& xs = g.shape(x);
  const Shape& ys = g.shape(y);
  if (xs.size() != 2 || ys.size() != 2) throw ShapeError("similarity: arguments must be (N, d) batches");
  if (xs[0] != ys[0]) {
    throw ShapeError("similarity: unpaired batches of " + std::to_string(xs[0]) + " and " + std::to_string(ys[0]) +
                     " rows");
  }
  if (xs[1] != ys[1]) {
    throw ShapeError("similarity: width " + std::to_string(xs[1]) + " vs " + std::to_string(ys[1]));
  }
  NodeId diff = g.sub(x, y);
  NodeId dist;
  switch (kind) {
    case Distance::Euclidean:
      dist = g.sqrt(g.clamp(g.sum(g.mul(diff, diff), 1), kDistanceFloor, kNoUpperBound));
      break;
    case Distance::Manhattan:
      dist = g.sum(g.abs(diff), 1);
      break;
    case Distance::Minkowski:
      if (!(p >= 1.0)) throw LogicError("minkowski exponent must be at least 1");
      dist = g.pow(g.clamp(g.sum(g.pow(g.abs(diff), p), 1), kDistanceFloor, kNoUpperBound), 1.0 / p);
      break;
  }
  return g.exp(g.mul(dist, g.scalar(-1.0)));
}

SimilarityPredicate::SimilarityPredicate(Distance kind, double p) : kind_(kind), p_(p) {
  if (kind_ == Distance::Minkowski && !(p_ >= 1.0)) throw LogicError("minkowski exponent must be at least 1");
}

NodeId SimilarityPredicate::apply(Graph& g, std::span<const NodeId> args) const {
  if (args.size() != 2) throw LogicError("similarity predicate takes two arguments");
  return similarity(g, kind_, p_, args[0], args[1]);
}

}  // namespace ltn
