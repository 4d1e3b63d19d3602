#pragma once

#include <string>

#include "ltn/logic/grounding.hpp"

namespace ltn {

enum class Distance { Euclidean, Manhattan, Minkowski };

std::string to_string(Distance d);
Distance distance_from_string(const std::string& s);

/// Row-wise similarity exp(-D(x_i, y_i)) of two paired (N, d) batches.
///   euclidean:  D = sqrt(sum (x - y)^2)
///   manhattan:  D = sum |x - y|
///   minkowski:  D = (sum |x - y|^p)^(1/p), p >= 1
/// Returns an (N,) node.
NodeId similarity(Graph& g, Distance kind, double p, NodeId x, NodeId y);

/// Two-argument predicate wrapping `similarity`.
class SimilarityPredicate final : public Predicate {
 public:
  SimilarityPredicate(Distance kind, double p = 2.0);
  NodeId apply(Graph& g, std::span<const NodeId> args) const override;
  Distance kind() const { return kind_; }
  double p() const { return p_; }

 private:
  Distance kind_;
  double p_;
};

}  // namespace ltn
