#pragma once

#include <vector>

#include "glide/graph.hpp"

namespace glide {

struct MetricReport {
  int shd = 0;
  double spurious_rate = 0.0;
  double tpr = 1.0;
  std::vector<Edge> missing;   // in truth, absent in either direction
  std::vector<Edge> extra;     // estimated, absent in truth in either direction
  std::vector<Edge> reversed;  // estimated edge whose reverse is in truth
};

/// Both graphs must share node names in the same order; throws NodeSetMismatch.
MetricReport compare(const Dag& estimate, const Dag& truth);

/// missing + extra + reversed; a reversal costs 1.
int shd(const Dag& estimate, const Dag& truth);
/// Fraction of estimated edges absent from the true skeleton; 0 for an empty
/// estimate.
double spurious_rate(const Dag& estimate, const Dag& truth);
/// Fraction of true edges recovered with correct orientation; 1 when the
/// truth has no edges.
double tpr(const Dag& estimate, const Dag& truth);

}  // namespace glide
