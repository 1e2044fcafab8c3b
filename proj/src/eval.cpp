#include "glide/eval.hpp"

#include "glide/error.hpp"

namespace glide {

MetricReport compare(const Dag& estimate, const Dag& truth) {
  if (truth.names() != estimate.names()) {
    throw Error(ErrorKind::NodeSetMismatch, "graphs are over different node sets");
  }
  MetricReport out;
  std::size_t correct = 0;
  for (const auto& [p, c] : estimate.edges()) {
    if (truth.has_edge(p, c)) {
      ++correct;
    } else if (truth.has_edge(c, p)) {
      out.reversed.emplace_back(p, c);
    } else {
      out.extra.emplace_back(p, c);
    }
  }
  for (const auto& [p, c] : truth.edges()) {
    if (!estimate.has_edge(p, c) && !estimate.has_edge(c, p)) out.missing.emplace_back(p, c);
  }
  out.shd = static_cast<int>(out.missing.size() + out.extra.size() + out.reversed.size());
  const std::size_t est = estimate.edge_count();
  out.spurious_rate = est == 0 ? 0.0 : static_cast<double>(out.extra.size()) / static_cast<double>(est);
  const std::size_t tru = truth.edge_count();
  out.tpr = tru == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(tru);
  return out;
}

int shd(const Dag& estimate, const Dag& truth) { return compare(estimate, truth).shd; }

double spurious_rate(const Dag& estimate, const Dag& truth) { return compare(estimate, truth).spurious_rate; }

double tpr(const Dag& estimate, const Dag& truth) { return compare(estimate, truth).tpr; }

}  // namespace glide
