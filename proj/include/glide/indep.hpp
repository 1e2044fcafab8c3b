#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>

#include "glide/dataset.hpp"
#include "glide/graph.hpp"

namespace glide {

struct TestResult {
  bool independent = true;
  double p_value = 1.0;
  double statistic = 0.0;
  int dof = 0;
  /// A variable had a single observed level, or every stratum was skipped.
  bool degenerate = false;
  int skipped_strata = 0;
};

/// Likelihood-ratio (G) test of x ⊥ y | z on categorical codes. Strata with
/// fewer than `min_support` rows are skipped; degrees of freedom are pooled
/// over the remaining strata using their observed levels.
TestResult g_test(const Dataset& ds, NodeId x, NodeId y, std::span<const NodeId> z, double alpha,
                  std::size_t min_support = 5);

struct IndepStats {
  std::uint64_t tests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t degenerate = 0;
  std::uint64_t skipped_strata = 0;
};

/// Source of (conditional) independence decisions: either a statistical test
/// on a dataset or d-separation in a known graph. Decisions are memoized per
/// (x, y, sorted z); the cache is sharded and safe for concurrent callers.
///
/// Both backends are non-owning; the dataset or graph must outlive the source.
class IndepSource {
 public:
  static IndepSource data(const Dataset& ds, double alpha, std::size_t min_support = 5);
  static IndepSource oracle(const Dag& dag);

  bool is_oracle() const { return std::holds_alternative<OracleBackend>(backend_); }
  int vars() const;
  double alpha() const;

  /// Marginal dependence of xi and xj.
  bool dependent(NodeId xi, NodeId xj) const;
  bool cond_independent(NodeId x, NodeId y, std::span<const NodeId> z) const;
  /// Full result (memoized like the boolean queries).
  TestResult test(NodeId x, NodeId y, std::span<const NodeId> z) const;

  IndepStats stats() const;

 private:
  struct DataBackend {
    const Dataset* ds;
    double alpha;
    std::size_t min_support;
  };
  struct OracleBackend {
    const Dag* dag;
  };
  struct Shard {
    std::mutex mutex;
    std::unordered_map<std::string, TestResult> results;
  };
  struct Cache {
    std::array<Shard, 16> shards;
    std::atomic<std::uint64_t> tests{0}, hits{0}, degenerate{0}, skipped{0};
  };

  explicit IndepSource(std::variant<DataBackend, OracleBackend> backend);
  TestResult compute(NodeId x, NodeId y, std::span<const NodeId> z) const;

  std::variant<DataBackend, OracleBackend> backend_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace glide
