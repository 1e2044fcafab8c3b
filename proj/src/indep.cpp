#include "glide/indep.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>

#include "glide/error.hpp"

namespace glide {

TestResult g_test(const Dataset& ds, NodeId x, NodeId y, std::span<const NodeId> z, double alpha,
                  std::size_t min_support) {
  const std::size_t n = ds.rows();
  const int cx = ds.cardinality(x);
  const int cy = ds.cardinality(y);
  TestResult out;
  if (n == 0) {
    out.degenerate = true;
    return out;
  }

  const ConfigIndex strata = factorize(DataView(ds), z);
  // Counting sort of rows by stratum.
  std::vector<std::uint32_t> offset(strata.count + 1, 0);
  for (auto id : strata.ids) ++offset[id + 1];
  for (std::size_t s = 0; s < strata.count; ++s) offset[s + 1] += offset[s];
  std::vector<RowIndex> order(n);
  {
    std::vector<std::uint32_t> cursor(offset.begin(), offset.end() - 1);
    for (std::size_t r = 0; r < n; ++r) order[cursor[strata.ids[r]]++] = static_cast<RowIndex>(r);
  }

  const auto colx = ds.column(x);
  const auto coly = ds.column(y);
  std::vector<double> table(static_cast<std::size_t>(cx) * cy);
  std::vector<double> row_sum(cx), col_sum(cy);
  double g = 0.0;
  int dof = 0;
  bool any_tested = false;
  for (std::size_t s = 0; s < strata.count; ++s) {
    const std::size_t size = offset[s + 1] - offset[s];
    if (size < min_support) {
      ++out.skipped_strata;
      continue;
    }
    std::fill(table.begin(), table.end(), 0.0);
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    std::fill(col_sum.begin(), col_sum.end(), 0.0);
    for (std::size_t k = offset[s]; k < offset[s + 1]; ++k) {
      const RowIndex r = order[k];
      table[colx[r] * cy + coly[r]] += 1.0;
      row_sum[colx[r]] += 1.0;
      col_sum[coly[r]] += 1.0;
    }
    const int rows_seen = static_cast<int>(std::count_if(row_sum.begin(), row_sum.end(), [](double v) { return v > 0; }));
    const int cols_seen = static_cast<int>(std::count_if(col_sum.begin(), col_sum.end(), [](double v) { return v > 0; }));
    any_tested = true;
    if (rows_seen < 2 || cols_seen < 2) continue;
    dof += (rows_seen - 1) * (cols_seen - 1);
    const double total = static_cast<double>(size);
    for (int i = 0; i < cx; ++i) {
      for (int j = 0; j < cy; ++j) {
        const double o = table[i * cy + j];
        if (o > 0) g += o * std::log(o * total / (row_sum[i] * col_sum[j]));
      }
    }
  }
  g *= 2.0;
  if (!any_tested || dof == 0) {
    out.degenerate = true;
    return out;
  }
  out.statistic = g;
  out.dof = dof;
  out.p_value = boost::math::gamma_q(dof / 2.0, std::max(g, 0.0) / 2.0);
  out.independent = out.p_value >= alpha;
  return out;
}

// ---------------------------------------------------------------------------

IndepSource::IndepSource(std::variant<DataBackend, OracleBackend> backend)
    : backend_(backend), cache_(std::make_shared<Cache>()) {}

IndepSource IndepSource::data(const Dataset& ds, double alpha, std::size_t min_support) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "significance level must lie in (0, 1)");
  }
  return IndepSource(DataBackend{&ds, alpha, min_support});
}

IndepSource IndepSource::oracle(const Dag& dag) { return IndepSource(OracleBackend{&dag}); }

int IndepSource::vars() const {
  return std::visit(
      [](const auto& b) {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, DataBackend>) {
          return b.ds->vars();
        } else {
          return b.dag->size();
        }
      },
      backend_);
}

double IndepSource::alpha() const {
  if (const auto* b = std::get_if<DataBackend>(&backend_)) return b->alpha;
  return 0.0;
}

TestResult IndepSource::compute(NodeId x, NodeId y, std::span<const NodeId> z) const {
  if (const auto* oracle = std::get_if<OracleBackend>(&backend_)) {
    TestResult r;
    r.independent = d_separated(*oracle->dag, x, y, z);
    r.p_value = r.independent ? 1.0 : 0.0;
    return r;
  }
  const auto& b = std::get<DataBackend>(backend_);
  return g_test(*b.ds, x, y, z, b.alpha, b.min_support);
}

TestResult IndepSource::test(NodeId x, NodeId y, std::span<const NodeId> z) const {
  const int d = vars();
  if (x == y) throw Error(ErrorKind::InvalidArgument, "independence test of a variable with itself");
  if (x < 0 || y < 0 || x >= d || y >= d) throw Error(ErrorKind::NodeOutOfRange, "test variable");
  std::vector<NodeId> zs(z.begin(), z.end());
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  for (NodeId v : zs) {
    if (v == x || v == y) throw Error(ErrorKind::InvalidArgument, "tested variable inside conditioning set");
    if (v < 0 || v >= d) throw Error(ErrorKind::NodeOutOfRange, "conditioning variable");
  }
  if (x > y) std::swap(x, y);

  std::string key;
  key.reserve((zs.size() + 2) * sizeof(NodeId));
  auto append = [&key](NodeId v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
  append(x);
  append(y);
  for (NodeId v : zs) append(v);

  Shard& shard = cache_->shards[std::hash<std::string>{}(key) % cache_->shards.size()];
  {
    std::lock_guard lock(shard.mutex);
    if (auto it = shard.results.find(key); it != shard.results.end()) {
      ++cache_->hits;
      return it->second;
    }
  }
  const TestResult r = compute(x, y, zs);
  ++cache_->tests;
  if (r.degenerate) ++cache_->degenerate;
  cache_->skipped += static_cast<std::uint64_t>(r.skipped_strata);
  std::lock_guard lock(shard.mutex);
  shard.results.emplace(std::move(key), r);
  return r;
}

bool IndepSource::dependent(NodeId xi, NodeId xj) const { return !test(xi, xj, {}).independent; }

bool IndepSource::cond_independent(NodeId x, NodeId y, std::span<const NodeId> z) const {
  return test(x, y, z).independent;
}

IndepStats IndepSource::stats() const {
  return IndepStats{cache_->tests.load(), cache_->hits.load(), cache_->degenerate.load(),
                    cache_->skipped.load()};
}

}  // namespace glide
