#include "glide/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "glide/error.hpp"
#include "glide/parallel.hpp"
#include "glide/rng.hpp"

namespace glide {

double gamma_of(std::span<const double> p, std::span<const double> pi) {
  if (p.size() != pi.size()) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(p.size()) + " vs " + std::to_string(pi.size()) + " categories");
  }
  double gamma = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < p.size(); ++b) {
    if (pi[b] > 0.0) gamma = std::min(gamma, p[b] / pi[b]);
  }
  return gamma;
}

BoundaryPriors boundary_priors(std::span<const double> p, double gamma_o, NodeId variable) {
  if (!(gamma_o > 0.0 && gamma_o < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "gamma_o must lie in (0, 1)");
  }
  BoundaryPriors out;
  const std::size_t r = p.size();
  for (std::size_t k = 0; k < r; ++k) {
    const double q = p[k];
    if (q >= 1.0) {
      throw Error(ErrorKind::DegenerateCategory,
                  "category " + std::to_string(k) + " holds all the mass; no prior can shift it");
    }
    double alpha = (1.0 - q / gamma_o) / (1.0 - q);
    if (alpha < 0.0) {
      alpha = 0.0;
      out.clamped.push_back(static_cast<int>(k));
    }
    Prior prior{variable, std::vector<double>(r), 0.0};
    for (std::size_t b = 0; b < r; ++b) prior.probs[b] = alpha * p[b] + (b == k ? 1.0 - alpha : 0.0);
    prior.gamma = gamma_of(p, prior.probs);
    out.priors.push_back(std::move(prior));
  }
  return out;
}

Prior mix_priors(const BoundaryPriors& boundary, std::span<const double> weights,
                 std::span<const double> p) {
  if (weights.size() != boundary.priors.size()) {
    throw Error(ErrorKind::LengthMismatch, "one weight per boundary prior required");
  }
  Prior out{boundary.priors.empty() ? -1 : boundary.priors.front().variable,
            std::vector<double>(p.size(), 0.0), 0.0};
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    for (std::size_t b = 0; b < p.size(); ++b) out.probs[b] += weights[k] * boundary.priors[k].probs[b];
  }
  for (double v : out.probs) total += v;
  for (double& v : out.probs) v /= total;
  out.gamma = gamma_of(p, out.probs);
  return out;
}

std::vector<Prior> sample_priors(std::span<const double> p, double gamma_o, std::size_t count,
                                 std::uint64_t seed, NodeId variable) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be >= 1");
  const BoundaryPriors boundary = boundary_priors(p, gamma_o, variable);
  Rng rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> weights(boundary.priors.size());
  std::vector<Prior> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double total = 0.0;
    for (double& w : weights) total += (w = gamma(rng));
    for (double& w : weights) w /= total;
    out.push_back(mix_priors(boundary, weights, p));
  }
  return out;
}

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

std::vector<Prior> select_representative(const std::vector<Prior>& priors, int m, std::uint64_t seed,
                                         std::span<const double> p, const KMeansOptions& options) {
  const std::size_t n = priors.size();
  if (m < 1 || static_cast<std::size_t>(m) > n) {
    throw Error(ErrorKind::InvalidArgument, "need 1 <= m <= number of priors");
  }
  const std::size_t dim = p.size();
  const std::size_t k = static_cast<std::size_t>(m);
  std::vector<double> points(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (priors[i].probs.size() != dim) throw Error(ErrorKind::LengthMismatch, "prior dimension");
    std::copy(priors[i].probs.begin(), priors[i].probs.end(), points.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  auto point = [&](std::size_t i) { return points.data() + i * dim; };
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<double> centroids;
  centroids.reserve(k * dim);
  std::vector<char> chosen(n, 0);
  auto add_centroid = [&](std::size_t i) {
    chosen[i] = 1;
    centroids.insert(centroids.end(), point(i), point(i) + dim);
  };
  add_centroid(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(point(i), centroids.data(), dim);
  while (centroids.size() < k * dim) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      pick = std::discrete_distribution<std::size_t>(nearest.begin(), nearest.end())(rng);
    } else {
      // Every point coincides with a centroid; fall back to an unchosen one.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    add_centroid(pick);
    const double* c = centroids.data() + centroids.size() - dim;
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(point(i), c, dim));
  }

  // Lloyd iterations.
  std::vector<std::size_t> assign(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<double> next(k * dim);
  std::vector<std::size_t> members(k);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = squared_distance(point(i), centroids.data() + c * dim, dim);
        if (dd < best) {
          best = dd;
          assign[i] = c;
        }
      }
      dist[i] = best;
    }
    std::fill(next.begin(), next.end(), 0.0);
    std::fill(members.begin(), members.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++members[assign[i]];
      for (std::size_t j = 0; j < dim; ++j) next[assign[i] * dim + j] += point(i)[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      double* centre = next.data() + c * dim;
      if (members[c] == 0) {
        // Empty cluster: re-seed from the point farthest from its centroid.
        const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        std::copy(point(far), point(far) + dim, centre);
        dist[far] = 0.0;
        continue;
      }
      for (std::size_t j = 0; j < dim; ++j) centre[j] /= static_cast<double>(members[c]);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, squared_distance(next.data() + c * dim, centroids.data() + c * dim, dim));
    }
    centroids.swap(next);
    if (std::sqrt(shift) < options.tolerance) break;
  }

  std::vector<Prior> out;
  out.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> probs(centroids.begin() + static_cast<std::ptrdiff_t>(c * dim),
                              centroids.begin() + static_cast<std::ptrdiff_t>((c + 1) * dim));
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& v : probs) v /= total;
    Prior prior{priors.front().variable, std::move(probs), 0.0};
    prior.gamma = gamma_of(p, prior.probs);
    out.push_back(std::move(prior));
  }
  return out;
}

Downsample downsample_once(const DataView& view, const Prior& prior, std::uint64_t seed) {
  const Dataset& ds = view.base();
  const NodeId var = prior.variable;
  if (var < 0 || var >= ds.vars()) throw Error(ErrorKind::NodeOutOfRange, "prior variable");
  const std::size_t card = static_cast<std::size_t>(ds.cardinality(var));
  if (prior.probs.size() != card) {
    throw Error(ErrorKind::LengthMismatch, "prior does not match the variable's categories");
  }
  const std::size_t n = view.size();
  if (n == 0) throw Error(ErrorKind::EmptyDataset, "cannot downsample an empty view");

  // Counting sort of view positions by category.
  const auto col = ds.column(var);
  std::vector<std::size_t> offset(card + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++offset[col[view.row(i)] + 1];
  for (std::size_t b = 0; b < card; ++b) offset[b + 1] += offset[b];
  std::vector<std::uint32_t> positions(n);
  {
    std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
    for (std::size_t i = 0; i < n; ++i) positions[cursor[col[view.row(i)]]++] = static_cast<std::uint32_t>(i);
  }
  std::vector<double> marginal(card);
  for (std::size_t b = 0; b < card; ++b) marginal[b] = static_cast<double>(offset[b + 1] - offset[b]) / n;

  Downsample out;
  out.gamma = gamma_of(marginal, prior.probs);
  out.targets.resize(card);
  Rng rng(seed);
  std::vector<char> keep(n, 0);
  std::size_t kept = 0;
  for (std::size_t b = 0; b < card; ++b) {
    // The small slack absorbs rounding of P_i(b) * |D| * gamma for the
    // category that attains the minimum ratio (its target is exactly count(b)).
    std::size_t t = static_cast<std::size_t>(std::floor(prior.probs[b] * n * out.gamma + 1e-7));
    const std::size_t available = offset[b + 1] - offset[b];
    if (t > available) {
      t = available;
      out.clamped = true;
    }
    out.targets[b] = t;
    auto* first = positions.data() + offset[b];
    for (std::size_t k = 0; k < t; ++k) {
      const std::size_t j = std::uniform_int_distribution<std::size_t>(k, available - 1)(rng);
      std::swap(first[k], first[j]);
      keep[first[k]] = 1;
    }
    kept += t;
  }
  out.rows.reserve(kept);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.rows.push_back(view.row(i));
  }
  return out;
}

PriorBudget parse_prior_budget(std::string_view text) {
  if (text == "joint") return PriorBudget::Joint;
  if (text == "per-variable" || text == "per_variable") return PriorBudget::PerVariable;
  if (text == "one-at-a-time" || text == "one_at_a_time") return PriorBudget::OneAtATime;
  throw Error(ErrorKind::InvalidArgument, "unknown prior budget '" + std::string(text) + "'");
}

std::string_view to_string(PriorBudget budget) {
  switch (budget) {
    case PriorBudget::Joint: return "joint";
    case PriorBudget::PerVariable: return "per-variable";
    case PriorBudget::OneAtATime: return "one-at-a-time";
  }
  return "joint";
}

EnvironmentSet make_environments(const Dataset& ds, const Basis& basis, const EnvironmentOptions& options,
                                 std::uint64_t seed) {
  if (options.m < 2) throw Error(ErrorKind::InvalidArgument, "m must be >= 2");
  if (basis.members.empty()) throw Error(ErrorKind::InvalidArgument, "basis is empty");
  if (!(options.gamma_o > 0.0 && options.gamma_o < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "gamma_o must lie in (0, 1)");
  }
  if (options.pool < static_cast<std::size_t>(options.m)) {
    throw Error(ErrorKind::InvalidArgument, "prior pool smaller than m");
  }
  if (ds.rows() == 0) throw Error(ErrorKind::EmptyDataset, "no rows to downsample");

  EnvironmentSet out;
  out.base = &ds;
  out.basis = basis.members;
  const std::size_t k = basis.members.size();
  out.variable_gamma = options.budget == PriorBudget::Joint
                           ? std::pow(options.gamma_o, 1.0 / static_cast<double>(k))
                           : options.gamma_o;
  // Guard against gamma_o^(1/k) rounding to exactly 1 for huge bases.
  out.variable_gamma = std::min(out.variable_gamma, 1.0 - 1e-9);

  // Representative priors per basis variable; environment i takes centroid i.
  const std::uint64_t prior_seed = derive_seed(seed, "priors");
  const std::uint64_t kmeans_seed = derive_seed(seed, "kmeans");
  std::vector<std::vector<Prior>> priors(k);
  std::vector<std::string> skipped(k);
  parallel_for(k, options.threads, [&](std::size_t j) {
    const NodeId var = basis.members[j];
    const auto marginal = empirical_marginal(DataView(ds), var);
    const bool constant = std::any_of(marginal.begin(), marginal.end(), [](double q) { return q >= 1.0; });
    if (constant) {
      // A single observed level cannot be re-weighted; keep the marginal.
      priors[j].assign(options.m, Prior{var, marginal, 1.0});
      skipped[j] = "basis variable " + ds.names()[var] + " has one observed level; left unshifted";
      return;
    }
    const auto pool = sample_priors(marginal, out.variable_gamma, options.pool, derive_seed(prior_seed, j), var);
    priors[j] = select_representative(pool, options.m, derive_seed(kmeans_seed, j), marginal, options.kmeans);
  });
  for (auto& s : skipped) {
    if (!s.empty()) out.warnings.push_back(std::move(s));
  }

  const std::uint64_t down_seed = derive_seed(seed, "downsample");
  const std::size_t m = static_cast<std::size_t>(options.m);
  if (options.budget == PriorBudget::OneAtATime) {
    // Environment j * m + i shifts basis variable j with its i-th prior.
    out.environments.resize(m * k);
    parallel_for(m * k, options.threads, [&](std::size_t slot) {
      const std::size_t j = slot / m;
      const std::size_t i = slot % m;
      const Prior& prior = priors[j][i];
      Downsample step = downsample_once(DataView(ds), prior, derive_seed(down_seed, slot));
      Environment env;
      env.clamped = step.clamped;
      env.step_gamma.push_back(static_cast<double>(step.rows.size()) / static_cast<double>(ds.rows()));
      env.priors.push_back(prior);
      env.rows = std::move(step.rows);
      out.environments[slot] = std::move(env);
    });
  } else {
    out.environments.resize(m);
  }
  parallel_for(options.budget == PriorBudget::OneAtATime ? 0 : m, options.threads, [&](std::size_t i) {
    Environment env;
    std::vector<RowIndex> rows = DataView(ds).row_list();
    for (std::size_t j = 0; j < k; ++j) {
      const Prior& prior = priors[j][i];
      const std::size_t before = rows.size();
      Downsample step = downsample_once(DataView(ds, std::move(rows)), prior,
                                        derive_seed(down_seed, i * k + j));
      rows = std::move(step.rows);
      env.clamped = env.clamped || step.clamped;
      env.step_gamma.push_back(static_cast<double>(rows.size()) / static_cast<double>(before));
      env.priors.push_back(prior);
      if (rows.empty()) break;
    }
    env.rows = std::move(rows);
    out.environments[i] = std::move(env);
  });

  double mean_fraction = 0.0;
  for (std::size_t i = 0; i < out.environments.size(); ++i) {
    const auto& env = out.environments[i];
    if (env.rows.size() < options.min_rows) {
      throw Error(ErrorKind::EnvironmentTooSmall,
                  "environment " + std::to_string(i) + " kept " + std::to_string(env.rows.size()) +
                      " rows (minimum " + std::to_string(options.min_rows) + "); basis size " +
                      std::to_string(k) + ", per-variable gamma " + std::to_string(out.variable_gamma));
    }
    if (env.clamped) {
      out.warnings.push_back("environment " + std::to_string(i) + ": a downsampling target was clamped");
    }
    mean_fraction += static_cast<double>(env.rows.size()) / static_cast<double>(ds.rows());
  }
  mean_fraction /= static_cast<double>(out.environments.size());
  if (mean_fraction > 0.95) {
    out.warnings.push_back("degenerate_environments: environments keep " +
                           std::to_string(mean_fraction * 100.0) +
                           "% of the rows on average and barely differ from the input");
  }
  return out;
}

}  // namespace glide
