#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glide/basis.hpp"
#include "glide/dataset.hpp"

namespace glide {

/// Target distribution for one basis variable together with its inverse
/// downsampling rate against the marginal it was built from.
struct Prior {
  NodeId variable = -1;
  std::vector<double> probs;
  double gamma = 1.0;
};

/// min over b with pi(b) > 0 of p(b) / pi(b). Throws LengthMismatch.
double gamma_of(std::span<const double> p, std::span<const double> pi);

/// Vertices of the region { pi : gamma_of(p, pi) >= gamma_o }.
struct BoundaryPriors {
  std::vector<Prior> priors;     // one per category
  std::vector<int> clamped;      // categories with q_k > gamma_o (alpha clamped to 0)
};

BoundaryPriors boundary_priors(std::span<const double> p, double gamma_o, NodeId variable = -1);

/// Convex combination sum_k weights[k] * boundary[k].
Prior mix_priors(const BoundaryPriors& boundary, std::span<const double> weights,
                 std::span<const double> p);

/// `count` priors drawn uniformly (Dirichlet(1)) from the convex hull of the
/// boundary priors.
std::vector<Prior> sample_priors(std::span<const double> p, double gamma_o, std::size_t count,
                                 std::uint64_t seed, NodeId variable = -1);

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;
};

/// K-means (k-means++ seeding, Lloyd iterations, Euclidean distance) over the
/// probability vectors; returns the m centroids renormalized, with gamma
/// recomputed against the marginal p.
std::vector<Prior> select_representative(const std::vector<Prior>& priors, int m, std::uint64_t seed,
                                         std::span<const double> p, const KMeansOptions& options = {});

struct Downsample {
  std::vector<RowIndex> rows;          // base-dataset rows, in view order
  std::vector<std::size_t> targets;    // rows kept per category
  double gamma = 1.0;                  // gamma of the prior against the view's marginal
  bool clamped = false;                // some target exceeded the available rows
};

/// Keeps floor(prior(b) * |view| * gamma) rows of each category b, drawn
/// uniformly without replacement.
Downsample downsample_once(const DataView& view, const Prior& prior, std::uint64_t seed);

enum class PriorBudget {
  /// Each basis variable gets gamma_o^(1/|basis|) so the product prior over
  /// the whole basis keeps gamma >= gamma_o.
  Joint,
  /// Each basis variable gets gamma_o; environments shrink like gamma_o^|basis|.
  PerVariable,
  /// m environments per basis variable, each shifting that variable alone
  /// with floor gamma_o (m * |basis| environments in total).
  OneAtATime,
};

PriorBudget parse_prior_budget(std::string_view text);
std::string_view to_string(PriorBudget budget);

struct EnvironmentOptions {
  int m = 30;
  double gamma_o = 0.5;
  std::size_t pool = 10000;
  std::size_t min_rows = 100;
  PriorBudget budget = PriorBudget::Joint;
  unsigned threads = 1;
  KMeansOptions kmeans;
};

struct Environment {
  std::vector<RowIndex> rows;
  std::vector<Prior> priors;          // one per basis member, basis order
  std::vector<double> step_gamma;     // |after| / |before| for each downsampling step
  bool clamped = false;
};

struct EnvironmentSet {
  const Dataset* base = nullptr;
  NodeSet basis;
  double variable_gamma = 1.0;        // per-variable floor actually used
  std::vector<Environment> environments;
  std::vector<std::string> warnings;

  int m() const { return static_cast<int>(environments.size()); }
  DataView view(int i) const { return DataView(*base, environments.at(i).rows); }
};

/// m downsampled environments; basis variables are shifted one after the
/// other, each step acting on the previous step's rows. The dataset must
/// outlive the result. Throws EnvironmentTooSmall.
EnvironmentSet make_environments(const Dataset& ds, const Basis& basis, const EnvironmentOptions& options,
                                 std::uint64_t seed);

}  // namespace glide
