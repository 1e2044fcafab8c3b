#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "glide/graph.hpp"

namespace glide {

using Code = std::uint16_t;
using RowIndex = std::uint32_t;

/// Column-oriented table of categorical codes. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;
  /// Throws InvalidArgument when columns are ragged or a code is >= its
  /// cardinality.
  Dataset(std::vector<std::string> names, std::vector<std::vector<Code>> columns,
          std::vector<int> cardinalities);

  std::size_t rows() const { return rows_; }
  int vars() const { return static_cast<int>(columns_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  std::span<const Code> column(int var) const { return columns_.at(var); }
  int cardinality(int var) const { return cards_.at(var); }
  const std::vector<int>& cardinalities() const { return cards_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<Code>> columns_;
  std::vector<int> cards_;
  std::size_t rows_ = 0;
};

/// A subset of the rows of a Dataset (all rows when constructed from the
/// dataset alone). Non-owning: the dataset must outlive the view.
class DataView {
 public:
  DataView(const Dataset& base) : base_(&base) {}  // NOLINT(google-explicit-constructor)
  DataView(const Dataset& base, std::vector<RowIndex> rows)
      : base_(&base), rows_(std::move(rows)), full_(false) {}

  const Dataset& base() const { return *base_; }
  bool is_full() const { return full_; }
  std::size_t size() const { return full_ ? base_->rows() : rows_.size(); }
  RowIndex row(std::size_t i) const { return full_ ? static_cast<RowIndex>(i) : rows_[i]; }
  /// Materialized row list (0..n-1 for a full view).
  std::vector<RowIndex> row_list() const;

 private:
  const Dataset* base_;
  std::vector<RowIndex> rows_;
  bool full_ = true;
};

/// Dense, lexicographically ordered ids for the joint configurations of a
/// variable set, one id per row of a view.
struct ConfigIndex {
  std::vector<std::uint32_t> ids;     // per view position
  std::size_t count = 0;              // number of distinct configurations present
  std::vector<RowIndex> representative;  // a base row realizing each configuration
};

ConfigIndex factorize(const DataView& view, std::span<const NodeId> vars);

/// Real-valued table produced by the continuous simulators and CSV loader.
struct ContinuousTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  int vars() const { return static_cast<int>(columns.size()); }
  friend bool operator==(const ContinuousTable&, const ContinuousTable&) = default;
};

/// Per-edge weights aligned with Dag::edges().
struct LinearWeights {
  std::vector<double> weights;
};

LinearWeights draw_linear_weights(const Dag& dag, double weight_low, double weight_high,
                                  std::uint64_t seed);

ContinuousTable simulate_linear_gaussian(const Dag& dag, std::size_t n, const LinearWeights& weights,
                                         double noise_sd, std::uint64_t seed);
ContinuousTable simulate_linear_gaussian(const Dag& dag, std::size_t n, double weight_low,
                                         double weight_high, double noise_sd, std::uint64_t seed);

/// x = tanh(sum w * parent + b) + U(-1, 1); sources are pure noise.
ContinuousTable simulate_nonlinear(const Dag& dag, std::size_t n, std::uint64_t seed);

/// Categorical Bayesian network. cpts[v][config] is the distribution of v
/// given the parent configuration, parents taken in ascending index order
/// with the last parent varying fastest.
struct CategoricalModel {
  Dag dag;
  std::vector<int> cardinalities;
  std::vector<std::vector<std::vector<double>>> cpts;

  std::size_t parent_config(NodeId v, std::span<const Code> row_values) const;
};

CategoricalModel random_categorical_model(const Dag& dag, int min_cats, int max_cats,
                                          std::uint64_t seed);
/// Exact ancestral (forward) sampling in topological order.
Dataset sample_categorical(const CategoricalModel& model, std::size_t n, std::uint64_t seed);
Dataset simulate_categorical(const Dag& dag, std::size_t n, int min_cats, int max_cats,
                             std::uint64_t seed);

/// Equal-width bin edges per column, fitted once on the full table.
struct Discretizer {
  int bins = 4;
  std::vector<double> low;
  std::vector<double> width;  // 0 for constant columns

  static Discretizer fit(const ContinuousTable& table, int bins);
  Dataset transform(const ContinuousTable& table) const;
};

Dataset discretize(const ContinuousTable& table, int bins = 4);

std::vector<double> empirical_marginal(const DataView& view, int var);

/// Empirical P(x | z) with add-alpha smoothing, for z-configurations present
/// in the view (lexicographic order).
struct Cpt {
  NodeId x = 0;
  NodeSet z;
  std::vector<std::vector<Code>> configurations;
  std::vector<std::vector<double>> table;
  std::vector<std::size_t> support;
};

Cpt empirical_conditional(const DataView& view, NodeId x, std::span<const NodeId> z,
                          double laplace_alpha = 1.0);

// CSV with a header row of variable names.
ContinuousTable read_csv_continuous(std::istream& in);
Dataset read_csv_categorical(std::istream& in);
void write_csv(std::ostream& out, const ContinuousTable& table);
void write_csv(std::ostream& out, const Dataset& ds);
ContinuousTable load_csv_continuous(const std::string& path);
Dataset load_csv_categorical(const std::string& path);

}  // namespace glide
