#include "glide/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "glide/error.hpp"
#include "glide/rng.hpp"

namespace glide {

Dataset::Dataset(std::vector<std::string> names, std::vector<std::vector<Code>> columns,
                 std::vector<int> cardinalities)
    : names_(std::move(names)), columns_(std::move(columns)), cards_(std::move(cardinalities)) {
  if (names_.size() != columns_.size() || cards_.size() != columns_.size()) {
    throw Error(ErrorKind::InvalidArgument, "names, columns and cardinalities differ in length");
  }
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != rows_) {
      throw Error(ErrorKind::InvalidArgument, "column " + names_[j] + " has a different length");
    }
    if (cards_[j] < 1) throw Error(ErrorKind::InvalidArgument, "cardinality must be >= 1");
    for (Code c : columns_[j]) {
      if (c >= cards_[j]) {
        throw Error(ErrorKind::InvalidArgument,
                    "code " + std::to_string(c) + " out of range in column " + names_[j]);
      }
    }
  }
}

std::vector<RowIndex> DataView::row_list() const {
  if (!full_) return rows_;
  std::vector<RowIndex> out(base_->rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<RowIndex>(i);
  return out;
}

namespace {

// Relabels ids onto [0, present) keeping their relative order.
std::size_t densify(std::vector<std::uint64_t>& ids, std::uint64_t range) {
  std::vector<std::uint32_t> label(range, 0);
  for (auto id : ids) label[id] = 1;
  std::uint32_t next = 0;
  for (auto& l : label) l = l ? next++ : 0;
  for (auto& id : ids) id = label[id];
  return next;
}

}  // namespace

ConfigIndex factorize(const DataView& view, std::span<const NodeId> vars) {
  const Dataset& ds = view.base();
  const std::size_t n = view.size();
  std::vector<std::uint64_t> ids(n, 0);
  std::uint64_t range = 1;
  const std::uint64_t dense_limit = std::max<std::uint64_t>(2 * n, 4096);
  for (NodeId v : vars) {
    const auto col = ds.column(v);
    const std::uint64_t card = static_cast<std::uint64_t>(ds.cardinality(v));
    if (range * card > dense_limit && range > 1) range = densify(ids, range);
    for (std::size_t i = 0; i < n; ++i) ids[i] = ids[i] * card + col[view.row(i)];
    range *= card;
  }
  ConfigIndex out;
  out.count = n == 0 ? 0 : densify(ids, range);
  out.ids.assign(ids.begin(), ids.end());
  out.representative.assign(out.count, 0);
  std::vector<char> seen(out.count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[out.ids[i]]) {
      seen[out.ids[i]] = 1;
      out.representative[out.ids[i]] = view.row(i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> empty_columns(const Dag& dag, std::size_t n) {
  return std::vector<std::vector<double>>(dag.size(), std::vector<double>(n, 0.0));
}

std::vector<double> dirichlet_ones(int k, Rng& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> out(k);
  double total = 0.0;
  for (auto& x : out) total += (x = gamma(rng));
  for (auto& x : out) x /= total;
  return out;
}

}  // namespace

LinearWeights draw_linear_weights(const Dag& dag, double weight_low, double weight_high,
                                  std::uint64_t seed) {
  if (!(weight_low > 0.0) || weight_high < weight_low) {
    throw Error(ErrorKind::InvalidArgument, "require 0 < weight_low <= weight_high");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> magnitude(weight_low, weight_high);
  std::bernoulli_distribution negative(0.5);
  LinearWeights out;
  out.weights.reserve(dag.edge_count());
  for (std::size_t i = 0; i < dag.edge_count(); ++i) {
    const double w = magnitude(rng);
    out.weights.push_back(negative(rng) ? -w : w);
  }
  return out;
}

ContinuousTable simulate_linear_gaussian(const Dag& dag, std::size_t n, const LinearWeights& weights,
                                         double noise_sd, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (weights.weights.size() != dag.edge_count()) {
    throw Error(ErrorKind::LengthMismatch, "one weight per edge required");
  }
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sd);
  ContinuousTable out{dag.names(), empty_columns(dag, n)};
  // Incoming edges per child with their weights.
  std::vector<std::vector<std::pair<NodeId, double>>> incoming(dag.size());
  for (std::size_t k = 0; k < dag.edge_count(); ++k) {
    const auto [p, c] = dag.edges()[k];
    incoming[c].emplace_back(p, weights.weights[k]);
  }
  for (NodeId v : dag.topological_order()) {
    auto& col = out.columns[v];
    for (std::size_t r = 0; r < n; ++r) {
      double value = noise(rng);
      for (const auto& [p, w] : incoming[v]) value += w * out.columns[p][r];
      col[r] = value;
    }
  }
  return out;
}

ContinuousTable simulate_linear_gaussian(const Dag& dag, std::size_t n, double weight_low,
                                         double weight_high, double noise_sd, std::uint64_t seed) {
  const LinearWeights w = draw_linear_weights(dag, weight_low, weight_high, derive_seed(seed, "weights"));
  return simulate_linear_gaussian(dag, n, w, noise_sd, derive_seed(seed, "noise"));
}

ContinuousTable simulate_nonlinear(const Dag& dag, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> magnitude(0.5, 2.0);
  std::uniform_real_distribution<double> bias(-1.0, 1.0);
  std::bernoulli_distribution negative(0.5);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);

  std::vector<std::vector<double>> w(dag.size());
  std::vector<double> b(dag.size(), 0.0);
  for (int v = 0; v < dag.size(); ++v) {
    for (std::size_t k = 0; k < dag.parents(v).size(); ++k) {
      const double m = magnitude(rng);
      w[v].push_back(negative(rng) ? -m : m);
    }
    b[v] = bias(rng);
  }
  ContinuousTable out{dag.names(), empty_columns(dag, n)};
  for (NodeId v : dag.topological_order()) {
    const auto& pa = dag.parents(v);
    auto& col = out.columns[v];
    for (std::size_t r = 0; r < n; ++r) {
      double value = noise(rng);
      if (!pa.empty()) {
        double affine = b[v];
        for (std::size_t k = 0; k < pa.size(); ++k) affine += w[v][k] * out.columns[pa[k]][r];
        value += std::tanh(affine);
      }
      col[r] = value;
    }
  }
  return out;
}

std::size_t CategoricalModel::parent_config(NodeId v, std::span<const Code> row_values) const {
  std::size_t config = 0;
  for (NodeId p : dag.parents(v)) config = config * cardinalities[p] + row_values[p];
  return config;
}

CategoricalModel random_categorical_model(const Dag& dag, int min_cats, int max_cats,
                                          std::uint64_t seed) {
  if (min_cats < 2 || max_cats < min_cats) {
    throw Error(ErrorKind::InvalidArgument, "require 2 <= min_cats <= max_cats");
  }
  Rng rng(seed);
  CategoricalModel model{dag, std::vector<int>(dag.size()), {}};
  std::uniform_int_distribution<int> cats(min_cats, max_cats);
  for (auto& c : model.cardinalities) c = cats(rng);
  model.cpts.resize(dag.size());
  for (int v = 0; v < dag.size(); ++v) {
    std::size_t configs = 1;
    for (NodeId p : dag.parents(v)) configs *= model.cardinalities[p];
    model.cpts[v].reserve(configs);
    for (std::size_t c = 0; c < configs; ++c) {
      model.cpts[v].push_back(dirichlet_ones(model.cardinalities[v], rng));
    }
  }
  return model;
}

Dataset sample_categorical(const CategoricalModel& model, std::size_t n, std::uint64_t seed) {
  const Dag& dag = model.dag;
  const int d = dag.size();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<Code>> columns(d, std::vector<Code>(n));
  std::vector<Code> row(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (NodeId v : dag.topological_order()) {
      const auto& dist = model.cpts[v][model.parent_config(v, row)];
      double u = unit(rng);
      Code code = static_cast<Code>(dist.size() - 1);
      for (std::size_t k = 0; k < dist.size(); ++k) {
        if (u < dist[k]) {
          code = static_cast<Code>(k);
          break;
        }
        u -= dist[k];
      }
      row[v] = code;
      columns[v][r] = code;
    }
  }
  return Dataset(dag.names(), std::move(columns), model.cardinalities);
}

Dataset simulate_categorical(const Dag& dag, std::size_t n, int min_cats, int max_cats,
                             std::uint64_t seed) {
  const auto model = random_categorical_model(dag, min_cats, max_cats, derive_seed(seed, "cpts"));
  return sample_categorical(model, n, derive_seed(seed, "rows"));
}

// ---------------------------------------------------------------------------

Discretizer Discretizer::fit(const ContinuousTable& table, int bins) {
  if (bins < 2) throw Error(ErrorKind::InvalidArgument, "bins must be >= 2");
  Discretizer out;
  out.bins = bins;
  for (int j = 0; j < table.vars(); ++j) {
    const auto& col = table.columns[j];
    double lo = 0.0, hi = 0.0;
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (!std::isfinite(col[r])) {
        throw Error(ErrorKind::NonFiniteValue,
                    "column " + table.names[j] + " row " + std::to_string(r));
      }
      if (r == 0 || col[r] < lo) lo = col[r];
      if (r == 0 || col[r] > hi) hi = col[r];
    }
    out.low.push_back(lo);
    out.width.push_back(hi > lo ? (hi - lo) / bins : 0.0);
  }
  return out;
}

Dataset Discretizer::transform(const ContinuousTable& table) const {
  if (table.vars() != static_cast<int>(low.size())) {
    throw Error(ErrorKind::LengthMismatch, "discretizer fitted on a different table");
  }
  std::vector<std::vector<Code>> columns(table.vars());
  std::vector<int> cards(table.vars());
  for (int j = 0; j < table.vars(); ++j) {
    const auto& col = table.columns[j];
    auto& out = columns[j];
    out.resize(col.size());
    cards[j] = width[j] > 0.0 ? bins : 1;
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (!std::isfinite(col[r])) {
        throw Error(ErrorKind::NonFiniteValue,
                    "column " + table.names[j] + " row " + std::to_string(r));
      }
      if (width[j] == 0.0) {
        out[r] = 0;
        continue;
      }
      const double pos = std::floor((col[r] - low[j]) / width[j]);
      out[r] = static_cast<Code>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    }
  }
  return Dataset(table.names, std::move(columns), std::move(cards));
}

Dataset discretize(const ContinuousTable& table, int bins) {
  return Discretizer::fit(table, bins).transform(table);
}

std::vector<double> empirical_marginal(const DataView& view, int var) {
  const std::size_t n = view.size();
  if (n == 0) throw Error(ErrorKind::EmptyDataset, "marginal of an empty dataset");
  std::vector<double> counts(view.base().cardinality(var), 0.0);
  const auto col = view.base().column(var);
  for (std::size_t i = 0; i < n; ++i) counts[col[view.row(i)]] += 1.0;
  for (auto& c : counts) c /= static_cast<double>(n);
  return counts;
}

Cpt empirical_conditional(const DataView& view, NodeId x, std::span<const NodeId> z,
                          double laplace_alpha) {
  if (view.size() == 0) throw Error(ErrorKind::EmptyDataset, "conditional of an empty dataset");
  if (std::find(z.begin(), z.end(), x) != z.end()) {
    throw Error(ErrorKind::InvalidArgument, "target variable inside conditioning set");
  }
  const Dataset& ds = view.base();
  const ConfigIndex index = factorize(view, z);
  const int card = ds.cardinality(x);
  std::vector<std::size_t> counts(index.count * card, 0);
  std::vector<std::size_t> support(index.count, 0);
  const auto col = ds.column(x);
  for (std::size_t i = 0; i < view.size(); ++i) {
    ++counts[index.ids[i] * card + col[view.row(i)]];
    ++support[index.ids[i]];
  }
  Cpt out;
  out.x = x;
  out.z.assign(z.begin(), z.end());
  out.support = support;
  out.configurations.reserve(index.count);
  out.table.reserve(index.count);
  for (std::size_t c = 0; c < index.count; ++c) {
    std::vector<Code> config;
    for (NodeId v : z) config.push_back(ds.column(v)[index.representative[c]]);
    out.configurations.push_back(std::move(config));
    std::vector<double> probs(card);
    const double denom = static_cast<double>(support[c]) + laplace_alpha * card;
    for (int k = 0; k < card; ++k) {
      probs[k] = (static_cast<double>(counts[c * card + k]) + laplace_alpha) / denom;
    }
    out.table.push_back(std::move(probs));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename Parse>
std::vector<std::string> read_csv(std::istream& in, Parse&& parse_row) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty CSV: header row missing");
  auto header = split_csv_line(line);
  if (header.empty() || (header.size() == 1 && header[0].empty())) {
    throw Error(ErrorKind::ParseError, "empty header row");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    parse_row(fields, lineno);
  }
  return header;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ContinuousTable read_csv_continuous(std::istream& in) {
  std::vector<std::vector<double>> columns;
  auto header = read_csv(in, [&](const std::vector<std::string>& fields, std::size_t lineno) {
    if (columns.empty()) columns.resize(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = 0.0;
      const auto& f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(lineno) + ": '" + f + "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::NonFiniteValue, "line " + std::to_string(lineno));
      }
      columns[j].push_back(v);
    }
  });
  if (columns.empty()) columns.resize(header.size());
  return ContinuousTable{std::move(header), std::move(columns)};
}

Dataset read_csv_categorical(std::istream& in) {
  std::vector<std::vector<long>> raw;
  auto header = read_csv(in, [&](const std::vector<std::string>& fields, std::size_t lineno) {
    if (raw.empty()) raw.resize(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      long v = 0;
      const auto& f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || v < 0) {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(lineno) + ": '" + f + "' is not a non-negative integer code");
      }
      raw[j].push_back(v);
    }
  });
  if (raw.empty()) raw.resize(header.size());
  // Observed values map onto dense codes in ascending order.
  std::vector<std::vector<Code>> columns(raw.size());
  std::vector<int> cards(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    std::map<long, Code> dense;
    for (long v : raw[j]) dense.emplace(v, 0);
    if (dense.size() > 65535) throw Error(ErrorKind::ParseError, "too many categories in " + header[j]);
    Code next = 0;
    for (auto& [value, code] : dense) code = next++;
    columns[j].reserve(raw[j].size());
    for (long v : raw[j]) columns[j].push_back(dense[v]);
    cards[j] = std::max<int>(1, static_cast<int>(dense.size()));
  }
  return Dataset(std::move(header), std::move(columns), std::move(cards));
}

void write_csv(std::ostream& out, const ContinuousTable& table) {
  for (int j = 0; j < table.vars(); ++j) out << (j ? "," : "") << table.names[j];
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (int j = 0; j < table.vars(); ++j) out << (j ? "," : "") << format_double(table.columns[j][r]);
    out << '\n';
  }
}

void write_csv(std::ostream& out, const Dataset& ds) {
  for (int j = 0; j < ds.vars(); ++j) out << (j ? "," : "") << ds.names()[j];
  out << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (int j = 0; j < ds.vars(); ++j) out << (j ? "," : "") << ds.column(j)[r];
    out << '\n';
  }
}

ContinuousTable load_csv_continuous(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  return read_csv_continuous(in);
}

Dataset load_csv_categorical(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  return read_csv_categorical(in);
}

}  // namespace glide
