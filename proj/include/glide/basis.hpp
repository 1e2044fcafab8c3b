#pragma once

#include <cstdint>
#include <vector>

#include "glide/indep.hpp"

namespace glide {

/// Symmetric pairwise dependence indicator with a unit diagonal:
/// at(i, j) is true iff X_j depends on X_i.
class DependenceMatrix {
 public:
  DependenceMatrix() = default;
  explicit DependenceMatrix(int d);

  int size() const { return d_; }
  bool at(int i, int j) const { return bits_[static_cast<std::size_t>(i) * d_ + j] != 0; }
  /// Sets both (i, j) and (j, i); the diagonal cannot be cleared.
  void set(int i, int j, bool dependent);
  int row_count(int i) const;

 private:
  int d_ = 0;
  std::vector<std::uint8_t> bits_;
};

DependenceMatrix dependence_matrix(const IndepSource& src, int d, unsigned threads = 1);

struct Basis {
  std::vector<NodeId> members;              // selection order
  std::vector<NodeSet> dependence_sets;     // Φ(member) ∩ pool at selection time
};

/// Greedy maximum-sized basis: repeatedly pick the pooled variable with the
/// fewest pooled dependents (lowest index on ties) and drop its dependents
/// from the pool.
Basis find_basis(const DependenceMatrix& phi);

}  // namespace glide
