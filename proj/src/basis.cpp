#include "glide/basis.hpp"

#include <numeric>

#include "glide/error.hpp"
#include "glide/parallel.hpp"

namespace glide {

DependenceMatrix::DependenceMatrix(int d) : d_(d), bits_(static_cast<std::size_t>(d) * d, 0) {
  if (d < 0) throw Error(ErrorKind::InvalidArgument, "negative matrix size");
  for (int i = 0; i < d; ++i) bits_[static_cast<std::size_t>(i) * d + i] = 1;
}

void DependenceMatrix::set(int i, int j, bool dependent) {
  if (i == j) return;
  bits_[static_cast<std::size_t>(i) * d_ + j] = dependent;
  bits_[static_cast<std::size_t>(j) * d_ + i] = dependent;
}

int DependenceMatrix::row_count(int i) const {
  const auto* row = bits_.data() + static_cast<std::size_t>(i) * d_;
  return std::accumulate(row, row + d_, 0);
}

DependenceMatrix dependence_matrix(const IndepSource& src, int d, unsigned threads) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "d must be >= 1");
  DependenceMatrix phi(d);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  std::vector<std::uint8_t> result(pairs.size(), 0);
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    result[k] = src.dependent(pairs[k].first, pairs[k].second);
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) phi.set(pairs[k].first, pairs[k].second, result[k]);
  return phi;
}

Basis find_basis(const DependenceMatrix& phi) {
  const int d = phi.size();
  std::vector<char> pooled(d, 1);
  int remaining = d;
  Basis basis;
  while (remaining > 0) {
    int best = -1;
    int best_count = 0;
    for (int i = 0; i < d; ++i) {
      if (!pooled[i]) continue;
      int count = 0;
      for (int j = 0; j < d; ++j) count += pooled[j] && phi.at(i, j);
      if (best < 0 || count < best_count) {
        best = i;
        best_count = count;
      }
    }
    NodeSet removed;
    for (int j = 0; j < d; ++j) {
      if (pooled[j] && phi.at(best, j)) {
        pooled[j] = 0;
        removed.push_back(j);
        --remaining;
      }
    }
    basis.members.push_back(best);
    basis.dependence_sets.push_back(std::move(removed));
  }
  return basis;
}

}  // namespace glide
