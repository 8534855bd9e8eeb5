#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "frobten/rational.hpp"

namespace frobten {

// Homogeneous basis of the underlying Z/2-graded space H: parities and
// optional display labels, indexed 0..dim-1.
struct GradedBasis {
  std::vector<int> parities;          // 0 even, 1 odd
  std::vector<std::string> labels;    // optional; defaults to x0, x1, ...

  int dim() const { return int(parities.size()); }
  int parity(int a) const { return parities.at(a) & 1; }

  std::string label(int a) const {
    if (a >= 0 && a < int(labels.size()) && !labels[a].empty())
      return labels[a];
    return "x" + std::to_string(a);
  }

  static GradedBasis even(int dim) {
    GradedBasis b;
    b.parities.assign(dim, 0);
    return b;
  }

  bool all_even() const {
    for (int p : parities)
      if (p & 1) return false;
    return true;
  }
};

template <class Scalar>
std::vector<std::vector<Scalar>> invert_matrix(
    std::vector<std::vector<Scalar>> m) {
  const int n = int(m.size());
  std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n, Scalar(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = Scalar(1);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!(m[r][col] == Scalar(0))) { piv = r; break; }
    if (piv < 0) throw std::runtime_error("matrix is singular");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Scalar d = m[col][col];
    for (int c = 0; c < n; ++c) {
      m[col][c] = m[col][c] / d;
      inv[col][c] = inv[col][c] / d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col] == Scalar(0)) continue;
      Scalar f = m[r][col];
      for (int c = 0; c < n; ++c) {
        m[r][c] = m[r][c] - f * m[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

// Flat even metric g on H: graded-symmetric (antisymmetric on the odd-odd
// block), nondegenerate, zero between indices of unequal parity.  Stores the
// inverse alongside.
struct Metric {
  std::vector<std::vector<Rational>> g;
  std::vector<std::vector<Rational>> ginv;

  Metric() = default;
  Metric(std::vector<std::vector<Rational>> mat, const GradedBasis& basis)
      : g(std::move(mat)) {
    const int n = basis.dim();
    if (int(g.size()) != n)
      throw std::invalid_argument("metric size does not match basis");
    for (int a = 0; a < n; ++a) {
      if (int(g[a].size()) != n)
        throw std::invalid_argument("metric is not square");
      for (int b = 0; b < n; ++b) {
        int sgn = (basis.parity(a) && basis.parity(b)) ? -1 : 1;
        if (g[a][b] != sgn * g[b][a])
          throw std::invalid_argument("metric is not graded-symmetric");
        if (basis.parity(a) != basis.parity(b) && g[a][b] != 0)
          throw std::invalid_argument("metric pairs indices of unequal parity");
      }
    }
    ginv = invert_matrix(g);  // throws if degenerate
  }

  int dim() const { return int(g.size()); }
};

}  // namespace frobten
