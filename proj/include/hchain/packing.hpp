#pragma once

#include <utility>

#include <Eigen/Dense>

namespace hchain {

/// Packed storage of a symmetric n x n matrix: upper triangle, row-major.
inline int packed_size(int n) { return n * (n + 1) / 2; }

inline int packed_index(int a, int b, int n) {
  if (a > b) std::swap(a, b);
  return a * n - a * (a - 1) / 2 + (b - a);
}

inline Eigen::VectorXd pack_symmetric(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(packed_size(n));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) v[packed_index(a, b, n)] = m(a, b);
  return v;
}

inline Eigen::MatrixXd unpack_symmetric(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) m(a, b) = m(b, a) = v[packed_index(a, b, n)];
  return m;
}

}  // namespace hchain
