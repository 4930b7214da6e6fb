#pragma once

// Dense, deliberately naive reference computations. Nothing here calls into
// the fast paths of the library except to read an operator's public geometry.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "slope/hadamard.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// H_1 = [1], H_2n = [[H, H], [H, -H]].
inline Matrix sylvester(std::size_t n) {
  Matrix h{{1.0}};
  while (h.size() < n) {
    const std::size_t s = h.size();
    Matrix next(2 * s, std::vector<double>(2 * s));
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        next[i][j] = h[i][j];
        next[i][j + s] = h[i][j];
        next[i + s][j] = h[i][j];
        next[i + s][j + s] = -h[i][j];
      }
    }
    h = std::move(next);
  }
  return h;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.front().size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  }
  return t;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t ra = a.size(), ca = a.front().size(), rb = b.size(), cb = b.front().size();
  Matrix k(ra * rb, std::vector<double>(ca * cb));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ca; ++j)
      for (std::size_t p = 0; p < rb; ++p)
        for (std::size_t q = 0; q < cb; ++q) k[i * rb + p][j * cb + q] = a[i][j] * b[p][q];
  return k;
}

/// Column j of the sensing matrix is column perm^-1(j) of the selected
/// Hadamard rows, scaled by 1/sqrt(N).
inline Matrix dense_operator(const slope::HadamardOperator& op) {
  const std::size_t n = op.order();
  const Matrix h = sylvester(n);
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[op.permutation()[i]] = i;
  Matrix a(op.measurements(), std::vector<double>(n));
  for (std::size_t m = 0; m < op.measurements(); ++m) {
    for (std::size_t j = 0; j < n; ++j) a[m][j] = h[op.selected_rows()[m]][inv[j]] / std::sqrt(double(n));
  }
  return a;
}

/// The {0,1} aperture patterns: open where the Hadamard entry is +1.
inline Matrix dense_open_patterns(const slope::HadamardOperator& op) {
  const std::size_t n = op.order();
  const Matrix h = sylvester(n);
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[op.permutation()[i]] = i;
  Matrix a(op.measurements(), std::vector<double>(n));
  for (std::size_t m = 0; m < op.measurements(); ++m) {
    for (std::size_t j = 0; j < n; ++j) a[m][j] = h[op.selected_rows()[m]][inv[j]] > 0 ? 1.0 : 0.0;
  }
  return a;
}

/// Orthonormal DCT-II matrix from the cosine formula.
inline Matrix dct_matrix(std::size_t n) {
  Matrix t(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double w = k == 0 ? std::sqrt(1.0 / double(n)) : std::sqrt(2.0 / double(n));
    for (std::size_t j = 0; j < n; ++j) {
      t[k][j] = w * std::cos(std::numbers::pi * (2.0 * double(j) + 1.0) * double(k) / (2.0 * double(n)));
    }
  }
  return t;
}

/// Threshold = magnitude at rank m_star (0-based) after a full descending sort.
inline double lambda_by_sort(std::vector<double> coeffs, std::size_t m_star) {
  for (double& c : coeffs) c = std::fabs(c);
  std::sort(coeffs.begin(), coeffs.end(), [](double a, double b) { return a > b; });
  return coeffs[m_star];
}

inline double soft(double a, double lambda) {
  if (a > lambda) return a - lambda;
  if (a < -lambda) return a + lambda;
  return 0.0;
}

/// Top-left positions along one axis: multiples of the stride while they
/// fit, plus one patch flush with the far edge if needed.
inline std::vector<std::size_t> positions(std::size_t n, std::size_t edge, std::size_t stride) {
  std::vector<std::size_t> p;
  for (std::size_t s = 0; s + edge <= n; s += stride) p.push_back(s);
  if (p.back() + edge != n) p.push_back(n - edge);
  return p;
}

/// How many patches contain each pixel, by visiting every patch.
inline std::vector<std::uint32_t> coverage(std::size_t width, std::size_t height, std::size_t edge,
                                           std::size_t stride) {
  std::vector<std::uint32_t> c(width * height, 0);
  for (std::size_t r : positions(height, edge, stride))
    for (std::size_t q : positions(width, edge, stride))
      for (std::size_t i = 0; i < edge; ++i)
        for (std::size_t j = 0; j < edge; ++j) ++c[(r + i) * width + q + j];
  return c;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
