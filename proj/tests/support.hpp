#pragma once

#include <cstdint>
#include <vector>

#include "mahler/polytope.hpp"
#include "mahler/random.hpp"
#include "mahler/scalar.hpp"

namespace mahler::testing {

// Symmetric rational polytope: +-(random integer points / den) together with
// +-e_j scaled into [1/2, 1], so the origin is interior.
template <Scalar S>
VPolytope<S> random_symmetric_polytope(SplitMix64& rng, int n, int extra_points = 3, int den = 4) {
  std::vector<Vector<S>> pts;
  for (int j = 0; j < n; ++j) {
    Vector<S> e = unit_vector<S>(n, j);
    e[j] = S(S(rng.uniform(den / 2, den)) / S(den));
    pts.push_back(e);
    pts.push_back(-e);
  }
  for (int k = 0; k < extra_points; ++k) {
    Vector<S> v(n);
    for (auto& x : v) x = S(S(rng.uniform(-den, den)) / S(den));
    pts.push_back(v);
    pts.push_back(-v);
  }
  return VPolytope<S>(n, pts);
}

// Random rational matrix I + E with entries of E in [-1/4, 1/4] (step 1/8),
// resampled until invertible.
template <Scalar S>
Matrix<S> random_invertible(SplitMix64& rng, int n) {
  while (true) {
    Matrix<S> m = Matrix<S>::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) += S(S(rng.uniform(-2, 2)) / S(8));
    if (!is_zero(determinant(m))) return m;
  }
}

inline std::vector<std::vector<int>> cube_sign_vertices(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> s(n);
    for (int j = 0; j < n; ++j) s[j] = (mask >> (n - 1 - j)) & 1 ? 1 : -1;
    out.push_back(s);
  }
  return out;
}

}  // namespace mahler::testing
