#pragma once

// Vertex enumeration of {x : a_i . x <= 1} by exhaustive n-subset solving.
//
// Every n-subset of constraints is tested as a candidate vertex. For the exact
// backend the rational solve is guarded by two cheap filters:
//   * singularity: determinant modulo two 61/62-bit primes; a zero residue in
//     both is accepted as singular only when the Hadamard bound of the scaled
//     integer rows is below the product of the primes (otherwise an exact
//     determinant is taken);
//   * feasibility: a partial-pivoting double solve; subsets whose double
//     solution violates a constraint by a margin far above the forward error
//     bound are dropped, everything else is re-solved and re-checked exactly.
// The filters never decide "vertex"; only exact arithmetic does.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mahler/linalg.hpp"
#include "mahler/scalar.hpp"

namespace mahler {

inline constexpr int kMaxDimension = 8;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationLimits {
  // Hard cap on the number of n-subsets examined by one enumeration.
  std::uint64_t max_subsets = 60'000'000;
};

template <Scalar S>
struct VertexEnumeration {
  std::vector<Vector<S>> vertices;
  // incidence[v] = indices of the constraints tight at vertex v.
  std::vector<std::vector<int>> incidence;
};

inline std::uint64_t binomial(int m, int k) {
  if (k < 0 || k > m) return 0;
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  if (r > 1.8e19L) return UINT64_MAX;
  return static_cast<std::uint64_t>(r + 0.5L);
}

namespace detail {

constexpr std::uint64_t kPrime1 = (std::uint64_t{1} << 61) - 1;
constexpr std::uint64_t kPrime2 = (std::uint64_t{1} << 62) - 57;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t det_mod(std::array<std::array<std::uint64_t, kMaxDimension>, kMaxDimension> m, int n,
                             std::uint64_t p) {
  std::uint64_t det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = (p - det) % p;
    }
    det = mulmod(det, m[c][c], p);
    std::uint64_t inv = powmod(m[c][c], p - 2, p);
    for (int r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      std::uint64_t f = mulmod(m[r][c], inv, p);
      for (int j = c; j < n; ++j) m[r][j] = (m[r][j] + p - mulmod(f, m[c][j], p)) % p;
    }
  }
  return det;
}

// Rows scaled to integers by the lcm of their denominators.
struct ModularRow {
  std::uint64_t mod1[kMaxDimension];
  std::uint64_t mod2[kMaxDimension];
  double log2_norm;
};

inline ModularRow modular_row(const Vector<Rational>& a) {
  mpz_class l = 1;
  for (const auto& x : a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  ModularRow row{};
  double norm_sq = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    mpz_class v = a[j].get_num() * (l / a[j].get_den());
    row.mod1[j] = mpz_fdiv_ui(v.get_mpz_t(), kPrime1);
    row.mod2[j] = mpz_fdiv_ui(v.get_mpz_t(), kPrime2);
    double d = v.get_d();
    norm_sq += d * d;
  }
  row.log2_norm = 0.5 * std::log2(std::max(norm_sq, 1.0));
  return row;
}

struct DoubleSolve {
  bool singular = true;
  double rcond = 0;
  double x[kMaxDimension];
};

inline DoubleSolve solve_double(const std::vector<std::vector<double>>& rows, const int* idx, int n) {
  double m[kMaxDimension][kMaxDimension + 1];
  double mx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m[i][j] = rows[idx[i]][j];
      mx = std::max(mx, std::abs(m[i][j]));
    }
    m[i][n] = 1.0;
  }
  DoubleSolve out;
  if (mx == 0) return out;
  double minpiv = INFINITY;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    if (p != c)
      for (int j = 0; j <= n; ++j) std::swap(m[p][j], m[c][j]);
    double piv = m[c][c];
    minpiv = std::min(minpiv, std::abs(piv));
    if (std::abs(piv) <= 1e-300) return out;
    for (int r = c + 1; r < n; ++r) {
      double f = m[r][c] / piv;
      if (f == 0) continue;
      for (int j = c; j <= n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  out.rcond = minpiv / mx;
  for (int i = n - 1; i >= 0; --i) {
    double s = m[i][n];
    for (int j = i + 1; j < n; ++j) s -= m[i][j] * out.x[j];
    out.x[i] = s / m[i][i];
  }
  out.singular = false;
  return out;
}

template <Scalar S>
bool same_point(const Vector<S>& a, const Vector<S>& b) {
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(a[i]))) return false;
    return true;
  }
}

}  // namespace detail

template <Scalar S>
bool satisfies_all(const std::vector<Vector<S>>& normals, const Vector<S>& x, const S& bound = S(1)) {
  for (const auto& a : normals)
    if (!leq(dot(a, x), bound)) return false;
  return true;
}

template <Scalar S>
std::vector<int> tight_constraints(const std::vector<Vector<S>>& normals, const Vector<S>& x) {
  std::vector<int> t;
  for (std::size_t i = 0; i < normals.size(); ++i)
    if (approx_equal(dot(normals[i], x), S(1))) t.push_back(static_cast<int>(i));
  return t;
}

// Vertices of {x in R^n : a_i . x <= 1}, no boundedness check. Output order is
// the order of first discovery over the lexicographic subset sequence.
template <Scalar S>
VertexEnumeration<S> enumerate_vertices(int n, const std::vector<Vector<S>>& normals,
                                        const EnumerationLimits& limits = {}) {
  if (n < 1 || n > kMaxDimension) throw GeometryError("dimension out of range for vertex enumeration");
  const int m = static_cast<int>(normals.size());
  VertexEnumeration<S> out;
  if (m < n) return out;
  const std::uint64_t count = binomial(m, n);
  if (count > limits.max_subsets)
    throw GeometryError("vertex enumeration would examine " + std::to_string(count) + " subsets (" +
                        std::to_string(m) + " constraints, dimension " + std::to_string(n) +
                        "), above the configured limit of " + std::to_string(limits.max_subsets));

  std::vector<std::vector<double>> drows(m, std::vector<double>(n));
  std::vector<double> row_l1(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      drows[i][j] = to_double(normals[i][j]);
      row_l1[i] += std::abs(drows[i][j]);
    }
  std::vector<detail::ModularRow> mrows;
  if constexpr (is_exact_v<S>) {
    mrows.reserve(m);
    for (const auto& a : normals) mrows.push_back(detail::modular_row(a));
  }

  std::map<Vector<S>, int, bool (*)(const Vector<S>&, const Vector<S>&)> seen_exact(
      [](const Vector<S>& a, const Vector<S>& b) { return a < b; });

  auto record = [&](Vector<S> x) {
    if constexpr (is_exact_v<S>) {
      if (seen_exact.count(x)) return;
      seen_exact.emplace(x, static_cast<int>(out.vertices.size()));
      out.vertices.push_back(std::move(x));
    } else {
      for (const auto& v : out.vertices)
        if (detail::same_point(v, x)) return;
      out.vertices.push_back(std::move(x));
    }
  };

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    if constexpr (is_exact_v<S>) {
      bool nonsingular = false;
      std::array<std::array<std::uint64_t, kMaxDimension>, kMaxDimension> mm{};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mm[i][j] = mrows[idx[i]].mod1[j];
      if (detail::det_mod(mm, n, detail::kPrime1) != 0) {
        nonsingular = true;
      } else {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) mm[i][j] = mrows[idx[i]].mod2[j];
        if (detail::det_mod(mm, n, detail::kPrime2) != 0) {
          nonsingular = true;
        } else {
          double bound = 0;
          for (int i = 0; i < n; ++i) bound += mrows[idx[i]].log2_norm;
          if (bound >= 120.0) {
            std::vector<Vector<S>> rows;
            for (int i = 0; i < n; ++i) rows.push_back(normals[idx[i]]);
            nonsingular = !is_zero(determinant(Matrix<S>::from_rows(rows)));
          }
        }
      }
      if (nonsingular) {
        auto ds = detail::solve_double(drows, idx.data(), n);
        bool maybe_feasible = true;
        if (!ds.singular && ds.rcond >= 1e-7) {
          double xinf = 0;
          for (int j = 0; j < n; ++j) xinf = std::max(xinf, std::abs(ds.x[j]));
          for (int i = 0; i < m && maybe_feasible; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += drows[i][j] * ds.x[j];
            if (s - 1.0 > 1e-5 * (1.0 + row_l1[i] * xinf)) maybe_feasible = false;
          }
        }
        if (maybe_feasible) {
          std::vector<Vector<S>> rows;
          for (int i = 0; i < n; ++i) rows.push_back(normals[idx[i]]);
          auto x = solve(Matrix<S>::from_rows(rows), Vector<S>(n, S(1)));
          if (x && satisfies_all(normals, *x)) record(std::move(*x));
        }
      }
    } else {
      auto ds = detail::solve_double(drows, idx.data(), n);
      if (!ds.singular && ds.rcond >= 1e-12) {
        Vector<S> x(ds.x, ds.x + n);
        if (satisfies_all(normals, x)) record(std::move(x));
      }
    }
    int k = n - 1;
    while (k >= 0 && idx[k] == m - n + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }

  out.incidence.reserve(out.vertices.size());
  for (const auto& v : out.vertices) out.incidence.push_back(tight_constraints(normals, v));
  return out;
}

// True when {a_i . x <= 1} is bounded. The set always contains the origin in
// its interior, so boundedness is the only thing to establish: intersect with
// a box strictly larger than every enumerated vertex and look for a vertex on
// the box boundary.
template <Scalar S>
bool halfspaces_bounded(int n, const std::vector<Vector<S>>& normals, const VertexEnumeration<S>& enumeration,
                        Vector<S>* escape_direction = nullptr, const EnumerationLimits& limits = {}) {
  S radius = 1;
  for (const auto& v : enumeration.vertices)
    for (const auto& x : v)
      if (sign(S(abs_value(x) - radius)) > 0) radius = abs_value(x);
  radius = radius * 2 + 1;
  std::vector<Vector<S>> boxed = normals;
  for (int j = 0; j < n; ++j) {
    Vector<S> e(n, S(0));
    e[j] = S(1) / radius;
    boxed.push_back(e);
    e[j] = -e[j];
    boxed.push_back(e);
  }
  auto ext = enumerate_vertices(n, boxed, limits);
  for (const auto& v : ext.vertices)
    for (int j = 0; j < n; ++j)
      if (approx_equal(abs_value(v[j]), radius)) {
        if (escape_direction) *escape_direction = v;
        return false;
      }
  return true;
}

}  // namespace mahler
