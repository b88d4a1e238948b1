#pragma once

// Putting a symmetric body in cube position, and contact pairs between the
// body and its polar near each dual face pair of the cube and the
// cross-polytope.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mahler/cube_flags.hpp"
#include "mahler/linalg.hpp"
#include "mahler/polytope.hpp"
#include "mahler/scalar.hpp"

namespace mahler {

class ContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <Scalar S>
struct ParallelepipedFit {
  Matrix<S> T;      // parallelepiped = T * cube
  Matrix<S> T_inv;  // rows are facet normals of K
  S volume;         // 2^n |det T|
  bool certified = false;  // +-e_j on the boundary of T^-1 K for every j
  int refinements = 0;
};

namespace detail {

template <Scalar S>
bool first_nonzero_positive(const Vector<S>& v) {
  for (const auto& x : v) {
    int s = sign(x);
    if (s != 0) return s > 0;
  }
  return false;
}

// Reorders and re-signs the rows of U so that row i has its largest entry in
// column i and that entry is positive, when such an assignment exists.
template <Scalar S>
Matrix<S> align_rows(const Matrix<S>& u) {
  const int n = u.rows();
  std::vector<int> col_of(n);
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int j = 1; j < n; ++j)
      if (sign(S(abs_value(u(i, j)) - abs_value(u(i, best)))) > 0) best = j;
    if (used[best]) return u;
    used[best] = true;
    col_of[i] = best;
  }
  Matrix<S> out(n, n);
  for (int i = 0; i < n; ++i) {
    const int target = col_of[i];
    const bool flip = sign(u(i, target)) < 0;
    for (int j = 0; j < n; ++j) out(target, j) = flip ? S(-u(i, j)) : u(i, j);
  }
  return out;
}

// +-e_j in T^-1 K and T^-1 K inside the cube.
template <Scalar S>
bool touches_all_facets(const VPolytope<S>& khat) {
  const int n = khat.dim();
  for (const auto& v : khat.vertices())
    for (const auto& x : v)
      if (!leq(abs_value(x), S(1))) return false;
  for (const auto& b : khat.facets())
    for (int j = 0; j < n; ++j)
      if (!leq(abs_value(b[j]), S(1))) return false;
  return true;
}

}  // namespace detail

// Enclosing parallelepiped with facet normals drawn from the facet normals of
// K. Exhaustive search maximizes |det| over n-subsets of the +- pairs; the
// refinement step then replaces row j by any facet normal b of T^-1 K with
// b_j > 1, which shrinks the volume by the factor 1/b_j and stops once every
// +-e_j lies in T^-1 K. Only this touching condition is certified, not global
// minimality.
template <Scalar S>
ParallelepipedFit<S> minimal_parallelepiped(const VPolytope<S>& k, const EnumerationLimits& limits = {},
                                            int max_refinements = 256) {
  if (!k.symmetric()) throw GeometryError("minimal parallelepiped requires an origin-symmetric body");
  const int n = k.dim();
  std::vector<Vector<S>> reps;
  for (const auto& a : k.facets())
    if (detail::first_nonzero_positive(a)) reps.push_back(a);
  const int m = static_cast<int>(reps.size());
  if (binomial(m, n) > limits.max_subsets)
    throw GeometryError("parallelepiped search over " + std::to_string(m) + " facet pairs exceeds the subset limit");

  std::optional<S> best_det;
  std::vector<int> best_idx;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    std::vector<Vector<S>> rows;
    for (int i : idx) rows.push_back(reps[i]);
    S d = abs_value(determinant(Matrix<S>::from_rows(rows)));
    if (!best_det || sign(S(d - *best_det)) > 0) {
      best_det = d;
      best_idx = idx;
    }
    int p = n - 1;
    while (p >= 0 && idx[p] == m - n + p) --p;
    if (p < 0) break;
    ++idx[p];
    for (int j = p + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (!best_det || is_zero(*best_det)) throw GeometryError("facet normals of K do not span R^n");

  std::vector<Vector<S>> rows;
  for (int i : best_idx) rows.push_back(reps[i]);
  Matrix<S> u = detail::align_rows(Matrix<S>::from_rows(rows));

  ParallelepipedFit<S> fit;
  for (; fit.refinements < max_refinements; ++fit.refinements) {
    VPolytope<S> khat = k.linear_image(u);
    // Facet normals of T^-1 K correspond one-to-one with those of K.
    int row = -1;
    std::size_t facet = 0;
    S worst = 1;
    for (std::size_t f = 0; f < khat.facets().size(); ++f)
      for (int j = 0; j < n; ++j)
        if (sign(S(khat.facets()[f][j] - worst)) > 0) {
          worst = khat.facets()[f][j];
          row = j;
          facet = f;
        }
    if (row < 0) break;
    for (int j = 0; j < n; ++j) u(row, j) = k.facets()[facet][j];
    u = detail::align_rows(u);
  }
  fit.T_inv = u;
  fit.T = *inverse(u);
  fit.volume = power(S(2), n) * abs_value(determinant(fit.T));
  fit.certified = detail::touches_all_facets(k.linear_image(u));
  return fit;
}

template <Scalar S>
struct Canonicalization {
  VPolytope<S> body;  // T^-1 K
  S delta;            // 1 - max { t : t * cube inside T^-1 K }
  Matrix<S> T;
  bool certified = false;
};

template <Scalar S>
Canonicalization<S> canonicalize(const VPolytope<S>& k, const EnumerationLimits& limits = {}) {
  auto fit = minimal_parallelepiped(k, limits);
  VPolytope<S> khat = k.linear_image(fit.T_inv);
  S delta = S(1) - max_scaled_cube(khat);
  if (!is_exact_v<S> && is_zero(delta)) delta = 0;
  return {std::move(khat), delta, fit.T, fit.certified};
}

// 1 / (1 - delta): (1 - delta) cube <= T^-1 K <= cube certifies
// d_BM(K, cube) <= 1 / (1 - delta).
template <Scalar S>
S bm_distance_upper_bound(const VPolytope<S>& k) {
  auto c = canonicalize(k);
  return S(1) / (S(1) - c.delta);
}

// Self-adjoint positive definite A with A x = x*, built on the plane
// L = span(x, x*) and equal to the identity on its orthogonal complement.
// In the orthogonal basis e1 = x, e2 = x* - a x of L the vector x* is
// a e1 + e2; in the orthonormal basis of L the restriction of A is
// [[a, b], [b, a']] with b = |e2| / |e1| and a' = (b^2 + 1) / a.
template <Scalar S>
struct OperatorA {
  Vector<S> e1;
  Vector<S> e2;
  S a;
  S b_squared;
  S a_prime;
  Matrix<S> matrix;

  double b() const { return std::sqrt(to_double(b_squared)); }
};

template <Scalar S>
OperatorA<S> build_operator_A(const Vector<S>& x, const Vector<S>& x_star) {
  if (!approx_equal(dot(x, x_star), S(1))) throw std::invalid_argument("operator A requires x . x* = 1");
  const int n = static_cast<int>(x.size());
  OperatorA<S> op;
  const S xx = norm_squared(x);
  op.e1 = x;
  op.a = S(1) / xx;
  op.e2 = x_star - scaled(x, op.a);
  Matrix<S> m = Matrix<S>::identity(n);
  auto add_outer = [&](const Vector<S>& u, const Vector<S>& v, const S& coef) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) += coef * u[i] * v[j];
  };
  add_outer(x, x, S((op.a - S(1)) / xx));
  if (is_zero(op.e2)) {
    op.e2 = Vector<S>(n, S(0));
    op.b_squared = 0;
    op.a_prime = 1;
  } else {
    const S ee = norm_squared(op.e2);
    op.b_squared = ee / xx;
    op.a_prime = (op.b_squared + S(1)) / op.a;
    add_outer(op.e2, op.e2, S((op.a_prime - S(1)) / ee));
    add_outer(x, op.e2, S(S(1) / xx));
    add_outer(op.e2, x, S(S(1) / xx));
  }
  op.matrix = m;
  return op;
}

// y = alpha c_F + h on the boundary of K, y* = (1/alpha) c*_F + h* on the
// boundary of K*, with y . y* = 1, h in l(F*) and h* in l(F).
template <Scalar S>
struct ContactPair {
  CubeFace face;
  Vector<S> y;
  Vector<S> y_star;
  S alpha;
  Vector<S> h;
  Vector<S> h_star;

  ContactPair negated() const { return {face.negated(), -y, -y_star, alpha, -h, -h_star}; }
};

// Contact pair for face F of the cube, K in cube position. y maximizes c_F
// over K restricted to the coordinates of supp F; y* maximizes y over K*
// restricted to span(c_F, e_j : j free). For symmetric K the pair of -F is
// the negation of the pair of F, so only canonical faces are solved.
template <Scalar S>
ContactPair<S> contact_pair(const VPolytope<S>& k, const VPolytope<S>& k_polar, const CubeFace& f) {
  const int n = k.dim();
  if (f.ambient_dim() != n) throw std::invalid_argument("face dimension does not match body");
  if (k.symmetric() && !f.is_canonical()) return contact_pair(k, k_polar, f.negated()).negated();

  const Vector<S> c = f.template center<S>();
  const Vector<S> c_dual = f.template dual_center<S>();
  if (f.dim() == n - 1) return {f, c, c, S(1), Vector<S>(n, S(0)), Vector<S>(n, S(0))};

  std::vector<Vector<S>> section;
  for (int i : f.support()) section.push_back(unit_vector<S>(n, i));
  const Vector<S> y = maximize_linear(k, c, section).point;

  std::vector<Vector<S>> dual_section{c};
  for (int j : f.free_coordinates()) dual_section.push_back(unit_vector<S>(n, j));
  const auto best = maximize_linear(k_polar, y, dual_section);
  if (!approx_equal(best.value, S(1)))
    throw ContactError("dual section maximum is " + scalar_traits<S>::format(best.value) + " instead of 1 on face " +
                       describe(c) + "; the body is not in cube position");
  const Vector<S>& y_star = best.point;

  const S alpha = dot(y, c) / S(f.codim());
  if (sign(alpha) <= 0) throw ContactError("nonpositive contact scale on face " + describe(c));
  ContactPair<S> pair{f, y, y_star, alpha, y - scaled(c, alpha), y_star - scaled(c_dual, S(S(1) / alpha))};
  for (int i : f.support())
    if (!is_zero(pair.h_star[i])) throw ContactError("h* leaves l(F) on face " + describe(c));
  if (!is_zero(dot(pair.h, c))) throw ContactError("h is not orthogonal to c_F on face " + describe(c));
  return pair;
}

template <Scalar S>
ContactPair<S> contact_pair(const VPolytope<S>& k, const CubeFace& f) {
  return contact_pair(k, k.polar(), f);
}

template <Scalar S>
FaceMap<ContactPair<S>> all_contact_pairs(const VPolytope<S>& k) {
  const VPolytope<S> k_polar = k.polar();
  const int n = k.dim();
  FaceMap<ContactPair<S>> pairs(n, [](const CubeFace&) { return ContactPair<S>{}; });
  for (const auto& f : enumerate_faces(n))
    if (f.is_canonical() || !k.symmetric()) pairs[f] = contact_pair(k, k_polar, f);
  if (k.symmetric())
    for (const auto& f : enumerate_faces(n))
      if (!f.is_canonical()) pairs[f] = pairs[f.negated()].negated();
  return pairs;
}

struct OrthogonalityReport {
  // x ⊥ l(F*); x* ⊥ l(F); l(F) ⊥ l(F*); the two complement identities;
  // (x*)^⊥ ∩ span(x, A^-1 l(F*)) = A^-1 l(F*).
  bool relation[5] = {false, false, false, false, false};
  bool all() const { return relation[0] && relation[1] && relation[2] && relation[3] && relation[4]; }
};

// Exact check of the orthogonality relations behind the contact-pair
// construction, for x = c_F, x* = c*_F and the operator A built from them.
template <Scalar S>
OrthogonalityReport orthogonality_certificates(const CubeFace& f) {
  const int n = f.ambient_dim();
  const Vector<S> x = f.template center<S>();
  const Vector<S> xs = f.template dual_center<S>();
  const auto op = build_operator_A(x, xs);
  const Matrix<S> a = op.matrix;
  const Matrix<S> a_inv = *inverse(a);

  std::vector<Vector<S>> l_f, l_fs;
  for (int j : f.free_coordinates()) l_f.push_back(unit_vector<S>(n, j));
  const auto supp = f.support();
  for (std::size_t k = 1; k < supp.size(); ++k) {
    Vector<S> v(n, S(0));
    v[supp[0]] = f.sign()[supp[0]];
    v[supp[k]] = -f.sign()[supp[k]];
    l_fs.push_back(std::move(v));
  }
  auto orthogonal = [](const std::vector<Vector<S>>& u, const std::vector<Vector<S>>& v) {
    for (const auto& p : u)
      for (const auto& q : v)
        if (!is_zero(dot(p, q))) return false;
    return true;
  };
  auto mapped = [](const Matrix<S>& m, const std::vector<Vector<S>>& v) {
    std::vector<Vector<S>> out;
    for (const auto& p : v) out.push_back(m * p);
    return out;
  };
  auto joined = [](const Vector<S>& p, std::vector<Vector<S>> v) {
    v.insert(v.begin(), p);
    return v;
  };
  const auto a_lf = mapped(a, l_f);
  const auto ainv_lfs = mapped(a_inv, l_fs);
  const int dim_f = f.dim();
  const int dim_fs = n - dim_f - 1;

  OrthogonalityReport r;
  r.relation[0] = orthogonal({x}, l_fs);
  r.relation[1] = orthogonal({xs}, l_f);
  r.relation[2] = orthogonal(l_f, l_fs);
  const auto span_dual = joined(xs, a_lf);
  const auto span_primal = joined(x, ainv_lfs);
  r.relation[3] = orthogonal(span_dual, ainv_lfs) && rank(span_dual) == 1 + dim_f && rank(ainv_lfs) == dim_fs &&
                  rank(span_dual) + rank(ainv_lfs) == n && orthogonal(a_lf, span_primal) &&
                  rank(span_primal) + rank(a_lf) == n;
  // x* . x = 1, so x*^⊥ cuts span(x, A^-1 l(F*)) in codimension one.
  r.relation[4] = orthogonal({xs}, ainv_lfs) && !is_zero(dot(xs, x)) && rank(span_primal) - 1 == rank(ainv_lfs);
  return r;
}

}  // namespace mahler
