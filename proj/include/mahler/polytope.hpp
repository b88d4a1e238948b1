#pragma once

// Full-dimensional polytopes with the origin in the interior, kept in both
// representations at once: vertex list and offset-one halfspace list
// {x : a . x <= 1}. The two are polar to each other, so K* is obtained by
// swapping them.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mahler/enumeration.hpp"
#include "mahler/linalg.hpp"
#include "mahler/scalar.hpp"

namespace mahler {

class OriginNotInteriorError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class UnboundedError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

template <Scalar S>
bool is_symmetric_set(const std::vector<Vector<S>>& points) {
  for (const auto& p : points) {
    Vector<S> q = -p;
    bool found = std::any_of(points.begin(), points.end(), [&](const Vector<S>& r) { return approx_equal(r, q); });
    if (!found) return false;
  }
  return true;
}

namespace detail {

// Shared storage for both representations. `normals[f]` is a facet normal,
// `incidence[f]` the sorted indices of the vertices on that facet.
template <Scalar S>
struct DoubleDescription {
  int dim = 0;
  std::vector<Vector<S>> vertices;
  std::vector<Vector<S>> normals;
  std::vector<std::vector<int>> incidence;
};

// Irredundant double description of conv(points); requires 0 interior.
template <Scalar S>
DoubleDescription<S> describe_hull(int n, const std::vector<Vector<S>>& points, const EnumerationLimits& limits) {
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != n) throw GeometryError("point dimension does not match polytope dimension");
  auto facets = enumerate_vertices(n, points, limits);
  Vector<S> escape;
  if (!halfspaces_bounded(n, points, facets, &escape, limits))
    throw OriginNotInteriorError("origin is not interior to the hull: every vertex v satisfies v . d <= 1 along the "
                                 "unbounded polar direction d = " +
                                 describe(escape));
  // A point is a vertex iff the facets through it span R^n.
  std::vector<std::vector<int>> facets_at_point(points.size());
  for (std::size_t f = 0; f < facets.incidence.size(); ++f)
    for (int p : facets.incidence[f]) facets_at_point[p].push_back(static_cast<int>(f));
  DoubleDescription<S> dd;
  dd.dim = n;
  std::vector<int> point_to_vertex(points.size(), -1);
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (static_cast<int>(facets_at_point[p].size()) < n) continue;
    std::vector<Vector<S>> ns;
    for (int f : facets_at_point[p]) ns.push_back(facets.vertices[f]);
    if (rank(ns) < n) continue;
    bool dup = false;
    for (std::size_t v = 0; v < dd.vertices.size(); ++v)
      if (approx_equal(dd.vertices[v], points[p])) {
        dup = true;
        break;
      }
    if (dup) continue;
    point_to_vertex[p] = static_cast<int>(dd.vertices.size());
    dd.vertices.push_back(points[p]);
  }
  dd.normals = facets.vertices;
  dd.incidence.resize(dd.normals.size());
  for (std::size_t f = 0; f < dd.normals.size(); ++f) {
    for (int p : facets.incidence[f])
      if (point_to_vertex[p] >= 0) dd.incidence[f].push_back(point_to_vertex[p]);
    std::sort(dd.incidence[f].begin(), dd.incidence[f].end());
  }
  return dd;
}

// Irredundant double description of {a_i . x <= 1}; requires boundedness.
template <Scalar S>
DoubleDescription<S> describe_halfspaces(int n, const std::vector<Vector<S>>& normals, bool check_bounded,
                                         const EnumerationLimits& limits) {
  for (const auto& a : normals)
    if (static_cast<int>(a.size()) != n) throw GeometryError("normal dimension does not match polytope dimension");
  auto verts = enumerate_vertices(n, normals, limits);
  if (check_bounded) {
    Vector<S> escape;
    if (!halfspaces_bounded(n, normals, verts, &escape, limits))
      throw UnboundedError("halfspace system is unbounded (reaches " + describe(escape) + ")");
  }
  if (static_cast<int>(verts.vertices.size()) <= n) throw GeometryError("halfspace system is degenerate");
  std::vector<std::vector<int>> vertices_on(normals.size());
  for (std::size_t v = 0; v < verts.incidence.size(); ++v)
    for (int c : verts.incidence[v]) vertices_on[c].push_back(static_cast<int>(v));
  DoubleDescription<S> dd;
  dd.dim = n;
  dd.vertices = verts.vertices;
  for (std::size_t c = 0; c < normals.size(); ++c) {
    if (static_cast<int>(vertices_on[c].size()) < n) continue;
    std::vector<Vector<S>> pts;
    for (int v : vertices_on[c]) pts.push_back(verts.vertices[v]);
    if (affine_dimension(pts) < n - 1) continue;
    bool dup = false;
    for (const auto& a : dd.normals)
      if (approx_equal(a, normals[c])) {
        dup = true;
        break;
      }
    if (dup) continue;
    dd.normals.push_back(normals[c]);
    dd.incidence.push_back(vertices_on[c]);
  }
  return dd;
}

template <Scalar S>
DoubleDescription<S> swapped(const DoubleDescription<S>& dd) {
  DoubleDescription<S> p;
  p.dim = dd.dim;
  p.vertices = dd.normals;
  p.normals = dd.vertices;
  p.incidence.assign(dd.vertices.size(), {});
  for (std::size_t f = 0; f < dd.incidence.size(); ++f)
    for (int v : dd.incidence[f]) p.incidence[v].push_back(static_cast<int>(f));
  return p;
}

}  // namespace detail

template <Scalar S>
class HPolytope;

// Vertex representation. Construction drops redundant points and rejects
// inputs whose hull does not contain the origin in its interior.
template <Scalar S>
class VPolytope {
 public:
  using scalar_type = S;

  VPolytope(int dim, const std::vector<Vector<S>>& points, const EnumerationLimits& limits = {})
      : dd_(detail::describe_hull(dim, points, limits)) {
    symmetric_ = is_symmetric_set(dd_.vertices);
  }

  // The cube and the cross-polytope are built from their known double
  // description; facet f of the cube is x_{f/2} = +-1.
  static VPolytope cube(int n) {
    detail::DoubleDescription<S> dd;
    dd.dim = n;
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vector<S> v(n);
      for (int j = 0; j < n; ++j) v[j] = (mask >> (n - 1 - j)) & 1 ? S(1) : S(-1);
      dd.vertices.push_back(std::move(v));
    }
    for (int j = 0; j < n; ++j)
      for (int s : {1, -1}) {
        dd.normals.push_back(mahler::scaled(unit_vector<S>(n, j), S(s)));
        std::vector<int> on;
        for (int v = 0; v < (1 << n); ++v)
          if (dd.vertices[v][j] == S(s)) on.push_back(v);
        dd.incidence.push_back(std::move(on));
      }
    return VPolytope(std::move(dd), true);
  }

  static VPolytope cross_polytope(int n) { return cube(n).polar(); }

  int dim() const { return dd_.dim; }
  const std::vector<Vector<S>>& vertices() const { return dd_.vertices; }
  // Facet normals a with a . x <= 1 on the polytope.
  const std::vector<Vector<S>>& facets() const { return dd_.normals; }
  const std::vector<std::vector<int>>& facet_vertices() const { return dd_.incidence; }
  bool symmetric() const { return symmetric_; }

  // K* as a vertex polytope.
  VPolytope polar() const { return VPolytope(detail::swapped(dd_), symmetric_); }

  // M K for invertible M.
  VPolytope linear_image(const Matrix<S>& m) const {
    auto inv = inverse(m);
    if (!inv) throw GeometryError("linear image under a singular map");
    Matrix<S> inv_t = inv->transposed();
    detail::DoubleDescription<S> dd = dd_;
    for (auto& v : dd.vertices) v = m * v;
    for (auto& a : dd.normals) a = inv_t * a;
    return VPolytope(std::move(dd), symmetric_);
  }

  VPolytope scaled(const S& t) const {
    if (sign(t) <= 0) throw GeometryError("scaling factor must be positive");
    detail::DoubleDescription<S> dd = dd_;
    for (auto& v : dd.vertices) v = mahler::scaled(v, t);
    S inv = S(1) / t;
    for (auto& a : dd.normals) a = mahler::scaled(a, inv);
    return VPolytope(std::move(dd), symmetric_);
  }

  bool has_vertex(const Vector<S>& p) const {
    return std::any_of(dd_.vertices.begin(), dd_.vertices.end(), [&](const Vector<S>& v) { return approx_equal(v, p); });
  }

  bool same_vertex_set(const VPolytope& other) const {
    if (other.vertices().size() != vertices().size()) return false;
    return std::all_of(other.vertices().begin(), other.vertices().end(), [&](const Vector<S>& v) { return has_vertex(v); });
  }

  const detail::DoubleDescription<S>& description() const { return dd_; }

 private:
  template <Scalar>
  friend class HPolytope;
  template <Scalar T>
  friend VPolytope<T> vertices_from_halfspaces(const HPolytope<T>&);

  VPolytope(detail::DoubleDescription<S> dd, bool symmetric) : dd_(std::move(dd)), symmetric_(symmetric) {}

  detail::DoubleDescription<S> dd_;
  bool symmetric_ = false;
};

// Halfspace representation {x : a_i . x <= 1}. Construction checks
// boundedness and drops implied constraints.
template <Scalar S>
class HPolytope {
 public:
  using scalar_type = S;

  HPolytope(int dim, const std::vector<Vector<S>>& normals, const EnumerationLimits& limits = {})
      : dd_(detail::describe_halfspaces(dim, normals, true, limits)) {}

  int dim() const { return dd_.dim; }
  const std::vector<Vector<S>>& halfspaces() const { return dd_.normals; }
  const std::vector<Vector<S>>& vertices() const { return dd_.vertices; }
  const std::vector<std::vector<int>>& halfspace_vertices() const { return dd_.incidence; }
  bool symmetric() const { return is_symmetric_set(dd_.normals); }

  const detail::DoubleDescription<S>& description() const { return dd_; }

  static HPolytope from_description(detail::DoubleDescription<S> dd) { return HPolytope(std::move(dd)); }

 private:
  explicit HPolytope(detail::DoubleDescription<S> dd) : dd_(std::move(dd)) {}
  detail::DoubleDescription<S> dd_;
};

// {xi : v . xi <= 1 for every vertex v of K}. The vertices of K are exactly
// its irredundant constraint normals.
template <Scalar S>
HPolytope<S> polar_h(const VPolytope<S>& k) {
  return HPolytope<S>::from_description(detail::swapped(k.description()));
}

template <Scalar S>
VPolytope<S> vertices_from_halfspaces(const HPolytope<S>& h) {
  return VPolytope<S>(h.description(), is_symmetric_set(h.vertices()));
}

template <Scalar S>
HPolytope<S> halfspaces_from_vertices(const VPolytope<S>& k) {
  return HPolytope<S>::from_description(k.description());
}

// Vertex polytope of {a_i . x <= 1} built without the boundedness check; for
// generators whose output is bounded by construction.
template <Scalar S>
VPolytope<S> polytope_from_bounded_halfspaces(int n, const std::vector<Vector<S>>& normals,
                                              const EnumerationLimits& limits = {}) {
  return vertices_from_halfspaces(
      HPolytope<S>::from_description(detail::describe_halfspaces(n, normals, false, limits)));
}

// ---------------------------------------------------------------------------
// Volume

namespace detail {

// Triangulation of the boundary by recursive pulling: a face is coned from
// its first vertex over those of its own facets that avoid that vertex. The
// facets of a face F are the maximal proper sets F & G, G a facet of K.
template <Scalar S>
class BoundaryTriangulator {
 public:
  explicit BoundaryTriangulator(const DoubleDescription<S>& dd) : dd_(dd) {}

  const std::vector<std::vector<int>>& triangulate(const std::vector<int>& face, int dim) {
    auto it = memo_.find(face);
    if (it != memo_.end()) return it->second;
    std::vector<std::vector<int>> simplices;
    if (dim == 0) {
      simplices.push_back({face[0]});
    } else {
      const int apex = face[0];
      for (const auto& sub : subfaces(face)) {
        if (std::binary_search(sub.begin(), sub.end(), apex)) continue;
        for (auto s : triangulate(sub, dim - 1)) {
          s.push_back(apex);
          simplices.push_back(std::move(s));
        }
      }
    }
    return memo_.emplace(face, std::move(simplices)).first->second;
  }

 private:
  std::vector<std::vector<int>> subfaces(const std::vector<int>& face) const {
    std::vector<std::vector<int>> cands;
    for (const auto& g : dd_.incidence) {
      std::vector<int> s;
      std::set_intersection(face.begin(), face.end(), g.begin(), g.end(), std::back_inserter(s));
      if (s.empty() || s.size() == face.size()) continue;
      if (std::find(cands.begin(), cands.end(), s) == cands.end()) cands.push_back(std::move(s));
    }
    std::vector<std::vector<int>> maximal;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = 0; j < cands.size() && !dominated; ++j)
        if (i != j && cands[j].size() > cands[i].size() &&
            std::includes(cands[j].begin(), cands[j].end(), cands[i].begin(), cands[i].end()))
          dominated = true;
      if (!dominated) maximal.push_back(cands[i]);
    }
    return maximal;
  }

  const DoubleDescription<S>& dd_;
  std::map<std::vector<int>, std::vector<std::vector<int>>> memo_;
};

// Volume of the cone from the origin over each facet.
template <Scalar S>
std::vector<S> facet_cone_volumes(const DoubleDescription<S>& dd) {
  const int n = dd.dim;
  const S nfact = factorial<S>(n);
  BoundaryTriangulator<S> tri(dd);
  std::vector<S> out;
  out.reserve(dd.incidence.size());
  for (const auto& facet : dd.incidence) {
    S vol = 0;
    for (const auto& simplex : tri.triangulate(facet, n - 1)) {
      std::vector<Vector<S>> cols;
      for (int v : simplex) cols.push_back(dd.vertices[v]);
      vol += abs_value(determinant_of_columns(cols));
    }
    out.push_back(vol / nfact);
  }
  return out;
}

}  // namespace detail

template <Scalar S>
S volume(const VPolytope<S>& k) {
  S total = 0;
  for (const auto& v : detail::facet_cone_volumes(k.description())) total += v;
  return total;
}

template <Scalar S>
S volume(const HPolytope<S>& h) {
  return volume(vertices_from_halfspaces(h));
}

template <Scalar S>
S volume_product(const VPolytope<S>& k) {
  return volume(k) * volume(k.polar());
}

// Largest t with t * cube contained in K, i.e. min over facets of 1/|a|_1.
template <Scalar S>
S max_scaled_cube(const VPolytope<S>& k) {
  std::optional<S> best;
  for (const auto& a : k.facets()) {
    S t = S(1) / norm1(a);
    if (!best || sign(S(t - *best)) < 0) best = t;
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Containment and linear optimization

// Every point lies in scale * {a_i . x <= 1}.
template <Scalar S>
bool contains_points(const std::vector<Vector<S>>& normals, const std::vector<Vector<S>>& points, const S& scale) {
  for (const auto& p : points)
    if (!satisfies_all(normals, p, scale)) return false;
  return true;
}

template <Scalar S>
bool contains(const VPolytope<S>& k, const VPolytope<S>& l, const S& scale = S(1)) {
  if (k.dim() != l.dim()) throw GeometryError("containment test between different dimensions");
  return contains_points(k.facets(), l.vertices(), scale);
}

template <Scalar S>
bool contains(const HPolytope<S>& k, const VPolytope<S>& l, const S& scale = S(1)) {
  if (k.dim() != l.dim()) throw GeometryError("containment test between different dimensions");
  return contains_points(k.halfspaces(), l.vertices(), scale);
}

template <Scalar S>
struct LinearMaximum {
  Vector<S> point;
  S value;
};

// Maximizes c . x over {a_i . x <= 1} restricted to span(basis). Among the
// optimal vertices of the section the lexicographically smallest is returned.
template <Scalar S>
LinearMaximum<S> maximize_linear_over(int n, const std::vector<Vector<S>>& normals,
                                      const std::vector<Vector<S>>& full_vertices, const Vector<S>& c,
                                      const std::vector<Vector<S>>& basis) {
  if (basis.empty()) throw GeometryError("empty section basis");
  const int k = static_cast<int>(basis.size());
  if (rank(basis) != k) throw GeometryError("section basis is linearly dependent");
  std::vector<Vector<S>> candidates;
  if (k == n) {
    candidates = full_vertices;
  } else {
    std::vector<Vector<S>> section;
    for (const auto& a : normals) {
      Vector<S> b(k);
      for (int j = 0; j < k; ++j) b[j] = dot(a, basis[j]);
      if (!is_zero(b)) section.push_back(std::move(b));
    }
    auto verts = enumerate_vertices(k, section);
    if (verts.vertices.empty()) throw GeometryError("section of the polytope is degenerate");
    for (const auto& z : verts.vertices) {
      Vector<S> x(n, S(0));
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) x[i] += z[j] * basis[j][i];
      candidates.push_back(std::move(x));
    }
  }
  std::optional<LinearMaximum<S>> best;
  for (auto& x : candidates) {
    S val = dot(c, x);
    if (!best) {
      best = LinearMaximum<S>{x, val};
      continue;
    }
    int s = sign(S(val - best->value));
    if (s > 0 || (s == 0 && lex_less(x, best->point))) best = LinearMaximum<S>{x, val};
  }
  return *best;
}

template <Scalar S>
LinearMaximum<S> maximize_linear(const VPolytope<S>& k, const Vector<S>& c, const std::vector<Vector<S>>& basis) {
  return maximize_linear_over(k.dim(), k.facets(), k.vertices(), c, basis);
}

template <Scalar S>
LinearMaximum<S> maximize_linear(const HPolytope<S>& h, const Vector<S>& c, const std::vector<Vector<S>>& basis) {
  return maximize_linear_over(h.dim(), h.halfspaces(), h.vertices(), c, basis);
}

template <Scalar S>
std::vector<Vector<S>> standard_basis(int n) {
  std::vector<Vector<S>> b;
  for (int j = 0; j < n; ++j) b.push_back(unit_vector<S>(n, j));
  return b;
}

// ---------------------------------------------------------------------------
// Cone over an outside point

template <Scalar S>
struct ConeVolumeBound {
  S lhs;            // vol(conv(P, x))
  S rhs;            // vol(P) + delta * r * A / n
  double facet_area;      // A: smallest facet (n-1)-volume
  double facet_distance;  // r: smallest distance from 0 to a facet hyperplane
};

// Pyramid bound for a point outside (1 + delta) P. A and r are derived from P.
// For the exact backend r*A is irrational in general; it is replaced by a
// rational upper bound, so lhs >= rhs still certifies the inequality.
template <Scalar S>
ConeVolumeBound<S> cone_volume_bound(const VPolytope<S>& p, const Vector<S>& x, const S& delta) {
  const int n = p.dim();
  if (sign(delta) <= 0) throw GeometryError("delta must be positive");
  const S outer = S(1) + delta;
  bool outside = false;
  for (const auto& a : p.facets())
    if (sign(S(dot(a, x) - outer)) >= 0) outside = true;
  if (!outside) throw GeometryError("point " + describe(x) + " lies inside (1 + delta) P");

  auto cones = detail::facet_cone_volumes(p.description());
  S vol_p = 0;
  for (const auto& c : cones) vol_p += c;
  // facet f: distance 1/|a|, area n * cone / distance = n * cone * |a|.
  std::optional<S> min_dist_sq, min_area_sq;
  for (std::size_t f = 0; f < cones.size(); ++f) {
    S na = norm_squared(p.facets()[f]);
    S dist_sq = S(1) / na;
    S area_sq = S(n * n) * cones[f] * cones[f] * na;
    if (!min_dist_sq || sign(S(dist_sq - *min_dist_sq)) < 0) min_dist_sq = dist_sq;
    if (!min_area_sq || sign(S(area_sq - *min_area_sq)) < 0) min_area_sq = area_sq;
  }
  S ra = sqrt_upper(S(*min_dist_sq * *min_area_sq));
  std::vector<Vector<S>> pts = p.vertices();
  pts.push_back(x);
  VPolytope<S> hull(n, pts);
  return ConeVolumeBound<S>{volume(hull), S(vol_p + delta * ra / S(n)), std::sqrt(to_double(*min_area_sq)),
                            std::sqrt(to_double(*min_dist_sq))};
}

}  // namespace mahler
