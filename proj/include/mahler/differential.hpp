#pragma once

// First- and second-order behaviour of g near a base configuration
// x_F = a_{dim F} c_F: exact first-order coefficients, central differences,
// and the second-order gap between two configurations that differ by a
// kernel direction.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mahler/cube_flags.hpp"
#include "mahler/linalg.hpp"
#include "mahler/scalar.hpp"

namespace mahler {

// Delta x_F on an explicit support; zero on every other face.
template <Scalar S>
class Perturbation {
 public:
  explicit Perturbation(int n) : deltas_(n, [n](const CubeFace&) { return Vector<S>(n, S(0)); }) {}

  void set(const CubeFace& f, Vector<S> delta) {
    if (static_cast<int>(delta.size()) != deltas_.dim()) throw std::invalid_argument("perturbation dimension mismatch");
    auto it = std::find(support_.begin(), support_.end(), f);
    if (it == support_.end()) support_.push_back(f);
    deltas_[f] = std::move(delta);
  }

  // X1 - X0 over all faces.
  static Perturbation difference(const FlagPoints<S>& x1, const FlagPoints<S>& x0) {
    Perturbation p(x0.dim());
    for (const auto& f : enumerate_faces(x0.dim())) {
      Vector<S> d = x1[f] - x0[f];
      if (!is_zero(d)) p.set(f, std::move(d));
    }
    return p;
  }

  int dim() const { return deltas_.dim(); }
  const FlagPoints<S>& deltas() const { return deltas_; }
  const std::vector<CubeFace>& support() const { return support_; }

  S magnitude_squared() const {
    S m = 0;
    for (const auto& f : support_) {
      S v = norm_squared(deltas_[f]);
      if (sign(S(v - m)) > 0) m = v;
    }
    return m;
  }
  // max_F |Delta x_F| (Euclidean).
  double magnitude() const { return std::sqrt(to_double(magnitude_squared())); }

 private:
  FlagPoints<S> deltas_;
  std::vector<CubeFace> support_;
};

// X + t d.
template <Scalar S>
FlagPoints<S> displaced(const FlagPoints<S>& x, const Perturbation<S>& d, const S& t) {
  FlagPoints<S> out = x;
  for (const auto& f : d.support()) out[f] = x[f] + scaled(d.deltas()[f], t);
  return out;
}

// Coefficient a such that x_F = a[dim F] c_F for all F, if one exists.
template <Scalar S>
std::optional<std::vector<S>> base_coefficients(const FlagPoints<S>& x) {
  const int n = x.dim();
  std::vector<std::optional<S>> a(n);
  for (const auto& f : enumerate_faces(n)) {
    const auto c = f.template center<S>();
    const auto s = f.support();
    S t = x[f][s[0]] * S(f.sign()[s[0]]);
    if (!approx_equal(x[f], scaled(c, t))) return std::nullopt;
    if (!a[f.dim()]) a[f.dim()] = t;
    else if (!approx_equal(*a[f.dim()], t)) return std::nullopt;
  }
  std::vector<S> out;
  for (auto& v : a) out.push_back(*v);
  return out;
}

// Exact d/dt g(X + t d) at t = 0: every flag simplex determinant is
// multilinear in its columns, so the coefficient is the sum of the n
// determinants with one column replaced by the direction.
template <Scalar S>
S first_order_coefficient(const FlagPoints<S>& x0, const Perturbation<S>& d) {
  const auto& t = flag_table(x0.dim());
  const int n = x0.dim();
  S total = 0;
  for (std::size_t k = 0; k < t.codes.size(); ++k) {
    const auto& codes = t.codes[k];
    S flag_sum = 0;
    for (int j = 0; j < n; ++j) {
      const auto& dir = d.deltas().at_code(codes[j]);
      if (is_zero(dir)) continue;
      std::vector<Vector<S>> cols;
      for (int i = 0; i < n; ++i) cols.push_back(i == j ? dir : x0.at_code(codes[i]));
      flag_sum += determinant_of_columns(cols);
    }
    total += t.orientation[k] > 0 ? flag_sum : S(-flag_sum);
  }
  return total / factorial<S>(n);
}

// (g(X0 + h d) - g(X0 - h d)) / 2h.
template <Scalar S>
S directional_derivative(const FlagPoints<S>& x0, const Perturbation<S>& d, const S& h) {
  if (sign(h) <= 0) throw std::invalid_argument("finite-difference step must be positive");
  return (g_volume(displaced(x0, d, h)) - g_volume(displaced(x0, d, S(-h)))) / (S(2) * h);
}

// (4 D(h/2) - D(h)) / 3.
template <Scalar S>
S richardson_derivative(const FlagPoints<S>& x0, const Perturbation<S>& d, const S& h) {
  S full = directional_derivative(x0, d, h);
  S half = directional_derivative(x0, d, S(h / S(2)));
  return (S(4) * half - full) / S(3);
}

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// First-order coefficient of g(X0 + t d) for a base configuration X0 and a
// direction with every Delta x_F orthogonal to c_F. Such directions lie in the
// kernel of the differential, so the result is 0 (exactly, for the exact
// backend; to Richardson accuracy for the float backend).
template <Scalar S>
S kernel_residual(const FlagPoints<S>& x0, const Perturbation<S>& d) {
  if (!base_coefficients(x0)) throw PreconditionError("X0 is not a base configuration a_{dim F} c_F");
  for (const auto& f : d.support())
    if (!is_zero(dot(d.deltas()[f], f.template center<S>())))
      throw PreconditionError("perturbation is not orthogonal to c_F on face " + describe(f.template center<S>()));
  if constexpr (is_exact_v<S>) {
    return first_order_coefficient(x0, d);
  } else {
    return richardson_derivative(x0, d, S(1e-3));
  }
}

// Basis of c_F^perp used by the kernel check: e_j for free j, and
// s_i e_i - s_j e_j for fixed i < j (s the face signs).
template <Scalar S>
std::vector<Vector<S>> orthogonal_directions(const CubeFace& f) {
  const int n = f.ambient_dim();
  std::vector<Vector<S>> dirs;
  for (int j : f.free_coordinates()) dirs.push_back(unit_vector<S>(n, j));
  const auto supp = f.support();
  for (std::size_t a = 0; a < supp.size(); ++a)
    for (std::size_t b = a + 1; b < supp.size(); ++b) {
      Vector<S> v(n, S(0));
      v[supp[a]] = f.sign()[supp[a]];
      v[supp[b]] = -f.sign()[supp[b]];
      dirs.push_back(std::move(v));
    }
  return dirs;
}

template <Scalar S>
Perturbation<S> single_face_perturbation(const CubeFace& f, const Vector<S>& dir) {
  Perturbation<S> p(f.ambient_dim());
  p.set(f, dir);
  return p;
}

template <Scalar S>
struct SecondOrderGap {
  S gap;         // |g(X1) - g(X2)|
  double delta;  // max(|X1 - X0|, |X2 - X0|), per-face Euclidean maximum
};

template <Scalar S>
SecondOrderGap<S> second_order_gap(const FlagPoints<S>& x0, const FlagPoints<S>& x1, const FlagPoints<S>& x2) {
  double d1 = Perturbation<S>::difference(x1, x0).magnitude();
  double d2 = Perturbation<S>::difference(x2, x0).magnitude();
  return {abs_value(S(g_volume(x1) - g_volume(x2))), std::max(d1, d2)};
}

// Forward difference of order k along d with step h:
// sum_i (-1)^(k-i) C(k, i) g(X + i h d).
template <Scalar S>
S forward_difference(const FlagPoints<S>& x, const Perturbation<S>& d, const S& h, int order) {
  S total = 0;
  long binom = 1;
  for (int i = 0; i <= order; ++i) {
    S term = g_volume(displaced(x, d, S(h * S(i)))) * S(binom);
    total += (order - i) % 2 == 0 ? term : S(-term);
    binom = binom * (order - i) / (i + 1);
  }
  return total;
}

}  // namespace mahler
