#pragma once

// Combinatorics of the cube [-1,1]^n: faces as sign vectors, complete flags,
// flag simplices conv(0, x_F0, ..., x_F{n-1}) and the signed-volume
// polynomial g obtained by summing them over all flags.

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mahler/linalg.hpp"
#include "mahler/scalar.hpp"

namespace mahler {

inline constexpr int kMaxCubeDimension = 8;

inline void check_cube_dimension(int n, int cap = kMaxCubeDimension) {
  if (n < 1 || n > cap)
    throw std::invalid_argument("cube dimension " + std::to_string(n) + " outside [1, " + std::to_string(cap) + "]");
}

inline int pow3(int n) {
  int r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

// A proper face of the cube. sign[i] = +-1 fixes x_i = sign[i]; 0 leaves x_i
// free in [-1, 1]. The center of the face is the sign vector itself.
class CubeFace {
 public:
  CubeFace() = default;
  explicit CubeFace(std::vector<int> sign) : sign_(std::move(sign)) {
    check_cube_dimension(static_cast<int>(sign_.size()));
    bool any = false;
    for (int s : sign_) {
      if (s < -1 || s > 1) throw std::invalid_argument("cube face signs must be in {-1, 0, 1}");
      any |= s != 0;
    }
    if (!any) throw std::invalid_argument("the all-zero sign vector is not a proper face");
  }

  // Base-3 code, most significant digit first, digit = sign + 1. Increasing
  // codes are lexicographic order on sign vectors.
  static CubeFace from_code(int n, int code) {
    std::vector<int> s(n);
    for (int i = n - 1; i >= 0; --i) {
      s[i] = code % 3 - 1;
      code /= 3;
    }
    return CubeFace(std::move(s));
  }

  int code() const {
    int c = 0;
    for (int s : sign_) c = 3 * c + (s + 1);
    return c;
  }

  int ambient_dim() const { return static_cast<int>(sign_.size()); }
  int dim() const { return static_cast<int>(std::count(sign_.begin(), sign_.end(), 0)); }
  // n - dim F = number of fixed coordinates.
  int codim() const { return ambient_dim() - dim(); }
  const std::vector<int>& sign() const { return sign_; }

  std::vector<int> support() const {
    std::vector<int> s;
    for (int i = 0; i < ambient_dim(); ++i)
      if (sign_[i] != 0) s.push_back(i);
    return s;
  }
  std::vector<int> free_coordinates() const {
    std::vector<int> s;
    for (int i = 0; i < ambient_dim(); ++i)
      if (sign_[i] == 0) s.push_back(i);
    return s;
  }

  CubeFace negated() const {
    std::vector<int> s = sign_;
    for (auto& x : s) x = -x;
    return CubeFace(std::move(s));
  }

  // Representative of {F, -F}: first nonzero sign positive.
  bool is_canonical() const {
    for (int s : sign_)
      if (s != 0) return s > 0;
    return true;
  }

  // this is a subset of other.
  bool is_subface_of(const CubeFace& other) const {
    for (int i = 0; i < ambient_dim(); ++i)
      if (other.sign_[i] != 0 && other.sign_[i] != sign_[i]) return false;
    return true;
  }

  template <Scalar S>
  Vector<S> center() const {
    Vector<S> c(sign_.size());
    for (std::size_t i = 0; i < sign_.size(); ++i) c[i] = sign_[i];
    return c;
  }

  // Center of the dual face of the cross-polytope: c_F / (n - dim F).
  template <Scalar S>
  Vector<S> dual_center() const {
    return scaled(center<S>(), S(1) / S(codim()));
  }

  bool operator==(const CubeFace& o) const { return sign_ == o.sign_; }
  bool operator<(const CubeFace& o) const { return sign_ < o.sign_; }

 private:
  std::vector<int> sign_;
};

inline std::vector<CubeFace> enumerate_faces(int n, int cap = kMaxCubeDimension) {
  check_cube_dimension(n, cap);
  std::vector<CubeFace> faces;
  const int zero_code = (pow3(n) - 1) / 2;
  for (int code = 0; code < pow3(n); ++code)
    if (code != zero_code) faces.push_back(CubeFace::from_code(n, code));
  return faces;
}

inline std::uint64_t face_count(int n) {
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  return total - 1;
}

// A complete flag F0 < F1 < ... < F{n-1}: F0 is the vertex epsilon and F_j
// frees the coordinates pi[0], ..., pi[j-1].
struct Flag {
  std::vector<int> epsilon;
  std::vector<int> pi;

  int ambient_dim() const { return static_cast<int>(epsilon.size()); }

  CubeFace face(int j) const {
    std::vector<int> s = epsilon;
    for (int k = 0; k < j; ++k) s[pi[k]] = 0;
    return CubeFace(std::move(s));
  }

  std::vector<CubeFace> faces() const {
    std::vector<CubeFace> f;
    for (int j = 0; j < ambient_dim(); ++j) f.push_back(face(j));
    return f;
  }

  // sign det[c_F0, ..., c_F{n-1}] = prod(epsilon) * sign(pi).
  int orientation() const {
    int s = 1;
    for (int e : epsilon) s *= e;
    std::vector<int> p = pi;
    for (std::size_t i = 0; i < p.size(); ++i)
      while (p[i] != static_cast<int>(i)) {
        std::swap(p[i], p[p[i]]);
        s = -s;
      }
    return s;
  }
};

inline std::vector<Flag> enumerate_flags(int n, int cap = kMaxCubeDimension) {
  check_cube_dimension(n, cap);
  std::vector<Flag> flags;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> eps(n);
    for (int j = 0; j < n; ++j) eps[j] = (mask >> (n - 1 - j)) & 1 ? 1 : -1;
    std::vector<int> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    do {
      flags.push_back(Flag{eps, pi});
    } while (std::next_permutation(pi.begin(), pi.end()));
  }
  return flags;
}

// Face codes and orientation of every flag, memoized per dimension.
struct FlagTable {
  int n = 0;
  std::vector<std::vector<int>> codes;
  std::vector<int> orientation;
};

inline const FlagTable& flag_table(int n) {
  check_cube_dimension(n);
  static std::array<std::once_flag, kMaxCubeDimension + 1> once;
  static std::array<std::unique_ptr<FlagTable>, kMaxCubeDimension + 1> tables;
  std::call_once(once[n], [n] {
    auto t = std::make_unique<FlagTable>();
    t->n = n;
    for (const auto& fl : enumerate_flags(n)) {
      std::vector<int> c;
      for (const auto& f : fl.faces()) c.push_back(f.code());
      t->codes.push_back(std::move(c));
      t->orientation.push_back(fl.orientation());
    }
    tables[n] = std::move(t);
  });
  return *tables[n];
}

// Total map from the faces of the n-cube to values, indexed by face code.
template <class T>
class FaceMap {
 public:
  FaceMap() = default;
  FaceMap(int n, const std::function<T(const CubeFace&)>& make) : n_(n), data_(pow3(n)) {
    for (const auto& f : enumerate_faces(n)) data_[f.code()] = make(f);
  }

  int dim() const { return n_; }
  const T& operator[](const CubeFace& f) const { return data_[f.code()]; }
  T& operator[](const CubeFace& f) { return data_[f.code()]; }
  const T& at_code(int code) const { return data_[code]; }
  T& at_code(int code) { return data_[code]; }

  bool operator==(const FaceMap& o) const { return n_ == o.n_ && data_ == o.data_; }

 private:
  int n_ = 0;
  std::vector<T> data_;
};

// One point x_F per face.
template <Scalar S>
using FlagPoints = FaceMap<Vector<S>>;

// One positive weight alpha_F per face; the dual weight is 1 / alpha_F.
template <Scalar S>
using AlphaWeights = FaceMap<S>;

// x_F = a[dim F] c_F.
template <Scalar S>
FlagPoints<S> base_points(int n, const std::vector<S>& a) {
  if (static_cast<int>(a.size()) != n) throw std::invalid_argument("need one coefficient per face dimension");
  return FlagPoints<S>(n, [&](const CubeFace& f) { return scaled(f.template center<S>(), a[f.dim()]); });
}

template <Scalar S>
FlagPoints<S> base_points(int n) {
  return base_points<S>(n, std::vector<S>(n, S(1)));
}

// x_F = c_F / (n - dim F).
template <Scalar S>
FlagPoints<S> base_dual_points(int n) {
  return FlagPoints<S>(n, [](const CubeFace& f) { return f.template dual_center<S>(); });
}

template <Scalar S>
bool is_antisymmetric(const FlagPoints<S>& x) {
  for (const auto& f : enumerate_faces(x.dim()))
    if (!approx_equal(x[f.negated()], Vector<S>(-x[f]))) return false;
  return true;
}

template <Scalar S>
S flag_simplex_signed_volume_codes(const FlagPoints<S>& x, const std::vector<int>& codes, int orientation) {
  std::vector<Vector<S>> cols;
  cols.reserve(codes.size());
  for (int c : codes) cols.push_back(x.at_code(c));
  S det = determinant_of_columns(cols);
  return orientation > 0 ? S(det / factorial<S>(x.dim())) : S(-det / factorial<S>(x.dim()));
}

// orientation(fl) * det[x_F0, ..., x_F{n-1}] / n!.
template <Scalar S>
S flag_simplex_signed_volume(const FlagPoints<S>& x, const Flag& fl) {
  std::vector<int> codes;
  for (const auto& f : fl.faces()) codes.push_back(f.code());
  return flag_simplex_signed_volume_codes(x, codes, fl.orientation());
}

// Signed flag simplex volumes in enumerate_flags order.
template <Scalar S>
std::vector<S> flag_simplex_volumes(const FlagPoints<S>& x) {
  const auto& t = flag_table(x.dim());
  std::vector<S> out;
  out.reserve(t.codes.size());
  for (std::size_t i = 0; i < t.codes.size(); ++i)
    out.push_back(flag_simplex_signed_volume_codes(x, t.codes[i], t.orientation[i]));
  return out;
}

// g(X): sum of signed flag simplex volumes, a polynomial of degree n in the
// coordinates of X. Summed sequentially in flag order.
template <Scalar S>
S g_volume(const FlagPoints<S>& x) {
  S total = 0;
  for (const auto& v : flag_simplex_volumes(x)) total += v;
  return total;
}

// vol(cube) * vol(cross-polytope) = 2^n * 2^n / n!.
template <Scalar S>
S cube_mahler_product(int n) {
  return power(S(2), n) * power(S(2), n) / factorial<S>(n);
}

template <Scalar S>
struct FlagPointPair {
  FlagPoints<S> primal;
  FlagPoints<S> dual;
};

// y_F = alpha_F c_F and y*_F = (1 / alpha_F) c*_F.
template <Scalar S>
FlagPointPair<S> build_Q_pair(const AlphaWeights<S>& w) {
  const int n = w.dim();
  for (const auto& f : enumerate_faces(n))
    if (sign(w[f]) <= 0) throw std::invalid_argument("alpha weights must be positive");
  return {FlagPoints<S>(n, [&](const CubeFace& f) { return scaled(f.template center<S>(), w[f]); }),
          FlagPoints<S>(n, [&](const CubeFace& f) { return scaled(f.template dual_center<S>(), S(S(1) / w[f])); })};
}

// g(Q) g(Q') - P(cube); nonnegative by Cauchy-Schwarz over flags.
template <Scalar S>
S lemma7_gap(const AlphaWeights<S>& w) {
  auto q = build_Q_pair(w);
  return g_volume(q.primal) * g_volume(q.dual) - cube_mahler_product<S>(w.dim());
}

// point in scale * (union of the flag simplices of X).
template <Scalar S>
bool flag_union_contains(const FlagPoints<S>& x, const Vector<S>& point, const S& scale = S(1)) {
  const auto& t = flag_table(x.dim());
  const Vector<S> target = scaled(point, S(S(1) / scale));
  for (const auto& codes : t.codes) {
    std::vector<Vector<S>> cols;
    for (int c : codes) cols.push_back(x.at_code(c));
    auto lambda = solve(Matrix<S>::from_columns(cols), target);
    if (!lambda) continue;
    S sum = 0;
    bool nonneg = true;
    for (const auto& l : *lambda) {
      if (sign(l) < 0) nonneg = false;
      sum += l;
    }
    if (nonneg && leq(sum, S(1))) return true;
  }
  return false;
}

template <Scalar S>
std::vector<Vector<S>> flag_point_list(const FlagPoints<S>& x) {
  std::vector<Vector<S>> pts;
  for (const auto& f : enumerate_faces(x.dim())) pts.push_back(x[f]);
  return pts;
}

}  // namespace mahler
