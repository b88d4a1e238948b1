#pragma once

// Local-minimality experiments: sample symmetric bodies near the cube, put
// them in cube position, build the contact configurations P, P' and their
// radial shadows Q, Q', and record the volume chain, the escape dichotomy and
// the Mahler excess per trial.

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mahler/contact.hpp"
#include "mahler/cube_flags.hpp"
#include "mahler/polytope.hpp"
#include "mahler/random.hpp"
#include "mahler/scalar.hpp"
#include "mahler/stats.hpp"

namespace mahler {

// Largest admissible perturbation scale.
inline constexpr double kDeltaCap = 0.05;

enum class Generator { corner_cut = 0, pull_in = 1, extra_halfspace = 2 };
inline constexpr int kGeneratorCount = 3;

inline std::string_view generator_name(Generator g) {
  switch (g) {
    case Generator::corner_cut: return "corner_cut";
    case Generator::pull_in: return "pull_in";
    case Generator::extra_halfspace: return "extra_halfspace";
  }
  return "?";
}

enum class Dichotomy { body_escapes, polar_escapes, neither, trivial };

inline std::string_view dichotomy_name(Dichotomy d) {
  switch (d) {
    case Dichotomy::body_escapes: return "body_escapes";
    case Dichotomy::polar_escapes: return "polar_escapes";
    case Dichotomy::neither: return "neither";
    case Dichotomy::trivial: return "trivial";
  }
  return "?";
}

template <Scalar S>
struct TrialConfig {
  int n = 2;
  S delta_max = ratio<S>(1, 100);
  int trials = 1;
  std::uint64_t seed = 0;
  std::optional<S> c_probe;  // default: min(1/10, c''/4)
  int threads = 1;
  EnumerationLimits limits{};

  void validate() const {
    check_cube_dimension(n);
    if (n < 2) throw std::invalid_argument("trials need dimension >= 2");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (sign(delta_max) < 0 || to_double(delta_max) > kDeltaCap)
      throw std::invalid_argument("delta must lie in [0, " + std::to_string(kDeltaCap) + "]");
    if (c_probe && sign(*c_probe) <= 0) throw std::invalid_argument("probe constant must be positive");
  }
};

// ---------------------------------------------------------------------------
// Sampling

template <Scalar S>
struct SampledBody {
  VPolytope<S> body;
  Generator generator;
  S depth;  // perturbation depth t; the cube sandwich is (1 - t) cube <= K <= cube
};

namespace detail {

inline std::vector<int> random_sign_vector(SplitMix64& rng, int n, bool canonical) {
  std::vector<int> s(n);
  for (auto& x : s) x = rng.sign();
  if (canonical && s[0] < 0)
    for (auto& x : s) x = -x;
  return s;
}

template <Scalar S>
std::vector<Vector<S>> cube_facet_normals(int n) {
  std::vector<Vector<S>> out;
  for (int j = 0; j < n; ++j) {
    out.push_back(unit_vector<S>(n, j));
    out.push_back(-unit_vector<S>(n, j));
  }
  return out;
}

template <Scalar S>
Vector<S> sign_vector(const std::vector<int>& s) {
  Vector<S> v;
  for (int x : s) v.push_back(S(x));
  return v;
}

}  // namespace detail

// Cube intersected with {|a . x| <= |a|_1 (1 - depth)}.
template <Scalar S>
VPolytope<S> cube_with_cut(const Vector<S>& a, const S& depth, const EnumerationLimits& limits = {}) {
  const int n = static_cast<int>(a.size());
  auto normals = detail::cube_facet_normals<S>(n);
  const Vector<S> b = scaled(a, S(S(1) / (norm1(a) * (S(1) - depth))));
  normals.push_back(b);
  normals.push_back(-b);
  return polytope_from_bounded_halfspaces(n, normals, limits);
}

// Deterministic in (seed, trial_index); the generator is trial_index mod 3.
template <Scalar S>
SampledBody<S> sample_body_near_cube(const TrialConfig<S>& cfg, std::uint64_t trial_index) {
  const int n = cfg.n;
  const auto gen = static_cast<Generator>(trial_index % kGeneratorCount);
  if (is_zero(cfg.delta_max)) return {VPolytope<S>::cube(n), gen, S(0)};
  SplitMix64 rng(cfg.seed, trial_index);
  auto depth = [&] { return S(cfg.delta_max * S(rng.uniform(1, 1024)) / S(1024)); };

  switch (gen) {
    case Generator::corner_cut: {
      const int pairs = static_cast<int>(rng.uniform(1, std::min(2, 1 << (n - 1))));
      auto normals = detail::cube_facet_normals<S>(n);
      std::vector<std::vector<int>> used;
      S deepest = 0;
      while (static_cast<int>(used.size()) < pairs) {
        auto s = detail::random_sign_vector(rng, n, true);
        if (std::find(used.begin(), used.end(), s) != used.end()) continue;
        used.push_back(s);
        S t = depth();
        if (sign(S(t - deepest)) > 0) deepest = t;
        Vector<S> b = scaled(detail::sign_vector<S>(s), S(S(1) / (S(n) * (S(1) - t))));
        normals.push_back(b);
        normals.push_back(-b);
      }
      return {polytope_from_bounded_halfspaces(n, normals, cfg.limits), gen, deepest};
    }
    case Generator::pull_in: {
      auto s = detail::random_sign_vector(rng, n, true);
      S t = depth();
      const Vector<S> v = detail::sign_vector<S>(s);
      const auto cube = VPolytope<S>::cube(n);
      std::vector<Vector<S>> pts;
      for (const auto& p : cube.vertices()) {
        if (p == v || p == -v) pts.push_back(scaled(p, S(S(1) - t)));
        else pts.push_back(p);
      }
      return {VPolytope<S>(n, pts, cfg.limits), gen, t};
    }
    case Generator::extra_halfspace: {
      Vector<S> a(n);
      for (auto& x : a) x = S(rng.uniform(1, 16) * rng.sign());
      S t = depth();
      return {cube_with_cut(a, t, cfg.limits), gen, t};
    }
  }
  throw std::logic_error("unreachable generator");
}

// ---------------------------------------------------------------------------
// Contact configurations

template <Scalar S>
struct ContactConfiguration {
  FlagPoints<S> primal;  // P: contact points y_F
  FlagPoints<S> dual;    // P': contact points y*_F
  AlphaWeights<S> alpha;
  FaceMap<ContactPair<S>> contacts;
};

template <Scalar S>
ContactConfiguration<S> build_P_pair(const VPolytope<S>& khat) {
  ContactConfiguration<S> out;
  const int n = khat.dim();
  out.contacts = all_contact_pairs(khat);
  out.primal = FlagPoints<S>(n, [&](const CubeFace& f) { return out.contacts[f].y; });
  out.dual = FlagPoints<S>(n, [&](const CubeFace& f) { return out.contacts[f].y_star; });
  out.alpha = AlphaWeights<S>(n, [&](const CubeFace& f) { return out.contacts[f].alpha; });
  return out;
}

// ---------------------------------------------------------------------------
// Witness point

template <Scalar S>
struct WitnessPoint {
  Vector<S> point;  // (1 - delta, c' delta, ..., c' delta)
  S c_prime;        // 1 / (n - 5/4)
  S c_second;       // 1 / (4n - 5)
};

template <Scalar S>
WitnessPoint<S> witness_point(const S& delta, int n) {
  if (n < 2) throw std::invalid_argument("witness point needs n >= 2");
  WitnessPoint<S> w;
  w.c_prime = S(4) / S(4 * n - 5);
  w.c_second = S(1) / S(4 * n - 5);
  w.point.assign(n, S(w.c_prime * delta));
  w.point[0] = S(1) - delta;
  return w;
}

// Signed permutation taking vertex face `face` to (1, ..., 1) and coordinate
// `first` to position 0; `to_frame` applies it, `from_frame` inverts it.
struct WitnessFrame {
  std::vector<int> signs;
  std::vector<int> order;  // order[k] = original coordinate placed at k

  WitnessFrame(const CubeFace& face, int first) : signs(face.sign()) {
    order.push_back(first);
    for (int j = 0; j < face.ambient_dim(); ++j)
      if (j != first) order.push_back(j);
  }

  template <Scalar S>
  Vector<S> to_frame(const Vector<S>& x) const {
    Vector<S> z(x.size());
    for (std::size_t k = 0; k < order.size(); ++k) z[k] = signs[order[k]] > 0 ? x[order[k]] : S(-x[order[k]]);
    return z;
  }

  template <Scalar S>
  Vector<S> from_frame(const Vector<S>& z) const {
    Vector<S> x(z.size());
    for (std::size_t k = 0; k < order.size(); ++k) x[order[k]] = signs[order[k]] > 0 ? z[k] : S(-z[k]);
    return x;
  }
};

// ---------------------------------------------------------------------------
// Dichotomy

template <Scalar S>
struct DichotomyResult {
  Dichotomy outcome = Dichotomy::trivial;
  S c_probe = 0;
  bool body_vertex_escapes = false;   // some vertex of K outside (1 + c delta) P
  bool polar_vertex_escapes = false;  // some vertex of K* outside (1 + c delta) P'

  // Witness data, filled when K lies inside (1 + c delta) P.
  bool witness_found = false;
  int witness_face_code = -1;
  int witness_coordinate = -1;
  Vector<S> witness;
  S c_prime = 0;
  S c_second = 0;
  bool case_same_face = false;    // x~ . y_F <= 1 - c'' delta for the chosen vertex face
  bool case_other_faces = false;  // same bound for every other vertex face
  bool witness_in_polar = false;
  bool witness_outside_Pp = false;
  // Smallest C' with |z_1| + (1 - C' delta) sum_{k>=2} |z_k| <= 1 on P', in
  // the witness frame, and whether x~ violates that inequality at scale 1 + c delta.
  std::optional<S> c_prime_tight;
  bool halfspace_certificate = false;
};

template <Scalar S>
S default_probe_constant(int n) {
  const S c_second = S(1) / S(4 * n - 5);
  const S quarter = c_second / S(4);
  const S tenth = ratio<S>(1, 10);
  return sign(S(quarter - tenth)) < 0 ? quarter : tenth;
}

namespace detail {

template <Scalar S>
std::optional<S> tight_halfspace_constant(const FlagPoints<S>& dual, const WitnessFrame& frame, const S& delta) {
  S best = 0;
  for (const auto& f : enumerate_faces(dual.dim())) {
    const Vector<S> z = frame.to_frame(dual[f]);
    S head = abs_value(z[0]);
    S tail = 0;
    for (std::size_t k = 1; k < z.size(); ++k) tail += abs_value(z[k]);
    const S excess = head + tail - S(1);
    if (sign(excess) <= 0) continue;
    if (is_zero(tail)) return std::nullopt;
    const S need = excess / (delta * tail);
    if (sign(S(need - best)) > 0) best = need;
  }
  return best;
}

}  // namespace detail

// Decides which of K, K* leaves the (1 + c delta)-dilate of its contact
// configuration, and certifies the witness chain for the polar side.
template <Scalar S>
DichotomyResult<S> dichotomy_check(const VPolytope<S>& khat, const ContactConfiguration<S>& cc, const S& delta,
                                   const S& c) {
  DichotomyResult<S> r;
  r.c_probe = c;
  if (is_zero(delta)) return r;
  const int n = khat.dim();
  const S scale = S(1) + c * delta;

  for (const auto& v : khat.vertices())
    if (!flag_union_contains(cc.primal, v, scale)) {
      r.body_vertex_escapes = true;
      break;
    }
  for (const auto& w : khat.facets())
    if (!flag_union_contains(cc.dual, w, scale)) {
      r.polar_vertex_escapes = true;
      break;
    }

  if (!r.body_vertex_escapes) {
    const S threshold = S(1) - delta;
    std::vector<CubeFace> vertex_faces;
    for (const auto& f : enumerate_faces(n))
      if (f.dim() == 0) vertex_faces.push_back(f);
    for (const auto& f : vertex_faces) {
      const Vector<S>& y = cc.primal[f];
      for (int j = 0; j < n && !r.witness_found; ++j)
        if (leq(S(y[j] * S(f.sign()[j])), threshold)) {
          r.witness_found = true;
          r.witness_face_code = f.code();
          r.witness_coordinate = j;
        }
      if (r.witness_found) break;
    }
    if (r.witness_found) {
      const CubeFace face = CubeFace::from_code(n, r.witness_face_code);
      const WitnessFrame frame(face, r.witness_coordinate);
      const auto wp = witness_point(delta, n);
      r.c_prime = wp.c_prime;
      r.c_second = wp.c_second;
      r.witness = frame.from_frame(wp.point);
      const S bound = S(1) - wp.c_second * delta;
      r.case_same_face = leq(dot(r.witness, cc.primal[face]), bound);
      r.case_other_faces = true;
      for (const auto& f : vertex_faces)
        if (!(f == face) && !leq(dot(r.witness, cc.primal[f]), bound)) r.case_other_faces = false;
      r.witness_in_polar = satisfies_all(khat.vertices(), r.witness, S(1));
      r.witness_outside_Pp = !flag_union_contains(cc.dual, r.witness, scale);
      r.c_prime_tight = detail::tight_halfspace_constant(cc.dual, frame, delta);
      if (r.c_prime_tight) {
        const Vector<S> z = frame.to_frame(r.witness);
        S tail = 0;
        for (std::size_t k = 1; k < z.size(); ++k) tail += abs_value(z[k]);
        const S lhs = abs_value(z[0]) + (S(1) - *r.c_prime_tight * delta) * tail;
        r.halfspace_certificate = sign(S(lhs - scale)) > 0;
      }
    }
  }

  if (r.body_vertex_escapes) r.outcome = Dichotomy::body_escapes;
  else if (r.polar_vertex_escapes) r.outcome = Dichotomy::polar_escapes;
  else r.outcome = Dichotomy::neither;
  return r;
}

// ---------------------------------------------------------------------------
// Trials

template <Scalar S>
struct TrialReport {
  int index = 0;
  Generator generator = Generator::corner_cut;
  S input_depth = 0;
  S delta = 0;
  bool touching_certified = false;
  S volP = 0, volPp = 0, volQ = 0, volQp = 0;
  S PK = 0, PB = 0;
  S excess = 0;            // P(K) - P(cube)
  S gap_PQ = 0;            // |vol P - vol Q|
  S gap_PpQp = 0;          // |vol P' - vol Q'|
  S chain_loss = 0;        // vol Q vol Q' - vol P vol P'
  double chain_slack = 0;  // vol P vol P' - (P(cube) - C_chain delta^2)
  bool P_in_K = false;
  bool Pp_in_Kstar = false;
  bool contact_products_one = false;  // y . y* = 1 on every face
  double contact_slope = 0;           // max_F |y_F - c_F| / delta
  double dual_contact_slope = 0;      // max_F |y*_F - c*_F| / delta
  DichotomyResult<S> dichotomy;
  std::string anomaly;  // empty when the trial passed every check
  std::vector<Vector<S>> input_vertices;
};

// Runs one trial on a given body; `index` and `generator` are labels only.
template <Scalar S>
TrialReport<S> run_trial_on(const VPolytope<S>& k, const std::optional<S>& c_probe, int index = 0,
                            Generator generator = Generator::corner_cut, const S& input_depth = S(0),
                            const EnumerationLimits& limits = {}) {
  TrialReport<S> rep;
  rep.index = index;
  rep.generator = generator;
  rep.input_depth = input_depth;
  rep.input_vertices = k.vertices();
  const int n = k.dim();
  rep.PB = cube_mahler_product<S>(n);
  std::vector<std::string> problems;
  try {
    auto canon = canonicalize(k, limits);
    rep.delta = canon.delta;
    rep.touching_certified = canon.certified;
    if (!canon.certified) problems.push_back("cube position not certified");
    const VPolytope<S>& khat = canon.body;
    rep.PK = volume_product(khat);
    rep.excess = rep.PK - rep.PB;
    if constexpr (is_exact_v<S>) {
      if (sign(rep.excess) < 0) problems.push_back("negative Mahler excess");
    } else {
      if (rep.excess < -scalar_traits<double>::tolerance) problems.push_back("negative Mahler excess");
    }

    const auto cc = build_P_pair(khat);
    const auto q = build_Q_pair(cc.alpha);
    rep.volP = g_volume(cc.primal);
    rep.volPp = g_volume(cc.dual);
    rep.volQ = g_volume(q.primal);
    rep.volQp = g_volume(q.dual);
    rep.gap_PQ = abs_value(S(rep.volP - rep.volQ));
    rep.gap_PpQp = abs_value(S(rep.volPp - rep.volQp));
    rep.chain_loss = rep.volQ * rep.volQp - rep.volP * rep.volPp;
    rep.P_in_K = contains_points(khat.facets(), flag_point_list(cc.primal), S(1));
    rep.Pp_in_Kstar = contains_points(khat.vertices(), flag_point_list(cc.dual), S(1));
    if (!rep.P_in_K) problems.push_back("P not contained in K");
    if (!rep.Pp_in_Kstar) problems.push_back("P' not contained in K*");
    rep.contact_products_one = true;
    for (const auto& f : enumerate_faces(n)) {
      const auto& cp = cc.contacts[f];
      if (!approx_equal(dot(cp.y, cp.y_star), S(1))) rep.contact_products_one = false;
      if (!is_zero(rep.delta)) {
        const double d = to_double(rep.delta);
        rep.contact_slope = std::max(rep.contact_slope, norm2(Vector<S>(cp.y - f.template center<S>())) / d);
        rep.dual_contact_slope =
            std::max(rep.dual_contact_slope, norm2(Vector<S>(cp.y_star - f.template dual_center<S>())) / d);
      }
    }
    if (!rep.contact_products_one) problems.push_back("contact pair with y . y* != 1");

    const S c = c_probe ? *c_probe : default_probe_constant<S>(n);
    rep.dichotomy = dichotomy_check(khat, cc, rep.delta, c);
    if (rep.dichotomy.outcome == Dichotomy::neither) problems.push_back("dichotomy: neither side escapes");
  } catch (const std::exception& e) {
    problems.push_back(e.what());
    rep.dichotomy.outcome = Dichotomy::neither;
  }
  for (std::size_t i = 0; i < problems.size(); ++i) rep.anomaly += (i ? "; " : "") + problems[i];
  return rep;
}

template <Scalar S>
TrialReport<S> run_single_trial(const TrialConfig<S>& cfg, int index) {
  auto body = sample_body_near_cube(cfg, static_cast<std::uint64_t>(index));
  return run_trial_on(body.body, cfg.c_probe, index, body.generator, body.depth, cfg.limits);
}

struct TrialAggregates {
  std::size_t trials = 0;
  std::size_t body_escapes = 0, polar_escapes = 0, neither = 0, trivial = 0;
  std::size_t anomalies = 0;
  double C_gap = 0;    // max over trials of max(gap_PQ, gap_PpQp) / delta^2
  double C_chain = 0;  // max over trials of max(chain_loss, 0) / delta^2
  double C_contact = 0;          // max over trials of |y* - c*| / delta
  double C_prime_bound = 0;      // 3 n C_contact
  double C_prime_tight_max = 0;  // max over witness trials of the tight C'
  double min_excess = 0;
  std::optional<double> excess_envelope;  // min over delta > 0 of excess / delta
  std::optional<LinearFit> excess_fit;    // excess against delta over delta > 0
  std::array<std::optional<double>, kGeneratorCount> first_nonpositive_delta{};
};

template <Scalar S>
struct TrialRun {
  std::vector<TrialReport<S>> reports;
  TrialAggregates aggregates;
};

template <Scalar S>
TrialAggregates aggregate_trials(std::vector<TrialReport<S>>& reports, int n) {
  TrialAggregates a;
  a.trials = reports.size();
  std::vector<double> xs, ys;
  bool first = true;
  for (const auto& r : reports) {
    switch (r.dichotomy.outcome) {
      case Dichotomy::body_escapes: ++a.body_escapes; break;
      case Dichotomy::polar_escapes: ++a.polar_escapes; break;
      case Dichotomy::neither: ++a.neither; break;
      case Dichotomy::trivial: ++a.trivial; break;
    }
    if (!r.anomaly.empty()) ++a.anomalies;
    const double excess = to_double(r.excess);
    a.min_excess = first ? excess : std::min(a.min_excess, excess);
    first = false;
    if (is_zero(r.delta)) continue;
    const double d = to_double(r.delta);
    const double d2 = d * d;
    a.C_gap = std::max({a.C_gap, to_double(r.gap_PQ) / d2, to_double(r.gap_PpQp) / d2});
    a.C_chain = std::max(a.C_chain, std::max(0.0, to_double(r.chain_loss)) / d2);
    a.C_contact = std::max(a.C_contact, r.dual_contact_slope);
    if (r.dichotomy.c_prime_tight) a.C_prime_tight_max = std::max(a.C_prime_tight_max, to_double(*r.dichotomy.c_prime_tight));
    a.excess_envelope = a.excess_envelope ? std::min(*a.excess_envelope, excess / d) : excess / d;
    xs.push_back(d);
    ys.push_back(excess);
    auto& slot = a.first_nonpositive_delta[static_cast<int>(r.generator)];
    if (excess <= 0 && (!slot || d < *slot)) slot = d;
  }
  a.C_prime_bound = 3.0 * n * a.C_contact;
  if (xs.size() >= 3) {
    try {
      a.excess_fit = fit_line(xs, ys);
    } catch (const std::invalid_argument&) {
    }
  }
  for (auto& r : reports) {
    const double d = to_double(r.delta);
    r.chain_slack = to_double(S(r.volP * r.volPp)) - (to_double(r.PB) - a.C_chain * d * d);
  }
  return a;
}

// Trial i runs on worker i mod threads and is stored at slot i, so the report
// sequence does not depend on the thread count.
template <Scalar S>
TrialRun<S> run_trials(const TrialConfig<S>& cfg) {
  cfg.validate();
  TrialRun<S> run;
  run.reports.resize(cfg.trials);
  const int workers = std::min(cfg.threads, cfg.trials);
  auto work = [&](int w) {
    for (int i = w; i < cfg.trials; i += workers) {
      try {
        run.reports[i] = run_single_trial(cfg, i);
      } catch (const std::exception& e) {
        run.reports[i].index = i;
        run.reports[i].anomaly = std::string("sampling failed: ") + e.what();
        run.reports[i].dichotomy.outcome = Dichotomy::neither;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  run.aggregates = aggregate_trials(run.reports, cfg.n);
  return run;
}

}  // namespace mahler
