#pragma once

// Command-line front end. Every subcommand reads JSON documents, validates
// them, runs one library operation and writes JSON (or CSV) to --out or the
// given stream. Exit status: 0 success, 1 anomaly, 2 invalid input or usage.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mahler/contact.hpp"
#include "mahler/cube_flags.hpp"
#include "mahler/differential.hpp"
#include "mahler/experiments.hpp"
#include "mahler/json_io.hpp"
#include "mahler/polytope.hpp"
#include "mahler/random.hpp"
#include "mahler/scalar.hpp"

namespace mahler::cli {

enum ExitCode : int { kSuccess = 0, kAnomaly = 1, kInvalid = 2 };

struct Options {
  std::vector<std::string> argv;
  bool deterministic = false;
  std::string backend;  // empty: taken from the input document, else exact
  std::string in;
  std::string out;

  int dim = 0;
  bool list = false;
  std::string form = "vertices";

  std::uint64_t alpha_seed = 0;
  int count = 1000;

  std::vector<std::string> base;
  std::string step = "1/1000";

  std::string face;
  bool canonicalize_first = false;

  std::string delta = "1/100";
  int trials = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string c_probe;
  std::string csv;
  std::string summary;
};

// Carries the exit status of a finished subcommand along with its output.
struct Outcome {
  int code = kSuccess;
  std::string text;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open input file '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file '" + path + "'");
  f << text;
}

inline std::string dump(const Json& j) { return j.dump() + "\n"; }

inline Json argv_json(const Options& o) {
  Json a = Json::array();
  for (const auto& s : o.argv) a.push_back(s);
  return a;
}

inline std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Backend choose_backend(const Options& o, const std::optional<DocumentHeader>& header) {
  if (!o.backend.empty()) {
    try {
      return parse_backend(o.backend);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  }
  return header ? header->backend : Backend::exact;
}

template <Scalar S>
S parse_scalar_option(const std::string& text, const std::string& name) {
  try {
    return scalar_traits<S>::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError("--" + name + ": " + e.what());
  }
}

// Geometry failures while building the input body are input errors.
template <Scalar S>
VPolytope<S> load_polytope(const Json& doc, const std::string& where) {
  auto d = polytope_document_from_json<S>(doc, where);
  try {
    return polytope_from_document(d);
  } catch (const GeometryError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

template <Scalar S>
Outcome cmd_product(const Options&, const Json& doc) {
  auto k = load_polytope<S>(doc, "--in");
  const S v = volume(k), pv = volume(k.polar());
  Json j;
  j["volume"] = to_json(v);
  j["polar_volume"] = to_json(pv);
  j["product"] = to_json(S(v * pv));
  return {kSuccess, dump(j)};
}

template <Scalar S>
Outcome cmd_polar(const Options& o, const Json& doc) {
  auto k = load_polytope<S>(doc, "--in");
  if (o.form == "halfspaces") return {kSuccess, dump(to_json(polar_h(k)))};
  return {kSuccess, dump(to_json(k.polar()))};
}

template <Scalar S>
Outcome cmd_volume(const Options&, const Json& doc) {
  auto k = load_polytope<S>(doc, "--in");
  Json j;
  j["volume"] = to_json(volume(k));
  return {kSuccess, dump(j)};
}

template <Scalar S>
Outcome cmd_flags(const Options& o) {
  const int n = o.dim;
  Json j;
  j["dim"] = n;
  j["faces"] = face_count(n);
  const auto& table = flag_table(n);
  j["flags"] = table.codes.size();
  j["cube_tiling"] = to_json(g_volume(base_points<S>(n)));
  j["cross_polytope_tiling"] = to_json(g_volume(base_dual_points<S>(n)));
  j["cube_mahler_product"] = to_json(cube_mahler_product<S>(n));
  if (o.list) {
    Json flags = Json::array();
    for (const auto& fl : enumerate_flags(n)) {
      Json e;
      e["epsilon"] = fl.epsilon;
      e["pi"] = fl.pi;
      e["orientation"] = fl.orientation();
      flags.push_back(std::move(e));
    }
    j["flag_list"] = std::move(flags);
  }
  return {kSuccess, dump(j)};
}

template <Scalar S>
AlphaWeights<S> random_alpha(int n, SplitMix64& rng) {
  return AlphaWeights<S>(n, [&](const CubeFace&) {
    const auto p = rng.uniform(1, 16);
    const auto q = rng.uniform(1, 16);
    return S(S(p) / S(q));
  });
}

template <Scalar S>
Outcome cmd_lemma7(const Options& o, const std::optional<Json>& doc) {
  Json j;
  int code = kSuccess;
  if (doc) {
    const auto w = alpha_from_json<S>(*doc, "--in");
    const S gap = lemma7_gap(w);
    j["dim"] = w.dim();
    j["gap"] = to_json(gap);
    if (sign(gap) < 0) code = kAnomaly;
    return {code, dump(j)};
  }
  const int n = o.dim;
  SplitMix64 rng(o.alpha_seed);
  std::optional<S> lo, hi;
  Json witnesses = Json::array();
  std::size_t negative = 0;
  for (int i = 0; i < o.count; ++i) {
    const S gap = lemma7_gap(random_alpha<S>(n, rng));
    if (!lo || sign(S(gap - *lo)) < 0) lo = gap;
    if (!hi || sign(S(gap - *hi)) > 0) hi = gap;
    if (sign(gap) < 0) ++negative;
    if (is_zero(gap)) witnesses.push_back(i);
  }
  const S constant_gap = lemma7_gap(AlphaWeights<S>(n, [](const CubeFace&) { return S(3); }));
  j["dim"] = n;
  j["count"] = o.count;
  j["alpha_seed"] = o.alpha_seed;
  j["min_gap"] = lo ? to_json(*lo) : Json(nullptr);
  j["max_gap"] = hi ? to_json(*hi) : Json(nullptr);
  j["negative_gaps"] = negative;
  j["equality_witnesses"] = std::move(witnesses);
  j["constant_weight_gap"] = to_json(constant_gap);
  if (negative > 0 || !is_zero(constant_gap)) code = kAnomaly;
  return {code, dump(j)};
}

template <Scalar S>
Outcome cmd_kernel(const Options& o, const std::optional<Json>& doc) {
  FlagPoints<S> x0;
  if (doc) {
    x0 = flag_points_from_json<S>(*doc, "--in");
  } else {
    std::vector<S> a(o.dim, S(1));
    if (!o.base.empty()) {
      if (static_cast<int>(o.base.size()) != o.dim) throw ValidationError("--base needs exactly dim coefficients");
      for (int k = 0; k < o.dim; ++k) a[k] = parse_scalar_option<S>(o.base[k], "base");
    }
    for (const auto& x : a)
      if (sign(x) <= 0) throw ValidationError("--base coefficients must be positive");
    x0 = base_points<S>(o.dim, a);
  }
  const int n = x0.dim();
  if (!base_coefficients(x0)) throw ValidationError("--in: not a base configuration a_{dim F} c_F");
  std::size_t directions = 0;
  double worst = 0;
  bool all_zero = true;
  for (const auto& f : enumerate_faces(n))
    for (const auto& dir : orthogonal_directions<S>(f)) {
      const S r = kernel_residual(x0, single_face_perturbation(f, dir));
      ++directions;
      worst = std::max(worst, std::abs(to_double(r)));
      if constexpr (is_exact_v<S>) {
        if (!is_zero(r)) all_zero = false;
      } else {
        if (std::abs(r) > 1e-6) all_zero = false;
      }
    }
  std::optional<double> min_radial;
  const S h = parse_scalar_option<S>(o.step, "step");
  if (sign(h) <= 0) throw ValidationError("--step must be positive");
  for (const auto& f : enumerate_faces(n)) {
    const auto d = single_face_perturbation(f, f.template center<S>());
    const double v = is_exact_v<S> ? to_double(first_order_coefficient(x0, d)) : to_double(directional_derivative(x0, d, h));
    min_radial = min_radial ? std::min(*min_radial, v) : v;
  }
  Json j;
  j["dim"] = n;
  j["backend"] = std::string(backend_name(scalar_traits<S>::backend));
  j["directions"] = directions;
  j["max_abs_residual"] = worst;
  j["all_zero"] = all_zero;
  j["min_radial_derivative"] = *min_radial;
  return {all_zero && *min_radial > 0 ? kSuccess : kAnomaly, dump(j)};
}

template <Scalar S>
Outcome cmd_canonicalize(const Options&, const Json& doc) {
  auto k = load_polytope<S>(doc, "--in");
  if (!k.symmetric()) throw ValidationError("--in: body must be origin-symmetric");
  auto c = canonicalize(k);
  Json j = to_json(c.body);
  j["delta"] = to_json(c.delta);
  j["bm_upper_bound"] = to_json(S(S(1) / (S(1) - c.delta)));
  j["certified"] = c.certified;
  j["transform"] = to_json(c.T.rows_as_vectors());
  return {c.certified ? kSuccess : kAnomaly, dump(j)};
}

template <Scalar S>
Outcome cmd_contact(const Options& o, const Json& doc) {
  auto k = load_polytope<S>(doc, "--in");
  std::optional<S> delta;
  if (o.canonicalize_first) {
    if (!k.symmetric()) throw ValidationError("--in: body must be origin-symmetric");
    auto c = canonicalize(k);
    k = c.body;
    delta = c.delta;
  }
  const int n = k.dim();
  Json j;
  j["dim"] = n;
  j["backend"] = std::string(backend_name(scalar_traits<S>::backend));
  if (delta) j["delta"] = to_json(*delta);
  try {
    if (!o.face.empty()) {
      std::vector<int> s;
      std::stringstream ss(o.face);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          s.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          throw ValidationError("--face: bad sign entry '" + tok + "'");
        }
      }
      const CubeFace f(sign_from_json(Json(s), n, "--face"));
      Json pairs = Json::array();
      pairs.push_back(to_json(contact_pair(k, f)));
      j["pairs"] = std::move(pairs);
      return {kSuccess, dump(j)};
    }
    const auto cc = build_P_pair(k);
    const Json alpha = alpha_to_json(cc.alpha);
    const Json points = to_json(cc.primal);
    j["alpha"] = alpha["alpha"];
    j["points"] = points["points"];
    j["dual_points"] = to_json(cc.dual)["points"];
    Json pairs = Json::array();
    for (const auto& f : enumerate_faces(n)) pairs.push_back(to_json(cc.contacts[f]));
    j["pairs"] = std::move(pairs);
  } catch (const ContactError& e) {
    j["error"] = e.what();
    return {kAnomaly, dump(j)};
  }
  return {kSuccess, dump(j)};
}

template <Scalar S>
int cmd_trials(const Options& o, std::ostream& out, std::ostream& err) {
  TrialConfig<S> cfg;
  cfg.n = o.dim;
  cfg.delta_max = parse_scalar_option<S>(o.delta, "delta");
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  if (!o.c_probe.empty()) cfg.c_probe = parse_scalar_option<S>(o.c_probe, "c-probe");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  auto run = run_trials(cfg);

  std::string lines;
  for (const auto& r : run.reports) lines += to_json(r, cfg.n).dump() + "\n";
  write_text(o.out, lines, out);
  if (!o.csv.empty()) {
    std::string csv = trial_csv_header() + "\n";
    for (const auto& r : run.reports) csv += trial_csv_row(r) + "\n";
    write_text(o.csv, csv, out);
  }
  Json summary;
  summary["argv"] = argv_json(o);
  summary["dim"] = cfg.n;
  summary["backend"] = std::string(backend_name(scalar_traits<S>::backend));
  summary["delta_max"] = to_json(cfg.delta_max);
  summary["seed"] = cfg.seed;
  summary["c_probe"] = to_json(cfg.c_probe ? *cfg.c_probe : default_probe_constant<S>(cfg.n));
  summary["aggregates"] = to_json(run.aggregates);
  if (!o.deterministic) summary["timestamp"] = timestamp_utc();
  const std::string text = dump(summary);
  if (!o.summary.empty()) write_text(o.summary, text, out);
  else if (!o.out.empty() && o.out != "-") out << text;
  else err << text;
  if (run.aggregates.anomalies > 0) {
    for (const auto& r : run.reports)
      if (!r.anomaly.empty()) err << "anomaly in trial " << r.index << ": " << r.anomaly << "\n";
    return kAnomaly;
  }
  return kSuccess;
}

template <Scalar S>
int dispatch(const std::string& name, const Options& o, const std::optional<Json>& doc, std::ostream& out,
             std::ostream& err) {
  if (name == "trials") return cmd_trials<S>(o, out, err);
  Outcome r;
  if (name == "product") r = cmd_product<S>(o, *doc);
  else if (name == "polar") r = cmd_polar<S>(o, *doc);
  else if (name == "volume") r = cmd_volume<S>(o, *doc);
  else if (name == "flags") r = cmd_flags<S>(o);
  else if (name == "lemma7") r = cmd_lemma7<S>(o, doc);
  else if (name == "kernel") r = cmd_kernel<S>(o, doc);
  else if (name == "canonicalize") r = cmd_canonicalize<S>(o, *doc);
  else if (name == "contact") r = cmd_contact<S>(o, *doc);
  write_text(o.out, r.text, out);
  return r.code;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  for (int i = 0; i < argc; ++i) o.argv.emplace_back(argv[i]);

  CLI::App app{"Mahler volume product toolkit for bodies near the cube", "mahler"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_flag("--deterministic", o.deterministic, "omit timestamps from reports");

  auto add_io = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--in", o.in, "input JSON document");
    if (needs_input) in->required();
    sub->add_option("--out", o.out, "output path (default: standard output)");
    sub->add_option("--backend", o.backend, "exact|float (default: from the input document, else exact)")
        ->check(CLI::IsMember({"exact", "float"}));
  };
  auto* product = app.add_subcommand("product", "volume, polar volume and Mahler product of a polytope");
  add_io(product, true);
  auto* polar = app.add_subcommand("polar", "polar body of a polytope");
  add_io(polar, true);
  polar->add_option("--form", o.form, "vertices|halfspaces")->check(CLI::IsMember({"vertices", "halfspaces"}));
  auto* vol = app.add_subcommand("volume", "volume of a polytope");
  add_io(vol, true);
  auto* flags = app.add_subcommand("flags", "face and flag counts and tiling identities of the cube");
  add_io(flags, false);
  flags->add_option("--dim", o.dim, "dimension")->required()->check(CLI::Range(1, kMaxCubeDimension));
  flags->add_flag("--list", o.list, "list every flag");
  auto* lemma7 = app.add_subcommand("lemma7", "product gap g(Q) g(Q') - P(cube) over random weights");
  add_io(lemma7, false);
  lemma7->add_option("--dim", o.dim, "dimension")->check(CLI::Range(1, kMaxCubeDimension));
  lemma7->add_option("--alpha-seed", o.alpha_seed, "seed of the weight draws");
  lemma7->add_option("--count", o.count, "number of weight draws")->check(CLI::PositiveNumber);
  auto* kernel = app.add_subcommand("kernel", "first-order residual of g along orthogonal face directions");
  add_io(kernel, false);
  kernel->add_option("--dim", o.dim, "dimension")->check(CLI::Range(1, kMaxCubeDimension));
  kernel->add_option("--base", o.base, "base coefficients a_0 .. a_{n-1} (default all 1)")->delimiter(',');
  kernel->add_option("--step", o.step, "finite-difference step for the float backend");
  auto* canon = app.add_subcommand("canonicalize", "put a symmetric body in cube position");
  add_io(canon, true);
  auto* contact = app.add_subcommand("contact", "contact pairs of a body in cube position");
  add_io(contact, true);
  contact->add_option("--face", o.face, "single face as comma-separated signs, e.g. 1,0,-1");
  contact->add_flag("--canonicalize", o.canonicalize_first, "canonicalize the body first");
  auto* trials = app.add_subcommand("trials", "run the local-minimality experiment");
  trials->add_option("--dim", o.dim, "dimension")->required()->check(CLI::Range(2, kMaxCubeDimension));
  trials->add_option("--delta", o.delta, "perturbation scale delta_max");
  trials->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
  trials->add_option("--seed", o.seed, "64-bit seed");
  trials->add_option("--backend", o.backend, "exact|float (default exact)")->check(CLI::IsMember({"exact", "float"}));
  trials->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  trials->add_option("--c-probe", o.c_probe, "dichotomy constant c (default min(1/10, c''/4))");
  trials->add_option("--out", o.out, "JSON-lines report path (default: standard output)");
  trials->add_option("--csv", o.csv, "CSV summary path");
  trials->add_option("--summary", o.summary, "aggregate JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInvalid;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    std::optional<Json> doc;
    std::optional<DocumentHeader> header;
    if (!o.in.empty()) {
      doc = parse_json_text(detail::read_file(o.in), "--in");
      header = read_header(*doc, "--in", name == "lemma7" || name == "kernel" ? kMaxCubeDimension : kMaxDimension);
    }
    if ((name == "lemma7" || name == "kernel") && !doc && o.dim == 0) throw ValidationError("--dim or --in is required");
    const Backend backend = detail::choose_backend(o, header);
    if (backend == Backend::exact) return detail::dispatch<Rational>(name, o, doc, out, err);
    return detail::dispatch<double>(name, o, doc, out, err);
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    err << "anomaly: " << e.what() << "\n";
    return kAnomaly;
  }
}

}  // namespace mahler::cli
