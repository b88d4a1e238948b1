#pragma once

// JSON documents shared by the CLI and the experiment reports. Exact scalars
// travel as "p/q" strings, float scalars as numbers. Readers validate the
// structure before any geometry is computed and throw ValidationError.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mahler/contact.hpp"
#include "mahler/cube_flags.hpp"
#include "mahler/experiments.hpp"
#include "mahler/polytope.hpp"
#include "mahler/scalar.hpp"

namespace mahler {

using Json = nlohmann::ordered_json;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Scalars and vectors

template <Scalar S>
Json to_json(const S& x) {
  if constexpr (is_exact_v<S>) return scalar_traits<S>::format(x);
  else return x;
}

template <Scalar S>
Json to_json(const Vector<S>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

template <Scalar S>
Json to_json(const std::vector<Vector<S>>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) a.push_back(to_json(r));
  return a;
}

template <Scalar S>
S scalar_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_string()) return scalar_traits<S>::parse(j.get<std::string>());
    if (j.is_number_integer()) return S(j.get<long>());
    if (j.is_number()) {
      if constexpr (is_exact_v<S>) {
        throw ValidationError(where + ": exact scalars must be integers or \"p/q\" strings");
      } else {
        return j.get<double>();
      }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError(where + ": expected a scalar");
}

template <Scalar S>
Vector<S> vector_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  if (static_cast<int>(j.size()) != dim)
    throw ValidationError(where + ": expected " + std::to_string(dim) + " coordinates, got " + std::to_string(j.size()));
  Vector<S> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(scalar_from_json<S>(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

inline std::vector<int> sign_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ValidationError(where + ": expected a sign vector of length " + std::to_string(dim));
  std::vector<int> s;
  bool nonzero = false;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<int>() < -1 || x.get<int>() > 1)
      throw ValidationError(where + ": sign entries must be -1, 0 or 1");
    s.push_back(x.get<int>());
    nonzero = nonzero || s.back() != 0;
  }
  if (!nonzero) throw ValidationError(where + ": sign vector must not be identically 0");
  return s;
}

inline Json sign_to_json(const CubeFace& f) {
  Json a = Json::array();
  for (int s : f.sign()) a.push_back(s);
  return a;
}

// ---------------------------------------------------------------------------
// Document headers

struct DocumentHeader {
  int dim = 0;
  Backend backend = Backend::exact;
};

inline Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(where + ": malformed JSON (" + e.what() + ")");
  }
}

inline DocumentHeader read_header(const Json& doc, const std::string& where, int max_dim = kMaxDimension) {
  if (!doc.is_object()) throw ValidationError(where + ": top level must be an object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw ValidationError(where + ": missing integer \"dim\"");
  DocumentHeader h;
  h.dim = doc["dim"].get<int>();
  if (h.dim < 1 || h.dim > max_dim)
    throw ValidationError(where + ": dim must lie in [1, " + std::to_string(max_dim) + "]");
  if (doc.contains("backend")) {
    if (!doc["backend"].is_string()) throw ValidationError(where + ": \"backend\" must be a string");
    try {
      h.backend = parse_backend(doc["backend"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Polytopes

template <Scalar S>
struct PolytopeDocument {
  int dim = 0;
  bool vertex_form = true;
  std::vector<Vector<S>> rows;  // vertices or halfspace normals
};

template <Scalar S>
PolytopeDocument<S> polytope_document_from_json(const Json& doc, const std::string& where = "polytope") {
  const auto h = read_header(doc, where);
  PolytopeDocument<S> p;
  p.dim = h.dim;
  const bool has_v = doc.contains("vertices"), has_h = doc.contains("halfspaces");
  if (has_v == has_h) throw ValidationError(where + ": exactly one of \"vertices\" and \"halfspaces\" is required");
  p.vertex_form = has_v;
  const char* key = has_v ? "vertices" : "halfspaces";
  const Json& rows = doc[key];
  if (!rows.is_array() || rows.empty()) throw ValidationError(where + ": \"" + key + "\" must be a nonempty array");
  for (std::size_t i = 0; i < rows.size(); ++i)
    p.rows.push_back(vector_from_json<S>(rows[i], p.dim, where + "." + key + "[" + std::to_string(i) + "]"));
  return p;
}

template <Scalar S>
VPolytope<S> polytope_from_document(const PolytopeDocument<S>& d) {
  if (d.vertex_form) return VPolytope<S>(d.dim, d.rows);
  return vertices_from_halfspaces(HPolytope<S>(d.dim, d.rows));
}

template <Scalar S>
Json vertices_to_json(int dim, const std::vector<Vector<S>>& vertices) {
  Json j;
  j["dim"] = dim;
  j["backend"] = std::string(backend_name(scalar_traits<S>::backend));
  j["vertices"] = to_json(vertices);
  return j;
}

template <Scalar S>
Json to_json(const VPolytope<S>& k) {
  return vertices_to_json(k.dim(), k.vertices());
}

template <Scalar S>
Json to_json(const HPolytope<S>& h) {
  Json j;
  j["dim"] = h.dim();
  j["backend"] = std::string(backend_name(scalar_traits<S>::backend));
  j["halfspaces"] = to_json(h.halfspaces());
  return j;
}

// ---------------------------------------------------------------------------
// Face maps

template <Scalar S>
Json to_json(const FlagPoints<S>& x) {
  Json j;
  j["dim"] = x.dim();
  j["backend"] = std::string(backend_name(scalar_traits<S>::backend));
  Json pts = Json::array();
  for (const auto& f : enumerate_faces(x.dim())) {
    Json e;
    e["sign"] = sign_to_json(f);
    e["x"] = to_json(x[f]);
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return j;
}

template <Scalar S>
Json alpha_to_json(const AlphaWeights<S>& w) {
  Json j;
  j["dim"] = w.dim();
  j["backend"] = std::string(backend_name(scalar_traits<S>::backend));
  Json a = Json::array();
  for (const auto& f : enumerate_faces(w.dim())) {
    Json e;
    e["sign"] = sign_to_json(f);
    e["alpha"] = to_json(w[f]);
    a.push_back(std::move(e));
  }
  j["alpha"] = std::move(a);
  return j;
}

namespace detail {

template <class T, class Read>
FaceMap<T> face_map_from_json(const Json& doc, const char* key, const std::string& where, Read read) {
  const auto h = read_header(doc, where, kMaxCubeDimension);
  if (!doc.contains(key) || !doc[key].is_array()) throw ValidationError(where + ": missing array \"" + key + "\"");
  FaceMap<T> out(h.dim, [](const CubeFace&) { return T{}; });
  std::set<int> seen;
  const Json& entries = doc[key];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = where + "." + key + "[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    if (!e.is_object() || !e.contains("sign")) throw ValidationError(at + ": expected an object with \"sign\"");
    CubeFace f(sign_from_json(e["sign"], h.dim, at + ".sign"));
    if (!seen.insert(f.code()).second) throw ValidationError(at + ": duplicate face");
    out[f] = read(e, h.dim, at);
  }
  if (seen.size() != face_count(h.dim))
    throw ValidationError(where + ": expected one entry per face (" + std::to_string(face_count(h.dim)) + "), got " +
                          std::to_string(seen.size()));
  return out;
}

}  // namespace detail

template <Scalar S>
FlagPoints<S> flag_points_from_json(const Json& doc, const std::string& where = "flag points") {
  return detail::face_map_from_json<Vector<S>>(doc, "points", where, [](const Json& e, int n, const std::string& at) {
    if (!e.contains("x")) throw ValidationError(at + ": missing \"x\"");
    return vector_from_json<S>(e["x"], n, at + ".x");
  });
}

template <Scalar S>
AlphaWeights<S> alpha_from_json(const Json& doc, const std::string& where = "alpha weights") {
  return detail::face_map_from_json<S>(doc, "alpha", where, [](const Json& e, int, const std::string& at) {
    if (!e.contains("alpha")) throw ValidationError(at + ": missing \"alpha\"");
    S a = scalar_from_json<S>(e["alpha"], at + ".alpha");
    if (sign(a) <= 0) throw ValidationError(at + ": alpha must be positive");
    return a;
  });
}

// ---------------------------------------------------------------------------
// Contact pairs

template <Scalar S>
Json to_json(const ContactPair<S>& p) {
  Json j;
  j["sign"] = sign_to_json(p.face);
  j["y"] = to_json(p.y);
  j["y_star"] = to_json(p.y_star);
  j["alpha"] = to_json(p.alpha);
  j["h"] = to_json(p.h);
  j["h_star"] = to_json(p.h_star);
  return j;
}

template <Scalar S>
ContactPair<S> contact_pair_from_json(const Json& j, int dim, const std::string& where = "contact pair") {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const char* k : {"sign", "y", "y_star", "alpha", "h", "h_star"})
    if (!j.contains(k)) throw ValidationError(where + ": missing \"" + std::string(k) + "\"");
  ContactPair<S> p;
  p.face = CubeFace(sign_from_json(j["sign"], dim, where + ".sign"));
  p.y = vector_from_json<S>(j["y"], dim, where + ".y");
  p.y_star = vector_from_json<S>(j["y_star"], dim, where + ".y_star");
  p.alpha = scalar_from_json<S>(j["alpha"], where + ".alpha");
  p.h = vector_from_json<S>(j["h"], dim, where + ".h");
  p.h_star = vector_from_json<S>(j["h_star"], dim, where + ".h_star");
  return p;
}

// ---------------------------------------------------------------------------
// Trial reports

namespace detail {

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

}  // namespace detail

template <Scalar S>
Json to_json(const TrialReport<S>& r, int dim) {
  Json j;
  j["trial"] = r.index;
  j["generator"] = std::string(generator_name(r.generator));
  j["input_depth"] = to_json(r.input_depth);
  j["delta"] = to_json(r.delta);
  j["volP"] = to_json(r.volP);
  j["volPp"] = to_json(r.volPp);
  j["volQ"] = to_json(r.volQ);
  j["volQp"] = to_json(r.volQp);
  j["PK"] = to_json(r.PK);
  j["PB"] = to_json(r.PB);
  j["mahler_excess"] = to_json(r.excess);
  j["gap_PQ"] = to_json(r.gap_PQ);
  j["gap_PpQp"] = to_json(r.gap_PpQp);
  j["chain_loss"] = to_json(r.chain_loss);
  j["chain_slack"] = r.chain_slack;
  j["cube_position_certified"] = r.touching_certified;
  j["P_in_K"] = r.P_in_K;
  j["Pp_in_Kstar"] = r.Pp_in_Kstar;
  j["contact_products_one"] = r.contact_products_one;
  j["contact_slope"] = r.contact_slope;
  j["dual_contact_slope"] = r.dual_contact_slope;
  const auto& d = r.dichotomy;
  j["dichotomy"] = std::string(dichotomy_name(d.outcome));
  j["c_probe"] = to_json(d.c_probe);
  j["witness_in_Kstar"] = d.witness_found && d.witness_in_polar;
  Json w;
  w["found"] = d.witness_found;
  if (d.witness_found) {
    w["face"] = sign_to_json(CubeFace::from_code(dim, d.witness_face_code));
    w["coordinate"] = d.witness_coordinate;
    w["point"] = to_json(d.witness);
    w["c_prime"] = to_json(d.c_prime);
    w["c_second"] = to_json(d.c_second);
    w["case_same_face"] = d.case_same_face;
    w["case_other_faces"] = d.case_other_faces;
    w["outside_Pp"] = d.witness_outside_Pp;
    w["c_prime_tight"] = d.c_prime_tight ? to_json(*d.c_prime_tight) : Json(nullptr);
    w["halfspace_certificate"] = d.halfspace_certificate;
  }
  j["witness"] = std::move(w);
  j["body_vertex_escapes"] = d.body_vertex_escapes;
  j["polar_vertex_escapes"] = d.polar_vertex_escapes;
  if (r.anomaly.empty()) {
    j["anomaly"] = nullptr;
  } else {
    j["anomaly"] = r.anomaly;
    if (!r.input_vertices.empty()) j["repro"] = vertices_to_json(dim, r.input_vertices);
  }
  return j;
}

inline std::string trial_csv_header() { return "trial,delta,volP,volPp,volQ,volQp,PK,excess,dichotomy"; }

template <Scalar S>
std::string trial_csv_row(const TrialReport<S>& r) {
  using detail::format_double;
  return std::to_string(r.index) + "," + format_double(to_double(r.delta)) + "," + format_double(to_double(r.volP)) +
         "," + format_double(to_double(r.volPp)) + "," + format_double(to_double(r.volQ)) + "," +
         format_double(to_double(r.volQp)) + "," + format_double(to_double(r.PK)) + "," +
         format_double(to_double(r.excess)) + "," + std::string(dichotomy_name(r.dichotomy.outcome));
}

inline Json to_json(const TrialAggregates& a) {
  Json j;
  j["trials"] = a.trials;
  j["outcomes"] = Json{{"body_escapes", a.body_escapes},
                       {"polar_escapes", a.polar_escapes},
                       {"neither", a.neither},
                       {"trivial", a.trivial}};
  j["anomalies"] = a.anomalies;
  j["C_gap"] = a.C_gap;
  j["C_chain"] = a.C_chain;
  j["C_contact"] = a.C_contact;
  j["C_prime_bound"] = a.C_prime_bound;
  j["C_prime_tight_max"] = a.C_prime_tight_max;
  j["min_excess"] = a.min_excess;
  j["excess_envelope"] = detail::optional_number(a.excess_envelope);
  if (a.excess_fit) {
    j["excess_fit"] = Json{{"slope", a.excess_fit->slope},
                           {"intercept", a.excess_fit->intercept},
                           {"slope_stderr", a.excess_fit->slope_stderr},
                           {"p_value", a.excess_fit->p_value},
                           {"samples", a.excess_fit->samples}};
  } else {
    j["excess_fit"] = nullptr;
  }
  Json first;
  for (int g = 0; g < kGeneratorCount; ++g)
    first[std::string(generator_name(static_cast<Generator>(g)))] = detail::optional_number(a.first_nonpositive_delta[g]);
  j["first_nonpositive_delta"] = std::move(first);
  return j;
}

}  // namespace mahler
