#pragma once

// JSON documents for polynomials, weights, reports, certificates and grid
// functions. Doubles are written with round-trip precision; +infinity is
// written as the string "inf".

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "apsolve/errors.hpp"
#include "apsolve/poly.hpp"
#include "apsolve/quadrature.hpp"
#include "apsolve/shift.hpp"
#include "apsolve/torus.hpp"
#include "apsolve/weights.hpp"

namespace apsolve {

using Json = nlohmann::json;

namespace io {

inline Json number_or_inf(double v) {
  if (v == kInfinity) return "inf";
  return v;
}

inline double read_number_or_inf(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInfinity;
  if (!j.is_number()) throw ParseError("expected a number or \"inf\"");
  return j.get<double>();
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field \"") + key + "\": " + e.what());
  }
}

// -- Polynomial ---------------------------------------------------------------

inline Json to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [alpha, c] : p.terms()) {
    terms.push_back({{"alpha", alpha.exponents()}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"dim", p.dimension()}, {"terms", terms}};
}

inline Polynomial polynomial_from_json(const Json& j) {
  const auto dim = field<std::size_t>(j, "dim");
  if (dim == 0) throw ParseError("polynomial dimension must be positive");
  Polynomial p(dim);
  const Json& terms = j.contains("terms") ? j.at("terms") : Json::array();
  if (!terms.is_array()) throw ParseError("\"terms\" must be an array");
  for (const auto& t : terms) {
    auto alpha = field<std::vector<int>>(t, "alpha");
    if (alpha.size() != dim) throw ParseError("multi-index length does not match dim");
    for (int a : alpha) {
      if (a < 0) throw ParseError("negative exponent in multi-index");
    }
    const double re = t.contains("re") ? field<double>(t, "re") : 0.0;
    const double im = t.contains("im") ? field<double>(t, "im") : 0.0;
    p.add_term(MultiIndex(std::move(alpha)), Complex(re, im));
  }
  return p;
}

// -- Weight -------------------------------------------------------------------

inline Json to_json(const Weight& w) {
  struct Visitor {
    std::size_t dim;
    Json operator()(const Weight::PolynomialModulus& f) const {
      return {{"family", "polymod"}, {"poly", to_json(f.poly)}, {"exponent", f.exponent}};
    }
    Json operator()(const Weight::Power& f) const { return {{"family", "power"}, {"dim", dim}, {"alpha", f.alpha}}; }
    Json operator()(const Weight::Constant& f) const { return {{"family", "constant"}, {"dim", dim}, {"c", f.c}}; }
    Json operator()(const Weight::Product& f) const {
      Json factors = Json::array();
      for (const auto& g : f.factors) factors.push_back(to_json(g));
      return {{"family", "product"}, {"factors", factors}};
    }
  };
  return std::visit(Visitor{w.dimension()}, w.family());
}

inline Weight weight_from_json(const Json& j) {
  const auto family = field<std::string>(j, "family");
  try {
    if (family == "power") {
      return Weight::power(j.contains("dim") ? field<std::size_t>(j, "dim") : 1, field<double>(j, "alpha"));
    }
    if (family == "constant") {
      return Weight::constant(j.contains("dim") ? field<std::size_t>(j, "dim") : 1, field<double>(j, "c"));
    }
    if (family == "polymod") {
      return Weight::polynomial_modulus(polynomial_from_json(j.at("poly")),
                                        j.contains("exponent") ? field<double>(j, "exponent") : 1.0);
    }
    if (family == "product") {
      std::vector<Weight> factors;
      for (const auto& f : field<Json>(j, "factors")) factors.push_back(weight_from_json(f));
      return Weight::product(std::move(factors));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid weight: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid weight: ") + e.what());
  }
  throw ParseError("unknown weight family \"" + family + "\"");
}

// -- Cubes and reports ----------------------------------------------------------

inline Json to_json(const Cube& c) { return {{"center", c.center()}, {"halfwidth", c.halfwidth()}}; }

inline Json to_json(const QuadratureSpec& q) { return {{"nodes_per_axis", q.nodes_per_axis}, {"rule", "midpoint"}}; }

inline Json to_json(const ApReport& r) {
  return {{"p", r.p},
          {"sup_quotient", number_or_inf(r.sup_quotient)},
          {"worst_cube", r.worst_cube ? to_json(*r.worst_cube) : Json(nullptr)},
          {"cubes_examined", r.cubes_examined},
          {"unstable_cubes", r.unstable_cubes},
          {"quadrature", to_json(r.quadrature)}};
}

inline ApReport ap_report_from_json(const Json& j) {
  ApReport r;
  r.p = field<double>(j, "p");
  r.sup_quotient = read_number_or_inf(j.at("sup_quotient"));
  if (j.contains("worst_cube") && !j.at("worst_cube").is_null()) {
    const Json& c = j.at("worst_cube");
    r.worst_cube = Cube(field<Point>(c, "center"), field<double>(c, "halfwidth"));
  }
  r.cubes_examined = field<std::size_t>(j, "cubes_examined");
  r.unstable_cubes = j.contains("unstable_cubes") ? field<std::size_t>(j, "unstable_cubes") : 0;
  if (j.contains("quadrature")) r.quadrature.nodes_per_axis = field<int>(j.at("quadrature"), "nodes_per_axis");
  return r;
}

// -- Shift certificate ----------------------------------------------------------

inline Json to_json(const ShiftCertificate& c) {
  return {{"poly", to_json(c.poly)},
          {"xi0", c.xi0},
          {"p", c.p},
          {"pprime", c.pprime},
          {"M", c.window.M},
          {"C9", number_or_inf(c.C9)},
          {"argmax", c.argmax},
          {"lattice_sum", number_or_inf(c.lattice_sum)},
          {"min_divisor", c.min_divisor},
          {"recheck_M", c.recheck_M},
          {"recheck_C9", number_or_inf(c.recheck_C9)},
          {"window_limited", c.window_limited}};
}

inline ShiftCertificate certificate_from_json(const Json& j) {
  ShiftCertificate c;
  try {
    c.poly = polynomial_from_json(field<Json>(j, "poly"));
    c.xi0 = field<Point>(j, "xi0");
    c.p = field<double>(j, "p");
    c.pprime = j.contains("pprime") ? field<double>(j, "pprime") : conjugate_exponent(c.p);
    c.window = LatticeWindow(field<int>(j, "M"));
    c.C9 = read_number_or_inf(j.at("C9"));
    if (j.contains("argmax")) c.argmax = field<std::vector<long>>(j, "argmax");
    c.lattice_sum = j.contains("lattice_sum") ? read_number_or_inf(j.at("lattice_sum")) : kInfinity;
    c.min_divisor = j.contains("min_divisor") ? field<double>(j, "min_divisor") : 0.0;
    c.recheck_M = j.contains("recheck_M") ? field<int>(j, "recheck_M") : 0;
    c.recheck_C9 = j.contains("recheck_C9") ? read_number_or_inf(j.at("recheck_C9")) : kInfinity;
    c.window_limited = j.contains("window_limited") ? field<bool>(j, "window_limited") : false;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid certificate: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid certificate: ") + e.what());
  }
  if (c.xi0.size() != c.poly.dimension()) throw ParseError("certificate xi0 length does not match polynomial");
  return c;
}

// -- Grid functions -------------------------------------------------------------

/// Header {dim, sizes, domain_tag} plus "data": interleaved re, im pairs in
/// row-major order.
inline Json to_json(const GridFunction& g) {
  Json data = Json::array();
  for (const auto& v : g.values()) {
    data.push_back(v.real());
    data.push_back(v.imag());
  }
  return {{"dim", g.dimension()}, {"sizes", g.sizes()}, {"domain_tag", to_string(g.domain())}, {"data", data}};
}

inline GridFunction grid_from_json(const Json& j) {
  const auto dim = field<std::size_t>(j, "dim");
  auto sizes = field<std::vector<std::size_t>>(j, "sizes");
  if (sizes.size() != dim) throw ParseError("grid sizes length does not match dim");
  const auto tag = field<std::string>(j, "domain_tag");
  Domain domain;
  if (tag == "physical") {
    domain = Domain::physical;
  } else if (tag == "frequency") {
    domain = Domain::frequency;
  } else {
    throw ParseError("unknown domain_tag \"" + tag + "\"");
  }
  const auto data = field<std::vector<double>>(j, "data");
  if (data.size() % 2 != 0) throw ParseError("grid data must hold re/im pairs");
  std::vector<Complex> values(data.size() / 2);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = Complex(data[2 * i], data[2 * i + 1]);
  try {
    return GridFunction(std::move(sizes), std::move(values), domain);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid grid: ") + e.what());
  }
}

// -- Solve report -------------------------------------------------------------

inline Json to_json(const SolveReport& r) {
  return {{"certificate", to_json(r.certificate)},
          {"rho", r.rho},
          {"s", r.loss},
          {"norm_u_rho", r.norm_u_rho},
          {"norm_f_rho_plus_s", r.norm_f_rho_plus_s},
          {"apriori_constant", r.apriori_constant},
          {"ratio", r.ratio},
          {"modes_checked", r.modes_checked},
          {"modewise_violations", r.modewise_violations},
          {"roundtrip_error", r.roundtrip_error},
          {"verdict", r.pass ? "PASS" : "FAIL"}};
}

// -- Files ----------------------------------------------------------------------

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace io
}  // namespace apsolve
