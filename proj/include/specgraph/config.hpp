#pragma once

// Run configuration: a JSON problem description covering the potential, the
// boundary points, the parameter rectangle, k values, tolerance overrides,
// and output locations. Parsing validates; emission is lossless, so
// parse_config(emit_config(cfg)) reproduces cfg exactly.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "specgraph/curves.hpp"
#include "specgraph/models.hpp"
#include "specgraph/oracle.hpp"
#include "specgraph/quantize.hpp"

namespace specgraph {

struct RunConfig {
  // coeffs[j][p] multiplies z^j lambda^p.
  std::vector<std::vector<Cx>> coeffs;
  BoundaryPoint a, b;
  Cx dom_lo{-1, -1}, dom_hi{1, 1};
  std::vector<double> k;

  // Tolerance overrides, defaulted when absent from the file.
  double eps_tp = 1e-10;     // turning-point separation
  double eps_line = 1e-10;   // Stokes-line ODE local error target
  double eps_curve = 1e-9;   // curve-tracing corrector residual
  double eps_quant = 1e-7;   // quantization residual acceptance
  double eps_orc = 1e-7;     // oracle residual acceptance
  int grid_n = 32;           // seeding grid for curve tracing
  int cell_n = 8;            // oracle sweep cells per side
  double r_esc = 0;          // Stokes escape radius; 0 = automatic
  double r_trunc = 0;        // infinite-endpoint truncation; 0 = automatic
  double disc_radius = 1e-2; // excluded discs around branch points

  // Optional oracle sweep rectangle; the parameter domain when absent.
  std::optional<std::pair<Cx, Cx>> region;

  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline Cx json_complex(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(where + ": expected a [re, im] pair");
  return Cx(v[0].get<double>(), v[1].get<double>());
}

inline nlohmann::json complex_json(Cx z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

inline BoundaryPoint json_boundary(const nlohmann::json& v,
                                   const std::string& where) {
  if (v.is_object()) {
    if (!v.contains("infinite") || !v["infinite"].is_number())
      throw ParseError(where + ": expected [re, im] or {\"infinite\": phi}");
    return BoundaryPoint::infinite(v["infinite"].get<double>());
  }
  return BoundaryPoint::at(json_complex(v, where));
}

inline nlohmann::json boundary_json(const BoundaryPoint& p) {
  if (p.finite) return complex_json(p.z);
  return nlohmann::json{{"infinite", p.phi}};
}

template <class T>
T json_field(const nlohmann::json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j[name].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + name + "': " + e.what());
  }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object");

  RunConfig cfg;

  if (!j.contains("potential") || !j["potential"].is_array())
    throw ParseError("field 'potential': expected an array of rows");
  for (std::size_t r = 0; r < j["potential"].size(); ++r) {
    const auto& row = j["potential"][r];
    std::string where = "potential[" + std::to_string(r) + "]";
    if (!row.is_array()) throw ParseError(where + ": expected an array");
    std::vector<Cx> out;
    for (std::size_t c = 0; c < row.size(); ++c)
      out.push_back(detail::json_complex(
          row[c], where + "[" + std::to_string(c) + "]"));
    cfg.coeffs.push_back(std::move(out));
  }
  if (cfg.coeffs.size() < 2)
    throw ValidationError(
        "potential: the degree in z must be at least 1 (need two or more "
        "coefficient rows)");

  if (!j.contains("a") || !j.contains("b"))
    throw ParseError("config: boundary points 'a' and 'b' are required");
  cfg.a = detail::json_boundary(j["a"], "a");
  cfg.b = detail::json_boundary(j["b"], "b");
  if (cfg.a.finite && cfg.b.finite && cfg.a.z == cfg.b.z)
    throw ValidationError("boundary points coincide");
  if (!cfg.a.finite && !cfg.b.finite && cfg.a.phi == cfg.b.phi)
    throw ValidationError("boundary rays coincide");

  if (!j.contains("domain") || !j["domain"].is_object())
    throw ParseError("field 'domain': expected {\"lo\": .., \"hi\": ..}");
  cfg.dom_lo = detail::json_complex(j["domain"]["lo"], "domain.lo");
  cfg.dom_hi = detail::json_complex(j["domain"]["hi"], "domain.hi");
  if (!(cfg.dom_lo.real() < cfg.dom_hi.real()) ||
      !(cfg.dom_lo.imag() < cfg.dom_hi.imag()))
    throw ValidationError("domain rectangle is empty");

  cfg.k = detail::json_field(j, "k", std::vector<double>{});
  for (double kv : cfg.k)
    if (!(kv > 0)) throw ValidationError("k values must be positive");

  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object())
      throw ParseError("field 'tolerances': expected an object");
    cfg.eps_tp = detail::json_field(t, "eps_tp", cfg.eps_tp);
    cfg.eps_line = detail::json_field(t, "eps_line", cfg.eps_line);
    cfg.eps_curve = detail::json_field(t, "eps_curve", cfg.eps_curve);
    cfg.eps_quant = detail::json_field(t, "eps_quant", cfg.eps_quant);
    cfg.eps_orc = detail::json_field(t, "eps_orc", cfg.eps_orc);
    cfg.grid_n = detail::json_field(t, "grid_n", cfg.grid_n);
    cfg.cell_n = detail::json_field(t, "cell_n", cfg.cell_n);
    cfg.r_esc = detail::json_field(t, "r_esc", cfg.r_esc);
    cfg.r_trunc = detail::json_field(t, "r_trunc", cfg.r_trunc);
    cfg.disc_radius = detail::json_field(t, "disc_radius", cfg.disc_radius);
    for (double e : {cfg.eps_tp, cfg.eps_line, cfg.eps_curve, cfg.eps_quant,
                     cfg.eps_orc, cfg.disc_radius})
      if (!(e > 0)) throw ValidationError("tolerances must be positive");
    if (cfg.grid_n < 2 || cfg.cell_n < 1)
      throw ValidationError("grid_n must be >= 2 and cell_n >= 1");
    if (cfg.r_esc < 0 || cfg.r_trunc < 0)
      throw ValidationError("radii must be nonnegative");
  }

  if (j.contains("region")) {
    const auto& r = j["region"];
    if (!r.is_object())
      throw ParseError("field 'region': expected {\"lo\": .., \"hi\": ..}");
    Cx lo = detail::json_complex(r["lo"], "region.lo");
    Cx hi = detail::json_complex(r["hi"], "region.hi");
    if (!(lo.real() < hi.real()) || !(lo.imag() < hi.imag()))
      throw ValidationError("region rectangle is empty");
    cfg.region = {lo, hi};
  }

  cfg.out_dir = detail::json_field(j, "out", cfg.out_dir);
  return cfg;
}

inline std::string emit_config(const RunConfig& cfg) {
  nlohmann::json j;
  nlohmann::json pot = nlohmann::json::array();
  for (const auto& row : cfg.coeffs) {
    nlohmann::json r = nlohmann::json::array();
    for (Cx c : row) r.push_back(detail::complex_json(c));
    pot.push_back(std::move(r));
  }
  j["potential"] = std::move(pot);
  j["a"] = detail::boundary_json(cfg.a);
  j["b"] = detail::boundary_json(cfg.b);
  j["domain"] = {{"lo", detail::complex_json(cfg.dom_lo)},
                 {"hi", detail::complex_json(cfg.dom_hi)}};
  j["k"] = cfg.k;
  j["tolerances"] = {
      {"eps_tp", cfg.eps_tp},       {"eps_line", cfg.eps_line},
      {"eps_curve", cfg.eps_curve}, {"eps_quant", cfg.eps_quant},
      {"eps_orc", cfg.eps_orc},     {"grid_n", cfg.grid_n},
      {"cell_n", cfg.cell_n},       {"r_esc", cfg.r_esc},
      {"r_trunc", cfg.r_trunc},     {"disc_radius", cfg.disc_radius}};
  if (cfg.region)
    j["region"] = {{"lo", detail::complex_json(cfg.region->first)},
                   {"hi", detail::complex_json(cfg.region->second)}};
  j["out"] = cfg.out_dir;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Working objects assembled from a configuration.
// ---------------------------------------------------------------------------

inline BivariatePotential config_potential(const RunConfig& cfg) {
  BivariatePotential pot;
  pot.coeffs = cfg.coeffs;
  return pot;
}

inline ParameterDomain config_domain(const RunConfig& cfg,
                                     const BivariatePotential& pot) {
  return models::guarded_domain(pot, cfg.dom_lo, cfg.dom_hi, cfg.disc_radius);
}

inline TraceOptions config_trace(const RunConfig& cfg) {
  TraceOptions t;
  t.r_esc = cfg.r_esc;
  t.rk_tol = cfg.eps_line;
  return t;
}

inline CurveOptions config_curves(const RunConfig& cfg) {
  CurveOptions c;
  c.grid_n = cfg.grid_n;
  c.trace.eps_curve = cfg.eps_curve;
  c.eps_tp = cfg.eps_tp;
  c.graph = config_trace(cfg);
  return c;
}

inline QuantizeOptions config_quantize(const RunConfig& cfg) {
  QuantizeOptions q;
  q.eps_quant = cfg.eps_quant;
  q.graph = config_trace(cfg);
  return q;
}

inline OracleOptions config_oracle(const RunConfig& cfg) {
  OracleOptions o;
  o.eps_orc = cfg.eps_orc;
  o.eps_tp = cfg.eps_tp;
  return o;
}

}  // namespace specgraph
