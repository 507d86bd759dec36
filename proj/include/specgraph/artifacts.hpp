#pragma once

// CSV and SVG artifact emission. All functions build complete file contents
// in memory and return strings, so a single writer can flush them; numbers
// are printed with 17 significant digits to make the CSV round-trippable.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "specgraph/curves.hpp"
#include "specgraph/oracle.hpp"
#include "specgraph/quantize.hpp"
#include "specgraph/stokes.hpp"

namespace specgraph {

namespace detail {

inline std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV.
// ---------------------------------------------------------------------------

// One row per Stokes-line sample. Reverse duplicates are skipped.
inline std::string csv_graph(const StokesGraph& g) {
  std::string out = "complex_id,line_id,re_z,im_z\n";
  for (std::size_t ci = 0; ci < g.complexes.size(); ++ci)
    for (int id : g.complexes[ci].line_ids) {
      const StokesLine& line = g.lines[id];
      if (line.duplicate_of >= 0) continue;
      for (Cx z : line.points)
        out += std::to_string(ci) + "," + std::to_string(id) + "," +
               detail::num(z.real()) + "," + detail::num(z.imag()) + "\n";
    }
  return out;
}

// One row per curve sample. label is the index of the curve in the list;
// essential is 1/0, -1 where undecided, and balanced curves are always 1.
inline std::string csv_curves(const std::vector<SpectralCurve>& curves) {
  std::string out = "kind,label,re_lambda,im_lambda,essential\n";
  for (std::size_t li = 0; li < curves.size(); ++li) {
    const SpectralCurve& c = curves[li];
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      int ess;
      if (c.kind == CurveKind::Balanced)
        ess = 1;
      else
        ess = c.essential.empty() ? -1 : int(c.essential[i]);
      out += std::string(to_string(c.kind)) + "," + std::to_string(li) + "," +
             detail::num(c.samples[i].real()) + "," +
             detail::num(c.samples[i].imag()) + "," + std::to_string(ess) +
             "\n";
    }
  }
  return out;
}

struct QuantizeBatch {
  int curve_id = 0;
  CurveKind kind = CurveKind::Balanced;
  std::vector<EigenvalueEstimate> estimates;
};

inline std::string csv_quantize(const std::vector<QuantizeBatch>& batches) {
  std::string out = "curve_id,kind,m,k,re_lambda0,im_lambda0,residual\n";
  for (const auto& batch : batches)
    for (const auto& e : batch.estimates)
      out += std::to_string(batch.curve_id) + "," +
             std::string(to_string(batch.kind)) + "," + std::to_string(e.m) +
             "," + detail::num(e.k) + "," + detail::num(e.lambda0.real()) +
             "," + detail::num(e.lambda0.imag()) + "," +
             detail::num(e.residual) + "\n";
  return out;
}

inline std::string csv_oracle(const std::vector<OracleEigenvalue>& eigs) {
  std::string out = "k,re_lambda,im_lambda,winding,residual\n";
  for (const auto& e : eigs)
    out += detail::num(e.k) + "," + detail::num(e.lambda.real()) + "," +
           detail::num(e.lambda.imag()) + "," +
           std::to_string(e.winding_index) + "," +
           detail::num(e.refine_residual) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// SVG.
// ---------------------------------------------------------------------------

// Fixed-viewport canvas over a mathematical rectangle, y axis pointing up.
class SvgCanvas {
 public:
  SvgCanvas(Cx lo, Cx hi, int width = 640) : lo_(lo), hi_(hi), w_(width) {
    double aspect = (hi.imag() - lo.imag()) / (hi.real() - lo.real());
    h_ = std::max(32, int(width * aspect + 0.5));
  }

  double px(double x) const {
    return (x - lo_.real()) / (hi_.real() - lo_.real()) * w_;
  }
  double py(double y) const {
    return h_ - (y - lo_.imag()) / (hi_.imag() - lo_.imag()) * h_;
  }

  void polyline(const std::vector<Cx>& pts, const std::string& color,
                double width = 1.2, bool dashed = false) {
    if (pts.size() < 2) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"" << width << "\"";
    if (dashed) body_ << " stroke-dasharray=\"4 3\"";
    body_ << " points=\"";
    for (Cx p : pts) body_ << fmt(px(p.real())) << "," << fmt(py(p.imag())) << " ";
    body_ << "\"/>\n";
  }

  void segment(Cx a, Cx b, const std::string& color, double width = 1.0,
               bool dashed = false) {
    polyline({a, b}, color, width, dashed);
  }

  void dot(Cx c, double r_px, const std::string& color) {
    body_ << "<circle cx=\"" << fmt(px(c.real())) << "\" cy=\""
          << fmt(py(c.imag())) << "\" r=\"" << r_px << "\" fill=\"" << color
          << "\"/>\n";
  }

  void ring(Cx c, double r_px, const std::string& color) {
    body_ << "<circle cx=\"" << fmt(px(c.real())) << "\" cy=\""
          << fmt(py(c.imag())) << "\" r=\"" << r_px
          << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
  }

  void axes(const std::string& color = "#cccccc") {
    if (lo_.real() < 0 && hi_.real() > 0)
      segment(Cx(0, lo_.imag()), Cx(0, hi_.imag()), color, 0.8);
    if (lo_.imag() < 0 && hi_.imag() > 0)
      segment(Cx(lo_.real(), 0), Cx(hi_.real(), 0), color, 0.8);
  }

  std::string finish() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_
       << "\" height=\"" << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  }

  Cx lo_, hi_;
  int w_, h_;
  std::ostringstream body_;
};

inline const char* curve_color(CurveKind k) {
  switch (k) {
    case CurveKind::Singular: return "#7b2d8b";
    case CurveKind::CriticalA: return "#1b7837";
    case CurveKind::CriticalB: return "#b35806";
    case CurveKind::Balanced: return "#d7191c";
  }
  return "#000000";
}

// Stokes graph in the z plane: lines per complex, turning points, and the
// sector asymptote rays (dashed) out to the escape radius.
inline std::string svg_graph(const StokesGraph& g) {
  Cx c = g.sectors.center;
  double r = g.r_esc > 0 ? 1.15 * g.r_esc : 1.0;
  SvgCanvas cv(c - Cx(r, r), c + Cx(r, r));
  cv.axes();
  for (double ang : g.sectors.angles)
    cv.segment(c, c + std::polar(g.r_esc > 0 ? g.r_esc : r, ang), "#999999",
               0.8, true);
  const char* palette[] = {"#2166ac", "#d7191c", "#1b7837",
                           "#b35806", "#7b2d8b", "#636363"};
  for (std::size_t ci = 0; ci < g.complexes.size(); ++ci)
    for (int id : g.complexes[ci].line_ids) {
      const StokesLine& line = g.lines[id];
      if (line.duplicate_of >= 0) continue;
      cv.polyline(line.points, palette[ci % 6]);
    }
  for (const auto& p : g.tps.points) cv.dot(p.z, 3.0, "#000000");
  return cv.finish();
}

// Curve families over the parameter rectangle; essential stretches solid,
// non-essential dashed. Optional point overlays: eigenvalues as filled dots,
// first-order estimates as rings.
inline std::string svg_curves(const std::vector<SpectralCurve>& curves, Cx lo,
                              Cx hi,
                              const std::vector<OracleEigenvalue>& eigs = {},
                              const std::vector<EigenvalueEstimate>& ests = {},
                              bool monochrome_T = false) {
  SvgCanvas cv(lo, hi);
  cv.axes();
  for (const auto& c : curves) {
    const char* color = monochrome_T ? "#d7191c" : curve_color(c.kind);
    bool plain = c.kind == CurveKind::Balanced || c.essential.empty();
    if (plain) {
      cv.polyline(c.samples, color);
      continue;
    }
    // Split into runs of equal essential flag so dashing follows the flag.
    std::size_t i = 0;
    while (i + 1 < c.samples.size()) {
      std::size_t j = i;
      while (j + 1 < c.samples.size() && c.essential[j + 1] == c.essential[i])
        ++j;
      std::vector<Cx> run(c.samples.begin() + i, c.samples.begin() + j + 1);
      if (run.size() >= 2)
        cv.polyline(run, color, 1.2, c.essential[i] != 1);
      if (j == i) break;
      i = j;
    }
  }
  for (const auto& e : ests) cv.ring(e.lambda0, 3.0, "#2166ac");
  for (const auto& e : eigs) cv.dot(e.lambda, 2.2, "#000000");
  return cv.finish();
}

// ---------------------------------------------------------------------------
// File output.
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace specgraph
