#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "holocheck/continuation.hpp"
#include "holocheck/critical.hpp"
#include "holocheck/fiber.hpp"

namespace holocheck {

// Minimal SVG canvas in world coordinates with y pointing up; bounds grow as
// shapes are added and the viewBox is fitted on save.
class SvgCanvas {
 public:
  void polyline(const std::vector<cplx>& pts, const std::string& color, double width = 0.01,
                bool closed = false) {
    if (pts.size() < 2) return;
    std::string d = "M";
    for (const cplx& p : pts) {
      d += " " + fmt(p.real()) + " " + fmt(-p.imag());
      grow(p);
    }
    if (closed) d += " Z";
    body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             fmt(width) + "\"/>\n";
  }

  void circle(cplx center, double radius, const std::string& color, double width = 0.01) {
    grow(center + cplx(radius, radius));
    grow(center - cplx(radius, radius));
    body_ += "<circle cx=\"" + fmt(center.real()) + "\" cy=\"" + fmt(-center.imag()) +
             "\" r=\"" + fmt(radius) + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"" + fmt(width) + "\"/>\n";
  }

  void dot(cplx p, double radius, const std::string& color) {
    grow(p + cplx(radius, radius));
    grow(p - cplx(radius, radius));
    body_ += "<circle cx=\"" + fmt(p.real()) + "\" cy=\"" + fmt(-p.imag()) + "\" r=\"" +
             fmt(radius) + "\" fill=\"" + color + "\"/>\n";
  }

  void text(cplx p, const std::string& s, double size, const std::string& color = "#333") {
    grow(p);
    body_ += "<text x=\"" + fmt(p.real()) + "\" y=\"" + fmt(-p.imag()) + "\" font-size=\"" +
             fmt(size) + "\" fill=\"" + color + "\">" + escape(s) + "</text>\n";
  }

  void save(const std::string& path, int pixel_width = 900) const {
    const double w = std::max(xhi_ - xlo_, 1e-9), h = std::max(yhi_ - ylo_, 1e-9);
    const double pad = 0.05 * std::max(w, h);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
        << "viewBox=\"" << fmt(xlo_ - pad) << " " << fmt(ylo_ - pad) << " " << fmt(w + 2 * pad)
        << " " << fmt(h + 2 * pad) << "\" width=\"" << pixel_width << "\">\n"
        << body_ << "</svg>\n";
  }

 private:
  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
  }
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '&') out += "&amp;";
      else if (c == '<') out += "&lt;";
      else if (c == '>') out += "&gt;";
      else out += c;
    }
    return out;
  }
  void grow(cplx p) {
    xlo_ = std::min(xlo_, p.real());
    xhi_ = std::max(xhi_, p.real());
    ylo_ = std::min(ylo_, -p.imag());
    yhi_ = std::max(yhi_, -p.imag());
  }

  std::string body_;
  double xlo_ = 1e300, xhi_ = -1e300, ylo_ = 1e300, yhi_ = -1e300;
};

inline const char* loop_color(std::size_t index) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  return palette[index % 8];
}

// Loops of the fiber curve colored by interval index; infinite samples are
// dropped from the drawing.
inline void write_fiber_svg(const std::string& path, const FiberCurve& fc) {
  SvgCanvas svg;
  for (std::size_t i = 0; i < fc.loops.size(); ++i) {
    std::vector<cplx> pts;
    for (const auto& s : fc.loops[i].samples)
      if (!s.is_infinity() && std::abs(s.value()) < 1e6) pts.push_back(s.value());
    svg.polyline(pts, loop_color(i), 0.008 * std::max(1.0, fc.loops[i].euclid_diameter()));
  }
  svg.dot(std::conj(fc.z), 0.02, "#000");
  svg.save(path);
}

inline void write_fiber_csv(const std::string& path, const FiberCurve& fc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,w_re,w_im,chart\n";
  out.precision(17);
  for (const Loop& lp : fc.loops)
    for (std::size_t i = 0; i < lp.samples.size(); ++i) {
      if (lp.samples[i].is_infinity()) {
        out << lp.params[i] << ",,,infinity\n";
      } else {
        const cplx w = lp.samples[i].value();
        out << lp.params[i] << "," << w.real() << "," << w.imag() << ",finite\n";
      }
    }
}

inline void write_critical_csv(const std::string& path, const CircleFamily& family,
                               const CriticalSet& crit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "branch,t,p_re,p_im,rho,case\n";
  out.precision(17);
  for (const SlidingBranch* br : {&crit.plus, &crit.minus}) {
    for (const auto& s : br->samples) {
      const char* label = "singular";
      try {
        label = to_string(tangency_case(family, br->sign, s.t).label);
      } catch (const std::exception&) {
      }
      out << (br->sign > 0 ? "+" : "-") << "," << s.t << "," << s.p.real() << "," << s.p.imag()
          << "," << (std::isfinite(s.rho) ? std::to_string(s.rho) : "inf") << "," << label
          << "\n";
    }
  }
}

// Critical curves over the circle family.
inline void write_critical_svg(const std::string& path, const CircleFamily& family,
                               const CriticalSet& crit) {
  SvgCanvas svg;
  const int n = 60;
  for (int i = 0; i <= n; ++i) {
    const double t = family.t_min() + family.span() * double(i) / double(n);
    const FamilyJet j = family.jet(t, 0);
    svg.circle(j.c0, j.r0, "#cccccc", 0.004);
  }
  for (const SlidingBranch* br : {&crit.plus, &crit.minus}) {
    std::vector<cplx> pts;
    for (const auto& s : br->samples) pts.push_back(s.p);
    svg.polyline(pts, br->sign > 0 ? "#d62728" : "#1f77b4", 0.012);
  }
  std::vector<cplx> centers;
  const int nc = 256;
  for (int i = 0; i <= nc; ++i)
    centers.push_back(family.center(family.t_min() + family.span() * double(i) / double(nc)));
  svg.polyline(centers, "#2ca02c", 0.012);
  svg.save(path);
}

// Filmstrip of loop evolution: a row of sub-plots, one per sampled station.
inline void write_continuation_svg(const std::string& path, const ContinuationTrace& trace,
                                   int max_frames = 12) {
  SvgCanvas svg;
  const int count = int(trace.stations.size());
  if (count == 0) throw std::runtime_error("continuation svg: empty trace");
  const int frames = std::min(max_frames, count);
  double cell = 0.0;
  for (const Station& st : trace.stations)
    for (const StationLoop& sl : st.loops)
      cell = std::max(cell, sl.geometry.euclid_diameter());
  if (cell <= 0.0 || !std::isfinite(cell)) cell = 1.0;
  cell *= 1.4;
  for (int fidx = 0; fidx < frames; ++fidx) {
    const Station& st = trace.stations[std::size_t(fidx) * (count - 1) / std::max(1, frames - 1)];
    const cplx offset = cplx(fidx * cell, 0.0) - std::conj(st.z);
    for (std::size_t li = 0; li < st.loops.size(); ++li) {
      std::vector<cplx> pts;
      for (const auto& s : st.loops[li].geometry.samples)
        if (!s.is_infinity() && std::abs(s.value() - std::conj(st.z)) < 0.7 * cell)
          pts.push_back(s.value() + offset);
      svg.polyline(pts, loop_color(std::size_t(st.loops[li].global_id)), cell * 0.006);
    }
    svg.text(cplx(fidx * cell - 0.45 * cell, 0.62 * cell),
             "z=(" + std::to_string(st.z.real()).substr(0, 6) + "," +
                 std::to_string(st.z.imag()).substr(0, 6) + ")",
             cell * 0.07);
  }
  svg.save(path, 1400);
}

}  // namespace holocheck
