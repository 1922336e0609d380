#include "fsat/figures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "fsat/error.hpp"

namespace fsat {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;
  bool dashed = false;
  std::string color;
};

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;
  std::string label;

  double norm(double v) const {
    return log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
  }
  bool admits(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (int e = static_cast<int>(std::floor(std::log10(lo))); e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) t.push_back(v);
      }
      return t;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
      if (f * mag >= raw) {
        step = f * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  }
};

std::string fmt(double v, int precision = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

void fit_range(Axis& a, const std::vector<Series>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!a.admits(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) {
    lo = a.log ? 0.1 : 0.0;
    hi = 1.0;
  }
  if (a.log) {
    if (hi <= lo) hi = lo * 10.0;
    const double pad = 0.05 * (std::log10(hi) - std::log10(lo));
    a.lo = std::pow(10.0, std::log10(lo) - pad);
    a.hi = std::pow(10.0, std::log10(hi) + pad);
  } else {
    if (hi <= lo) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render(const std::string& title, Axis x, Axis y, std::vector<Series> series) {
  constexpr double W = 640, H = 440, L = 80, R = 20, T = 40, B = 60;
  fit_range(x, series, true);
  fit_range(y, series, false);
  const auto px = [&](double v) { return L + x.norm(v) * (W - L - R); };
  const auto py = [&](double v) { return H - B - y.norm(v) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : x.ticks()) {
    os << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << H - B << "\" x2=\"" << fmt(px(t)) << "\" y2=\"" << H - B + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(px(t)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : y.ticks()) {
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << L << "\" y2=\"" << fmt(py(t))
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << L - 8 << "\" y=\"" << fmt(py(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << escape(x.label) << "</text>\n";
  os << "<text transform=\"translate(20," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(y.label) << "</text>\n";

  os << "<g clip-path=\"url(#plot)\">\n";
  os << "<clipPath id=\"plot\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\"/></clipPath>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    auto& s = series[i];
    if (s.color.empty()) s.color = kPalette[i % kPalette.size()];
    if (s.markers) {
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (!x.admits(s.x[k]) || !y.admits(s.y[k])) continue;
        os << "<circle cx=\"" << fmt(px(s.x[k])) << "\" cy=\"" << fmt(py(s.y[k])) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
      bool first = true;
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (!x.admits(s.x[k]) || !y.admits(s.y[k])) continue;
        os << (first ? "" : " ") << fmt(px(s.x[k])) << ',' << fmt(py(s.y[k]));
        first = false;
      }
      os << "\"/>\n";
    }
  }
  os << "</g>\n";

  double ly = T + 16;
  for (const auto& s : series) {
    if (s.label.empty()) continue;
    const double lx = W - R - 170;
    if (s.markers) {
      os << "<circle cx=\"" << lx + 10 << "\" cy=\"" << fmt(ly - 4) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    } else {
      os << "<line x1=\"" << lx << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << lx + 20 << "\" y2=\"" << fmt(ly - 4)
         << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    }
    os << "<text x=\"" << lx + 26 << "\" y=\"" << fmt(ly) << "\">" << escape(s.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const fs::path& path, const std::string& text, FigureReport& report) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  report.written.push_back(path);
}

std::string delta_label(double d) {
  std::ostringstream os;
  os << "delta=" << std::setprecision(4) << d;
  return os.str();
}

// At most `limit` evenly spaced artifacts.
std::vector<const CellArtifacts*> pick(const std::vector<CellArtifacts>& all, std::size_t limit) {
  std::vector<const CellArtifacts*> out;
  if (all.size() <= limit) {
    for (const auto& a : all) out.push_back(&a);
    return out;
  }
  for (std::size_t i = 0; i < limit; ++i) out.push_back(&all[i * (all.size() - 1) / (limit - 1)]);
  return out;
}

const FitResult* find_fit(const ExperimentResult& r, const std::string& name) {
  for (const auto& f : r.fits) {
    if (f.name == name) return &f.fit;
  }
  return nullptr;
}

}  // namespace

FigureReport emit_figures(const ExperimentResult& r, const fs::path& out_dir) {
  const SaturationCurve& c = r.mean_curve;
  if (c.deltas.empty()) throw Error(ErrorKind::SemanticError, "figures: the saturation curve is empty");
  FigureReport report;
  fs::create_directories(out_dir);
  const std::string tag = r.ensemble + ", N=" + std::to_string(r.dim);

  {
    std::vector<Series> s;
    s.push_back({"F_inf (mean over seeds)", c.deltas, c.f_inf, true, false, ""});
    const FitResult* pl = find_fit(r, "power_law");
    if (c.deltas.size() < 2) {
      report.notes.push_back("saturation: single delta, no fit line drawn");
    } else if (pl && r.lambda_sq > 0.0) {
      const double constant = pl->params.at("C_pinned");
      Series line{"C/(delta^2 lambda^2 N), C=" + tick_label(constant), {}, {}, false, false, ""};
      const double lo = std::log(c.deltas.front()), hi = std::log(c.deltas.back());
      for (int k = 0; k <= 64; ++k) {
        const double d = std::exp(lo + (hi - lo) * k / 64.0);
        line.x.push_back(d);
        line.y.push_back(constant / (d * d * r.lambda_sq * static_cast<double>(r.dim)));
      }
      s.push_back(std::move(line));
    }
    if (r.beta == 1 || r.beta == 2) {
      const double floor = strong_perturbation_floor(r.beta, r.dim);
      s.push_back({"(4-beta)/N", {c.deltas.front(), c.deltas.back()}, {floor, floor}, false, true, "#555555"});
    }
    write_file(out_dir / "saturation.svg",
               render("Fidelity saturation, " + tag, {true, 0, 1, "delta"}, {true, 0, 1, "F_inf"}, std::move(s)),
               report);
  }

  if (r.artifacts.empty()) {
    report.notes.push_back("no decay or LDOS tables; decay.svg and ldos.svg skipped");
    return report;
  }

  {
    std::vector<Series> s;
    for (const CellArtifacts* a : pick(r.artifacts, 8)) {
      Series line{delta_label(a->delta), {}, {}, false, false, ""};
      for (std::size_t n = 0; n < a->series.values.size(); ++n) {
        const double x = a->delta * a->delta * static_cast<double>(n);
        if (r.lambda_sq > 0.0 && x * r.lambda_sq > 12.0) break;  // well past the decay
        line.x.push_back(x);
        line.y.push_back(a->series.values[n]);
      }
      s.push_back(std::move(line));
    }
    write_file(out_dir / "decay.svg",
               render("Eigenstate-averaged fidelity decay, " + tag, {false, 0, 1, "delta^2 n"}, {true, 0, 1, "F(n)"},
                      std::move(s)),
               report);
  }

  {
    std::vector<Series> s;
    std::size_t colour = 0;
    for (const CellArtifacts* a : pick(r.artifacts, 4)) {
      if (a->delta <= 0.0) continue;
      const std::string col = kPalette[colour++ % kPalette.size()];
      const double w = a->ldos.bin_width();
      Series pts{delta_label(a->delta), a->ldos.bin_centers(), {}, true, false, col};
      for (double m : a->ldos.weights) pts.y.push_back(m / w);
      s.push_back(std::move(pts));
      if (a->ldos.fitted_width) {
        Series fit{"", {}, {}, false, false, col};
        for (std::size_t k = 0; k + 1 < a->ldos.bin_edges.size(); ++k) {
          const double lo = a->ldos.bin_edges[k], hi = a->ldos.bin_edges[k + 1];
          fit.x.push_back(0.5 * (lo + hi));
          fit.y.push_back(wrapped_lorentzian_mass(*a->ldos.fitted_width, lo, hi) / w);
        }
        s.push_back(std::move(fit));
      }
    }
    if (s.empty()) {
      report.notes.push_back("ldos: no perturbed cells");
    } else {
      write_file(out_dir / "ldos.svg",
                 render("LDOS with Lorentzian fits, " + tag, {false, 0, 1, "phi' - phi"}, {true, 0, 1, "density"},
                        std::move(s)),
                 report);
    }
  }
  return report;
}

}  // namespace fsat
