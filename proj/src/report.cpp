#include "slicenn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

namespace slicenn {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string status_of(const RequiredSnr& r) {
  switch (r.status) {
    case RequiredSnr::Status::reached: return "reached";
    case RequiredSnr::Status::no_reach: return "no_reach";
    case RequiredSnr::Status::below_grid: return "below_grid";
  }
  return "?";
}

// Minimal SVG line chart.
class Chart {
 public:
  Chart(std::string title, std::string xlabel, std::string ylabel, bool log_y)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), log_y_(log_y) {}

  void add(const std::string& name, std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    lines_.push_back({name, std::move(pts)});
  }
  void mark(double x, const std::string& name) { marks_.push_back({x, name}); }
  void hline(double y, const std::string& label) { hlines_.push_back({y, label}); }

  void write(std::ostream& os) const {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto see = [&](double x, double y) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      if (std::isfinite(y)) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    };
    for (const auto& l : lines_)
      for (const auto& [x, y] : l.second) see(x, ty(y));
    for (const auto& m : marks_) see(m.first, NAN);
    for (const auto& h : hlines_) see(x0 < 1e300 ? x0 : 0.0, ty(h.first));
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x0 == x1) x0 -= 1, x1 += 1;
    if (y0 == y1) y0 -= 1, y1 += 1;
    if (log_y_) y0 = std::floor(y0), y1 = std::ceil(y1);
    const double W = 720, H = 480, L = 80, R = 180, T = 40, B = 60;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};
    char buf[256];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">", (L + W - R) / 2);
    os << buf << escape(title_) << "</text>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                  W - L - R, H - T - B);
    os << buf;
    for (int i = 0; i <= 5; ++i) {
      const double x = x0 + (x1 - x0) * i / 5.0;
      std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%s</text>\n", px(x), H - B + 16,
                    num(std::round(x * 100) / 100).c_str());
      os << buf;
    }
    const int ny = log_y_ ? static_cast<int>(y1 - y0) : 5;
    for (int i = 0; i <= ny; ++i) {
      const double y = y0 + (y1 - y0) * i / std::max(ny, 1);
      const std::string lab = log_y_ ? "1e" + num(y) : num(std::round(y * 100) / 100);
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%g\" x2=\"%g\" y1=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/><text x=\"%g\" y=\"%.2f\" "
                    "text-anchor=\"end\">%s</text>\n",
                    L, W - R, py(y), py(y), L - 6, py(y) + 4, lab.c_str());
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">", (L + W - R) / 2, H - 18);
    os << buf << escape(xlabel_) << "</text>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"18\" y=\"%g\" text-anchor=\"middle\" transform=\"rotate(-90 18 %g)\">",
                  (T + H - B) / 2, (T + H - B) / 2);
    os << buf << escape(ylabel_) << "</text>\n";
    for (const auto& h : hlines_) {
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%g\" x2=\"%g\" y1=\"%.2f\" y2=\"%.2f\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n", L,
                    W - R, py(ty(h.first)), py(ty(h.first)));
      os << buf;
    }
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const char* c = colors[i % 10];
      std::string path;
      for (const auto& [x, y] : lines_[i].second) {
        if (!std::isfinite(ty(y))) continue;
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", path.empty() ? "" : " ", px(x), py(ty(y)));
        path += buf;
      }
      if (!path.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"" << path << "\"/>\n";
        for (const auto& [x, y] : lines_[i].second) {
          if (!std::isfinite(ty(y))) continue;
          std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(x), py(ty(y)), c);
          os << buf;
        }
      }
      for (const auto& m : marks_) {
        if (m.second != lines_[i].first) continue;
        std::snprintf(buf, sizeof buf,
                      "<path d=\"M%.2f %.2f l8 8 m0 -8 l-8 8\" transform=\"translate(-4 -4)\" stroke=\"%s\" "
                      "stroke-width=\"2\" class=\"no-reach\"/>\n",
                      px(m.first), T + 6.0, c);
        os << buf;
      }
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%g\" x2=\"%g\" y1=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/><text x=\"%g\" "
                    "y=\"%g\">",
                    W - R + 10, W - R + 30, T + 10 + 18 * i, T + 10 + 18 * i, c, W - R + 36, T + 14 + 18 * i);
      os << buf << escape(lines_[i].first) << "</text>\n";
    }
    if (!marks_.empty()) {
      std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\">x = no reach</text>\n", W - R + 10,
                    T + 24 + 18.0 * lines_.size());
      os << buf;
    }
    os << "</svg>\n";
  }

 private:
  double ty(double y) const { return log_y_ ? (y > 0 ? std::log10(y) : NAN) : y; }

  static std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  }

  std::string title_, xlabel_, ylabel_;
  bool log_y_;
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> lines_;
  std::vector<std::pair<double, std::string>> marks_;
  std::vector<std::pair<double, std::string>> hlines_;
};

double plotted_ber(const SweepRecord& r) { return r.errors == 0 ? 0.5 / static_cast<double>(r.bits) : r.ber; }

}  // namespace

void write_results_csv(std::ostream& os, const SweepResult& r) {
  for (std::size_t i = 0; i < kResultColumns.size(); ++i) os << (i ? "," : "") << kResultColumns[i];
  os << '\n';
  for (const auto& x : r.records) {
    os << num(x.distance_km) << ',' << num(x.snr_db) << ',' << csv_field(x.equalizer) << ',' << x.framing << ','
       << num(x.ber) << ',' << x.errors << ',' << x.bits << ',' << x.cc_per_symbol << ',' << x.budget << ','
       << x.memory << ',' << x.n_hidden << ',' << num(x.train_loss) << ',' << x.status << '\n';
  }
}

void write_penalty_csv(std::ostream& os, const SweepResult& r) {
  os << "distance_km,equalizer,required_snr_db,penalty_db,status\n";
  for (const auto& p : r.penalties) {
    os << num(p.distance_km) << ',' << csv_field(p.equalizer) << ','
       << (p.required.reached() ? num(p.required.snr_db) : "") << ',' << (p.penalty_db ? num(*p.penalty_db) : "") << ','
       << status_of(p.required) << '\n';
  }
}

void write_timing_csv(std::ostream& os, const SweepResult& r) {
  os << "distance_km,snr_db,equalizer,budget,wall_time_s\n";
  for (const auto& x : r.records)
    os << num(x.distance_km) << ',' << num(x.snr_db) << ',' << csv_field(x.equalizer) << ',' << x.budget << ','
       << num(x.wall_time_s) << '\n';
}

void write_waterfall_svg(std::ostream& os, const SweepResult& r) {
  Chart c("BER vs SNR", "SNR [dB]", "BER", true);
  std::map<std::string, std::vector<std::pair<double, double>>> lines;
  for (const auto& x : r.records) {
    if (!x.ok() || x.bits == 0 || !std::isfinite(x.snr_db)) continue;
    lines[x.equalizer + " @" + num(x.distance_km) + " km"].push_back({x.snr_db, plotted_ber(x)});
  }
  for (auto& [k, v] : lines) c.add(k, std::move(v));
  c.hline(kKp4Threshold, "KP4");
  c.write(os);
}

void write_penalty_svg(std::ostream& os, const SweepResult& r) {
  Chart c("SNR penalty at KP4", "distance [km]", "penalty [dB]", false);
  std::map<std::string, std::vector<std::pair<double, double>>> lines;
  for (const auto& p : r.penalties) {
    auto& l = lines[p.equalizer];
    if (p.penalty_db) l.push_back({p.distance_km, *p.penalty_db});
    else c.mark(p.distance_km, p.equalizer);
  }
  for (auto& [k, v] : lines) c.add(k, std::move(v));
  c.write(os);
}

void write_budget_svg(std::ostream& os, const SweepResult& r) {
  Chart c("BER vs complexity budget", "budget [multiplications per symbol]", "BER", true);
  std::map<std::string, std::vector<std::pair<double, double>>> lines;
  for (const auto& x : r.records) {
    auto& l = lines[x.equalizer];
    if (x.ok() && x.bits > 0) l.push_back({static_cast<double>(x.budget), plotted_ber(x)});
  }
  for (auto& [k, v] : lines) c.add(k, std::move(v));
  c.hline(kKp4Threshold, "KP4");
  c.write(os);
}

std::vector<std::string> emit_outputs(const SweepResult& r, const std::string& dir) {
  if (r.records.empty()) throw ParameterError("emit_outputs: empty result");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, auto&& writer) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    writer(os);
    if (!os) throw IoError("write failed: '" + path + "'");
    written.push_back(path);
  };
  emit("results.csv", [&](std::ostream& os) { write_results_csv(os, r); });
  emit("timing.csv", [&](std::ostream& os) { write_timing_csv(os, r); });
  emit("meta.json", [&](std::ostream& os) {
    os << "{\n  \"kind\": \"" << r.kind << "\",\n  \"config_hash\": \"" << r.config_hash << "\",\n  \"seed\": " << r.seed
       << ",\n  \"prng\": \"" << Prng::kAlgorithm << "\",\n  \"records\": " << r.records.size() << ",\n  \"threshold\": \"midpoint of class means on training data\"";
    if (r.reference)
      os << ",\n  \"reference_required_snr_db\": " << (r.reference->reached() ? num(r.reference->snr_db) : "null");
    os << "\n}\n";
  });
  if (r.kind == "complexity") {
    emit("ber_vs_budget.svg", [&](std::ostream& os) { write_budget_svg(os, r); });
  } else {
    emit("ber_vs_snr.svg", [&](std::ostream& os) { write_waterfall_svg(os, r); });
  }
  if (!r.penalties.empty()) {
    emit("penalty.csv", [&](std::ostream& os) { write_penalty_csv(os, r); });
    emit("penalty_vs_distance.svg", [&](std::ostream& os) { write_penalty_svg(os, r); });
  }
  return written;
}

namespace {

MultCount instrumented(const EqualizerSpec& spec) {
  const Network<double> net = Network<double>::zeros(spec.shape());
  const Eigen::VectorXd frame = Eigen::VectorXd::Zero(net.shape.input_size());
  MultiplyCount mc;
  forward_frame<double>(net, frame, &mc);
  return spec.framing.mode == FramingMode::Sa ? mc.weight * spec.framing.sps : mc.weight;
}

void table_row(std::ostream& os, const char* scenario, const std::string& budget, const std::string& name,
               const EqualizerSpec& spec) {
  const auto c = complexity_of(spec.arch, spec.framing, spec.n_hidden, spec.filter_width);
  os << scenario << ',' << budget << ',' << name << ",yes," << c.memory << ',' << c.n_hidden << ',' << c.filter_width
     << ',' << c.cc_per_symbol << ',' << instrumented(spec) << '\n';
}

}  // namespace

void write_complexity_table(std::ostream& os, const std::vector<std::int64_t>& budgets) {
  os << "scenario,budget,equalizer,achievable,memory,n_hidden,filter_width,cc_per_symbol,instrumented_per_symbol\n";
  for (const auto& [scenario, sa_sps] : {std::pair{"numerical", 8}, std::pair{"experimental", 2}}) {
    for (FramingMode mode : {FramingMode::Sy, FramingMode::Sa}) {
      const int sps = mode == FramingMode::Sa ? sa_sps : 2;
      for (Arch arch : {Arch::fnn, Arch::gru, Arch::cnn}) {
        const std::string name = to_string(mode) + "-" + to_string(arch);
        const EqualizerSpec t1 = EqualizerSpec::table1(arch, mode, sps);
        table_row(os, scenario, "table1", name, t1);
        for (auto b : budgets) {
          RealizationSearch s;
          s.arch = arch;
          s.framing = t1.framing;
          s.vary_memory = arch == Arch::gru;
          const Realization real = realize_under_budget(s, b);
          if (!real.achievable) {
            os << scenario << ',' << b << ',' << name << ",no,,,,,\n";
            continue;
          }
          EqualizerSpec e = t1;
          const int q = mode == FramingMode::Sa ? 1 : sps;
          e.framing.context_symbols = (real.chosen.memory - q) / (2 * sps);
          e.n_hidden = real.chosen.n_hidden;
          e.filter_width = real.chosen.filter_width;
          table_row(os, scenario, std::to_string(b), name, e);
        }
      }
    }
  }
  os << "any,table1,FFE-11,yes,11,,," << cc_ffe(11) << ',' << cc_ffe(11) << '\n';
}

}  // namespace slicenn
