#include "hpc/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hpc/common/io.hpp"

namespace hpc::eval {

namespace fs = std::filesystem;

double retention_ratio(double value, double baseline) {
  if (baseline != 0.0) return value / baseline;
  return value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

const MetricsRow* find_row(const EvalRunResult& res, const std::string& variant,
                           double intensity) {
  for (const auto& r : res.rows) {
    if (r.variant == variant && r.intensity == intensity) return &r;
  }
  return nullptr;
}

const EvalCell* find_cell(const EvalRunResult& res, const std::string& variant,
                          double intensity, uint64_t seed) {
  for (const auto& c : res.cells) {
    if (c.variant == variant && c.intensity == intensity && c.seed == seed) return &c;
  }
  return nullptr;
}

void write_svg(const fs::path& path, const EvalRunResult& res,
               const std::vector<std::string>& variants, const std::vector<double>& intensities) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  const double w = 640, h = 420, ml = 60, mr = 160, mt = 30, mb = 50;
  const double px = w - ml - mr, py = h - mt - mb;
  const double xmax = *std::max_element(intensities.begin(), intensities.end());
  double ymax = 1.0;
  for (const auto& v : variants) {
    const MetricsRow* base = find_row(res, v, 0.0);
    if (!base) continue;
    for (double i : intensities) {
      const MetricsRow* r = find_row(res, v, i);
      if (!r) continue;
      const double ratio = retention_ratio(r->m_terrain, base->m_terrain);
      if (std::isfinite(ratio)) ymax = std::max(ymax, ratio);
    }
  }
  auto X = [&](double v) { return ml + (xmax > 0 ? v / xmax : 0.0) * px; };
  auto Y = [&](double v) { return mt + py - v / ymax * py; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << " " << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt + py << "\" x2=\"" << ml + px << "\" y2=\""
    << mt + py << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + py
    << "\" stroke=\"black\"/>\n";
  for (double i : intensities) {
    s << "<text x=\"" << X(i) << "\" y=\"" << mt + py + 18
      << "\" text-anchor=\"middle\">" << fmt("%g", i) << "</text>\n";
    s << "<line x1=\"" << X(i) << "\" y1=\"" << mt + py << "\" x2=\"" << X(i) << "\" y2=\""
      << mt + py + 4 << "\" stroke=\"black\"/>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = ymax * k / 4.0;
    s << "<text x=\"" << ml - 8 << "\" y=\"" << Y(v) + 4
      << "\" text-anchor=\"end\">" << fmt("%.2f", v) << "</text>\n";
    s << "<line x1=\"" << ml - 4 << "\" y1=\"" << Y(v) << "\" x2=\"" << ml << "\" y2=\"" << Y(v)
      << "\" stroke=\"black\"/>\n";
  }
  s << "<text x=\"" << ml + px / 2 << "\" y=\"" << h - 12
    << "\" text-anchor=\"middle\">noise intensity</text>\n";
  s << "<text x=\"16\" y=\"" << mt + py / 2
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + py / 2
    << ")\">terrain retention</text>\n";

  for (size_t vi = 0; vi < variants.size(); ++vi) {
    const MetricsRow* base = find_row(res, variants[vi], 0.0);
    if (!base) continue;
    const char* color = kColors[vi % 6];
    std::ostringstream pts;
    for (double i : intensities) {
      const MetricsRow* r = find_row(res, variants[vi], i);
      if (!r) continue;
      const double ratio = retention_ratio(r->m_terrain, base->m_terrain);
      if (!std::isfinite(ratio)) continue;
      pts << X(i) << "," << Y(ratio) << " ";
      s << "<circle cx=\"" << X(i) << "\" cy=\"" << Y(ratio) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    }
    s << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\"/>\n";
    s << "<rect x=\"" << ml + px + 16 << "\" y=\"" << mt + 16.0 * vi << "\" width=\"10\""
      << " height=\"10\" fill=\"" << color << "\"/>\n";
    s << "<text x=\"" << ml + px + 32 << "\" y=\"" << mt + 16.0 * vi + 9 << "\">" << variants[vi]
      << "</text>\n";
  }
  s << "</svg>\n";
  write_text_file(path, s.str());
}

}  // namespace

void write_report(const fs::path& out_dir, const config::RunConfig& cfg,
                  const EvalRunResult& res, const std::vector<uint64_t>& seeds) {
  fs::create_directories(out_dir);

  std::vector<std::string> variants;
  std::vector<double> intensities;
  for (const auto& r : res.rows) {
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
      variants.push_back(r.variant);
    if (std::find(intensities.begin(), intensities.end(), r.intensity) == intensities.end())
      intensities.push_back(r.intensity);
  }

  {
    CsvWriter csv(out_dir / "table.csv",
                  {"variant", "intensity", "e_vel", "e_vel_std", "e_ang", "e_ang_std",
                   "m_terrain", "m_terrain_std", "m_reward", "m_reward_std", "episodes",
                   "retention"});
    for (const auto& r : res.rows) {
      const MetricsRow* base = find_row(res, r.variant, 0.0);
      const double ret = base ? retention_ratio(r.m_terrain, base->m_terrain)
                              : std::numeric_limits<double>::quiet_NaN();
      csv.write_raw_row({r.variant, format_double(r.intensity), format_double(r.e_vel),
                         format_double(r.e_vel_std), format_double(r.e_ang),
                         format_double(r.e_ang_std), format_double(r.m_terrain),
                         format_double(r.m_terrain_std), format_double(r.m_reward),
                         format_double(r.m_reward_std), std::to_string(r.episodes),
                         format_double(ret)});
    }
  }

  {
    std::ostringstream t;
    t << "evaluation summary\n";
    t << "M_reward is the raw mean episode reward (no normalization).\n";
    t << "M_terrain is the mean curriculum level after each episode's promote/demote update.\n";
    t << "retention = M_terrain(intensity) / M_terrain(0) per variant.\n";
    for (double i : intensities) {
      t << "\n== intensity " << fmt("%.2f", i) << " (" << fmt("%g", i * 100) << "% noise) ==\n";
      char line[160];
      std::snprintf(line, sizeof(line), "%-22s %10s %10s %10s %10s %10s %9s\n", "variant",
                    "E_vel", "E_ang", "M_terrain", "M_reward", "retention", "episodes");
      t << line;
      for (const auto& v : variants) {
        const MetricsRow* r = find_row(res, v, i);
        if (!r) continue;
        const MetricsRow* base = find_row(res, v, 0.0);
        const double ret = base ? retention_ratio(r->m_terrain, base->m_terrain)
                                : std::numeric_limits<double>::quiet_NaN();
        std::snprintf(line, sizeof(line), "%-22s %10.4f %10.4f %10.3f %10.3f %10.3f %9d\n",
                      v.c_str(), r->e_vel, r->e_ang, r->m_terrain, r->m_reward, ret,
                      r->episodes);
        t << line;
      }
    }
    write_text_file(out_dir / "table.txt", t.str());
  }

  {
    CsvWriter csv(out_dir / "retention.csv",
                  {"variant", "seed", "intensity", "m_terrain", "retention"});
    for (const auto& v : variants) {
      for (uint64_t seed : seeds) {
        const EvalCell* base = find_cell(res, v, 0.0, seed);
        for (double i : intensities) {
          const EvalCell* c = find_cell(res, v, i, seed);
          if (!c) continue;
          const double ret = base ? retention_ratio(c->mean_terrain(), base->mean_terrain())
                                  : std::numeric_limits<double>::quiet_NaN();
          csv.write_raw_row({v, std::to_string(seed), format_double(i),
                             format_double(c->mean_terrain()), format_double(ret)});
        }
      }
    }
  }

  {
    CsvWriter csv(out_dir / "seeds.csv", {"variant", "base_seed", "stream", "env_seed"});
    for (const auto& v : variants) {
      for (uint64_t seed : seeds) {
        for (int s = 0; s < cfg.eval.streams; ++s) {
          csv.write_raw_row({v, std::to_string(seed), std::to_string(s),
                             std::to_string(stream_env_seed(seed, s))});
        }
      }
    }
  }

  write_svg(out_dir / "retention.svg", res, variants, intensities);
}

}  // namespace hpc::eval
