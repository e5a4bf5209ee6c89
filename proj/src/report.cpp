#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stt/cli.hpp"

namespace stt {
namespace {

using nlohmann::json;

std::string ranks_text(const std::vector<int>& ranks) {
  std::string out = "[";
  for (size_t i = 0; i < ranks.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ranks[i]);
  }
  return out + "]";
}

std::string number(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

int max_rank(const std::vector<int>& ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
}

json report_json(const SolveReport& r) {
  return json{{"event", "report"},
              {"experiment", r.experiment},
              {"elements", r.elements},
              {"format", format_name(r.format)},
              {"tt_tol", r.tt_tol},
              {"solver_tol", r.solver_tol},
              {"error", r.l2_error},
              {"converged", r.converged},
              {"sweeps", r.sweeps},
              {"newton_iterations", r.newton_iterations},
              {"final_residual", r.final_residual},
              {"max_rank", max_rank(r.solution_ranks)},
              {"failure_stage", r.failure_stage},
              {"failure_message", r.failure_message},
              {"seconds", r.seconds}};
}

struct Series {
  std::string label;
  std::vector<double> n, e;
};

}  // namespace

std::string study_csv(const std::vector<SolveReport>& rows) {
  std::string out =
      "experiment,N,format,tt_tol,solver_tol,error,order,max_rank,compression,seconds\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const SolveReport& r = rows[i];
    out += r.experiment + ',' + std::to_string(r.elements) + ',' + format_name(r.format);
    out += ',' + number("%g", r.tt_tol) + ',' + number("%g", r.solver_tol) + ',';
    out += r.l2_error >= 0.0 ? number("%.12e", r.l2_error) : "nan";
    out += ',';
    if (i > 0 && rows[i - 1].l2_error > 0.0 && r.l2_error > 0.0 &&
        r.elements != rows[i - 1].elements)
      out += number("%.4f", std::log(rows[i - 1].l2_error / r.l2_error) /
                                std::log(double(r.elements) / rows[i - 1].elements));
    out += ',';
    if (!r.solution_ranks.empty()) out += std::to_string(max_rank(r.solution_ranks));
    out += ',' + number("%.6g", r.solution_compression);
    out += ',' + number("%.3f", r.seconds) + '\n';
  }
  return out;
}

std::string rank_table_csv(const std::vector<RankStudyRow>& rows,
                           const std::vector<int>& grids) {
  std::string out = "kappa,tt_tol,coefficient_ranks";
  for (int g : grids) out += ",operator_ranks_N" + std::to_string(g);
  out += '\n';
  for (const RankStudyRow& row : rows) {
    out += '"' + row.label + "\"," + number("%g", row.tol);
    out += ",\"" + ranks_text(row.coefficient_ranks) + '"';
    for (const auto& ranks : row.operator_ranks) out += ",\"" + ranks_text(ranks) + '"';
    out += '\n';
  }
  return out;
}

std::string study_svg(const std::vector<SolveReport>& rows) {
  std::vector<Series> series;
  for (const SolveReport& r : rows) {
    if (!(r.l2_error > 0.0)) continue;
    std::string label = format_name(r.format);
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const Series& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}, {}});
      it = series.end() - 1;
    }
    it->n.push_back(r.elements);
    it->e.push_back(r.l2_error);
  }
  if (series.empty()) return {};

  double n_lo = 1e300, n_hi = -1e300, e_lo = 1e300, e_hi = -1e300;
  for (const Series& s : series)
    for (size_t i = 0; i < s.n.size(); ++i) {
      n_lo = std::min(n_lo, s.n[i]);
      n_hi = std::max(n_hi, s.n[i]);
      e_lo = std::min(e_lo, s.e[i]);
      e_hi = std::max(e_hi, s.e[i]);
    }
  double x0 = std::log10(n_lo), x1 = std::log10(n_hi);
  double y0 = std::floor(std::log10(e_lo)), y1 = std::ceil(std::log10(e_hi));
  if (x1 - x0 < 0.1) {
    x0 -= 0.15;
    x1 += 0.15;
  }
  if (y1 - y0 < 1.0) y0 = y1 - 1.0;
  const double width = 720, height = 520;
  const double left = 90, right = 40, top = 50, bottom = 70;
  auto px = [&](double n) {
    return left + (std::log10(n) - x0) / (x1 - x0) * (width - left - right);
  };
  auto py = [&](double e) {
    return height - bottom - (std::log10(e) - y0) / (y1 - y0) * (height - top - bottom);
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 720 520\" "
                    "font-family=\"sans-serif\" font-size=\"13\">\n";
  svg += "<rect width=\"720\" height=\"520\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"360\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
         "discrete L2 error vs grid size (log-log)</text>\n";

  // frame and decade grid lines
  svg += "<rect x=\"" + number("%.1f", left) + "\" y=\"" + number("%.1f", top) + "\" width=\"" +
         number("%.1f", width - left - right) + "\" height=\"" +
         number("%.1f", height - top - bottom) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (double d = y0; d <= y1 + 1e-9; d += 1.0) {
    double y = py(std::pow(10.0, d));
    svg += "<line x1=\"" + number("%.1f", left) + "\" y1=\"" + number("%.1f", y) + "\" x2=\"" +
           number("%.1f", width - right) + "\" y2=\"" + number("%.1f", y) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + number("%.1f", left - 8) + "\" y=\"" + number("%.1f", y + 4) +
           "\" text-anchor=\"end\">1e" + number("%.0f", d) + "</text>\n";
  }
  std::vector<double> xticks;
  for (const Series& s : series)
    for (double n : s.n)
      if (std::find(xticks.begin(), xticks.end(), n) == xticks.end()) xticks.push_back(n);
  std::sort(xticks.begin(), xticks.end());
  for (double n : xticks) {
    double x = px(n);
    svg += "<line x1=\"" + number("%.1f", x) + "\" y1=\"" + number("%.1f", height - bottom) +
           "\" x2=\"" + number("%.1f", x) + "\" y2=\"" +
           number("%.1f", height - bottom + 6) + "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + number("%.1f", x) + "\" y=\"" + number("%.1f", height - bottom + 22) +
           "\" text-anchor=\"middle\">" + number("%.0f", n) + "</text>\n";
  }
  svg += "<text x=\"" + number("%.1f", (left + width - right) / 2) + "\" y=\"" +
         number("%.1f", height - 18) +
         "\" text-anchor=\"middle\">elements per dimension N</text>\n";
  svg += "<text x=\"22\" y=\"" + number("%.1f", (top + height - bottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 22 " +
         number("%.1f", (top + height - bottom) / 2) + ")\">discrete L2 error</text>\n";

  // slope-2 reference through the last point of the first series
  {
    const Series& s = series.front();
    double n_ref = s.n.back(), e_ref = s.e.back();
    double e_at = [&](double n) { return e_ref * std::pow(n_ref / n, 2.0); }(n_lo);
    svg += "<line x1=\"" + number("%.1f", px(n_lo)) + "\" y1=\"" + number("%.1f", py(e_at)) +
           "\" x2=\"" + number("%.1f", px(n_hi)) + "\" y2=\"" + number("%.1f", py(e_ref)) +
           "\" stroke=\"#999999\" stroke-dasharray=\"6 4\"/>\n";
    svg += "<text x=\"" + number("%.1f", px(n_lo) + 6) + "\" y=\"" +
           number("%.1f", py(e_at) - 6) + "\" fill=\"#777777\">slope 2</text>\n";
  }

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = colors[k % 4];
    std::string points;
    for (size_t i = 0; i < s.n.size(); ++i) {
      if (i) points += ' ';
      points += number("%.2f", px(s.n[i])) + "," + number("%.2f", py(s.e[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    for (size_t i = 0; i < s.n.size(); ++i)
      svg += "<circle cx=\"" + number("%.2f", px(s.n[i])) + "\" cy=\"" +
             number("%.2f", py(s.e[i])) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
    double ly = top + 18 + 20 * k;
    svg += "<rect x=\"" + number("%.1f", width - right - 150) + "\" y=\"" +
           number("%.1f", ly - 10) + "\" width=\"14\" height=\"14\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + number("%.1f", width - right - 130) + "\" y=\"" +
           number("%.1f", ly + 2) + "\">" + s.label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

int dispatch(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.outdir, ec);
  const std::string base = cfg.outdir + "/" + cfg.command;

  std::ofstream log(base + ".jsonl", std::ios::trunc);
  if (!log) {
    std::fprintf(stderr, "cannot write %s.jsonl\n", base.c_str());
    return kExitWarning;
  }

  bool warning = false;
  std::string csv;
  std::vector<SolveReport> rows;
  try {
    if (cfg.command == "rank-table") {
      AssemblyOptions opts;
      opts.tt_tol = cfg.tt_tol;
      opts.seed = cfg.seed;
      opts.cache_dir = cfg.cache_dir;
      std::vector<RankStudyRow> table = rank_study(rank_study_catalog(), cfg.grids, opts);
      csv = rank_table_csv(table, cfg.grids);
      for (const RankStudyRow& row : table) {
        log << json{{"event", "rank-row"},
                    {"kappa", row.label},
                    {"tt_tol", row.tol},
                    {"coefficient_ranks", row.coefficient_ranks},
                    {"operator_ranks", row.operator_ranks}}
                   .dump()
            << '\n';
        std::string line = row.label + " (tol " + number("%g", row.tol) + "): " +
                           ranks_text(row.coefficient_ranks) + " ->";
        for (const auto& ranks : row.operator_ranks) line += ' ' + ranks_text(ranks);
        std::printf("%s\n", line.c_str());
      }
    } else {
      ProblemSpec problem = catalog_problem(
          (cfg.command == "convergence" || cfg.command == "custom") ? cfg.problem
                                                                    : cfg.command);
      RunOptions opts;
      opts.format = cfg.format;
      opts.tt_tol = cfg.tt_tol;
      opts.solver_tol = cfg.solver_tol;
      opts.rmax = cfg.rmax;
      opts.seed = cfg.seed;
      opts.cache_dir = cfg.cache_dir;
      std::vector<int> grids = cfg.grids;
      if (cfg.command == "convergence") std::sort(grids.begin(), grids.end());
      for (int n : grids) {
        opts.on_progress = [&, n](int iteration, double value, int rank) {
          log << json{{"event", "progress"},
                      {"experiment", problem.name},
                      {"elements", n},
                      {"format", format_name(cfg.format)},
                      {"iteration", iteration},
                      {"value", value},
                      {"max_rank", rank}}
                     .dump()
              << '\n';
        };
        SolveReport r = run_experiment(problem, n, opts);
        log << report_json(r).dump() << '\n';
        if (!r.failure_stage.empty()) {
          warning = true;
          std::fprintf(stderr, "%s N=%d failed during %s: %s\n", r.experiment.c_str(),
                       r.elements, r.failure_stage.c_str(), r.failure_message.c_str());
        } else if (!r.converged) {
          warning = true;
          std::fprintf(stderr, "%s N=%d did not reach the residual target (%.3e)\n",
                       r.experiment.c_str(), r.elements, r.final_residual);
        }
        std::printf("%s N=%d format=%s error=%.6e (%.1fs)\n", r.experiment.c_str(), r.elements,
                    format_name(r.format).c_str(), r.l2_error, r.seconds);
        rows.push_back(std::move(r));
      }
      if (cfg.command == "convergence") {
        try {
          double order = fit_order(rows);
          std::printf("fitted order %.3f over %zu grids\n", order, grids.size());
          log << json{{"event", "fit"}, {"order", order}}.dump() << '\n';
        } catch (const std::exception& error) {
          warning = true;
          std::fprintf(stderr, "%s\n", error.what());
        }
      }
      csv = study_csv(rows);
    }
  } catch (const std::exception& error) {
    std::fprintf(stderr, "%s\n", error.what());
    return kExitWarning;
  }

  std::ofstream csv_file(base + ".csv", std::ios::trunc);
  if (!csv_file) {
    std::fprintf(stderr, "cannot write %s.csv\n", base.c_str());
    return kExitWarning;
  }
  csv_file << csv;
  csv_file.close();

  if (cfg.plot && !rows.empty()) {
    std::string svg = study_svg(rows);
    if (!svg.empty()) {
      // plotting never gates the exit status
      std::ofstream svg_file(base + ".svg", std::ios::trunc);
      if (svg_file)
        svg_file << svg;
      else
        std::fprintf(stderr, "cannot write %s.svg (ignored)\n", base.c_str());
    }
  }
  return warning ? kExitWarning : kExitOk;
}

}  // namespace stt
