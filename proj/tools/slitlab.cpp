// slitlab: simulate single-slit CCD frames, analyze them, and report the
// capture-probability comparison.
//
// Exit codes: 0 success, 1 data/convergence/file error, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slitlab/slitlab.hpp"

namespace {

namespace fs = std::filesystem;
using namespace slitlab;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool json = false;
  bool quiet = false;
};

RunConfig load_config(const Globals& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : read_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  return c;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::optional<std::uint32_t> frames;
  bool noiseless = false;
  std::string format = "bin";
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  RunConfig c = load_config(g);
  if (a.frames) c.frames = *a.frames;
  if (c.frames < 1) throw UsageError("--frames must be >= 1");
  if (a.noiseless) std::tie(c.sensor, c.beam) = noiseless(c.sensor, c.beam);
  c.validate();
  const fs::path out = g.out.empty() ? fs::path("frames.slitfrm") : fs::path(g.out);
  const auto set = generate_frameset(c.sensor, c.beam, c.frames, c.seed, c.voltage_cap);
  io::write_frames(out, set, a.format == "csv" ? io::FrameFormat::Csv : io::FrameFormat::Binary);
  if (!g.quiet) {
    const auto v = set.voltages();
    std::cout << "simulate: M=" << set.frame_count() << " N=" << set.pixel_count() << " seed=" << set.seed()
              << " peak=" << format_double(*std::max_element(v.begin(), v.end())) << " V -> " << out.string() << '\n';
  }
  return 0;
}

// --- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::string frame_file;
  std::optional<double> baseline;
  std::optional<std::uint32_t> guard;
  bool no_window_correction = false;
};

int cmd_analyze(const Globals& g, const AnalyzeArgs& a) {
  RunConfig c = load_config(g);
  if (a.baseline) c.baseline_override = *a.baseline;
  if (a.guard) c.guard_pixels = *a.guard;
  if (a.no_window_correction) c.window_correction = false;
  const FrameSet frames = io::read_frames(a.frame_file);
  AnalysisOptions opt = c.analysis_options();
  if (opt.guard_pixels < 8 || opt.guard_pixels > frames.pixel_count() / 8)
    throw UsageError("guard pixels must lie in [8, N/8] for N = " + std::to_string(frames.pixel_count()));
  const auto res = analyze(frames, opt);

  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  fs::create_directories(dir);
  io::write_text(dir / "density.csv", io::density_csv(res.density));
  io::write_text(dir / "pcurve.csv", io::pcurve_csv(res.curve));
  io::write_text(dir / "report.json", io::report_json(res.report));

  if (g.json) {
    std::cout << io::report_json(res.report);
  } else if (!g.quiet) {
    const auto& r = res.report;
    std::cout << "analyze: " << a.frame_file << " (M=" << frames.frame_count() << ", N=" << frames.pixel_count() << ")\n"
              << "  baseline            " << format_double(r.baseline_used) << " V\n"
              << "  xi coverage         " << format_double(r.xi_coverage) << '\n'
              << "  window deficit      " << format_double(r.window_deficit) << '\n'
              << "  max |deviation|     " << format_double(r.max_abs_deviation) << '\n'
              << "  forbidden fraction  empirical " << format_double(r.empirical_forbidden_fraction) << ", analytic "
              << format_double(r.analytic_forbidden_fraction) << '\n'
              << "  outputs             " << (dir / "density.csv").string() << ", " << (dir / "pcurve.csv").string()
              << ", " << (dir / "report.json").string() << '\n';
  }
  return 0;
}

// --- curve ----------------------------------------------------------------

struct CurveArgs {
  double xi_max = 5.0;
  std::size_t samples = 501;
  std::string bound_table;
};

std::vector<CurveSample> read_bound_table(const fs::path& path) {
  const std::string text = io::detail::read_file(path);
  std::vector<CurveSample> rows;
  std::size_t pos = 0;
  std::size_t line = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view row(text.data() + pos, end - pos);
    const std::size_t at = pos;
    pos = end + 1;
    ++line;
    if (row.empty() || row.front() == '#' || row == "\r") continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos) throw ParseError("bound table row without ','", at);
    const auto xi = parse_double(row.substr(0, comma));
    const auto p = parse_double(row.substr(comma + 1));
    if (!xi || !p) {
      if (line == 1) continue;  // header
      throw ParseError("bound table row is not numeric", at);
    }
    if (!rows.empty() && !(*xi > rows.back().xi)) throw ParseError("bound table xi not strictly increasing", at);
    rows.push_back({*xi, *p});
  }
  if (rows.size() < 2) throw ParseError("bound table needs at least two rows", text.size());
  return rows;
}

std::optional<double> interpolate(const std::vector<CurveSample>& t, double xi) {
  if (xi < t.front().xi || xi > t.back().xi) return std::nullopt;
  auto hi = std::lower_bound(t.begin(), t.end(), xi, [](const CurveSample& s, double v) { return s.xi < v; });
  if (hi->xi == xi) return hi->p;
  auto lo = std::prev(hi);
  return lo->p + (xi - lo->xi) / (hi->xi - lo->xi) * (hi->p - lo->p);
}

int cmd_curve(const Globals& g, const CurveArgs& a) {
  if (!(a.xi_max > 0.0)) throw UsageError("--xi-max must be > 0");
  if (a.samples < 2) throw UsageError("--samples must be >= 2");
  std::vector<CurveSample> bound;
  if (!a.bound_table.empty()) bound = read_bound_table(a.bound_table);
  const auto curve = analytic_curve(a.xi_max, a.samples);
  std::string out = "# p_planewave: closed-form capture probability; p_step: Heisenberg step, right-continuous (p_step(1) = 1)\n";
  out += bound.empty() ? "xi,p_planewave,p_step\n" : "xi,p_planewave,p_step,p_bound\n";
  for (const auto& s : curve.samples()) {
    out += format_double(s.xi) + ',' + format_double(s.p) + ',' + format_double(heisenberg_step(s.xi));
    if (!bound.empty()) {
      const auto b = interpolate(bound, s.xi);
      out += ',';
      if (b) out += format_double(*b);
    }
    out += '\n';
  }
  if (g.out.empty()) {
    std::cout << out;
  } else {
    io::write_text(g.out, out);
    if (!g.quiet) std::cout << "curve: " << a.samples << " samples on [0, " << format_double(a.xi_max) << "] -> " << g.out << '\n';
  }
  return 0;
}

// --- report ---------------------------------------------------------------

int cmd_report(const Globals& g, const std::vector<std::string>& paths) {
  if (paths.empty()) throw UsageError("report: at least one report.json path is required");
  const double analytic = forbidden_fraction_analytic(1.0);
  std::vector<std::pair<std::string, ComparisonReport>> reports;
  for (const auto& p : paths) reports.emplace_back(p, io::read_report(p));

  if (g.json) {
    nlohmann::ordered_json j;
    j["analytic_forbidden_fraction"] = analytic;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [path, r] : reports) {
      auto jr = io::to_json(r);
      jr["path"] = path;
      arr.push_back(std::move(jr));
    }
    j["reports"] = std::move(arr);
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "analytic forbidden fraction (mean P over xi in [0,1]): " << format_double(analytic) << '\n';
  for (const auto& [path, r] : reports) {
    std::cout << "[" << r.label << "] " << path << '\n'
              << "  empirical forbidden fraction  " << format_double(r.empirical_forbidden_fraction) << '\n'
              << "  max |deviation|               " << format_double(r.max_abs_deviation) << '\n'
              << "  mean |deviation|              " << format_double(r.mean_abs_deviation) << '\n'
              << "  window deficit                " << format_double(r.window_deficit) << '\n'
              << "  baseline sensitivity          " << format_double(r.baseline_sensitivity) << '\n';
    for (const auto& b : r.deviation_by_band) {
      std::cout << "  band [" << format_double(b.xi_lo) << ", " << (std::isinf(b.xi_hi) ? std::string("inf") : format_double(b.xi_hi))
                << ")  max " << format_double(b.max_abs_deviation) << "  mean " << format_double(b.mean_abs_deviation)
                << "  n " << b.samples << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slitlab: single-slit CCD simulation and capture-probability analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "Run configuration (key = value)");
  app.add_option("--seed", g.seed, "Random seed (overrides the config)");
  app.add_option("--out", g.out, "Output file (simulate, curve) or directory (analyze)");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--quiet", g.quiet, "Suppress summaries");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Render a frame file from the configuration");
  simulate->add_option("--frames", sim.frames, "Number of frames M (overrides the config)");
  simulate->add_flag("--noiseless", sim.noiseless, "Disable PRNU, shot and read noise");
  simulate->add_option("--format", sim.format, "bin (SLITFRM v1) or csv")->check(CLI::IsMember({"bin", "csv"}));

  AnalyzeArgs ana;
  auto* analyze_cmd = app.add_subcommand("analyze", "Evaluate a frame file; writes density.csv, pcurve.csv, report.json");
  analyze_cmd->add_option("frame_file", ana.frame_file, "SLITFRM v1 binary or CSV frame file")->required();
  analyze_cmd->add_option("--baseline", ana.baseline, "External dark level in volts (skips estimation)");
  analyze_cmd->add_option("--guard", ana.guard, "Guard pixels per sensor edge for the dark estimate");
  analyze_cmd->add_flag("--no-window-correction", ana.no_window_correction, "Keep the window-normalized curve");

  CurveArgs cur;
  auto* curve = app.add_subcommand("curve", "Closed-form P(xi) with the Heisenberg step");
  curve->add_option("--xi-max", cur.xi_max, "Upper end of the xi grid");
  curve->add_option("--samples", cur.samples, "Number of grid points");
  curve->add_option("--bound", cur.bound_table, "CSV table (xi,p) of an upper-bound curve to include");

  std::vector<std::string> report_paths;
  auto* report = app.add_subcommand("report", "Summarize one or more report.json files");
  report->add_option("reports", report_paths, "report.json paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(g, sim);
    if (*analyze_cmd) return cmd_analyze(g, ana);
    if (*curve) return cmd_curve(g, cur);
    if (*report) return cmd_report(g, report_paths);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
