#pragma once

// density.csv, pcurve.csv and report.json. Numbers use the shortest decimal
// form that round-trips, so identical inputs give byte-identical files.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slitlab/analysis.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/format.hpp"
#include "slitlab/frame_io.hpp"

namespace slitlab::io {

inline std::string density_csv(const EmpiricalDensity& d) {
  std::string out = "pixel_index,x_m,xi,density_per_m\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += std::to_string(i);
    out += ',' + format_double(d.positions[i]);
    out += ',' + format_double(xi_from_screen(d.positions[i], d.geometry));
    out += ',' + format_double(d.density[i]);
    out += '\n';
  }
  return out;
}

inline std::string pcurve_csv(const ProbabilityCurve& curve,
                              const AnalyticSampler& analytic = [](double xi) { return capture_probability(xi); }) {
  std::string out = "xi,p_empirical,p_analytic,deviation\n";
  for (const auto& s : curve.samples()) {
    const double a = analytic(s.xi);
    out += format_double(s.xi) + ',' + format_double(s.p) + ',' + format_double(a) + ',' + format_double(s.p - a) + '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const ComparisonReport& r) {
  nlohmann::ordered_json j;
  j["label"] = r.label;
  j["max_abs_deviation"] = r.max_abs_deviation;
  j["mean_abs_deviation"] = r.mean_abs_deviation;
  auto bands = nlohmann::ordered_json::array();
  for (const auto& b : r.deviation_by_band) {
    nlohmann::ordered_json jb;
    jb["xi_min"] = b.xi_lo;
    jb["xi_max"] = std::isinf(b.xi_hi) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(b.xi_hi);
    jb["max_abs_deviation"] = b.max_abs_deviation;
    jb["mean_abs_deviation"] = b.mean_abs_deviation;
    jb["samples"] = static_cast<double>(b.samples);
    bands.push_back(std::move(jb));
  }
  j["deviation_by_band"] = std::move(bands);
  j["empirical_forbidden_fraction"] = r.empirical_forbidden_fraction;
  j["analytic_forbidden_fraction"] = r.analytic_forbidden_fraction;
  j["clamp_count"] = static_cast<double>(r.clamp_count);
  j["xi_coverage"] = r.xi_coverage;
  j["window_deficit"] = r.window_deficit;
  j["baseline_used"] = r.baseline_used;
  j["baseline_sensitivity"] = r.baseline_sensitivity;
  j["center_pixel"] = r.center_pixel;
  return j;
}

inline std::string report_json(const ComparisonReport& r) { return to_json(r).dump(2) + "\n"; }

/// Parses a report.json produced by report_json. Missing or mistyped fields
/// raise ParseError naming the field.
inline ComparisonReport parse_report(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ParseError("report root is not an object", 0);
  const auto number = [&j](const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_number())
      throw ParseError(std::string("report field '") + key + "' missing or not a number", 0);
    return obj.at(key).get<double>();
  };
  ComparisonReport r;
  r.label = j.value("label", std::string("empirical"));
  r.max_abs_deviation = number(j, "max_abs_deviation");
  r.mean_abs_deviation = number(j, "mean_abs_deviation");
  r.empirical_forbidden_fraction = number(j, "empirical_forbidden_fraction");
  r.analytic_forbidden_fraction = number(j, "analytic_forbidden_fraction");
  r.clamp_count = static_cast<std::size_t>(number(j, "clamp_count"));
  r.xi_coverage = number(j, "xi_coverage");
  r.window_deficit = j.contains("window_deficit") ? number(j, "window_deficit") : 0.0;
  r.baseline_used = j.contains("baseline_used") ? number(j, "baseline_used") : 0.0;
  r.baseline_sensitivity = j.contains("baseline_sensitivity") ? number(j, "baseline_sensitivity") : 0.0;
  r.center_pixel = j.contains("center_pixel") ? number(j, "center_pixel") : 0.0;
  if (!j.contains("deviation_by_band") || !j.at("deviation_by_band").is_array())
    throw ParseError("report field 'deviation_by_band' missing or not an array", 0);
  for (const auto& jb : j.at("deviation_by_band")) {
    BandStats b;
    b.xi_lo = number(jb, "xi_min");
    b.xi_hi = jb.contains("xi_max") && jb.at("xi_max").is_number() ? jb.at("xi_max").get<double>()
                                                                   : std::numeric_limits<double>::infinity();
    b.max_abs_deviation = number(jb, "max_abs_deviation");
    b.mean_abs_deviation = number(jb, "mean_abs_deviation");
    b.samples = static_cast<std::size_t>(number(jb, "samples"));
    r.deviation_by_band.push_back(b);
  }
  return r;
}

inline ComparisonReport read_report(const std::filesystem::path& path) { return parse_report(detail::read_file(path)); }

inline void write_text(const std::filesystem::path& path, const std::string& text) { detail::write_file(path, text); }

}  // namespace slitlab::io
