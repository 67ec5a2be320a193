#pragma once

// Serialization of run records. JSON keys keep insertion order and doubles
// are written with 17 significant digits, so equal runs give equal bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"
#include "sqc/certify.hpp"
#include "sqc/tartar.hpp"

namespace sqc {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline void write_json(std::ostream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(key).dump() << ": ";
        write_json(os, value, indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      // Arrays of scalars stay on one line.
      bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      if (j.empty() || flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
      return;
  }
}

inline Json matrix_json(const Eigen::MatrixXd& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Json opt_double(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace detail

inline void write_json(std::ostream& os, const Json& j) {
  detail::write_json(os, j, 0);
  os << "\n";
}

inline Json header_json(const std::string& command) {
  Json j;
  j["schema"] = kSchema;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["command"] = command;
  return j;
}

inline Json to_json(const RunConfig& c) {
  Json j;
  j["n"] = c.n;
  j["m"] = c.m;
  j["epsilon"] = detail::opt_double(c.epsilon);
  j["safety"] = c.safety;
  j["k"] = detail::opt_double(c.k);
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["restarts"] = c.restarts;
  j["grid"] = c.grid_resolution;
  j["exclusion"] = c.exclusion_radius;
  j["nodes"] = c.nodes_per_axis;
  j["diag-rule"] = c.diag_rule;
  j["tolerance"] = c.defect_tolerance;
  j["format"] = c.format == ReportFormat::json ? "json" : "csv";
  return j;
}

inline Json to_json(const BasisCheck& b) {
  Json j;
  j["ranks"] = b.ranks;
  j["max_rank"] = b.max_rank;
  j["rank_tolerance"] = b.rank_tolerance;
  j["gram"] = detail::matrix_json(b.gram);
  j["ok"] = b.ok;
  return j;
}

inline Json to_json(const SpectrumScan& s) {
  Json j;
  j["grid_resolution"] = s.grid_resolution;
  j["exclusion_radius"] = s.exclusion_radius;
  j["admissible_points"] = s.admissible_points;
  j["grid_min_sigma_n"] = s.grid_min_sigma_n;
  j["min_sigma_n"] = s.min_sigma_n;
  j["argmin_alpha"] = {s.argmin_alpha(0), s.argmin_alpha(1), s.argmin_alpha(2)};
  j["axis_sigmas"] = s.axis_sigmas;
  j["neighborhood_continuity"] = s.neighborhood_continuity;
  return j;
}

inline Json to_json(const Moments& mom, int nodes) {
  return Json{{"I0", mom.i0}, {"I2", mom.i2}, {"I4", mom.i4}, {"nodes_per_axis", nodes}};
}

inline Json to_json(const KSearchResult& k) {
  Json j;
  j["epsilon"] = k.epsilon;
  j["k"] = k.k;
  j["min_defect"] = k.min_defect;
  j["search_radius"] = k.search_radius;
  j["samples"] = k.samples;
  j["restarts"] = k.restarts;
  j["seed"] = k.seed;
  j["probes"] = k.probes;
  j["shell_min"] = k.shell_min;
  j["success"] = k.success;
  return j;
}

inline Json to_json(const DefectReport& d) {
  Json j;
  j["integral_F_of_B"] = d.integral_F_of_B;
  j["F_at_mean"] = d.F_at_mean;
  j["defect"] = d.defect;
  j["epsilon"] = d.epsilon;
  j["k"] = d.k;
  j["nodes_per_axis"] = d.nodes_per_axis;
  j["active_axes"] = d.active_axes;
  return j;
}

inline Json to_json(const TartarSummary& t) {
  Json j;
  j["forms"] = t.forms;
  j["accepted"] = t.accepted;
  j["accepted_nonconvex"] = t.accepted_nonconvex;
  j["fields"] = t.fields;
  j["violations"] = t.violations;
  j["min_scaled_defect"] = t.min_scaled_defect;
  j["convex_control_violations"] = t.convex_control_violations;
  j["min_convex_control_defect"] = t.min_convex_control_defect;
  return j;
}

inline Json to_json(const CertificateReport& r) {
  Json j = header_json("certify");
  j["config"] = to_json(r.config);
  j["basis_check"] = to_json(r.basis_check);
  if (r.spectrum) {
    Json s = to_json(*r.spectrum);
    s["threshold"] = r.spectrum_threshold;
    s["ok"] = r.spectrum_ok;
    j["spectrum"] = s;
  }
  if (r.structure) {
    j["structure"] = {{"div_free", r.structure->div_free},
                      {"mean_norm", r.structure->mean_norm},
                      {"membership_residual", r.structure->membership_residual},
                      {"ok", r.structure->ok}};
  }
  if (r.moments) j["moments"] = to_json(*r.moments, r.config.nodes_per_axis);
  if (r.epsilon) {
    j["epsilon"] = {{"value", r.epsilon->value},
                    {"source", r.epsilon->overridden ? "override" : "choose_epsilon"},
                    {"safety", r.epsilon->safety},
                    {"inequality_value", r.epsilon->inequality_value}};
  }
  if (r.k_search) {
    Json k = to_json(*r.k_search);
    k["source"] = r.k_overridden ? "override" : "find_k";
    j["k_search"] = k;
  }
  if (r.convexity) {
    j["convexity_min_defect"] = {{"value", r.convexity->value},
                                 {"seed", r.convexity->seed},
                                 {"tolerance", r.convexity->tolerance},
                                 {"ok", r.convexity->ok}};
  }
  if (r.defect) {
    Json d = to_json(*r.defect);
    d["threshold"] = r.defect_threshold;
    d["quadrature_tolerance"] = kQuadratureTolerance;
    j["sq_defect"] = d;
  }
  j["verdict"] = to_string(r.verdict);
  j["failed_stage"] = r.failed_stage.empty() ? Json(nullptr) : Json(r.failed_stage);
  if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
  return j;
}

/// CSV of the sphere scan: one row per grid point, then summary comments.
inline void write_spectrum_csv(std::ostream& os, const SpectrumScan& s) {
  os << "alpha1,alpha2,alpha3,sigma_n,admissible\n";
  for (const auto& p : s.samples) {
    os << detail::format_double(p.alpha(0)) << ',' << detail::format_double(p.alpha(1)) << ','
       << detail::format_double(p.alpha(2)) << ',' << detail::format_double(p.sigma_n) << ','
       << (p.admissible ? 1 : 0) << '\n';
  }
  os << "# min_sigma_n," << detail::format_double(s.min_sigma_n) << '\n';
  os << "# argmin_alpha," << detail::format_double(s.argmin_alpha(0)) << ','
     << detail::format_double(s.argmin_alpha(1)) << ',' << detail::format_double(s.argmin_alpha(2)) << '\n';
  os << "# axis_sigmas," << detail::format_double(s.axis_sigmas[0]) << ','
     << detail::format_double(s.axis_sigmas[1]) << ',' << detail::format_double(s.axis_sigmas[2]) << '\n';
}

}  // namespace sqc
