// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gsiplab/algorithms.hpp"
#include "gsiplab/problem_format.hpp"
#include "json.hpp"

namespace gsiplab::io {

/// Drops the sign of negative zero.
inline double tidy(double v) { return v == 0.0 ? 0.0 : v; }

inline std::vector<double> tidy(std::span<const double> p) {
  std::vector<double> out(p.begin(), p.end());
  for (double& v : out) v = tidy(v);
  return out;
}

/// Components joined by ';'.
inline std::string join_point(std::span<const double> p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i != 0) out += ';';
    out += format_real(tidy(p[i]));
  }
  return out;
}

/// One row per iteration. Columns: k, one `x.<name>` column per outer
/// variable, f_Lk, llp_y, llp_value, aux_y, aux_value, sip_value, added_y,
/// Yset_size, status. Y-points are ';'-joined, absent values are empty cells,
/// and the final run status appears on the last row only.
inline void write_csv(std::ostream& os, const GsipProblem& p, const RunResult& result) {
  os << "k";
  for (const auto& c : p.outer().coordinates()) os << ",x." << c.name;
  os << ",f_Lk,llp_y,llp_value,aux_y,aux_value,sip_value,added_y,Yset_size,status\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const IterateRecord& r = result.trace[i];
    os << r.k;
    for (double v : r.x) os << ',' << format_real(tidy(v));
    os << ',' << format_real(tidy(r.lower_bound)) << ',';
    if (r.llp) {
      if (r.llp->infeasible) {
        os << "infeasible,";
      } else {
        os << join_point(r.llp->y) << ',' << format_real(tidy(r.llp->value));
      }
    } else {
      os << ',';
    }
    os << ',';
    if (r.aux) os << join_point(r.aux->y) << ',' << format_real(tidy(r.aux->value));
    else os << ',';
    os << ',';
    if (r.sip_llp) os << format_real(tidy(r.sip_llp->value));
    os << ',';
    if (r.added_point) os << join_point(*r.added_point);
    os << ',' << r.yset_size_after << ',';
    if (i + 1 == result.trace.size()) os << to_string(result.status);
    os << '\n';
  }
}

inline nlohmann::json real_or_null(double v) { return std::isfinite(v) ? nlohmann::json(tidy(v)) : nlohmann::json(); }

/// Fields of one iterate, keyed by their conventional names.
inline nlohmann::json to_json(const IterateRecord& r) {
  using nlohmann::json;
  json j;
  j["k"] = r.k;
  j["x_k"] = tidy(r.x);
  j["f_Lk"] = tidy(r.lower_bound);
  if (r.llp) {
    j["llp"] = r.llp->infeasible ? json{{"y_k", nullptr}, {"value", nullptr}, {"infeasible", true}}
                                 : json{{"y_k", tidy(r.llp->y)}, {"value", tidy(r.llp->value)}, {"infeasible", false}};
  } else {
    j["llp"] = nullptr;
  }
  j["aux"] = r.aux ? json{{"y_tilde_k", tidy(r.aux->y)}, {"value", tidy(r.aux->value)}} : json();
  j["sip_llp"] = r.sip_llp ? json{{"y_k", tidy(r.sip_llp->y)}, {"value", tidy(r.sip_llp->value)}} : json();
  j["added_point"] = r.added_point ? json(tidy(*r.added_point)) : json();
  j["Yset_size_after"] = r.yset_size_after;
  return j;
}

inline nlohmann::json to_json(const GsipProblem& p, const RunResult& result) {
  nlohmann::json j;
  j["problem"] = p.name();
  j["variant"] = std::string(to_string(result.variant));
  j["status"] = std::string(to_string(result.status));
  j["final_lower_bound"] = real_or_null(result.final_lower_bound);
  j["trace"] = nlohmann::json::array();
  for (const auto& r : result.trace) j["trace"].push_back(to_json(r));
  return j;
}

}  // namespace gsiplab::io
