#pragma once

// Reproduction summary: every built-in scheme with its claimed DoF, the
// verified DoF, the converse bound and the best orthogonal sum DoF.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cbia/bounds.hpp"
#include "cbia/builtins.hpp"
#include "cbia/verifier.hpp"

namespace cbia {

struct ReportRow {
  std::string label;
  std::string problem;
  int tau = 1;
  std::string claimed;
  std::string verified;
  bool pass = false;
  std::string lp_bound;
  std::string orthogonal;
};

inline std::vector<ReportRow> run_report(std::uint64_t seed, int draws = 20) {
  std::map<std::string, std::string> lp_cache, orth_cache;
  std::vector<ReportRow> rows;
  for (const auto& c : builtin_suite()) {
    const auto p = builtin_problem(c.problem);
    const auto s = builtin_scheme(p, c.scheme);
    FadingSpec spec;
    spec.tau = c.tau;
    spec.seed = seed;
    const auto rep = verify(p, s, spec, draws);
    ReportRow row{c.label, c.problem, c.tau, to_string(s.claimed_sum_dof()), to_string(rep.sum_dof), rep.pass(), {}, {}};
    if (!lp_cache.count(c.problem)) {
      try {
        lp_cache[c.problem] = to_string(converse_lp(p).sum_bound);
      } catch (const UnsupportedConfiguration&) {
        lp_cache[c.problem] = "n/a";
      }
      const auto o = orthogonal_max(p, Objective::sum);
      orth_cache[c.problem] = to_string(o.value) + (o.proven_optimal ? "" : " (best found)");
    }
    row.lp_bound = lp_cache[c.problem];
    row.orthogonal = orth_cache[c.problem];
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string format_report(const std::vector<ReportRow>& rows) {
  const std::vector<std::string> head{"scheme", "tau", "claimed DoF", "verified", "LP bound", "orthogonal max"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.label, std::to_string(r.tau), r.claimed, r.verified + (r.pass ? " (pass)" : " (FAIL)"),
                     r.lp_bound, r.orthogonal});
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) width[i] = head[i].size();
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << std::string(width[i] - row[i].size(), ' ') << (i + 1 < row.size() ? "  " : "\n");
    }
  };
  line(head);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& row : cells) line(row);
  out << "\nfour-cell downlink with full transmitter cooperation: sum DoF <= "
      << to_string(four_cell_cooperation_bound()) << " (analytical)\n";
  return out.str();
}

inline nlohmann::json report_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"scheme", r.label},
                 {"problem", r.problem},
                 {"tau", r.tau},
                 {"claimed", r.claimed},
                 {"verified", r.verified},
                 {"pass", r.pass},
                 {"lp_bound", r.lp_bound},
                 {"orthogonal_max", r.orthogonal}});
  }
  return j;
}

}  // namespace cbia
