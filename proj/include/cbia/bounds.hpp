#pragma once

// Converse LP over per-message DoF and the best orthogonal schedule.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbia/errors.hpp"
#include "cbia/net_model.hpp"
#include "cbia/rational.hpp"
#include "cbia/scheme.hpp"
#include "cbia/simplex.hpp"

namespace cbia {

/// Sum DoF of the unmerged four-cell network under full transmitter
/// cooperation. Proved analytically, not derived by converse_lp.
inline Rational four_cell_cooperation_bound() { return make_rational(8, 3); }

struct DoFConstraint {
  std::set<MessageId> messages;  // coefficients are all 1
  int rhs = 1;
  NodeId receiver;
  std::optional<NodeId> transmitter;  // empty for the per-receiver constraint
};

struct DoFPolytope {
  std::vector<MessageId> variables;
  std::vector<DoFConstraint> constraints;
};

struct ConverseReport {
  Rational sum_bound;
  std::map<MessageId, Rational> sum_solution;
  Rational symmetric_per_message;  // max over the polytope of min_m d_m
  Rational symmetric_per_cell;     // max over the polytope of min_c sum_{m in c} d_m
  std::map<std::string, Rational> per_cell;  // cell DoF at the per-cell optimum
  DoFPolytope polytope;
  std::size_t generated = 0;  // constraints before pruning
};

/// Resolvability constraints, duplicates and dominated (subset) constraints
/// removed.
inline DoFPolytope converse_polytope(const CBProblem& p, std::size_t* generated = nullptr) {
  for (const auto& [r, n] : p.topology.receivers) {
    if (n != 1) throw UnsupportedConfiguration("converse LP supports single-antenna receivers only ('" + r + "')");
  }
  std::vector<DoFConstraint> raw;
  for (const auto& [r, n] : p.topology.receivers) {
    const auto& wanted = p.desired_by(r);
    if (wanted.empty()) continue;
    raw.push_back({wanted, 1, r, std::nullopt});
    bool all_unique = true;
    for (const auto& m : wanted) all_unique = all_unique && p.messages_of(p.origin.at(m)).size() == 1;
    for (const auto& t : p.topology.heard_by(r)) {
      const auto wt = p.messages_of(t);
      if (wt.empty()) continue;
      for (const auto& m : wanted) {
        if (p.origin.at(m) == t) continue;
        std::set<MessageId> s(wt.begin(), wt.end());
        s.insert(m);
        raw.push_back({std::move(s), 1, r, t});
      }
      bool t_interferes = true;
      for (const auto& m : wanted) t_interferes = t_interferes && p.origin.at(m) != t;
      if (all_unique && wt.size() == 1 && t_interferes) {
        std::set<MessageId> s = wanted;
        s.insert(*wt.begin());
        raw.push_back({std::move(s), 1, r, t});
      }
    }
  }
  if (generated) *generated = raw.size();

  std::stable_sort(raw.begin(), raw.end(),
                   [](const DoFConstraint& a, const DoFConstraint& b) { return a.messages.size() > b.messages.size(); });
  DoFPolytope out;
  for (const auto& m : p.messages()) out.variables.push_back(m);
  for (auto& c : raw) {
    bool dominated = false;
    for (const auto& k : out.constraints) {
      if (std::includes(k.messages.begin(), k.messages.end(), c.messages.begin(), c.messages.end())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.constraints.push_back(std::move(c));
  }
  return out;
}

namespace detail {

inline std::vector<std::vector<Rational>> polytope_rows(const DoFPolytope& poly, std::size_t extra_cols) {
  std::map<MessageId, std::size_t> index;
  for (std::size_t i = 0; i < poly.variables.size(); ++i) index[poly.variables[i]] = i;
  std::vector<std::vector<Rational>> A;
  for (const auto& c : poly.constraints) {
    std::vector<Rational> row(poly.variables.size() + extra_cols);
    for (const auto& m : c.messages) row[index.at(m)] = 1;
    A.push_back(std::move(row));
  }
  return A;
}

/// max z s.t. polytope, z <= sum of d over each group.
inline LPResult max_min_groups(const DoFPolytope& poly, const std::vector<std::set<MessageId>>& groups) {
  const std::size_t n = poly.variables.size();
  auto A = polytope_rows(poly, 1);
  std::vector<Rational> b(A.size(), Rational(1));
  for (std::size_t i = 0; i < poly.constraints.size(); ++i) b[i] = poly.constraints[i].rhs;
  for (const auto& g : groups) {
    std::vector<Rational> row(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (g.count(poly.variables[j])) row[j] = -1;
    }
    row[n] = 1;
    A.push_back(std::move(row));
    b.emplace_back(0);
  }
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  return simplex_maximize(A, b, c);
}

}  // namespace detail

inline ConverseReport converse_lp(const CBProblem& p) {
  ConverseReport rep;
  rep.polytope = converse_polytope(p, &rep.generated);
  const auto& poly = rep.polytope;
  const std::size_t n = poly.variables.size();
  if (n == 0) return rep;

  auto A = detail::polytope_rows(poly, 0);
  std::vector<Rational> b;
  for (const auto& c : poly.constraints) b.emplace_back(c.rhs);
  const auto sum = simplex_maximize(A, b, std::vector<Rational>(n, Rational(1)));
  if (sum.unbounded) throw InvalidProblem("converse LP is unbounded (a message has no constraint)");
  rep.sum_bound = sum.value;
  for (std::size_t j = 0; j < n; ++j) rep.sum_solution[poly.variables[j]] = sum.x[j];

  std::vector<std::set<MessageId>> singles;
  for (const auto& m : poly.variables) singles.push_back({m});
  rep.symmetric_per_message = detail::max_min_groups(poly, singles).value;

  std::map<std::string, std::set<MessageId>> cells;
  for (const auto& m : poly.variables) cells[p.cell_of_message(m)].insert(m);
  std::vector<std::set<MessageId>> groups;
  for (const auto& [label, ms] : cells) groups.push_back(ms);
  const auto per_cell = detail::max_min_groups(poly, groups);
  rep.symmetric_per_cell = per_cell.value;
  for (const auto& [t, label] : p.cells.cell) rep.per_cell.try_emplace(label, 0);
  for (std::size_t j = 0; j < n; ++j) rep.per_cell[p.cell_of_message(poly.variables[j])] += per_cell.x[j];
  return rep;
}

inline nlohmann::json converse_to_json(const ConverseReport& rep) {
  nlohmann::json j;
  j["sum_bound"] = to_string(rep.sum_bound);
  j["symmetric_per_message"] = to_string(rep.symmetric_per_message);
  j["symmetric_per_cell"] = to_string(rep.symmetric_per_cell);
  j["per_message"] = nlohmann::json::object();
  for (const auto& [m, d] : rep.sum_solution) j["per_message"][m] = to_string(d);
  j["per_cell"] = nlohmann::json::object();
  for (const auto& [c, d] : rep.per_cell) j["per_cell"][c] = to_string(d);
  j["constraints_generated"] = rep.generated;
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : rep.polytope.constraints) {
    nlohmann::json prov = {{"receiver", c.receiver}};
    prov["transmitter"] = c.transmitter ? nlohmann::json(*c.transmitter) : nlohmann::json(nullptr);
    j["constraints"].push_back({{"messages", c.messages}, {"rhs", c.rhs}, {"provenance", prov}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Orthogonal schedules.

enum class Objective { sum, symmetric };

struct OrthogonalResult {
  Rational value;
  Schedule schedule;
  bool proven_optimal = true;
  std::size_t patterns = 0;  // maximal patterns examined
  std::size_t nodes = 0;
};

struct OrthogonalOptions {
  std::size_t message_cap = 24;
  std::size_t node_budget = 2'000'000;
};

namespace detail {

/// Incremental activation-pattern search. A message is served to all of its
/// destinations at once, so each destination must hear no other active
/// transmitter.
class PatternSearch {
 public:
  explicit PatternSearch(const CBProblem& p) : p_(p) {
    for (const auto& m : p.messages()) msgs_.push_back(m);
    for (const auto& m : msgs_) {
      std::set<NodeId> silent;
      const auto& own = p.origin.at(m);
      for (const auto& r : p.destinations(m)) {
        for (const auto& t : p.topology.heard_by(r)) {
          if (t != own) silent.insert(t);
        }
      }
      silence_.push_back(std::move(silent));
    }
  }

  const std::vector<MessageId>& messages() const { return msgs_; }

  bool can_add(std::size_t i) const {
    const auto& t = p_.origin.at(msgs_[i]);
    if (silenced_.count(t)) return false;
    auto it = tx_load_.find(t);
    if ((it == tx_load_.end() ? 0 : it->second) + 1 > p_.tx_antennas(t)) return false;
    for (const auto& s : silence_[i]) {
      if (active_.count(s)) return false;
    }
    for (const auto& r : p_.destinations(msgs_[i])) {
      auto jt = rx_load_.find(r);
      if ((jt == rx_load_.end() ? 0 : jt->second) + 1 > p_.rx_antennas(r)) return false;
    }
    return true;
  }

  void add(std::size_t i) {
    const auto& t = p_.origin.at(msgs_[i]);
    ++tx_load_[t];
    ++active_[t];
    for (const auto& s : silence_[i]) ++silenced_[s];
    for (const auto& r : p_.destinations(msgs_[i])) ++rx_load_[r];
    chosen_.push_back(i);
  }

  void remove_last() {
    const std::size_t i = chosen_.back();
    chosen_.pop_back();
    const auto& t = p_.origin.at(msgs_[i]);
    dec(tx_load_, t);
    dec(active_, t);
    for (const auto& s : silence_[i]) dec(silenced_, s);
    for (const auto& r : p_.destinations(msgs_[i])) dec(rx_load_, r);
  }

  const std::vector<std::size_t>& chosen() const { return chosen_; }

  Phase phase(const Rational& w) const {
    Phase ph{w, {}};
    for (std::size_t i : chosen_) {
      for (const auto& r : p_.destinations(msgs_[i])) ph.served.insert({msgs_[i], r});
    }
    return ph;
  }

 private:
  static void dec(std::map<NodeId, int>& m, const NodeId& k) {
    if (--m[k] == 0) m.erase(k);
  }

  const CBProblem& p_;
  std::vector<MessageId> msgs_;
  std::vector<std::set<NodeId>> silence_;
  std::map<NodeId, int> tx_load_, rx_load_, active_, silenced_;
  std::vector<std::size_t> chosen_;
};

}  // namespace detail

/// Best orthogonal schedule. Sum: largest activation pattern. Symmetric:
/// exact LP over maximal patterns maximizing the minimum per-cell DoF.
/// Above `message_cap` messages the search runs under `node_budget` and the
/// result is flagged when the budget runs out.
inline OrthogonalResult orthogonal_max(const CBProblem& p, Objective objective, OrthogonalOptions opt = {}) {
  OrthogonalResult out;
  out.schedule.name = objective == Objective::sum ? "orthogonal_sum" : "orthogonal_symmetric";
  detail::PatternSearch search(p);
  const std::size_t M = search.messages().size();
  if (M == 0) return out;
  const bool budgeted = M > opt.message_cap;
  bool exhausted = false;

  std::vector<std::vector<std::size_t>> maximal;
  std::vector<std::size_t> best;
  auto dfs = [&](auto&& self, std::size_t i) -> void {
    if (budgeted && out.nodes >= opt.node_budget) {
      exhausted = true;
      return;
    }
    ++out.nodes;
    if (objective == Objective::sum && search.chosen().size() + (M - i) <= best.size()) return;
    if (i == M) {
      if (objective == Objective::sum) {
        best = search.chosen();
        return;
      }
      // Maximal iff no skipped message could still join.
      std::vector<bool> in(M);
      for (std::size_t k : search.chosen()) in[k] = true;
      for (std::size_t k = 0; k < M; ++k) {
        if (!in[k] && search.can_add(k)) return;
      }
      maximal.push_back(search.chosen());
      return;
    }
    if (search.can_add(i)) {
      search.add(i);
      self(self, i + 1);
      search.remove_last();
    }
    self(self, i + 1);
  };
  dfs(dfs, 0);
  out.proven_optimal = !exhausted;

  auto phase_of = [&](const std::vector<std::size_t>& pat, const Rational& w) {
    for (std::size_t k : pat) search.add(k);
    Phase ph = search.phase(w);
    for (std::size_t k = 0; k < pat.size(); ++k) search.remove_last();
    return ph;
  };

  if (objective == Objective::sum) {
    out.patterns = 1;
    out.value = make_rational(static_cast<std::int64_t>(best.size()));
    if (!best.empty()) out.schedule.phases.push_back(phase_of(best, 1));
    return out;
  }

  out.patterns = maximal.size();
  std::map<std::string, std::size_t> cell_index;
  for (const auto& [t, label] : p.cells.cell) cell_index.try_emplace(label, cell_index.size());
  const std::size_t P = maximal.size(), C = cell_index.size();
  // Variables: pattern weights, then z.
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  std::vector<Rational> total(P + 1, Rational(1));
  total[P] = 0;
  A.push_back(total);
  b.emplace_back(1);
  for (std::size_t c = 0; c < C; ++c) {
    std::vector<Rational> row(P + 1);
    row[P] = 1;
    A.push_back(std::move(row));
    b.emplace_back(0);
  }
  for (std::size_t k = 0; k < P; ++k) {
    for (std::size_t i : maximal[k]) {
      const auto c = cell_index.at(p.cell_of_message(search.messages()[i]));
      A[1 + c][k] -= 1;
    }
  }
  std::vector<Rational> obj(P + 1);
  obj[P] = 1;
  const auto lp = simplex_maximize(A, b, obj);
  out.value = lp.value;
  for (std::size_t k = 0; k < P; ++k) {
    if (sgn(lp.x[k]) > 0) out.schedule.phases.push_back(phase_of(maximal[k], lp.x[k]));
  }
  // Leftover weight (if the optimum leaves slack) goes to the first pattern.
  Rational used = 0;
  for (const auto& ph : out.schedule.phases) used += ph.weight;
  if (used != 1 && P > 0) {
    if (out.schedule.phases.empty()) {
      out.schedule.phases.push_back(phase_of(maximal[0], 1 - used));
    } else {
      out.schedule.phases.front().weight += 1 - used;
    }
  }
  return out;
}

inline nlohmann::json orthogonal_to_json(const CBProblem& p, const OrthogonalResult& r) {
  nlohmann::json j;
  j["value"] = to_string(r.value);
  j["proven_optimal"] = r.proven_optimal;
  j["patterns"] = r.patterns;
  j["nodes"] = r.nodes;
  j["phases"] = nlohmann::json::array();
  for (const auto& ph : r.schedule.phases) {
    nlohmann::json served = nlohmann::json::array();
    for (const auto& [m, rx] : ph.served) served.push_back({{"message", m}, {"receiver", rx}});
    j["phases"].push_back({{"weight", to_string(ph.weight)}, {"served", served}});
  }
  j["per_cell"] = nlohmann::json::object();
  for (const auto& [c, d] : r.schedule.cell_dofs(p)) j["per_cell"][c] = to_string(d);
  return j;
}

}  // namespace cbia
