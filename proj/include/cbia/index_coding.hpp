#pragma once

// Gaussian index coding (GIC) view of CB problems: the two mappings, the
// half-rate alignment consistency test and message-level XOR decoding.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbia/errors.hpp"
#include "cbia/net_model.hpp"
#include "cbia/rational.hpp"
#include "cbia/scheme.hpp"

namespace cbia {

struct GICReceiver {
  int antennas = 1;
  std::set<MessageId> desired;
  std::set<MessageId> known;

  bool operator==(const GICReceiver&) const = default;
};

struct GICProblem {
  std::set<MessageId> messages;
  std::map<NodeId, GICReceiver> receivers;

  bool operator==(const GICProblem&) const = default;

  /// Messages neither desired nor known at r.
  std::set<MessageId> interferers(const NodeId& r) const {
    const auto& rx = receivers.at(r);
    std::set<MessageId> out;
    for (const auto& m : messages) {
      if (!rx.desired.count(m) && !rx.known.count(m)) out.insert(m);
    }
    return out;
  }
};

inline void validate(const GICProblem& g) {
  for (const auto& [r, rx] : g.receivers) {
    if (rx.antennas < 1) throw InvalidProblem("receiver '" + r + "' needs >= 1 antenna");
    if (rx.desired.empty()) throw InvalidProblem("receiver '" + r + "' desires nothing");
    for (const auto* s : {&rx.desired, &rx.known}) {
      for (const auto& m : *s) {
        if (!g.messages.count(m)) throw InvalidProblem("receiver '" + r + "' names unknown message '" + m + "'");
      }
    }
    for (const auto& m : rx.desired) {
      if (rx.known.count(m)) throw InvalidProblem("receiver '" + r + "' both desires and knows '" + m + "'");
    }
  }
}

/// Known set of r = messages of every transmitter r does not hear.
/// Receivers that desire nothing are dropped.
inline GICProblem cb_to_gic(const CBProblem& p) {
  GICProblem g;
  for (const auto& m : p.messages()) g.messages.insert(m);
  for (const auto& [r, n] : p.topology.receivers) {
    const auto& wanted = p.desired_by(r);
    if (wanted.empty()) continue;
    GICReceiver rx{n, wanted, {}};
    for (const auto& [m, t] : p.origin) {
      if (!p.topology.connected(r, t)) rx.known.insert(m);
    }
    g.receivers.emplace(r, std::move(rx));
  }
  return g;
}

/// One single-antenna transmitter per message, named after it; r hears
/// transmitter m unless m is in its known set.
inline CBProblem gic_to_cb(const GICProblem& g) {
  validate(g);
  CBProblem p;
  p.name = "gic";
  for (const auto& m : g.messages) {
    p.topology.transmitters[m] = 1;
    p.origin[m] = m;
  }
  for (const auto& [r, rx] : g.receivers) {
    p.topology.receivers[r] = rx.antennas;
    p.desired[r] = rx.desired;
    for (const auto& m : g.messages) {
      if (!rx.known.count(m)) p.topology.connectivity.insert({r, m});
    }
  }
  return finalize(std::move(p));
}

inline nlohmann::json gic_to_json(const GICProblem& g) {
  nlohmann::json j;
  j["messages"] = g.messages;
  j["receivers"] = nlohmann::json::array();
  for (const auto& [r, rx] : g.receivers) {
    j["receivers"].push_back({{"id", r}, {"antennas", rx.antennas}, {"desired", rx.desired}, {"known", rx.known}});
  }
  return j;
}

inline GICProblem gic_from_json(const nlohmann::json& j) {
  GICProblem g;
  auto ids = [](const nlohmann::json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path, "expected an array");
    std::set<MessageId> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string() || v[i].get<std::string>().empty()) {
        throw ParseError(path + "[" + std::to_string(i) + "]", "expected an id");
      }
      if (!out.insert(v[i].get<std::string>()).second) {
        throw ParseError(path + "[" + std::to_string(i) + "]", "duplicate id");
      }
    }
    return out;
  };
  if (!j.is_object()) throw ParseError("$", "expected an object");
  if (!j.contains("messages")) throw ParseError("messages", "missing field");
  g.messages = ids(j["messages"], "messages");
  if (!j.contains("receivers") || !j["receivers"].is_array()) throw ParseError("receivers", "expected an array");
  const auto& rs = j["receivers"];
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const std::string path = "receivers[" + std::to_string(i) + "]";
    if (!rs[i].is_object()) throw ParseError(path, "expected an object");
    for (const char* key : {"id", "desired"}) {
      if (!rs[i].contains(key)) throw ParseError(path + "." + key, "missing field");
    }
    if (!rs[i]["id"].is_string() || rs[i]["id"].get<std::string>().empty()) {
      throw ParseError(path + ".id", "expected an id");
    }
    GICReceiver rx;
    if (rs[i].contains("antennas")) {
      const auto& a = rs[i]["antennas"];
      if (!a.is_number_integer() || a.get<long long>() < 1) throw ParseError(path + ".antennas", "expected an integer >= 1");
      rx.antennas = a.get<int>();
    }
    rx.desired = ids(rs[i]["desired"], path + ".desired");
    if (rs[i].contains("known")) rx.known = ids(rs[i]["known"], path + ".known");
    if (!g.receivers.emplace(rs[i]["id"].get<std::string>(), std::move(rx)).second) {
      throw ParseError(path + ".id", "duplicate receiver id");
    }
  }
  try {
    validate(g);
  } catch (const InvalidProblem& e) {
    throw ParseError("$", e.what());
  }
  return g;
}

// ---------------------------------------------------------------------------

/// Two messages that both interfere at `receiver`.
struct CoInterference {
  NodeId receiver;
  MessageId first;
  MessageId second;
};

struct HalfDofVerdict {
  bool feasible = true;
  // Feasible: one 2-slot vector per alignment group.
  std::vector<std::set<MessageId>> groups;
  LinearScheme scheme;
  // Infeasible: `desired` at `receiver` is chained to `interferer` there.
  NodeId receiver;
  MessageId desired;
  MessageId interferer;
  std::vector<CoInterference> chain;
};

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

/// k-th of a pairwise independent family in C^2: e1, e2, [1,1], [1,2], ...
inline std::vector<cplx> half_dof_vector(std::size_t k) {
  if (k == 0) return {1.0, 0.0};
  if (k == 1) return {0.0, 1.0};
  return {1.0, static_cast<double>(k - 1)};
}

}  // namespace detail

/// 1/2 DoF per message is feasible iff no receiver's desired message ends up
/// aligned with one of its own interferers once every co-interfering pair is
/// merged into one alignment group.
inline HalfDofVerdict half_dof_feasible(const GICProblem& g) {
  validate(g);
  for (const auto& [r, rx] : g.receivers) {
    if (rx.antennas != 1 || rx.desired.size() != 1) {
      throw UnsupportedConfiguration("half-DoF test needs single-antenna receivers desiring one message ('" + r + "')");
    }
  }
  const std::vector<MessageId> msgs(g.messages.begin(), g.messages.end());
  std::map<MessageId, std::size_t> index;
  for (std::size_t i = 0; i < msgs.size(); ++i) index[msgs[i]] = i;

  detail::DisjointSets ds(msgs.size());
  // Adjacency for witness replay: edge (a,b) labelled with a receiver.
  std::vector<std::map<std::size_t, NodeId>> adj(msgs.size());
  for (const auto& [r, rx] : g.receivers) {
    const auto inter = g.interferers(r);
    std::vector<std::size_t> ids;
    for (const auto& m : inter) ids.push_back(index.at(m));
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        ds.unite(ids[a], ids[b]);
        adj[ids[a]].try_emplace(ids[b], r);
        adj[ids[b]].try_emplace(ids[a], r);
      }
    }
  }

  HalfDofVerdict v;
  for (const auto& [r, rx] : g.receivers) {
    const std::size_t d = index.at(*rx.desired.begin());
    for (const auto& m : g.interferers(r)) {
      const std::size_t i = index.at(m);
      if (ds.find(i) != ds.find(d)) continue;
      v.feasible = false;
      v.receiver = r;
      v.desired = msgs[d];
      v.interferer = m;
      // Shortest co-interference path from the desired message.
      std::vector<std::optional<std::size_t>> prev(msgs.size());
      std::vector<bool> seen(msgs.size());
      std::deque<std::size_t> q{d};
      seen[d] = true;
      while (!q.empty() && !seen[i]) {
        const std::size_t x = q.front();
        q.pop_front();
        for (const auto& [y, via] : adj[x]) {
          if (seen[y]) continue;
          seen[y] = true;
          prev[y] = x;
          q.push_back(y);
        }
      }
      for (std::size_t y = i; y != d; y = *prev[y]) {
        const std::size_t x = *prev[y];
        v.chain.push_back({adj[x].at(y), msgs[x], msgs[y]});
      }
      std::reverse(v.chain.begin(), v.chain.end());
      return v;
    }
  }

  std::map<std::size_t, std::set<MessageId>> comps;
  for (std::size_t i = 0; i < msgs.size(); ++i) comps[ds.find(i)].insert(msgs[i]);
  v.scheme.name = "half_dof";
  v.scheme.slots = 2;
  v.scheme.declared_tau = 1;
  std::size_t k = 0;
  for (const auto& [root, members] : comps) {
    const auto vec = detail::half_dof_vector(k);
    if (k >= 2) v.scheme.declared_tau = 2;
    for (const auto& m : members) v.scheme.streams.push_back(slot_stream(m, vec));
    v.groups.push_back(members);
    ++k;
  }
  return v;
}

/// Replays a witness against g: every step is a real co-interference pair,
/// consecutive steps share a message, and the chain joins the desired
/// message to an interferer at the same receiver.
inline bool witness_is_valid(const GICProblem& g, const HalfDofVerdict& v) {
  if (v.feasible || v.chain.empty() || !g.receivers.count(v.receiver)) return false;
  const auto& rx = g.receivers.at(v.receiver);
  if (!rx.desired.count(v.desired) || !g.interferers(v.receiver).count(v.interferer)) return false;
  MessageId at = v.desired;
  for (const auto& step : v.chain) {
    if (!g.receivers.count(step.receiver)) return false;
    const auto inter = g.interferers(step.receiver);
    if (!inter.count(step.first) || !inter.count(step.second) || step.first == step.second) return false;
    if (step.first != at) return false;
    at = step.second;
  }
  return at == v.interferer;
}

// ---------------------------------------------------------------------------

/// A coded message: XOR of the listed messages.
using CodedMessage = std::set<MessageId>;

struct XorResult {
  int dof = 0;
  std::map<NodeId, std::set<MessageId>> recovered;  // desired messages recovered per receiver
  std::set<MessageId> undelivered;
};

namespace detail {

/// Is `target` in the GF(2) span of `rows`? Gauss-Jordan elimination that
/// reduces the target alongside the pivots.
inline bool in_gf2_span(std::vector<std::vector<bool>> rows, std::vector<bool> target) {
  const std::size_t n = target.size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && !rows[piv][col]) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][col]) {
        for (std::size_t c = 0; c < n; ++c) rows[r][c] = rows[r][c] != rows[rank][c];
      }
    }
    if (target[col]) {
      for (std::size_t c = 0; c < n; ++c) target[c] = target[c] != rows[rank][c];
    }
    ++rank;
  }
  return std::none_of(target.begin(), target.end(), [](bool b) { return b; });
}

}  // namespace detail

/// Message-level decoding of an XOR plan sent over one channel use. A
/// receiver resolves every coded message when those it cannot compute from
/// side information number at most its antennas; it then recovers whatever
/// lies in the GF(2) span of coded and known messages.
inline XorResult verify_xor_scheme(const GICProblem& g, const std::vector<CodedMessage>& plan) {
  validate(g);
  const std::vector<MessageId> msgs(g.messages.begin(), g.messages.end());
  std::map<MessageId, std::size_t> index;
  for (std::size_t i = 0; i < msgs.size(); ++i) index[msgs[i]] = i;
  auto unit = [&](std::size_t i) {
    std::vector<bool> v(msgs.size());
    v[i] = true;
    return v;
  };
  std::vector<std::vector<bool>> coded;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    if (plan[k].empty()) throw InvalidParameter("coded message " + std::to_string(k) + " is empty");
    std::vector<bool> v(msgs.size());
    for (const auto& m : plan[k]) {
      auto it = index.find(m);
      if (it == index.end()) throw InvalidParameter("plan references unknown message '" + m + "'");
      v[it->second] = true;
    }
    coded.push_back(std::move(v));
  }

  XorResult out;
  std::set<MessageId> delivered = g.messages;
  for (const auto& [r, rx] : g.receivers) {
    std::vector<std::vector<bool>> span;
    for (const auto& m : rx.known) span.push_back(unit(index.at(m)));
    std::vector<std::size_t> unknown;
    for (std::size_t k = 0; k < plan.size(); ++k) {
      bool computable = std::includes(rx.known.begin(), rx.known.end(), plan[k].begin(), plan[k].end());
      if (!computable) unknown.push_back(k);
    }
    if (static_cast<int>(unknown.size()) <= rx.antennas) {
      for (std::size_t k : unknown) span.push_back(coded[k]);
    }
    auto& got = out.recovered[r];
    for (const auto& m : rx.desired) {
      if (detail::in_gf2_span(span, unit(index.at(m)))) {
        got.insert(m);
      } else {
        delivered.erase(m);
      }
    }
  }
  for (const auto& m : g.messages) {
    bool wanted = false;
    for (const auto& [r, rx] : g.receivers) wanted = wanted || rx.desired.count(m);
    if (!wanted) delivered.erase(m);
    if (wanted && !delivered.count(m)) out.undelivered.insert(m);
  }
  out.dof = static_cast<int>(delivered.size());
  return out;
}

}  // namespace cbia
