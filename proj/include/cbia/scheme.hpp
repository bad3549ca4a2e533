#pragma once

// Blind linear schemes and orthogonal schedules.

#include <nlohmann/json.hpp>

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbia/errors.hpp"
#include "cbia/linalg.hpp"
#include "cbia/net_model.hpp"
#include "cbia/rational.hpp"

namespace cbia {

/// One transmitted symbol: a per-slot antenna vector at the message origin.
struct Stream {
  MessageId message;
  std::vector<std::vector<cplx>> vectors;  // [slot][antenna]

  bool active_in(int slot) const {
    for (const auto& x : vectors.at(static_cast<std::size_t>(slot))) {
      if (x != cplx{}) return true;
    }
    return false;
  }
};

/// A T-slot blind linear precoding plan. `declared_tau` is what the scheme
/// was designed for; the verifier decides what it actually needs.
struct LinearScheme {
  std::string name;
  int slots = 0;
  int declared_tau = 1;
  std::vector<Stream> streams;

  std::map<MessageId, int> stream_counts() const {
    std::map<MessageId, int> out;
    for (const auto& s : streams) ++out[s.message];
    return out;
  }

  /// Streams of `m` over T. Zero for messages without streams.
  Rational claimed_dof(const MessageId& m) const {
    if (slots == 0) return 0;
    int n = 0;
    for (const auto& s : streams) n += s.message == m;
    return make_rational(n, slots);
  }

  Rational claimed_sum_dof() const {
    if (slots == 0) return 0;
    return make_rational(static_cast<std::int64_t>(streams.size()), slots);
  }

  bool empty() const { return streams.empty(); }
};

/// Checks the scheme against a problem; throws MismatchError on unknown
/// messages or antenna-count mismatches.
inline void check_compatible(const CBProblem& p, const LinearScheme& s) {
  if (s.slots < 0) throw MismatchError("negative slot count");
  if (s.declared_tau < 1) throw MismatchError("declared_tau must be >= 1");
  bool any_nonzero = false;
  for (const auto& st : s.streams) {
    auto it = p.origin.find(st.message);
    if (it == p.origin.end()) throw MismatchError("scheme streams unknown message '" + st.message + "'");
    if (static_cast<int>(st.vectors.size()) != s.slots) {
      throw MismatchError("stream of '" + st.message + "' has " + std::to_string(st.vectors.size()) +
                          " slots, scheme has " + std::to_string(s.slots));
    }
    const int nt = p.tx_antennas(it->second);
    for (int n = 0; n < s.slots; ++n) {
      if (static_cast<int>(st.vectors[static_cast<std::size_t>(n)].size()) != nt) {
        throw MismatchError("stream of '" + st.message + "' has wrong antenna count in slot " +
                            std::to_string(n + 1));
      }
      any_nonzero = any_nonzero || st.active_in(n);
    }
  }
  if (!s.streams.empty() && !any_nonzero) throw MismatchError("scheme has streams but no nonzero vector");
}

/// Single-antenna stream from slot coefficients.
inline Stream slot_stream(MessageId m, const std::vector<cplx>& coeffs) {
  Stream s{std::move(m), {}};
  for (const auto& c : coeffs) s.vectors.push_back({c});
  return s;
}

inline nlohmann::json scheme_to_json(const LinearScheme& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["T"] = s.slots;
  j["declared_tau"] = s.declared_tau;
  j["streams"] = nlohmann::json::array();
  for (const auto& st : s.streams) {
    nlohmann::json vecs = nlohmann::json::array();
    for (const auto& slot : st.vectors) {
      nlohmann::json v = nlohmann::json::array();
      for (const auto& x : slot) v.push_back({x.real(), x.imag()});
      vecs.push_back(v);
    }
    j["streams"].push_back({{"message", st.message}, {"vectors", vecs}});
  }
  return j;
}

inline LinearScheme scheme_from_json(const nlohmann::json& j) {
  auto need = [&](const nlohmann::json& o, const char* key, const std::string& path) -> const nlohmann::json& {
    if (!o.is_object() || !o.contains(key)) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
    return o.at(key);
  };
  LinearScheme s;
  try {
    s.slots = need(j, "T", "").get<int>();
    s.declared_tau = j.value("declared_tau", 1);
    s.name = j.value("name", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("T", e.what());
  }
  if (s.slots < 0) throw ParseError("T", "must be >= 0");
  const auto& streams = need(j, "streams", "");
  if (!streams.is_array()) throw ParseError("streams", "expected an array");
  for (std::size_t i = 0; i < streams.size(); ++i) {
    std::string path = "streams[" + std::to_string(i) + "]";
    Stream st;
    const auto& m = need(streams[i], "message", path);
    if (!m.is_string() || m.get<std::string>().empty()) throw ParseError(path + ".message", "expected an id");
    st.message = m.get<std::string>();
    const auto& vecs = need(streams[i], "vectors", path);
    if (!vecs.is_array() || static_cast<int>(vecs.size()) != s.slots) {
      throw ParseError(path + ".vectors", "expected one vector per slot");
    }
    for (std::size_t n = 0; n < vecs.size(); ++n) {
      std::vector<cplx> v;
      if (!vecs[n].is_array()) throw ParseError(path + ".vectors[" + std::to_string(n) + "]", "expected an array");
      for (const auto& x : vecs[n]) {
        if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number()) {
          throw ParseError(path + ".vectors[" + std::to_string(n) + "]", "expected [re, im] pairs");
        }
        v.emplace_back(x[0].get<double>(), x[1].get<double>());
      }
      st.vectors.push_back(std::move(v));
    }
    s.streams.push_back(std::move(st));
  }
  return s;
}

// ---------------------------------------------------------------------------

/// (message, receiver)
using Delivery = std::pair<MessageId, NodeId>;

struct Phase {
  Rational weight;
  std::set<Delivery> served;
};

/// Time sharing between interference-free activation patterns.
struct Schedule {
  std::string name;
  std::vector<Phase> phases;

  /// Sum of the weights of the phases serving `m`.
  Rational message_dof(const MessageId& m) const {
    Rational total = 0;
    for (const auto& ph : phases) {
      for (const auto& [msg, rx] : ph.served) {
        if (msg == m) {
          total += ph.weight;
          break;
        }
      }
    }
    return total;
  }

  std::map<MessageId, Rational> message_dofs(const CBProblem& p) const {
    std::map<MessageId, Rational> out;
    for (const auto& m : p.messages()) out[m] = message_dof(m);
    return out;
  }

  std::map<std::string, Rational> cell_dofs(const CBProblem& p) const {
    std::map<std::string, Rational> out;
    for (const auto& [t, label] : p.cells.cell) out.try_emplace(label, 0);
    for (const auto& [m, d] : message_dofs(p)) out[p.cell_of_message(m)] += d;
    return out;
  }

  Rational sum_dof(const CBProblem& p) const {
    Rational total = 0;
    for (const auto& [m, d] : message_dofs(p)) total += d;
    return total;
  }
};

/// Transmitters active in a phase (origins of its served messages).
inline std::set<NodeId> active_transmitters(const CBProblem& p, const Phase& ph) {
  std::set<NodeId> out;
  for (const auto& [m, r] : ph.served) out.insert(p.origin.at(m));
  return out;
}

/// Throws InvalidProblem unless every phase is interference free and the
/// weights are nonnegative and sum to one (an empty schedule is allowed).
inline void validate(const CBProblem& p, const Schedule& s) {
  Rational total = 0;
  for (std::size_t i = 0; i < s.phases.size(); ++i) {
    const auto& ph = s.phases[i];
    const std::string where = "phase " + std::to_string(i);
    if (sgn(ph.weight) < 0) throw InvalidProblem(where + " has negative weight");
    total += ph.weight;
    std::map<NodeId, std::set<MessageId>> per_tx;
    std::map<NodeId, int> per_rx;
    for (const auto& [m, r] : ph.served) {
      auto it = p.origin.find(m);
      if (it == p.origin.end()) throw InvalidProblem(where + " serves unknown message '" + m + "'");
      if (!p.desired_by(r).count(m)) throw InvalidProblem(where + ": receiver '" + r + "' does not desire '" + m + "'");
      per_tx[it->second].insert(m);
      ++per_rx[r];
    }
    for (const auto& [t, ms] : per_tx) {
      if (static_cast<int>(ms.size()) > p.tx_antennas(t)) {
        throw InvalidProblem(where + ": transmitter '" + t + "' serves more messages than it has antennas");
      }
    }
    for (const auto& [r, n] : per_rx) {
      if (n > p.rx_antennas(r)) throw InvalidProblem(where + ": receiver '" + r + "' served beyond its antennas");
    }
    const auto active = active_transmitters(p, ph);
    for (const auto& [m, r] : ph.served) {
      const auto& own = p.origin.at(m);
      for (const auto& t : p.topology.heard_by(r)) {
        if (t != own && active.count(t)) {
          throw InvalidProblem(where + ": receiver '" + r + "' hears active transmitter '" + t + "'");
        }
      }
    }
  }
  if (!s.phases.empty() && total != 1) throw InvalidProblem("phase weights sum to " + to_string(total));
}

}  // namespace cbia
