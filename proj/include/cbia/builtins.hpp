#pragma once

// Named problems and schemes, so runs need no fixture files.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cbia/errors.hpp"
#include "cbia/index_coding.hpp"
#include "cbia/net_model.hpp"
#include "cbia/schemes.hpp"

namespace cbia {

namespace detail {

inline std::vector<int> parse_ints(const std::string& text, const std::string& seps, const std::string& what) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) throw InvalidParameter("malformed " + what + ": '" + text + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(cur, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cur.size()) throw InvalidParameter("malformed " + what + ": '" + text + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (seps.find(c) != std::string::npos) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names{
      "four_cell_downlink", "four_cell_downlink_merged", "four_cell_uplink", "four_cell_uplink_merged",
      "macro_femto",        "linear:K",                  "square:MxN",       "hex:MxN",
      "duk:D,U,K"};
  return names;
}

/// Builds a named problem: the four-cell variants, macro_femto, or a
/// parameterized family such as "linear:12", "square:5x5", "hex:7x7",
/// "duk:1,1,5".
inline CBProblem builtin_problem(const std::string& name) {
  if (name == "four_cell_downlink") return make_four_cell();
  if (name == "four_cell_downlink_merged") return make_four_cell(Direction::downlink, true);
  if (name == "four_cell_uplink") return make_four_cell(Direction::uplink);
  if (name == "four_cell_uplink_merged") return make_four_cell(Direction::uplink, true);
  if (name == "macro_femto") return make_macro_femto();
  const auto colon = name.find(':');
  if (colon != std::string::npos) {
    const std::string family = name.substr(0, colon), args = name.substr(colon + 1);
    if (family == "linear") {
      auto v = detail::parse_ints(args, "", "array size");
      return make_linear_array(v[0]);
    }
    if (family == "square" || family == "hex") {
      auto v = detail::parse_ints(args, "x", "array dimensions");
      if (v.size() != 2) throw InvalidParameter("expected MxN dimensions in '" + name + "'");
      return family == "square" ? make_square_array(v[0], v[1]) : make_hex_array(v[0], v[1]);
    }
    if (family == "duk") {
      auto v = detail::parse_ints(args, ",", "(D,U,K)");
      if (v.size() != 3) throw InvalidParameter("expected D,U,K in '" + name + "'");
      return make_symmetric_duk(v[0], v[1], v[2]);
    }
  }
  throw InvalidParameter("unknown built-in problem '" + name + "'");
}

/// Scheme `name` for problem `p`. Short names (coherent, iid, duk,
/// interference_diversity, aligned_reuse, conventional_reuse) resolve
/// against the problem; full names like four_cell_downlink_coherent also work.
inline LinearScheme builtin_scheme(const CBProblem& p, const std::string& name) {
  const bool down = p == make_four_cell(), up = p == make_four_cell(Direction::uplink);
  if (name == "four_cell_downlink_coherent" || (name == "coherent" && down)) return four_cell_downlink_coherent(p);
  if (name == "four_cell_downlink_iid" || (name == "iid" && down)) return four_cell_downlink_iid(p);
  if (name == "four_cell_uplink_coherent" || (name == "coherent" && up)) return four_cell_uplink_coherent(p);
  if (name == "four_cell_uplink_iid" || (name == "iid" && up)) return four_cell_uplink_iid(p);
  if (name == "interference_diversity") return interference_diversity_scheme(p);
  if (name == "aligned_reuse") return schedule_to_scheme(p, aligned_reuse(p));
  if (name == "conventional_reuse") return schedule_to_scheme(p, conventional_reuse(p));
  if (name == "duk") {
    // Recover (D,U,K) from the problem shape.
    const int K = static_cast<int>(p.topology.transmitters.size());
    for (int D = 0; D < K; ++D) {
      for (int U = 0; U <= D && D + U < K; ++U) {
        if (make_symmetric_duk(D, U, K) == p) return symmetric_duk_scheme(D, U, K);
      }
    }
    throw MismatchError("problem is not a symmetric (D,U,K) network");
  }
  if (name == "coherent" || name == "iid") throw MismatchError("'" + name + "' needs a four-cell problem");
  throw InvalidParameter("unknown built-in scheme '" + name + "'");
}

/// Receiver r_i desires W_i. The example where 1/2 DoF per message fails.
inline GICProblem fig10_gic() {
  GICProblem g;
  g.messages = {"W1", "W2", "W3", "W4", "W5"};
  g.receivers["r1"] = {1, {"W1"}, {"W2", "W5"}};
  g.receivers["r2"] = {1, {"W2"}, {"W1", "W3"}};
  g.receivers["r3"] = {1, {"W3"}, {"W1", "W2", "W4"}};
  g.receivers["r4"] = {1, {"W4"}, {"W1", "W2", "W3", "W5"}};
  g.receivers["r5"] = {1, {"W5"}, {"W1", "W2", "W3", "W4"}};
  return g;
}

/// GIC image of the macro/femto network, where XOR coding beats any CB scheme.
inline GICProblem fig16_gic() { return cb_to_gic(make_macro_femto()); }

inline std::vector<CodedMessage> fig16_xor_plan() { return {{"a2", "b1"}, {"a1", "c1"}}; }

inline GICProblem builtin_gic(const std::string& name) {
  if (name == "fig10") return fig10_gic();
  if (name == "fig16") return fig16_gic();
  throw InvalidParameter("unknown built-in GIC problem '" + name + "'");
}

struct BuiltinCase {
  std::string label;
  std::string problem;
  std::string scheme;
  int tau = 1;
  bool expect_pass = true;
};

/// Every built-in scheme at the coherence it is meant for, plus the
/// coherent downlink at tau=1 as a known failure.
inline std::vector<BuiltinCase> builtin_suite() {
  return {
      {"four-cell downlink coherent", "four_cell_downlink", "coherent", 3, true},
      {"four-cell downlink coherent, tau=1", "four_cell_downlink", "coherent", 1, false},
      {"four-cell downlink iid", "four_cell_downlink", "iid", 1, true},
      {"four-cell uplink coherent", "four_cell_uplink", "coherent", 3, true},
      {"four-cell uplink iid", "four_cell_uplink", "iid", 1, true},
      {"(1,1,5) network", "duk:1,1,5", "duk", 1, true},
      {"(2,1,5) network", "duk:2,1,5", "duk", 4, true},
      {"(2,1,6) network", "duk:2,1,6", "duk", 5, true},
      {"interference diversity", "macro_femto", "interference_diversity", 3, true},
      {"aligned reuse, linear 12", "linear:12", "aligned_reuse", 1, true},
      {"aligned reuse, square 5x5", "square:5x5", "aligned_reuse", 1, true},
      {"aligned reuse, hex 7x7", "hex:7x7", "aligned_reuse", 1, true},
      {"conventional reuse, linear 12", "linear:12", "conventional_reuse", 1, true},
      {"conventional reuse, square 4x4", "square:4x4", "conventional_reuse", 1, true},
      {"conventional reuse, hex 6x6", "hex:6x6", "conventional_reuse", 1, true},
  };
}

}  // namespace cbia
