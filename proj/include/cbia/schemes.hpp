#pragma once

// Constructors for every built-in scheme and reuse schedule.

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cbia/errors.hpp"
#include "cbia/net_model.hpp"
#include "cbia/rational.hpp"
#include "cbia/scheme.hpp"

namespace cbia {

namespace detail {

inline void require_companion(const CBProblem& companion, const CBProblem& expected, const std::string& scheme) {
  if (!(companion == expected)) {
    throw MismatchError("scheme '" + scheme + "' is built for " + expected.name + ", not " +
                        (companion.name.empty() ? std::string("this problem") : companion.name));
  }
}

inline LinearScheme single_antenna_scheme(std::string name, int slots, int tau,
                                          const std::vector<std::pair<MessageId, std::vector<cplx>>>& rows) {
  LinearScheme s{std::move(name), slots, tau, {}};
  for (const auto& [m, coeffs] : rows) s.streams.push_back(slot_stream(m, coeffs));
  return s;
}

}  // namespace detail

/// 8/3 DoF over three slots: identity columns plus [1,1,1] for the b1/d1
/// alignment group.
inline LinearScheme four_cell_downlink_coherent(const CBProblem& companion = make_four_cell()) {
  detail::require_companion(companion, make_four_cell(), "four_cell_downlink_coherent");
  return detail::single_antenna_scheme("four_cell_downlink_coherent", 3, 3,
                                       {{"a1", {1, 0, 0}},
                                        {"a2", {0, 1, 0}},
                                        {"b1", {1, 1, 1}},
                                        {"b2", {0, 1, 0}},
                                        {"c1", {1, 0, 0}},
                                        {"c2", {0, 0, 1}},
                                        {"d1", {1, 1, 1}},
                                        {"d2", {0, 0, 1}}});
}

/// 5/2 DoF over two slots with no coherence: b1, c2 and d2 are not served.
inline LinearScheme four_cell_downlink_iid(const CBProblem& companion = make_four_cell()) {
  detail::require_companion(companion, make_four_cell(), "four_cell_downlink_iid");
  return detail::single_antenna_scheme(
      "four_cell_downlink_iid", 2, 1,
      {{"a1", {1, 0}}, {"a2", {0, 1}}, {"b2", {0, 1}}, {"c1", {1, 0}}, {"d1", {1, 1}}});
}

inline LinearScheme four_cell_uplink_coherent(
    const CBProblem& companion = make_four_cell(Direction::uplink)) {
  detail::require_companion(companion, make_four_cell(Direction::uplink), "four_cell_uplink_coherent");
  // Pairs that co-interfere at one base station share a vector; only the
  // group aligned at D uses a vector with more than one nonzero slot.
  return detail::single_antenna_scheme("four_cell_uplink_coherent", 3, 3,
                                       {{"b1", {1, 0, 0}},
                                        {"c2", {1, 0, 0}},
                                        {"a1", {0, 1, 0}},
                                        {"d2", {0, 1, 0}},
                                        {"a2", {0, 0, 1}},
                                        {"d1", {0, 0, 1}},
                                        {"b2", {1, 1, 1}},
                                        {"c1", {1, 1, 1}}});
}

/// 5/2 DoF over two slots with no coherence. {a2, d1} align on slot 2 at C
/// and {b2, c1} on slot 1 at D; a1 uses [1,1] so that A separates it from a2.
inline LinearScheme four_cell_uplink_iid(const CBProblem& companion = make_four_cell(Direction::uplink)) {
  detail::require_companion(companion, make_four_cell(Direction::uplink), "four_cell_uplink_iid");
  return detail::single_antenna_scheme(
      "four_cell_uplink_iid", 2, 1,
      {{"a1", {1, 1}}, {"a2", {0, 1}}, {"b2", {1, 0}}, {"c1", {1, 0}}, {"d1", {0, 1}}});
}

/// K alignment vectors in the (K-D+U)-dim slot space: identity columns
/// first, then unit-norm complex vectors from a fixed seed.
inline std::vector<std::vector<cplx>> duk_alignment_vectors(int D, int U, int K) {
  const int T = K - D + U;
  std::vector<std::vector<cplx>> v;
  for (int k = 0; k < std::min(K, T); ++k) {
    std::vector<cplx> e(static_cast<std::size_t>(T));
    e[static_cast<std::size_t>(k)] = 1.0;
    v.push_back(std::move(e));
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(v.size()) < K) {
    std::vector<cplx> g(static_cast<std::size_t>(T));
    double norm = 0.0;
    for (auto& x : g) {
      x = cplx(gauss(rng), gauss(rng));
      norm += std::norm(x);
    }
    for (auto& x : g) x /= std::sqrt(norm);
    v.push_back(std::move(g));
  }
  return v;
}

/// Message j sends U+1 symbols along v_j, ..., v_{j+U} (indices mod K).
inline LinearScheme symmetric_duk_scheme(int D, int U, int K) {
  make_symmetric_duk(D, U, K);  // parameter checks
  const int T = K - D + U;
  const auto v = duk_alignment_vectors(D, U, K);
  LinearScheme s;
  s.name = "duk_" + std::to_string(D) + "_" + std::to_string(U) + "_" + std::to_string(K);
  s.slots = T;
  s.declared_tau = K == T ? 1 : T;
  for (int j = 0; j < K; ++j) {
    for (int u = 0; u <= U; ++u) {
      s.streams.push_back(slot_stream("W" + std::to_string(j + 1), v[static_cast<std::size_t>((j + u) % K)]));
    }
  }
  return s;
}

/// Cell A gets 4/3 DoF while femtocells B and C get 1 each. B and C switch
/// antennas at different slots, so a1 and a2 see staggered effective
/// coherence after discarding their interference dimension.
inline LinearScheme interference_diversity_scheme(const CBProblem& companion = make_macro_femto()) {
  detail::require_companion(companion, make_macro_femto(), "interference_diversity");
  const cplx one = 1.0, zero = 0.0;
  auto at_slots = [&](const MessageId& m, std::vector<cplx> antenna, std::vector<int> active) {
    Stream s{m, std::vector<std::vector<cplx>>(3, std::vector<cplx>(2, zero))};
    for (int n : active) s.vectors[static_cast<std::size_t>(n)] = antenna;
    return s;
  };
  LinearScheme s{"interference_diversity", 3, 3, {}};
  s.streams.push_back(at_slots("b1", {one, zero}, {0}));
  s.streams.push_back(at_slots("b1", {one, zero}, {1}));
  s.streams.push_back(at_slots("b1", {zero, one}, {2}));
  s.streams.push_back(at_slots("c1", {one, zero}, {0}));
  s.streams.push_back(at_slots("c1", {zero, one}, {1}));
  s.streams.push_back(at_slots("c1", {zero, one}, {2}));
  s.streams.push_back(at_slots("a1", {one, zero}, {1, 2}));
  s.streams.push_back(at_slots("a1", {zero, one}, {1, 2}));
  s.streams.push_back(at_slots("a2", {one, zero}, {0, 1}));
  s.streams.push_back(at_slots("a2", {zero, one}, {0, 1}));
  return s;
}

// ---------------------------------------------------------------------------
// Reuse schedules on toroidal arrays.

namespace detail {

inline void require_lattice(const CBProblem& p, Geometry g) {
  if (p.cells.geometry != g) throw InvalidParameter("problem is not a " + std::string(to_string(g)) + " array");
  for (const auto& c : lattice_cells(g, p.cells.dims)) {
    if (!p.topology.transmitters.count(lattice_tx(g, c))) {
      throw InvalidParameter("problem was not built by the array constructor (missing " + lattice_tx(g, c) + ")");
    }
  }
}

inline void require_divisible(const std::vector<int>& dims, int period, const char* what) {
  for (int d : dims) {
    if (d % period != 0) {
      throw InvalidParameter(std::string(what) + " needs array dimensions divisible by " + std::to_string(period));
    }
  }
}

}  // namespace detail

/// Residue class whose cells are silenced together; every cell plus its
/// neighbors covers all residues exactly once (a perfect code).
inline int reuse_residue(Geometry g, LatticeCell c) {
  switch (g) {
    case Geometry::linear: return c.x % 3;
    case Geometry::square: return (c.x + 2 * c.y) % 5;
    case Geometry::hex: return (c.x + 3 * c.y) % 7;
    default: throw InvalidParameter("cluster geometry has no reuse pattern");
  }
}

inline int reuse_period(Geometry g) {
  switch (g) {
    case Geometry::linear: return 3;
    case Geometry::square: return 5;
    case Geometry::hex: return 7;
    default: throw InvalidParameter("cluster geometry has no reuse pattern");
  }
}

/// True when every cell plus its neighbors covers each residue exactly
/// once, i.e. every residue class is a perfect dominating set.
inline bool reuse_is_perfect_code(Geometry g, const std::vector<int>& dims) {
  const int period = reuse_period(g);
  for (const auto& cell : lattice_cells(g, dims)) {
    std::vector<int> hits(static_cast<std::size_t>(period));
    ++hits[static_cast<std::size_t>(reuse_residue(g, cell))];
    for (int dir = 0; dir < direction_count(g); ++dir) {
      ++hits[static_cast<std::size_t>(reuse_residue(g, lattice_neighbor(g, dims, cell, dir)))];
    }
    for (int h : hits) {
      if (h != 1) return false;
    }
  }
  return true;
}

/// Aligned frequency reuse: in phase c the cells of residue c go silent and
/// every other cell serves its user on the boundary with the silenced
/// neighbor. Per-cell DoF N/(N+1) for N neighbors.
inline Schedule aligned_reuse(const CBProblem& p) {
  const Geometry g = p.cells.geometry;
  if (g == Geometry::cluster) throw InvalidParameter("aligned reuse needs a linear, square or hex array");
  detail::require_lattice(p, g);
  const int period = reuse_period(g);
  detail::require_divisible(p.cells.dims, period, "aligned reuse");
  Schedule s;
  s.name = "aligned_reuse";
  const auto cells = lattice_cells(g, p.cells.dims);
  for (int c = 0; c < period; ++c) {
    Phase ph{make_rational(1, period), {}};
    for (const auto& cell : cells) {
      if (reuse_residue(g, cell) == c) continue;
      int chosen = -1;
      for (int dir = 0; dir < direction_count(g); ++dir) {
        if (reuse_residue(g, lattice_neighbor(g, p.cells.dims, cell, dir)) == c) {
          if (chosen >= 0) throw InvalidParameter("silenced cells do not form a perfect code");
          chosen = dir;
        }
      }
      if (chosen < 0) throw InvalidParameter("silenced cells do not form a perfect code");
      const NodeId rx = lattice_rx(g, cell, chosen);
      ph.served.insert({rx, rx});
    }
    s.phases.push_back(std::move(ph));
  }
  return s;
}

/// Classic reuse: a proper coloring of the cells (2 colors on linear and
/// square arrays, 3 on hex); each phase activates one color class and one
/// boundary direction.
inline Schedule conventional_reuse(const CBProblem& p) {
  const Geometry g = p.cells.geometry;
  if (g == Geometry::cluster) throw InvalidParameter("conventional reuse needs a linear, square or hex array");
  detail::require_lattice(p, g);
  const int colors = g == Geometry::hex ? 3 : 2;
  detail::require_divisible(p.cells.dims, colors, "conventional reuse");
  auto color_of = [&](LatticeCell c) {
    switch (g) {
      case Geometry::linear: return c.x % 2;
      case Geometry::square: return (c.x + c.y) % 2;
      default: return detail::wrap(c.x - c.y, 3);
    }
  };
  const int dirs = direction_count(g);
  Schedule s;
  s.name = "conventional_reuse";
  const auto cells = lattice_cells(g, p.cells.dims);
  for (int color = 0; color < colors; ++color) {
    for (int dir = 0; dir < dirs; ++dir) {
      Phase ph{make_rational(1, colors * dirs), {}};
      for (const auto& cell : cells) {
        if (color_of(cell) != color) continue;
        const NodeId rx = lattice_rx(g, cell, dir);
        ph.served.insert({rx, rx});
      }
      s.phases.push_back(std::move(ph));
    }
  }
  return s;
}

/// Expands a schedule into a T-slot scheme: each phase gets weight*T
/// consecutive slots, and every served message one stream per slot on its
/// own antenna. `slots` = 0 picks the least common denominator of the weights.
inline LinearScheme schedule_to_scheme(const CBProblem& p, const Schedule& s, int slots = 0) {
  if (slots < 0) throw InvalidParameter("slot count must be >= 0");
  if (slots == 0) {
    mpz_class l = 1;
    for (const auto& ph : s.phases) l = lcm(l, mpz_class(ph.weight.get_den()));
    if (!l.fits_sint_p()) throw InvalidParameter("schedule denominator too large");
    slots = static_cast<int>(l.get_si());
  }
  LinearScheme out;
  out.name = s.name.empty() ? "schedule" : s.name;
  out.slots = slots;
  out.declared_tau = 1;
  int cursor = 0;
  for (const auto& ph : s.phases) {
    Rational len = ph.weight * slots;
    if (len.get_den() != 1) {
      throw InvalidParameter("phase weight " + to_string(ph.weight) + " is not a multiple of 1/" +
                             std::to_string(slots));
    }
    const int n_slots = static_cast<int>(len.get_num().get_si());
    std::map<NodeId, std::vector<MessageId>> by_tx;
    std::set<MessageId> seen;
    for (const auto& [m, r] : ph.served) {
      if (seen.insert(m).second) by_tx[p.origin.at(m)].push_back(m);
    }
    for (int n = cursor; n < cursor + n_slots; ++n) {
      for (const auto& [tx, ms] : by_tx) {
        const int nt = p.tx_antennas(tx);
        for (std::size_t k = 0; k < ms.size(); ++k) {
          Stream st{ms[k], std::vector<std::vector<cplx>>(static_cast<std::size_t>(slots),
                                                          std::vector<cplx>(static_cast<std::size_t>(nt)))};
          st.vectors[static_cast<std::size_t>(n)][k % static_cast<std::size_t>(nt)] = 1.0;
          out.streams.push_back(std::move(st));
        }
      }
    }
    cursor += n_slots;
  }
  if (cursor != slots && !s.phases.empty()) {
    throw InvalidParameter("phase weights cover " + std::to_string(cursor) + " of " + std::to_string(slots) + " slots");
  }
  if (out.slots == 0) out.slots = 1;
  return out;
}

}  // namespace cbia
