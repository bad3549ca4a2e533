#pragma once

// Partially connected networks and their message sets, plus generators for
// every topology family the workbench knows about.

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbia/errors.hpp"

namespace cbia {

using NodeId = std::string;
using MessageId = std::string;
/// (receiver id, transmitter id)
using Link = std::pair<NodeId, NodeId>;

struct NetworkTopology {
  std::map<NodeId, int> transmitters;  // id -> antenna count
  std::map<NodeId, int> receivers;
  std::set<Link> connectivity;

  bool connected(const NodeId& rx, const NodeId& tx) const {
    return connectivity.count({rx, tx}) != 0;
  }

  /// Transmitters heard by `rx`, sorted by id.
  std::vector<NodeId> heard_by(const NodeId& rx) const {
    std::vector<NodeId> out;
    for (auto it = connectivity.lower_bound({rx, NodeId{}});
         it != connectivity.end() && it->first == rx; ++it) {
      out.push_back(it->second);
    }
    return out;
  }

  bool operator==(const NetworkTopology&) const = default;
};

enum class Geometry { linear, square, hex, cluster };

inline const char* to_string(Geometry g) {
  switch (g) {
    case Geometry::linear: return "linear";
    case Geometry::square: return "square";
    case Geometry::hex: return "hex";
    case Geometry::cluster: return "cluster";
  }
  return "cluster";
}

inline Geometry parse_geometry(const std::string& s) {
  if (s == "linear") return Geometry::linear;
  if (s == "square") return Geometry::square;
  if (s == "hex") return Geometry::hex;
  if (s == "cluster") return Geometry::cluster;
  throw InvalidParameter("unknown geometry '" + s + "'");
}

/// Cell labels for per-cell DoF accounting. Array generators also record
/// the lattice shape so reuse schedules can be rebuilt from a loaded problem.
struct CellGrouping {
  std::map<NodeId, std::string> cell;  // transmitter -> label
  Geometry geometry = Geometry::cluster;
  std::vector<int> dims;

  bool operator==(const CellGrouping&) const = default;
};

/// A cellular blind interference alignment instance: topology plus the
/// origin of every message and the message set desired by every receiver.
struct CBProblem {
  std::string name;  // informational; ignored by ==
  NetworkTopology topology;
  std::map<MessageId, NodeId> origin;
  std::map<NodeId, std::set<MessageId>> desired;  // one entry per receiver
  CellGrouping cells;

  std::vector<MessageId> messages() const {
    std::vector<MessageId> out;
    out.reserve(origin.size());
    for (const auto& [m, t] : origin) out.push_back(m);
    return out;
  }

  std::vector<MessageId> messages_of(const NodeId& tx) const {
    std::vector<MessageId> out;
    for (const auto& [m, t] : origin) {
      if (t == tx) out.push_back(m);
    }
    return out;
  }

  std::vector<NodeId> destinations(const MessageId& m) const {
    std::vector<NodeId> out;
    for (const auto& [r, ms] : desired) {
      if (ms.count(m)) out.push_back(r);
    }
    return out;
  }

  const std::set<MessageId>& desired_by(const NodeId& rx) const {
    static const std::set<MessageId> kEmpty;
    auto it = desired.find(rx);
    return it == desired.end() ? kEmpty : it->second;
  }

  int tx_antennas(const NodeId& tx) const { return topology.transmitters.at(tx); }
  int rx_antennas(const NodeId& rx) const { return topology.receivers.at(rx); }

  const std::string& cell_of_message(const MessageId& m) const {
    return cells.cell.at(origin.at(m));
  }

  bool operator==(const CBProblem& o) const {
    return topology == o.topology && origin == o.origin && desired == o.desired &&
           cells == o.cells;
  }
};

/// Throws InvalidProblem when `p` breaks a CBProblem invariant.
inline void validate(const CBProblem& p) {
  const auto& topo = p.topology;
  auto fail = [](const std::string& what) { throw InvalidProblem(what); };
  for (const auto& [id, n] : topo.transmitters) {
    if (id.empty()) fail("empty transmitter id");
    if (n < 1) fail("transmitter '" + id + "' has antenna count < 1");
  }
  for (const auto& [id, n] : topo.receivers) {
    if (id.empty()) fail("empty receiver id");
    if (n < 1) fail("receiver '" + id + "' has antenna count < 1");
  }
  for (const auto& [r, t] : topo.connectivity) {
    if (!topo.receivers.count(r)) fail("connectivity references unknown receiver '" + r + "'");
    if (!topo.transmitters.count(t)) fail("connectivity references unknown transmitter '" + t + "'");
  }
  for (const auto& [m, t] : p.origin) {
    if (m.empty()) fail("empty message id");
    if (!topo.transmitters.count(t)) fail("message '" + m + "' originates at unknown transmitter '" + t + "'");
  }
  std::set<MessageId> wanted;
  for (const auto& [r, ms] : p.desired) {
    if (!topo.receivers.count(r)) fail("desired set for unknown receiver '" + r + "'");
    for (const auto& m : ms) {
      auto it = p.origin.find(m);
      if (it == p.origin.end()) fail("receiver '" + r + "' desires unknown message '" + m + "'");
      if (!topo.connected(r, it->second)) {
        fail("receiver '" + r + "' desires '" + m + "' but does not hear its origin '" + it->second + "'");
      }
      wanted.insert(m);
    }
  }
  for (const auto& [m, t] : p.origin) {
    if (!wanted.count(m)) fail("message '" + m + "' is not desired by any receiver");
  }
  for (const auto& [t, label] : p.cells.cell) {
    if (!topo.transmitters.count(t)) fail("cell label for unknown transmitter '" + t + "'");
  }
  for (const auto& [t, n] : topo.transmitters) {
    if (!p.cells.cell.count(t)) fail("transmitter '" + t + "' has no cell label");
  }
}

/// Fills default cell labels and empty desired sets, then validates.
inline CBProblem finalize(CBProblem p) {
  for (const auto& [t, n] : p.topology.transmitters) p.cells.cell.try_emplace(t, t);
  for (const auto& [r, n] : p.topology.receivers) p.desired.try_emplace(r);
  validate(p);
  return p;
}

// ---------------------------------------------------------------------------
// Lattice helpers shared by the array generators and the reuse schedules.

struct LatticeCell {
  int x = 0;  // linear: index; square: row; hex: axial q
  int y = 0;  // square: column; hex: axial r
  auto operator<=>(const LatticeCell&) const = default;
};

inline int direction_count(Geometry g) {
  switch (g) {
    case Geometry::linear: return 2;
    case Geometry::square: return 4;
    case Geometry::hex: return 6;
    default: throw InvalidParameter("geometry has no lattice directions");
  }
}

inline int opposite_direction(Geometry g, int dir) {
  return (dir + direction_count(g) / 2) % direction_count(g);
}

namespace detail {

inline int wrap(int v, int n) { return ((v % n) + n) % n; }

// linear: east, west.  square: n, e, s, w.  hex (axial): six unit offsets in
// rotational order so that opposite = dir + 3.
inline std::pair<int, int> offset(Geometry g, int dir) {
  static constexpr std::array<std::pair<int, int>, 2> kLinear{{{1, 0}, {-1, 0}}};
  static constexpr std::array<std::pair<int, int>, 4> kSquare{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
  static constexpr std::array<std::pair<int, int>, 6> kHex{
      {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};
  switch (g) {
    case Geometry::linear: return kLinear.at(dir);
    case Geometry::square: return kSquare.at(dir);
    case Geometry::hex: return kHex.at(dir);
    default: throw InvalidParameter("geometry has no lattice directions");
  }
}

inline std::string direction_suffix(Geometry g, int dir) {
  static const std::array<const char*, 2> kLinear{"e", "w"};
  static const std::array<const char*, 4> kSquare{"n", "e", "s", "w"};
  switch (g) {
    case Geometry::linear: return kLinear.at(dir);
    case Geometry::square: return kSquare.at(dir);
    case Geometry::hex: return "d" + std::to_string(dir);
    default: throw InvalidParameter("geometry has no lattice directions");
  }
}

}  // namespace detail

/// Cells of the torus in row-major order.
inline std::vector<LatticeCell> lattice_cells(Geometry g, const std::vector<int>& dims) {
  std::vector<LatticeCell> out;
  switch (g) {
    case Geometry::linear:
      for (int k = 0; k < dims.at(0); ++k) out.push_back({k, 0});
      break;
    case Geometry::square:
      for (int i = 0; i < dims.at(0); ++i)
        for (int j = 0; j < dims.at(1); ++j) out.push_back({i, j});
      break;
    case Geometry::hex:
      // dims = {rows over r, cols over q}
      for (int r = 0; r < dims.at(0); ++r)
        for (int q = 0; q < dims.at(1); ++q) out.push_back({q, r});
      break;
    default:
      throw InvalidParameter("cluster geometry has no lattice");
  }
  return out;
}

inline LatticeCell lattice_neighbor(Geometry g, const std::vector<int>& dims, LatticeCell c, int dir) {
  auto [dx, dy] = detail::offset(g, dir);
  switch (g) {
    case Geometry::linear: return {detail::wrap(c.x + dx, dims.at(0)), 0};
    case Geometry::square: return {detail::wrap(c.x + dx, dims.at(0)), detail::wrap(c.y + dy, dims.at(1))};
    case Geometry::hex: return {detail::wrap(c.x + dx, dims.at(1)), detail::wrap(c.y + dy, dims.at(0))};
    default: throw InvalidParameter("cluster geometry has no lattice");
  }
}

inline NodeId lattice_tx(Geometry g, LatticeCell c) {
  if (g == Geometry::linear) return "t" + std::to_string(c.x);
  return "t" + std::to_string(c.x) + "_" + std::to_string(c.y);
}

/// The user of cell `c` on its boundary in direction `dir`.
inline NodeId lattice_rx(Geometry g, LatticeCell c, int dir) {
  std::string base = g == Geometry::linear ? "u" + std::to_string(c.x)
                                           : "u" + std::to_string(c.x) + "_" + std::to_string(c.y);
  return base + detail::direction_suffix(g, dir);
}

namespace detail {

inline CBProblem make_lattice(Geometry g, std::vector<int> dims, std::string name) {
  CBProblem p;
  p.name = std::move(name);
  p.cells.geometry = g;
  p.cells.dims = dims;
  for (const auto& c : lattice_cells(g, dims)) {
    NodeId tx = lattice_tx(g, c);
    p.topology.transmitters[tx] = 1;
    p.cells.cell[tx] = tx;
    for (int dir = 0; dir < direction_count(g); ++dir) {
      NodeId rx = lattice_rx(g, c, dir);
      NodeId across = lattice_tx(g, lattice_neighbor(g, dims, c, dir));
      p.topology.receivers[rx] = 1;
      p.topology.connectivity.insert({rx, tx});
      p.topology.connectivity.insert({rx, across});
      p.origin[rx] = tx;
      p.desired[rx] = {rx};
    }
  }
  return finalize(std::move(p));
}

}  // namespace detail

/// K cells on a ring; each cell has one user on each of its two boundaries.
inline CBProblem make_linear_array(int cells) {
  if (cells < 3) throw InvalidParameter("linear array needs at least 3 cells");
  return detail::make_lattice(Geometry::linear, {cells}, "linear_" + std::to_string(cells));
}

inline CBProblem make_square_array(int rows, int cols) {
  if (rows < 3 || cols < 3) throw InvalidParameter("square array dimensions must be >= 3");
  return detail::make_lattice(Geometry::square, {rows, cols},
                              "square_" + std::to_string(rows) + "x" + std::to_string(cols));
}

/// Hex lattice on an axial-coordinate torus; `rows` spans r, `cols` spans q.
inline CBProblem make_hex_array(int rows, int cols) {
  if (rows < 3 || cols < 3) throw InvalidParameter("hex array dimensions must be >= 3");
  return detail::make_lattice(Geometry::hex, {rows, cols},
                              "hex_" + std::to_string(rows) + "x" + std::to_string(cols));
}

enum class Direction { downlink, uplink };

inline CBProblem reciprocal(const CBProblem& p);

/// The locally connected four-cell cluster. `merged` fuses each pair of
/// statistically equivalent boundary users into one X-network receiver.
inline CBProblem make_four_cell(Direction direction = Direction::downlink, bool merged = false) {
  CBProblem p;
  for (const char* t : {"A", "B", "C", "D"}) p.topology.transmitters[t] = 1;
  for (const char* m : {"a1", "a2", "b1", "b2", "c1", "c2", "d1", "d2"}) {
    p.origin[m] = std::string(1, static_cast<char>(m[0] - 'a' + 'A'));
  }
  if (!merged) {
    const std::vector<std::pair<std::string, std::pair<std::string, std::string>>> users{
        {"a1", {"A", "B"}}, {"a2", {"A", "C"}}, {"b1", {"A", "B"}}, {"b2", {"B", "D"}},
        {"c1", {"C", "D"}}, {"c2", {"A", "C"}}, {"d1", {"C", "D"}}, {"d2", {"B", "D"}}};
    for (const auto& [rx, txs] : users) {
      p.topology.receivers[rx] = 1;
      p.topology.connectivity.insert({rx, txs.first});
      p.topology.connectivity.insert({rx, txs.second});
      p.desired[rx] = {rx};
    }
  } else {
    const std::vector<std::tuple<std::string, std::string, std::string, std::set<MessageId>>> users{
        {"ab", "A", "B", {"a1", "b1"}},
        {"ca", "A", "C", {"a2", "c2"}},
        {"bd", "B", "D", {"b2", "d2"}},
        {"cd", "C", "D", {"c1", "d1"}}};
    for (const auto& [rx, t1, t2, wants] : users) {
      p.topology.receivers[rx] = 1;
      p.topology.connectivity.insert({rx, t1});
      p.topology.connectivity.insert({rx, t2});
      p.desired[rx] = wants;
    }
  }
  p.name = merged ? "four_cell_downlink_merged" : "four_cell_downlink";
  p = finalize(std::move(p));
  if (direction == Direction::uplink) {
    p = reciprocal(p);
    p.name = merged ? "four_cell_uplink_merged" : "four_cell_uplink";
  }
  return p;
}

/// Macrocell A with two femtocells B, C whose single-antenna users sit in
/// A's dead spots; B and C leak into A's users a1 and a2 respectively.
inline CBProblem make_macro_femto() {
  CBProblem p;
  p.name = "macro_femto";
  for (const char* t : {"A", "B", "C"}) p.topology.transmitters[t] = 2;
  p.topology.receivers = {{"a1", 2}, {"a2", 2}, {"b1", 1}, {"c1", 1}};
  p.topology.connectivity = {{"a1", "A"}, {"a1", "B"}, {"a2", "A"}, {"a2", "C"}, {"b1", "B"}, {"c1", "C"}};
  p.origin = {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}, {"c1", "C"}};
  p.desired = {{"a1", {"a1"}}, {"a2", {"a2"}}, {"b1", {"b1"}}, {"c1", {"c1"}}};
  return finalize(std::move(p));
}

/// Symmetric K-user problem where receiver r does not hear transmitters
/// r-U..r-1 and r+1..r+D (mod K). Nodes and messages are 1-indexed.
inline CBProblem make_symmetric_duk(int D, int U, int K) {
  if (D < 0 || U < 0) throw InvalidParameter("D and U must be nonnegative");
  if (D < U) throw InvalidParameter("symmetric (D,U,K) requires D >= U");
  if (K <= D + U) throw InvalidParameter("symmetric (D,U,K) requires K > D + U");
  CBProblem p;
  p.name = "duk_" + std::to_string(D) + "_" + std::to_string(U) + "_" + std::to_string(K);
  auto idx = [K](int i) { return detail::wrap(i - 1, K) + 1; };
  for (int k = 1; k <= K; ++k) {
    std::string tx = "t" + std::to_string(k), rx = "r" + std::to_string(k), m = "W" + std::to_string(k);
    p.topology.transmitters[tx] = 1;
    p.topology.receivers[rx] = 1;
    p.origin[m] = tx;
    p.desired[rx] = {m};
  }
  for (int r = 1; r <= K; ++r) {
    std::set<int> off;
    for (int i = 1; i <= U; ++i) off.insert(idx(r - i));
    for (int i = 1; i <= D; ++i) off.insert(idx(r + i));
    for (int t = 1; t <= K; ++t) {
      if (!off.count(t)) p.topology.connectivity.insert({"r" + std::to_string(r), "t" + std::to_string(t)});
    }
  }
  return finalize(std::move(p));
}

/// Swaps the roles of transmitters and receivers for every message. Users
/// inherit the cell label of the base station they exchange messages with.
inline CBProblem reciprocal(const CBProblem& p) {
  CBProblem q;
  q.name = p.name;
  q.topology.transmitters = p.topology.receivers;
  q.topology.receivers = p.topology.transmitters;
  for (const auto& [r, t] : p.topology.connectivity) q.topology.connectivity.insert({t, r});
  for (const auto& [m, t] : p.origin) {
    auto dest = p.destinations(m);
    if (dest.size() != 1) {
      throw InvalidParameter("message '" + m + "' has " + std::to_string(dest.size()) +
                             " destinations; only unicast messages can be reversed");
    }
    q.origin[m] = dest.front();
    q.desired[t].insert(m);
  }
  for (const auto& [r, ms] : p.desired) {
    std::set<std::string> labels;
    for (const auto& m : ms) labels.insert(p.cell_of_message(m));
    q.cells.cell[r] = labels.size() == 1 ? *labels.begin() : r;
  }
  q.cells.geometry = p.cells.geometry;
  q.cells.dims = p.cells.dims;
  return finalize(std::move(q));
}

}  // namespace cbia
