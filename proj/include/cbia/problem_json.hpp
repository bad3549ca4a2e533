#pragma once

#include <nlohmann/json.hpp>

#include <set>
#include <string>

#include "cbia/errors.hpp"
#include "cbia/net_model.hpp"

namespace cbia {

using Json = nlohmann::json;

namespace detail {

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline std::string require_id(const Json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path, "expected a string");
  auto s = v.get<std::string>();
  if (s.empty()) throw ParseError(path, "id must be nonempty");
  return s;
}

inline int require_positive(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ParseError(path, "expected an integer >= 1");
  return v.get<int>();
}

inline const Json& require_array(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  return v;
}

}  // namespace detail

inline Json problem_to_json(const CBProblem& p) {
  Json j;
  if (!p.name.empty()) j["name"] = p.name;
  j["transmitters"] = Json::array();
  for (const auto& [id, n] : p.topology.transmitters) j["transmitters"].push_back({{"id", id}, {"antennas", n}});
  j["receivers"] = Json::array();
  for (const auto& [id, n] : p.topology.receivers) j["receivers"].push_back({{"id", id}, {"antennas", n}});
  j["connectivity"] = Json::array();
  for (const auto& [r, t] : p.topology.connectivity) j["connectivity"].push_back({r, t});
  j["messages"] = Json::array();
  for (const auto& [m, t] : p.origin) {
    j["messages"].push_back({{"id", m}, {"origin", t}, {"destinations", p.destinations(m)}});
  }
  j["cells"] = Json::object();
  for (const auto& [t, label] : p.cells.cell) j["cells"][t] = label;
  if (p.cells.geometry != Geometry::cluster) {
    j["geometry"] = {{"kind", to_string(p.cells.geometry)}, {"dims", p.cells.dims}};
  }
  return j;
}

inline std::string store_problem(const CBProblem& p) { return problem_to_json(p).dump(2) + "\n"; }

inline CBProblem problem_from_json(const Json& j) {
  using namespace detail;
  if (!j.is_object()) throw ParseError("$", "expected an object");
  CBProblem p;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ParseError("name", "expected a string");
    p.name = j["name"].get<std::string>();
  }
  auto read_nodes = [&](const char* key, std::map<NodeId, int>& into) {
    const auto& arr = require_array(require(j, key, ""), key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string path = std::string(key) + "[" + std::to_string(i) + "]";
      auto id = require_id(require(arr[i], "id", path), path + ".id");
      int n = require_positive(require(arr[i], "antennas", path), path + ".antennas");
      if (!into.emplace(id, n).second) throw ParseError(path + ".id", "duplicate node id '" + id + "'");
    }
  };
  read_nodes("transmitters", p.topology.transmitters);
  read_nodes("receivers", p.topology.receivers);

  const auto& conn = require_array(require(j, "connectivity", ""), "connectivity");
  for (std::size_t i = 0; i < conn.size(); ++i) {
    std::string path = "connectivity[" + std::to_string(i) + "]";
    if (!conn[i].is_array() || conn[i].size() != 2) throw ParseError(path, "expected [receiver, transmitter]");
    auto r = require_id(conn[i][0], path + "[0]");
    auto t = require_id(conn[i][1], path + "[1]");
    if (!p.topology.receivers.count(r)) throw ParseError(path + "[0]", "undeclared receiver '" + r + "'");
    if (!p.topology.transmitters.count(t)) throw ParseError(path + "[1]", "undeclared transmitter '" + t + "'");
    p.topology.connectivity.insert({r, t});
  }

  for (const auto& [r, n] : p.topology.receivers) p.desired[r];
  const auto& msgs = require_array(require(j, "messages", ""), "messages");
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    std::string path = "messages[" + std::to_string(i) + "]";
    auto id = require_id(require(msgs[i], "id", path), path + ".id");
    auto origin = require_id(require(msgs[i], "origin", path), path + ".origin");
    if (!p.topology.transmitters.count(origin)) {
      throw ParseError(path + ".origin", "undeclared transmitter '" + origin + "'");
    }
    if (!p.origin.emplace(id, origin).second) throw ParseError(path + ".id", "duplicate message id '" + id + "'");
    const auto& dests = require_array(require(msgs[i], "destinations", path), path + ".destinations");
    for (std::size_t k = 0; k < dests.size(); ++k) {
      std::string dpath = path + ".destinations[" + std::to_string(k) + "]";
      auto r = require_id(dests[k], dpath);
      if (!p.topology.receivers.count(r)) throw ParseError(dpath, "undeclared receiver '" + r + "'");
      p.desired[r].insert(id);
    }
  }

  if (j.contains("cells")) {
    const auto& cells = j["cells"];
    if (!cells.is_object()) throw ParseError("cells", "expected an object");
    for (const auto& [t, label] : cells.items()) {
      if (!p.topology.transmitters.count(t)) throw ParseError("cells." + t, "undeclared transmitter");
      if (!label.is_string()) throw ParseError("cells." + t, "expected a string label");
      p.cells.cell[t] = label.get<std::string>();
    }
  }
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    try {
      p.cells.geometry = parse_geometry(require(g, "kind", "geometry").get<std::string>());
    } catch (const Json::exception&) {
      throw ParseError("geometry.kind", "expected a string");
    } catch (const InvalidParameter& e) {
      throw ParseError("geometry.kind", e.what());
    }
    const auto& dims = require_array(require(g, "dims", "geometry"), "geometry.dims");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      p.cells.dims.push_back(require_positive(dims[i], "geometry.dims[" + std::to_string(i) + "]"));
    }
  }

  try {
    return finalize(std::move(p));
  } catch (const InvalidProblem& e) {
    throw ParseError("$", e.what());
  }
}

inline CBProblem load_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("$", e.what());
  }
  return problem_from_json(j);
}

}  // namespace cbia
