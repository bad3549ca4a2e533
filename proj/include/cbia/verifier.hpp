#pragma once

// Linear resolvability of a scheme over sampled generic channels.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cbia/channel.hpp"
#include "cbia/errors.hpp"
#include "cbia/linalg.hpp"
#include "cbia/net_model.hpp"
#include "cbia/rational.hpp"
#include "cbia/scheme.hpp"

namespace cbia {

constexpr double kDefaultRankTolerance = 1e-8;

template <class Matrix>
struct Signatures {
  Matrix desired;
  Matrix interference;
  std::vector<std::size_t> desired_streams;  // indices into the scheme
  std::vector<std::size_t> interference_streams;
};

namespace detail {

inline CMatrix zeros(int r, int c, const CMatrix*) { return CMatrix::Zero(r, c); }
inline QMatrix zeros(int r, int c, const QMatrix*) { return QMatrix(r, c); }
inline cplx lift(const cplx& z, const CMatrix*) { return z; }
inline GaussianRational lift(const cplx& z, const QMatrix*) { return GaussianRational::from(z); }
inline int rank_of(const CMatrix& m, double tol) { return numeric_rank(m, tol); }
inline int rank_of(const QMatrix& m, double) { return exact_rank(m); }

}  // namespace detail

/// Slot-stacked receive signatures at `r`: one column per stream from a
/// connected transmitter, with slot-n block H_{r,t}(n) v(n).
template <class Matrix>
Signatures<Matrix> effective_signatures(const CBProblem& p, const LinearScheme& s,
                                        const BasicChannelRealization<Matrix>& ch, const NodeId& r) {
  if (ch.slots != s.slots) {
    throw InvalidParameter("channel horizon " + std::to_string(ch.slots) + " != scheme length " +
                           std::to_string(s.slots));
  }
  const auto& wanted = p.desired_by(r);
  const int nr = p.rx_antennas(r);
  const int rows = nr * s.slots;
  Signatures<Matrix> out;
  for (std::size_t i = 0; i < s.streams.size(); ++i) {
    const auto& st = s.streams[i];
    if (!p.topology.connected(r, p.origin.at(st.message))) continue;
    (wanted.count(st.message) ? out.desired_streams : out.interference_streams).push_back(i);
  }
  auto build = [&](const std::vector<std::size_t>& idx) {
    const Matrix* tag = nullptr;
    Matrix m = detail::zeros(rows, static_cast<int>(idx.size()), tag);
    for (std::size_t c = 0; c < idx.size(); ++c) {
      const auto& st = s.streams[idx[c]];
      const auto& tx = p.origin.at(st.message);
      for (int n = 0; n < s.slots; ++n) {
        const auto& v = st.vectors[static_cast<std::size_t>(n)];
        if (!st.active_in(n)) continue;
        const Matrix& h = ch.at(r, tx, n);
        for (int a = 0; a < nr; ++a) {
          auto acc = detail::lift(cplx{}, tag);
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (v[k] == cplx{}) continue;
            acc = acc + h(a, static_cast<int>(k)) * detail::lift(v[k], tag);
          }
          m(n * nr + a, static_cast<int>(c)) = acc;
        }
      }
    }
    return m;
  };
  out.desired = build(out.desired_streams);
  out.interference = build(out.interference_streams);
  return out;
}

struct ReceiverCheck {
  bool pass = true;
  int desired_columns = 0;
  int interference_rank = 0;
  int joint_rank = 0;
};

/// Pass iff rank([D I]) = rank(I) + cols(D). An empty D passes vacuously.
template <class Matrix>
ReceiverCheck check_receiver(const Matrix& d, const Matrix& i, double tol = kDefaultRankTolerance) {
  if (!(tol > 0.0)) throw InvalidParameter("rank tolerance must be > 0");
  ReceiverCheck out;
  out.desired_columns = static_cast<int>(d.cols());
  out.interference_rank = detail::rank_of(i, tol);
  if (d.cols() == 0) {
    out.joint_rank = out.interference_rank;
    return out;
  }
  out.joint_rank = detail::rank_of(hcat(d, i), tol);
  out.pass = out.joint_rank == out.interference_rank + out.desired_columns;
  return out;
}

struct ReceiverSummary {
  bool pass = true;
  int draws_passed = 0;
  int desired_columns = 0;
  int min_interference_rank = std::numeric_limits<int>::max();
  int max_interference_rank = 0;
  int min_joint_rank = std::numeric_limits<int>::max();
  int max_joint_rank = 0;
  int receive_dimension = 0;
};

struct DoFReport {
  std::string scheme;
  std::map<NodeId, ReceiverSummary> receivers;
  std::map<MessageId, Rational> message_dof;
  std::map<std::string, Rational> cell_dof;
  Rational sum_dof;
  int draws = 0;
  int draws_passed = 0;
  int tau = 1;
  std::map<NodeId, int> receiver_tau;
  std::uint64_t seed = 0;
  double tolerance = kDefaultRankTolerance;

  bool pass() const { return draws_passed == draws; }

  std::vector<NodeId> failing_receivers() const {
    std::vector<NodeId> out;
    for (const auto& [r, sum] : receivers) {
      if (!sum.pass) out.push_back(r);
    }
    return out;
  }
};

namespace detail {

inline void check_block_alignment(const CBProblem& p, const LinearScheme& s, const FadingSpec& spec) {
  spec.validate();
  for (const auto& [r, n] : p.topology.receivers) {
    const int tau = spec.tau_for(r);
    if (s.slots % tau != 0) {
      throw InvalidParameter("scheme length " + std::to_string(s.slots) + " is not a multiple of tau=" +
                             std::to_string(tau) + " at receiver '" + r + "'");
    }
  }
}

template <class Matrix>
void accumulate_draw(const CBProblem& p, const LinearScheme& s, const BasicChannelRealization<Matrix>& ch,
                     double tol, std::map<NodeId, ReceiverSummary>& into, bool& all_pass) {
  for (const auto& [r, n] : p.topology.receivers) {
    const auto sig = effective_signatures(p, s, ch, r);
    const auto c = check_receiver(sig.desired, sig.interference, tol);
    auto& sum = into[r];
    sum.receive_dimension = n * s.slots;
    sum.desired_columns = c.desired_columns;
    sum.min_interference_rank = std::min(sum.min_interference_rank, c.interference_rank);
    sum.max_interference_rank = std::max(sum.max_interference_rank, c.interference_rank);
    sum.min_joint_rank = std::min(sum.min_joint_rank, c.joint_rank);
    sum.max_joint_rank = std::max(sum.max_joint_rank, c.joint_rank);
    if (c.pass) {
      ++sum.draws_passed;
    } else {
      sum.pass = false;
      all_pass = false;
    }
  }
}

inline void assign_dof(const CBProblem& p, const LinearScheme& s, DoFReport& rep) {
  rep.sum_dof = 0;
  for (const auto& [t, label] : p.cells.cell) rep.cell_dof.try_emplace(label, 0);
  for (const auto& m : p.messages()) {
    bool ok = true;
    for (const auto& r : p.destinations(m)) ok = ok && rep.receivers.at(r).pass;
    Rational d = ok ? s.claimed_dof(m) : Rational(0);
    rep.message_dof[m] = d;
    rep.cell_dof[p.cell_of_message(m)] += d;
    rep.sum_dof += d;
  }
}

}  // namespace detail

/// Runs check_receiver at every receiver over `draws` independent channel
/// draws (draw k uses seed derive_seed(spec.seed, k)). A message scores its
/// claimed DoF only if every receiver desiring it passes in every draw.
inline DoFReport verify(const CBProblem& p, const LinearScheme& s, const FadingSpec& spec, int draws = 20,
                        double tol = kDefaultRankTolerance) {
  if (draws < 1) throw InvalidParameter("draws must be >= 1");
  if (!(tol > 0.0)) throw InvalidParameter("rank tolerance must be > 0");
  check_compatible(p, s);
  detail::check_block_alignment(p, s, spec);
  DoFReport rep;
  rep.scheme = s.name;
  rep.draws = draws;
  rep.tau = spec.tau;
  rep.receiver_tau = spec.receiver_tau;
  rep.seed = spec.seed;
  rep.tolerance = tol;
  for (const auto& [r, n] : p.topology.receivers) rep.receivers[r];
  for (int k = 0; k < draws; ++k) {
    bool all_pass = true;
    if (s.slots > 0) {
      FadingSpec draw_spec = spec;
      draw_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(k));
      const auto ch = sample_channels(p, s.slots, draw_spec);
      detail::accumulate_draw(p, s, ch, tol, rep.receivers, all_pass);
    } else {
      for (auto& [r, sum] : rep.receivers) {
        ++sum.draws_passed;
        sum.min_interference_rank = sum.min_joint_rank = 0;
      }
    }
    rep.draws_passed += all_pass;
  }
  detail::assign_dof(p, s, rep);
  return rep;
}

inline nlohmann::json report_to_json(const DoFReport& rep) {
  nlohmann::json j;
  j["scheme"] = rep.scheme;
  j["pass"] = rep.pass();
  j["sum_dof"] = to_string(rep.sum_dof);
  j["draws"] = rep.draws;
  j["draws_passed"] = rep.draws_passed;
  j["tau"] = rep.tau;
  if (!rep.receiver_tau.empty()) j["receiver_tau"] = rep.receiver_tau;
  j["seed"] = rep.seed;
  j["tolerance"] = rep.tolerance;
  j["per_message"] = nlohmann::json::object();
  for (const auto& [m, d] : rep.message_dof) j["per_message"][m] = to_string(d);
  j["per_cell"] = nlohmann::json::object();
  for (const auto& [c, d] : rep.cell_dof) j["per_cell"][c] = to_string(d);
  j["receivers"] = nlohmann::json::object();
  for (const auto& [r, sum] : rep.receivers) {
    j["receivers"][r] = {{"pass", sum.pass},
                         {"draws_passed", sum.draws_passed},
                         {"desired_columns", sum.desired_columns},
                         {"receive_dimension", sum.receive_dimension},
                         {"interference_rank", {sum.min_interference_rank, sum.max_interference_rank}},
                         {"joint_rank", {sum.min_joint_rank, sum.max_joint_rank}}};
  }
  j["failing_receivers"] = rep.failing_receivers();
  return j;
}

struct ExactVerdict {
  bool pass = true;
  std::set<NodeId> failing_receivers;
};

/// Same decision as verify, with Gaussian-rational channels and exact ranks.
inline ExactVerdict verify_exact(const CBProblem& p, const LinearScheme& s, const FadingSpec& spec, int trials = 3) {
  if (trials < 1) throw InvalidParameter("trials must be >= 1");
  check_compatible(p, s);
  detail::check_block_alignment(p, s, spec);
  ExactVerdict out;
  if (s.slots == 0) return out;
  for (int k = 0; k < trials; ++k) {
    FadingSpec draw_spec = spec;
    draw_spec.seed = derive_seed(spec.seed ^ 0x6578616374ULL, static_cast<std::uint64_t>(k));
    const auto ch = sample_exact_channels(p, s.slots, draw_spec);
    for (const auto& [r, n] : p.topology.receivers) {
      const auto sig = effective_signatures(p, s, ch, r);
      if (!check_receiver(sig.desired, sig.interference).pass) {
        out.pass = false;
        out.failing_receivers.insert(r);
      }
    }
  }
  return out;
}

}  // namespace cbia
