#pragma once

// Finite-SNR rates of a linear scheme under zero-forcing receivers, and the
// high-SNR slope that estimates its DoF.

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cbia/channel.hpp"
#include "cbia/errors.hpp"
#include "cbia/linalg.hpp"
#include "cbia/net_model.hpp"
#include "cbia/scheme.hpp"
#include "cbia/verifier.hpp"

namespace cbia {

struct RateTable {
  std::string scheme;
  std::uint64_t seed = 0;
  int draws = 0;
  std::vector<double> snr_db;
  std::map<MessageId, std::vector<double>> rates;  // bits/slot, one entry per SNR
  std::vector<double> sum;

  std::size_t row_of(double snr) const {
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
      if (std::abs(snr_db[i] - snr) < 1e-9) return i;
    }
    throw InvalidParameter("no rate row at " + std::to_string(snr) + " dB");
  }
};

namespace detail {

/// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

/// Orthonormal basis of the complement of span(m) in C^rows.
inline CMatrix complement_basis(const CMatrix& m, Eigen::Index rows, double tol) {
  if (m.cols() == 0) return CMatrix::Identity(rows, rows);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU);
  const int rank = numeric_rank(m, tol);
  return svd.matrixU().rightCols(rows - rank);
}

}  // namespace detail

/// Per draw, each message's rate at power P is (1/T) sum_i log2(1 + P l_i)
/// where l_i are the eigenvalues of G^H G, G the desired signatures (at unit
/// power budget) projected away from interference and from the receiver's
/// other desired streams. Each transmitter spreads P over the streams it
/// sends in a slot. Multicast rates take the worst destination.
inline RateTable simulate_rates(const CBProblem& p, const LinearScheme& s, const FadingSpec& spec,
                                const std::vector<double>& snr_list_db, int draws = 200,
                                double tol = kDefaultRankTolerance) {
  if (draws < 1) throw InvalidParameter("draws must be >= 1");
  if (snr_list_db.empty()) throw InvalidParameter("SNR list is empty");
  check_compatible(p, s);
  detail::check_block_alignment(p, s, spec);

  RateTable t;
  t.scheme = s.name;
  t.seed = spec.seed;
  t.draws = draws;
  t.snr_db = snr_list_db;
  const std::size_t L = snr_list_db.size();
  std::vector<double> power(L);
  for (std::size_t i = 0; i < L; ++i) power[i] = std::pow(10.0, snr_list_db[i] / 10.0);

  std::map<MessageId, std::vector<detail::CompensatedSum>> acc;
  for (const auto& m : p.messages()) acc[m].resize(L);

  if (s.slots > 0 && !s.streams.empty()) {
    // Unit-budget power share of each stream per slot.
    std::map<NodeId, std::vector<double>> load;
    for (const auto& st : s.streams) {
      auto& l = load[p.origin.at(st.message)];
      l.resize(static_cast<std::size_t>(s.slots));
      for (int n = 0; n < s.slots; ++n) {
        for (const auto& x : st.vectors[static_cast<std::size_t>(n)]) l[static_cast<std::size_t>(n)] += std::norm(x);
      }
    }
    for (int k = 0; k < draws; ++k) {
      FadingSpec draw_spec = spec;
      draw_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(k));
      const auto ch = sample_channels(p, s.slots, draw_spec);
      std::map<MessageId, std::vector<double>> best;  // min over destinations
      for (const auto& [r, nr] : p.topology.receivers) {
        const auto sig = effective_signatures(p, s, ch, r);
        const Eigen::Index rows = static_cast<Eigen::Index>(nr) * s.slots;
        for (const auto& m : p.desired_by(r)) {
          std::vector<Eigen::Index> own;
          std::vector<Eigen::Index> other;
          for (std::size_t c = 0; c < sig.desired_streams.size(); ++c) {
            (s.streams[sig.desired_streams[c]].message == m ? own : other).push_back(static_cast<Eigen::Index>(c));
          }
          std::vector<double> rate(L, 0.0);
          if (!own.empty()) {
            CMatrix block(rows, static_cast<Eigen::Index>(other.size()) + sig.interference.cols());
            for (std::size_t c = 0; c < other.size(); ++c) block.col(static_cast<Eigen::Index>(c)) = sig.desired.col(other[c]);
            block.rightCols(sig.interference.cols()) = sig.interference;
            const CMatrix q = detail::complement_basis(block, rows, tol);
            CMatrix d(rows, static_cast<Eigen::Index>(own.size()));
            for (std::size_t c = 0; c < own.size(); ++c) {
              const auto& st = s.streams[sig.desired_streams[static_cast<std::size_t>(own[c])]];
              const auto& l = load.at(p.origin.at(st.message));
              CMatrix col = sig.desired.col(own[c]);
              for (int n = 0; n < s.slots; ++n) {
                const double share = l[static_cast<std::size_t>(n)];
                if (share > 0.0) col.middleRows(static_cast<Eigen::Index>(n) * nr, nr) /= std::sqrt(share);
              }
              d.col(static_cast<Eigen::Index>(c)) = col;
            }
            const CMatrix g = q.adjoint() * d;
            const Eigen::VectorXd lambda =
                Eigen::SelfAdjointEigenSolver<CMatrix>(g.adjoint() * g, Eigen::EigenvaluesOnly).eigenvalues();
            for (std::size_t i = 0; i < L; ++i) {
              double bits = 0.0;
              for (Eigen::Index e = 0; e < lambda.size(); ++e) bits += std::log2(1.0 + power[i] * std::max(0.0, lambda(e)));
              rate[i] = bits / s.slots;
            }
          }
          auto [it, fresh] = best.try_emplace(m, rate);
          if (!fresh) {
            for (std::size_t i = 0; i < L; ++i) it->second[i] = std::min(it->second[i], rate[i]);
          }
        }
      }
      for (const auto& [m, rate] : best) {
        for (std::size_t i = 0; i < L; ++i) acc[m][i].add(rate[i]);
      }
    }
  }

  t.sum.assign(L, 0.0);
  for (auto& [m, sums] : acc) {
    auto& row = t.rates[m];
    row.resize(L);
    for (std::size_t i = 0; i < L; ++i) row[i] = sums[i].value() / draws;
  }
  for (std::size_t i = 0; i < L; ++i) {
    detail::CompensatedSum total;
    for (const auto& [m, row] : t.rates) total.add(row[i]);
    t.sum[i] = total.value();
  }
  return t;
}

/// Sum-rate slope between two table rows, in DoF.
inline double estimate_dof(const RateTable& t, double snr_lo_db, double snr_hi_db) {
  if (!(snr_hi_db > snr_lo_db)) throw InvalidParameter("slope window needs hi > lo");
  const std::size_t lo = t.row_of(snr_lo_db), hi = t.row_of(snr_hi_db);
  return (t.sum[hi] - t.sum[lo]) / ((snr_hi_db - snr_lo_db) / 10.0 * std::log2(10.0));
}

inline double estimate_message_dof(const RateTable& t, const MessageId& m, double snr_lo_db, double snr_hi_db) {
  if (!(snr_hi_db > snr_lo_db)) throw InvalidParameter("slope window needs hi > lo");
  const std::size_t lo = t.row_of(snr_lo_db), hi = t.row_of(snr_hi_db);
  const auto& r = t.rates.at(m);
  return (r[hi] - r[lo]) / ((snr_hi_db - snr_lo_db) / 10.0 * std::log2(10.0));
}

/// "snr_db,message_id,rate_bits_per_slot" with a SUM row per SNR.
inline std::string rates_to_csv(const RateTable& t) {
  std::ostringstream out;
  out << "snr_db,message_id,rate_bits_per_slot\n";
  char buf[64];
  for (std::size_t i = 0; i < t.snr_db.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%g", t.snr_db[i]);
    const std::string snr = buf;
    for (const auto& [m, row] : t.rates) {
      std::snprintf(buf, sizeof buf, "%.9f", row[i]);
      out << snr << ',' << m << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.9f", t.sum[i]);
    out << snr << ",SUM," << buf << '\n';
  }
  return out.str();
}

}  // namespace cbia
