#pragma once

// Block-fading channel realizations. Coefficients are constant inside each
// coherence block (blocks aligned to the first slot) and independent across
// blocks and links.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cbia/errors.hpp"
#include "cbia/linalg.hpp"
#include "cbia/net_model.hpp"

namespace cbia {

enum class SpatialModel { iid, independent_scaled };

struct FadingSpec {
  int tau = 1;  // coherence block length in slots
  SpatialModel spatial = SpatialModel::iid;
  double lo = 0.05;  // accepted entry magnitudes [lo, hi]
  double hi = 20.0;
  double scale_lo = 0.5;  // per-link scale range for independent_scaled
  double scale_hi = 2.0;
  std::uint64_t seed = 0;
  /// Coherence override for all links into the named receivers.
  std::map<NodeId, int> receiver_tau;

  int tau_for(const NodeId& rx) const {
    auto it = receiver_tau.find(rx);
    return it == receiver_tau.end() ? tau : it->second;
  }

  void validate() const {
    if (tau < 1) throw InvalidParameter("tau must be >= 1");
    for (const auto& [r, t] : receiver_tau) {
      if (t < 1) throw InvalidParameter("tau override for '" + r + "' must be >= 1");
    }
    if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) {
      throw InvalidParameter("magnitude bounds must satisfy 0 < lo < hi < inf");
    }
    if (spatial == SpatialModel::independent_scaled && !(scale_lo > 0.0 && scale_lo <= scale_hi)) {
      throw InvalidParameter("link scale range must satisfy 0 < scale_lo <= scale_hi");
    }
  }
};

/// Per-slot channel matrices (receiver antennas x transmitter antennas) for
/// every connected pair. `Matrix` is CMatrix for sampled channels and
/// QMatrix for the exact oracle.
template <class Matrix>
struct BasicChannelRealization {
  int slots = 0;
  std::map<Link, std::vector<Matrix>> coefficients;
  std::size_t entry_draws = 0;  // scalar draws including rejected ones
  std::size_t entries = 0;      // accepted scalar entries

  const Matrix& at(const NodeId& rx, const NodeId& tx, int slot) const {
    return coefficients.at({rx, tx}).at(static_cast<std::size_t>(slot));
  }
};

using ChannelRealization = BasicChannelRealization<CMatrix>;
using ExactChannelRealization = BasicChannelRealization<QMatrix>;

/// Mixes a base seed with an index (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

template <class Matrix, class DrawBlock>
BasicChannelRealization<Matrix> sample_blocks(const CBProblem& p, int slots, const FadingSpec& spec,
                                              DrawBlock&& draw_block) {
  if (slots < 1) throw InvalidParameter("channel horizon must be >= 1 slot");
  spec.validate();
  BasicChannelRealization<Matrix> out;
  out.slots = slots;
  for (const auto& link : p.topology.connectivity) {
    const auto& [rx, tx] = link;
    const int tau = spec.tau_for(rx);
    const int nr = p.rx_antennas(rx), nt = p.tx_antennas(tx);
    auto& per_slot = out.coefficients[link];
    per_slot.reserve(static_cast<std::size_t>(slots));
    draw_block.begin_link();
    for (int n = 0; n < slots; ++n) {
      if (n % tau == 0) {
        per_slot.push_back(draw_block(nr, nt, out));
      } else {
        per_slot.push_back(per_slot.back());
      }
    }
  }
  return out;
}

}  // namespace detail

/// Samples one block-fading realization over `slots` slots. Entries are
/// CN(0,1) (times a per-link scale under independent_scaled), redrawn until
/// their magnitude falls in [lo, hi]. Deterministic in (p, slots, spec).
inline ChannelRealization sample_channels(const CBProblem& p, int slots, const FadingSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> scale_dist(spec.scale_lo, spec.scale_hi);

  struct Drawer {
    const FadingSpec& spec;
    std::mt19937_64& rng;
    std::normal_distribution<double>& gauss;
    std::uniform_real_distribution<double>& scale_dist;
    double scale = 1.0;

    void begin_link() { scale = spec.spatial == SpatialModel::independent_scaled ? scale_dist(rng) : 1.0; }

    CMatrix operator()(int nr, int nt, ChannelRealization& out) {
      CMatrix h(nr, nt);
      for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
          cplx z;
          do {
            z = scale * cplx(gauss(rng), gauss(rng));
            ++out.entry_draws;
          } while (std::abs(z) < spec.lo || std::abs(z) > spec.hi);
          ++out.entries;
          h(i, j) = z;
        }
      }
      return h;
    }
  } drawer{spec, rng, gauss, scale_dist};

  return detail::sample_blocks<CMatrix>(p, slots, spec, drawer);
}

/// Block-fading realization with random Gaussian-rational entries
/// (numerators in [-2^20, 2^20], denominators in [1, 2^20], never zero).
/// Only the coherence structure of `spec` is used.
inline ExactChannelRealization sample_exact_channels(const CBProblem& p, int slots, const FadingSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  constexpr std::int64_t kBound = 1 << 20;
  std::uniform_int_distribution<std::int64_t> num(-kBound, kBound);
  std::uniform_int_distribution<std::int64_t> den(1, kBound);

  struct Drawer {
    std::mt19937_64& rng;
    std::uniform_int_distribution<std::int64_t>& num;
    std::uniform_int_distribution<std::int64_t>& den;

    void begin_link() {}

    QMatrix operator()(int nr, int nt, ExactChannelRealization& out) {
      QMatrix h(nr, nt);
      for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
          GaussianRational z;
          do {
            std::int64_t a = num(rng), b = den(rng), c = num(rng), d = den(rng);
            z = GaussianRational(make_rational(a, b), make_rational(c, d));
            ++out.entry_draws;
          } while (z.is_zero());
          ++out.entries;
          h(i, j) = z;
        }
      }
      return h;
    }
  } drawer{rng, num, den};

  return detail::sample_blocks<QMatrix>(p, slots, spec, drawer);
}

/// {"rx->tx": [block matrices as rows of [re, im] pairs]}
inline nlohmann::json channels_to_json(const ChannelRealization& ch, const FadingSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [link, per_slot] : ch.coefficients) {
    const int tau = spec.tau_for(link.first);
    auto& blocks = j[link.first + "->" + link.second];
    blocks = nlohmann::json::array();
    for (int n = 0; n < ch.slots; n += tau) {
      const auto& h = per_slot[static_cast<std::size_t>(n)];
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < h.cols(); ++c) row.push_back({h(r, c).real(), h(r, c).imag()});
        rows.push_back(row);
      }
      blocks.push_back(rows);
    }
  }
  return j;
}

}  // namespace cbia
