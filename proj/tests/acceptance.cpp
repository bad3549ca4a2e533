// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "cbia/bounds.hpp"
#include "cbia/builtins.hpp"
#include "cbia/index_coding.hpp"
#include "cbia/problem_json.hpp"
#include "cbia/schemes.hpp"
#include "cbia/simulator.hpp"
#include "cbia/verifier.hpp"
#include "random_instances.hpp"

using namespace cbia;

namespace {

// Pinned tolerances and budgets.
constexpr std::uint64_t kSeed = 20240607;
constexpr double kRankTol = 1e-8;
constexpr double kCriterion1Seconds = 5.0;
constexpr double kCriterion5Seconds = 30.0;
constexpr double kCriterion11Seconds = 120.0;
constexpr double kSlopeTol = 0.1;
constexpr int kSlopeDraws = 200;
constexpr int kVerifyDraws = 50;
constexpr int kPropertyCases = 100;
constexpr int kRandomOracleSchemes = 50;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FadingSpec spec_with(int tau, std::uint64_t seed = kSeed) {
  FadingSpec s;
  s.tau = tau;
  s.seed = seed;
  return s;
}

/// Collects the reasons a criterion failed.
struct Check {
  std::ostringstream notes;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << "; " << what;
    }
  }
  template <class A, class B>
  void equal(const A& got, const B& want, const std::string& what) {
    if (!(got == want)) {
      std::ostringstream s;
      s << what << " = " << got << ", expected " << want;
      expect(false, s.str());
    }
  }
};

std::string join(const std::vector<NodeId>& v) {
  std::string out;
  for (const auto& x : v) out += (out.empty() ? "" : ",") + x;
  return out;
}

std::set<NodeId> as_set(const std::vector<NodeId>& v) { return {v.begin(), v.end()}; }

bool single_rate_near(const RateTable& t, double want, Check& c, const std::string& label) {
  const double slope = estimate_dof(t, 30, 40);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s slope %.4f, expected %.4f +/- %.2f", label.c_str(), slope, want, kSlopeTol);
  c.expect(std::abs(slope - want) <= kSlopeTol, buf);
  return std::abs(slope - want) <= kSlopeTol;
}

// --------------------------------------------------------------------------

Check criterion1() {
  Check c;
  const auto t0 = Clock::now();
  const auto p = make_four_cell();
  const auto r = verify(p, four_cell_downlink_coherent(), spec_with(3), kVerifyDraws, kRankTol);
  c.expect(r.pass(), "verify failed at tau=3");
  c.equal(r.sum_dof, make_rational(8, 3), "sum DoF");
  c.equal(converse_lp(p).sum_bound, make_rational(8, 3), "converse LP");
  c.equal(orthogonal_max(p, Objective::sum).value, make_rational(2), "orthogonal sum");
  const double s = seconds_since(t0);
  c.expect(s < kCriterion1Seconds, "took " + std::to_string(s) + " s");
  return c;
}

Check criterion2() {
  Check c;
  const auto r = verify(make_four_cell(), four_cell_downlink_coherent(), spec_with(1), kVerifyDraws, kRankTol);
  c.expect(!r.pass(), "passed at tau=1");
  c.expect(as_set(r.failing_receivers()) == std::set<NodeId>{"b2", "d2"},
           "failing receivers {" + join(r.failing_receivers()) + "}, expected {b2,d2}");
  return c;
}

Check criterion3() {
  Check c;
  const auto r = verify(make_four_cell(), four_cell_downlink_iid(), spec_with(1), kVerifyDraws, kRankTol);
  c.expect(r.pass(), "verify failed");
  c.equal(r.sum_dof, make_rational(5, 2), "sum DoF");
  return c;
}

Check criterion4() {
  Check c;
  const auto up = make_four_cell(Direction::uplink);
  const auto coh = verify(up, four_cell_uplink_coherent(), spec_with(3), kVerifyDraws, kRankTol);
  c.expect(coh.pass(), "coherent uplink failed at tau=3");
  c.equal(coh.sum_dof, make_rational(8, 3), "coherent uplink sum DoF");
  const auto iid = verify(up, four_cell_uplink_iid(), spec_with(1), kVerifyDraws, kRankTol);
  c.expect(iid.pass(), "iid uplink failed");
  c.equal(iid.sum_dof, make_rational(5, 2), "iid uplink sum DoF");
  auto mixed = spec_with(1);
  mixed.receiver_tau["D"] = 3;
  const auto m = verify(up, four_cell_uplink_coherent(), mixed, kVerifyDraws, kRankTol);
  c.expect(m.pass(), "mixed run (only D block-constant) failed at {" + join(m.failing_receivers()) + "}");
  c.equal(m.sum_dof, make_rational(8, 3), "mixed run sum DoF");
  const auto all_fast = verify(up, four_cell_uplink_coherent(), spec_with(1), kVerifyDraws, kRankTol);
  c.expect(as_set(all_fast.failing_receivers()) == std::set<NodeId>{"D"},
           "tau=1 everywhere fails at {" + join(all_fast.failing_receivers()) + "}, expected {D}");
  return c;
}

Check criterion5() {
  Check c;
  const auto t0 = Clock::now();
  struct Aligned {
    std::string name;
    Rational per_cell;
  };
  for (const auto& a : {Aligned{"linear:12", make_rational(2, 3)}, Aligned{"square:5x5", make_rational(4, 5)},
                        Aligned{"hex:7x7", make_rational(6, 7)}}) {
    const auto p = builtin_problem(a.name);
    const auto sched = aligned_reuse(p);
    try {
      validate(p, sched);
    } catch (const Error& e) {
      c.expect(false, a.name + " aligned reuse invalid: " + e.what());
    }
    for (const auto& [cell, d] : sched.cell_dofs(p)) {
      if (d != a.per_cell) c.expect(false, a.name + " cell " + cell + " gets " + to_string(d));
    }
    const auto lp = converse_lp(p);
    c.equal(lp.symmetric_per_cell, a.per_cell, a.name + " converse per-cell");
    c.equal(lp.sum_bound, sched.sum_dof(p), a.name + " converse sum vs aligned reuse");
  }
  struct Conventional {
    std::string name;
    Rational per_cell;
  };
  for (const auto& a : {Conventional{"linear:12", make_rational(1, 2)}, Conventional{"square:10x10", make_rational(1, 2)},
                        Conventional{"hex:21x21", make_rational(1, 3)}}) {
    const auto p = builtin_problem(a.name);
    const auto sched = conventional_reuse(p);
    try {
      validate(p, sched);
    } catch (const Error& e) {
      c.expect(false, a.name + " conventional reuse invalid: " + e.what());
    }
    for (const auto& [cell, d] : sched.cell_dofs(p)) {
      if (d != a.per_cell) c.expect(false, a.name + " conventional cell " + cell + " gets " + to_string(d));
    }
  }
  // Every hex cell plus its six neighbours hits each of the 7 residues once.
  int checked = 0;
  const std::vector<int> dims{7, 7};
  for (const auto& cell : lattice_cells(Geometry::hex, dims)) {
    for (int residue = 0; residue < 7; ++residue) {
      int hits = reuse_residue(Geometry::hex, cell) == residue;
      for (int d = 0; d < 6; ++d) hits += reuse_residue(Geometry::hex, lattice_neighbor(Geometry::hex, dims, cell, d)) == residue;
      c.expect(hits == 1, "hex domination fails at (" + std::to_string(cell.x) + "," + std::to_string(cell.y) + ")");
      ++checked;
    }
  }
  c.equal(checked, 49 * 7, "hex domination checks");
  const double s = seconds_since(t0);
  c.expect(s < kCriterion5Seconds, "took " + std::to_string(s) + " s");
  return c;
}

Check criterion6() {
  Check c;
  const auto lin = make_linear_array(6);
  const auto o = orthogonal_max(lin, Objective::symmetric);
  c.expect(o.proven_optimal, "linear K=6 search not exhaustive");
  c.equal(o.value, make_rational(2, 3), "linear K=6 orthogonal per cell");
  c.equal(converse_lp(lin).symmetric_per_cell, make_rational(2, 3), "linear K=6 converse per cell");
  const auto four = orthogonal_max(make_four_cell(), Objective::sum);
  c.equal(four.value, make_rational(2), "four-cell orthogonal sum");
  c.expect(four.value < make_rational(8, 3), "four-cell orthogonal sum not below 8/3");
  return c;
}

Check criterion7() {
  Check c;
  const auto g = cb_to_gic(make_four_cell(Direction::downlink, true));
  std::set<std::set<MessageId>> groups;
  for (const auto& [r, rx] : g.receivers) groups.insert(g.interferers(r));
  c.expect(groups == std::set<std::set<MessageId>>{{"a1", "c1"}, {"a2", "b2"}, {"b1", "d1"}, {"c2", "d2"}},
           "merged four-cell interference groups differ");

  std::mt19937_64 rng(kSeed);
  int identity = 0, tried = 0;
  while (identity < kPropertyCases && tried < 20 * kPropertyCases) {
    ++tried;
    const auto p = fixtures::random_problem(rng, {5, 5, 1, 1, true});
    bool all_desire = true;
    for (const auto& [r, n] : p.topology.receivers) all_desire = all_desire && !p.desired_by(r).empty();
    if (!all_desire) continue;
    c.expect(gic_to_cb(cb_to_gic(p)) == p, "gic_to_cb(cb_to_gic(p)) != p for\n" + store_problem(p));
    ++identity;
  }
  c.equal(identity, kPropertyCases, "identity cases");

  const auto fig10 = fig10_gic();
  const auto v = half_dof_feasible(fig10);
  c.expect(!v.feasible, "fig10 reported feasible");
  std::vector<MessageId> path;
  if (!v.chain.empty()) path.push_back(v.chain.front().first);
  for (const auto& step : v.chain) path.push_back(step.second);
  c.expect(path == std::vector<MessageId>{"W3", "W4", "W5"}, "fig10 witness is not W3-W4-W5");
  c.expect(witness_is_valid(fig10, v), "fig10 witness does not replay");

  // Feasible verdicts on random single-antenna GIC problems.
  std::bernoulli_distribution coin(0.5);
  int feasible = 0;
  for (int i = 0; i < kPropertyCases; ++i) {
    GICProblem gp;
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    for (int k = 1; k <= n; ++k) gp.messages.insert("W" + std::to_string(k));
    for (int k = 1; k <= n; ++k) {
      GICReceiver rx{1, {"W" + std::to_string(k)}, {}};
      for (const auto& m : gp.messages) {
        if (!rx.desired.count(m) && coin(rng)) rx.known.insert(m);
      }
      gp.receivers["r" + std::to_string(k)] = rx;
    }
    const auto hv = half_dof_feasible(gp);
    if (!hv.feasible) {
      c.expect(witness_is_valid(gp, hv), "random infeasible witness does not replay");
      continue;
    }
    ++feasible;
    c.expect(verify_exact(gic_to_cb(gp), hv.scheme, spec_with(2, kSeed + static_cast<std::uint64_t>(i)), 1).pass,
             "feasible half-DoF scheme fails verify_exact");
  }
  c.expect(feasible > 0, "no feasible random instance");
  return c;
}

Check criterion8() {
  Check c;
  const auto p115 = make_symmetric_duk(1, 1, 5);
  const auto r115 = verify(p115, symmetric_duk_scheme(1, 1, 5), spec_with(1), kVerifyDraws, kRankTol);
  c.expect(r115.pass(), "(1,1,5) fails at tau=1");
  for (const auto& [m, d] : r115.message_dof) {
    if (d != make_rational(2, 5)) c.expect(false, "(1,1,5) " + m + " gets " + to_string(d));
  }
  const auto p215 = make_symmetric_duk(2, 1, 5);
  const auto s215 = symmetric_duk_scheme(2, 1, 5);
  const auto r215 = verify(p215, s215, spec_with(4), kVerifyDraws, kRankTol);
  c.expect(r215.pass(), "(2,1,5) fails at tau=4");
  for (const auto& [m, d] : r215.message_dof) {
    if (d != make_rational(1, 2)) c.expect(false, "(2,1,5) " + m + " gets " + to_string(d));
  }
  const auto fast = verify(p215, s215, spec_with(1), kVerifyDraws, kRankTol);
  c.expect(!fast.pass(),
           "(2,1,5) also passes at tau=1: each receiver hears a single interferer, so its 2 desired and "
           "2 interference columns fill T=4 without any alignment");
  // (2,1,6) does need its coherence block.
  const auto p216 = make_symmetric_duk(2, 1, 6);
  const auto s216 = symmetric_duk_scheme(2, 1, 6);
  const auto r216 = verify(p216, s216, spec_with(5), kVerifyDraws, kRankTol);
  c.expect(r216.pass(), "(2,1,6) fails at tau=5");
  c.equal(r216.sum_dof, make_rational(12, 5), "(2,1,6) sum DoF");
  c.expect(!verify(p216, s216, spec_with(1), kVerifyDraws, kRankTol).pass(), "(2,1,6) passes at tau=1");
  return c;
}

Check criterion9() {
  Check c;
  const auto p = make_macro_femto();
  const auto r = verify(p, interference_diversity_scheme(), spec_with(3), kVerifyDraws, kRankTol);
  c.expect(r.pass(), "interference diversity fails at tau=3");
  c.equal(r.cell_dof.at("A"), make_rational(4, 3), "cell A");
  c.equal(r.cell_dof.at("B"), make_rational(1), "cell B");
  c.equal(r.cell_dof.at("C"), make_rational(1), "cell C");
  const auto& a1 = r.receivers.at("a1");
  c.equal(a1.receive_dimension, 6, "a1 receive dimension");
  c.equal(a1.min_interference_rank, 4, "a1 min interference rank");
  c.equal(a1.max_interference_rank, 4, "a1 max interference rank");
  c.equal(verify_xor_scheme(fig16_gic(), fig16_xor_plan()).dof, 4, "XOR DoF");
  return c;
}

Check criterion10() {
  Check c;
  int compared = 0;
  for (const auto& bc : builtin_suite()) {
    const auto p = builtin_problem(bc.problem);
    const auto s = builtin_scheme(p, bc.scheme);
    const auto spec = spec_with(bc.tau);
    const auto f = verify(p, s, spec, 5, kRankTol);
    const auto e = verify_exact(p, s, spec, 1);
    c.expect(f.pass() == e.pass && as_set(f.failing_receivers()) == e.failing_receivers,
             bc.label + ": float and exact disagree");
    c.expect(f.pass() == bc.expect_pass, bc.label + ": unexpected verdict");
    ++compared;
  }
  c.expect(compared >= 10, "fewer than 10 built-in schemes");
  std::mt19937_64 rng(kSeed);
  for (int i = 0; i < kRandomOracleSchemes; ++i) {
    const auto p = fixtures::random_problem(rng, {2, 2, 2, 2, false});
    const auto s = fixtures::random_scheme(rng, p, 4);
    const auto spec = spec_with(1, kSeed + static_cast<std::uint64_t>(i));
    const auto f = verify(p, s, spec, 3, kRankTol);
    const auto e = verify_exact(p, s, spec, 2);
    c.expect(f.pass() == e.pass && as_set(f.failing_receivers()) == e.failing_receivers,
             "random scheme " + std::to_string(i) + ": float and exact disagree");
  }
  return c;
}

Check criterion11() {
  Check c;
  const auto t0 = Clock::now();
  const std::vector<double> snr{30, 40};
  const auto four = make_four_cell();
  single_rate_near(simulate_rates(four, four_cell_downlink_coherent(), spec_with(3), snr, kSlopeDraws), 8.0 / 3.0, c,
                   "coherent four-cell");
  single_rate_near(simulate_rates(four, four_cell_downlink_iid(), spec_with(1), snr, kSlopeDraws), 2.5, c,
                   "iid four-cell");
  const auto lin = make_linear_array(12);
  single_rate_near(simulate_rates(lin, schedule_to_scheme(lin, aligned_reuse(lin)), spec_with(1), snr, kSlopeDraws),
                   8.0, c, "linear K=12 aligned reuse");
  const double s = seconds_since(t0);
  c.expect(s < kCriterion11Seconds, "took " + std::to_string(s) + " s");
  return c;
}

Check criterion12() {
  Check c;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> mag(0.1, 10.0), phase(0.0, 6.283185307179586);

  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = fixtures::random_problem(rng);
    const auto s = fixtures::random_scheme(rng, p);
    const auto spec = spec_with(1, kSeed + static_cast<std::uint64_t>(i));
    const auto base = verify(p, s, spec, 3, kRankTol);

    // Scale invariance.
    auto scaled = s;
    const auto k = std::uniform_int_distribution<std::size_t>(0, s.streams.size() - 1)(rng);
    const cplx factor = std::polar(mag(rng), phase(rng));
    for (auto& slot : scaled.streams[k].vectors) {
      for (auto& x : slot) x *= factor;
    }
    c.expect(verify(p, scaled, spec, 3, kRankTol).failing_receivers() == base.failing_receivers(),
             "scale invariance case " + std::to_string(i));

    // Interference monotonicity: dropping a stream never breaks a passing receiver.
    if (s.streams.size() > 1) {
      auto fewer = s;
      fewer.streams.erase(fewer.streams.begin() + static_cast<long>(k));
      const auto after = verify(p, fewer, spec, 3, kRankTol);
      for (const auto& [r, sum] : base.receivers) {
        if (sum.pass && !after.receivers.at(r).pass) c.expect(false, "monotonicity case " + std::to_string(i));
      }
    }

    // Reciprocal involution.
    const auto rr = reciprocal(reciprocal(p));
    c.expect(rr.topology == p.topology && rr.origin == p.origin && rr.desired == p.desired,
             "reciprocal involution case " + std::to_string(i));

    // Store/load round trips.
    c.expect(load_problem(store_problem(p)) == p, "problem round trip case " + std::to_string(i));
    const auto back = scheme_from_json(Json::parse(scheme_to_json(s).dump()));
    bool same = back.slots == s.slots && back.streams.size() == s.streams.size();
    for (std::size_t j = 0; same && j < s.streams.size(); ++j) {
      same = back.streams[j].message == s.streams[j].message && back.streams[j].vectors == s.streams[j].vectors;
    }
    c.expect(same, "scheme round trip case " + std::to_string(i));
    const auto g = cb_to_gic(p);
    c.expect(gic_from_json(Json::parse(gic_to_json(g).dump())) == g, "GIC round trip case " + std::to_string(i));
  }

  // Schedule-to-scheme DoF preservation on orthogonal optima (single antennas).
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = fixtures::random_problem(rng, {4, 4, 1, 2, false});
    const auto o = orthogonal_max(p, i % 2 ? Objective::sum : Objective::symmetric);
    const auto s = schedule_to_scheme(p, o.schedule);
    for (const auto& m : p.messages()) {
      if (s.claimed_dof(m) != o.schedule.message_dof(m)) c.expect(false, "schedule DoF case " + std::to_string(i));
    }
    const auto r = verify(p, s, spec_with(1, kSeed + static_cast<std::uint64_t>(i)), 2, kRankTol);
    c.expect(r.pass(), "schedule scheme fails verify, case " + std::to_string(i));
    c.equal(r.sum_dof, o.schedule.sum_dof(p), "schedule verified sum DoF, case " + std::to_string(i));
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"coherent four-cell downlink: 8/3 verified, LP 8/3, orthogonal 2", criterion1},
      {"coherence necessity: tau=1 fails exactly at {b2,d2}", criterion2},
      {"iid four-cell downlink: 5/2 at tau=1", criterion3},
      {"uplink: 8/3 coherent, 5/2 iid, coherence needed only at D", criterion4},
      {"arrays: aligned and conventional reuse, tight converse, hex domination", criterion5},
      {"orthogonal optimal on linear K=6, not on the four-cell cluster", criterion6},
      {"index coding mappings, fig10 witness, feasible schemes verify", criterion7},
      {"(D,U,K) networks: (1,1,5) at tau=1, (2,1,5) at tau=4 and not at tau=1", criterion8},
      {"interference diversity 4/3,1,1 with rank-4 interference at a1; XOR 4", criterion9},
      {"float and exact verifiers agree", criterion10},
      {"simulated 30-40 dB slopes within 0.1", criterion11},
      {"property suite, 100 cases each", criterion12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = Clock::now();
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, " (%.2f s)", seconds_since(t0));
    std::cout << (c.ok ? "PASS " : "FAIL ") << i + 1 << ": " << criteria[i].first << timing << c.notes.str() << '\n'
              << std::flush;
    failed += !c.ok;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass\n";
  return failed ? 1 : 0;
}
