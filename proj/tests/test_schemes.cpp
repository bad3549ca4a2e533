#include <gtest/gtest.h>

#include <random>

#include "cbia/net_model.hpp"
#include "cbia/scheme.hpp"
#include "cbia/schemes.hpp"
#include "cbia/verifier.hpp"
#include "random_instances.hpp"

using namespace cbia;

TEST(FourCellSchemes, CoherentDownlinkVectors) {
  const auto s = four_cell_downlink_coherent();
  EXPECT_EQ(s.slots, 3);
  EXPECT_EQ(s.declared_tau, 3);
  EXPECT_EQ(s.claimed_sum_dof(), make_rational(8, 3));
  for (const auto& m : make_four_cell().messages()) EXPECT_EQ(s.claimed_dof(m), make_rational(1, 3));
  // B's slot-2 signal carries b1 and b2 together.
  int b_in_slot2 = 0;
  for (const auto& st : s.streams) {
    if (st.message[0] == 'b' && st.active_in(1)) ++b_in_slot2;
  }
  EXPECT_EQ(b_in_slot2, 2);
  check_compatible(make_four_cell(), s);
}

TEST(FourCellSchemes, IidDownlinkServesFive) {
  const auto s = four_cell_downlink_iid();
  EXPECT_EQ(s.streams.size(), 5u);
  EXPECT_EQ(s.claimed_sum_dof(), make_rational(5, 2));
  EXPECT_EQ(s.claimed_dof("b1"), 0);
  for (const auto& st : s.streams) {
    if (st.message == "d1") {
      EXPECT_EQ(st.vectors[0][0], cplx(1.0));
      EXPECT_EQ(st.vectors[1][0], cplx(1.0));
    }
  }
}

TEST(FourCellSchemes, UplinkClaims) {
  EXPECT_EQ(four_cell_uplink_coherent().claimed_sum_dof(), make_rational(8, 3));
  EXPECT_EQ(four_cell_uplink_iid().claimed_sum_dof(), make_rational(5, 2));
}

TEST(FourCellSchemes, WrongCompanionIsAMismatch) {
  EXPECT_THROW(four_cell_downlink_coherent(make_four_cell(Direction::uplink)), MismatchError);
  EXPECT_THROW(four_cell_uplink_iid(make_four_cell()), MismatchError);
  EXPECT_THROW(interference_diversity_scheme(make_four_cell()), MismatchError);
  EXPECT_THROW(check_compatible(make_macro_femto(), four_cell_downlink_coherent()), MismatchError);
}

TEST(Duk, OneOneFiveUsesIdentityColumns) {
  const auto s = symmetric_duk_scheme(1, 1, 5);
  EXPECT_EQ(s.slots, 5);
  EXPECT_EQ(s.declared_tau, 1);
  EXPECT_EQ(s.claimed_dof("W3"), make_rational(2, 5));
  // Slot k carries source k's first symbol and source k-1's second.
  for (int k = 0; k < 5; ++k) {
    std::set<MessageId> in_slot;
    for (const auto& st : s.streams) {
      if (st.active_in(k)) in_slot.insert(st.message);
    }
    const int prev = (k + 4) % 5;
    EXPECT_EQ(in_slot, (std::set<MessageId>{"W" + std::to_string(k + 1), "W" + std::to_string(prev + 1)}));
  }
}

TEST(Duk, TwoOneFiveNeedsGenericVectors) {
  const auto s = symmetric_duk_scheme(2, 1, 5);
  EXPECT_EQ(s.slots, 4);
  EXPECT_EQ(s.declared_tau, 4);
  EXPECT_EQ(s.claimed_dof("W1"), make_rational(1, 2));
  const auto v = duk_alignment_vectors(2, 1, 5);
  ASSERT_EQ(v.size(), 5u);
  double norm = 0;
  for (const auto& x : v[4]) norm += std::norm(x);
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_THROW(symmetric_duk_scheme(1, 2, 5), InvalidParameter);
}

TEST(InterferenceDiversity, StreamLayout) {
  const auto s = interference_diversity_scheme();
  EXPECT_EQ(s.claimed_dof("b1"), 1);
  EXPECT_EQ(s.claimed_dof("c1"), 1);
  EXPECT_EQ(s.claimed_dof("a1") + s.claimed_dof("a2"), make_rational(4, 3));
  // B switches to its second antenna in slot 3, C already in slot 2.
  for (const auto& st : s.streams) {
    if (st.message == "b1" && st.active_in(2)) EXPECT_EQ(st.vectors[2][1], cplx(1.0));
    if (st.message == "c1" && st.active_in(1)) EXPECT_EQ(st.vectors[1][1], cplx(1.0));
  }
}

TEST(InterferenceDiversity, SignatureShapeAtA1) {
  const auto p = make_macro_femto();
  const auto s = interference_diversity_scheme();
  FadingSpec spec;
  spec.tau = 3;
  spec.seed = 4;
  const auto sig = effective_signatures(p, s, sample_channels(p, 3, spec), "a1");
  EXPECT_EQ(sig.desired.rows(), 6);
  EXPECT_EQ(sig.desired.cols(), 2);
  EXPECT_EQ(sig.interference.cols(), 5);  // a2's pair and B's three streams
  // B's slot-3 stream lives in the slot-3 block only.
  for (std::size_t c = 0; c < sig.interference_streams.size(); ++c) {
    const auto& st = s.streams[sig.interference_streams[c]];
    if (st.message == "b1" && st.active_in(2)) {
      EXPECT_EQ(sig.interference.col(static_cast<Eigen::Index>(c)).head(4).norm(), 0.0);
      EXPECT_GT(sig.interference.col(static_cast<Eigen::Index>(c)).tail(2).norm(), 0.0);
    }
  }
}

TEST(Reuse, AlignedPerCellValues) {
  struct Case {
    CBProblem p;
    Rational per_cell;
    std::size_t phases;
  };
  for (const auto& c : {Case{make_linear_array(12), make_rational(2, 3), 3},
                        Case{make_square_array(5, 5), make_rational(4, 5), 5},
                        Case{make_hex_array(7, 7), make_rational(6, 7), 7}}) {
    const auto s = aligned_reuse(c.p);
    EXPECT_NO_THROW(validate(c.p, s));
    EXPECT_EQ(s.phases.size(), c.phases);
    for (const auto& [cell, d] : s.cell_dofs(c.p)) EXPECT_EQ(d, c.per_cell) << cell;
  }
}

TEST(Reuse, ConventionalPerCellValues) {
  for (const auto& [p, per_cell] : {std::pair{make_linear_array(12), make_rational(1, 2)},
                                    std::pair{make_square_array(10, 10), make_rational(1, 2)},
                                    std::pair{make_hex_array(6, 6), make_rational(1, 3)}}) {
    const auto s = conventional_reuse(p);
    EXPECT_NO_THROW(validate(p, s));
    for (const auto& [cell, d] : s.cell_dofs(p)) EXPECT_EQ(d, per_cell);
  }
}

TEST(Reuse, WrongFamilyOrSize) {
  EXPECT_THROW(aligned_reuse(make_linear_array(10)), InvalidParameter);
  EXPECT_THROW(aligned_reuse(make_four_cell()), InvalidParameter);
  EXPECT_THROW(conventional_reuse(make_hex_array(7, 7)), InvalidParameter);
  EXPECT_THROW(conventional_reuse(make_linear_array(9)), InvalidParameter);
}

TEST(Reuse, PerfectCodes) {
  EXPECT_TRUE(reuse_is_perfect_code(Geometry::linear, {12}));
  EXPECT_TRUE(reuse_is_perfect_code(Geometry::square, {5, 5}));
  EXPECT_TRUE(reuse_is_perfect_code(Geometry::hex, {7, 7}));
  EXPECT_TRUE(reuse_is_perfect_code(Geometry::hex, {14, 21}));
  // Off-period tori break the pattern.
  EXPECT_FALSE(reuse_is_perfect_code(Geometry::hex, {7, 8}));
}

TEST(ScheduleToScheme, LinearThreeCells) {
  const auto p = make_linear_array(3);
  const auto sched = aligned_reuse(p);
  const auto s = schedule_to_scheme(p, sched, 3);
  EXPECT_EQ(s.slots, 3);
  for (const auto& [cell, d] : sched.cell_dofs(p)) EXPECT_EQ(d, make_rational(2, 3));
  std::map<std::string, Rational> from_scheme;
  for (const auto& m : p.messages()) from_scheme[p.cell_of_message(m)] += s.claimed_dof(m);
  EXPECT_EQ(from_scheme, sched.cell_dofs(p));
}

TEST(ScheduleToScheme, EmptyScheduleGivesEmptyScheme) {
  const auto s = schedule_to_scheme(make_four_cell(), Schedule{});
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.claimed_sum_dof(), 0);
}

TEST(ScheduleToScheme, IndivisibleWeights) {
  const auto p = make_linear_array(12);
  EXPECT_THROW(schedule_to_scheme(p, aligned_reuse(p), 4), InvalidParameter);
}

namespace {

/// Random valid schedule: greedy patterns from shuffled message orders.
Schedule random_schedule(std::mt19937_64& rng, const CBProblem& p) {
  const int phases = std::uniform_int_distribution<int>(1, 4)(rng);
  std::vector<int> w(static_cast<std::size_t>(phases));
  int total = 0;
  for (auto& x : w) total += x = std::uniform_int_distribution<int>(1, 5)(rng);
  Schedule s;
  for (int k = 0; k < phases; ++k) {
    auto msgs = p.messages();
    std::shuffle(msgs.begin(), msgs.end(), rng);
    Phase ph{make_rational(w[static_cast<std::size_t>(k)], total), {}};
    for (const auto& m : msgs) {
      Phase trial = ph;
      for (const auto& r : p.destinations(m)) trial.served.insert({m, r});
      try {
        Schedule probe;
        probe.phases = {Phase{1, trial.served}};
        validate(p, probe);
        ph = trial;
      } catch (const InvalidProblem&) {
      }
    }
    s.phases.push_back(ph);
  }
  return s;
}

}  // namespace

TEST(ScheduleToScheme, PreservesDoFAndAlwaysVerifies) {
  // Single antennas: validate() allows a multi-antenna transmitter to serve
  // several receivers at once, which needs precoding beyond unit vectors.
  std::mt19937_64 rng(31);
  for (int i = 0; i < 120; ++i) {
    const auto p = fixtures::random_problem(rng, {4, 4, 1, 2, false});
    const auto sched = random_schedule(rng, p);
    ASSERT_NO_THROW(validate(p, sched));
    const auto s = schedule_to_scheme(p, sched);
    for (const auto& m : p.messages()) EXPECT_EQ(s.claimed_dof(m), sched.message_dof(m));
    FadingSpec spec;
    spec.seed = static_cast<std::uint64_t>(i);
    EXPECT_TRUE(verify(p, s, spec, 2).pass());
  }
}

TEST(SchemeJson, RoundTrip) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 150; ++i) {
    const auto p = fixtures::random_problem(rng);
    auto s = fixtures::random_scheme(rng, p);
    s.declared_tau = 1 + i % 3;
    const auto back = scheme_from_json(nlohmann::json::parse(scheme_to_json(s).dump()));
    EXPECT_EQ(back.slots, s.slots);
    EXPECT_EQ(back.declared_tau, s.declared_tau);
    ASSERT_EQ(back.streams.size(), s.streams.size());
    for (std::size_t k = 0; k < s.streams.size(); ++k) {
      EXPECT_EQ(back.streams[k].message, s.streams[k].message);
      EXPECT_EQ(back.streams[k].vectors, s.streams[k].vectors);
    }
  }
}

TEST(SchemeJson, Errors) {
  EXPECT_THROW(scheme_from_json(nlohmann::json::parse(R"({"streams":[]})")), ParseError);
  try {
    scheme_from_json(nlohmann::json::parse(R"({"T":2,"streams":[{"message":"a","vectors":[[[1,0]]]}]})"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "streams[0].vectors");
  }
}

TEST(ScheduleValidation, DetectsInterference) {
  const auto p = make_four_cell();
  Schedule s;
  s.phases = {Phase{1, {{"a1", "a1"}, {"b2", "b2"}}}};  // a1 hears B
  EXPECT_THROW(validate(p, s), InvalidProblem);
  s.phases = {Phase{1, {{"a1", "a1"}, {"d1", "d1"}}}};
  EXPECT_NO_THROW(validate(p, s));
  s.phases = {Phase{make_rational(1, 2), {{"a1", "a1"}}}};
  EXPECT_THROW(validate(p, s), InvalidProblem);
}
