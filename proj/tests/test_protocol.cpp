#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "idnc/errors.hpp"
#include "idnc/protocol.hpp"

using namespace idnc;

namespace {

SessionConfig base_config(int m, int n, GecParams forward, GecParams backward,
                          bool limited, int td = 1, int tu = 1) {
  SessionConfig cfg;
  cfg.num_users = m;
  cfg.num_packets = n;
  cfg.forward.assign(m, forward);
  cfg.backward.assign(m, backward);
  cfg.limited_feedback = limited;
  if (limited) cfg.frame = FrameConfig::make(td, tu, m);
  return cfg;
}

const GecParams kForward{0.3, 0.1, 0.2, 0.7};
const GecParams kLossyBackward{0.3, 0.1, 0.3, 0.8};
const GecParams kDeafBackward{0.5, 0.4, 1.0, 1.0};  // nothing ever arrives

bool same_selection(const SelectionResult& a, const SelectionResult& b) {
  if (a.kappa != b.kappa) return false;
  if (a.targeted.size() != b.targeted.size()) return false;
  for (std::size_t i = 0; i < a.targeted.size(); ++i)
    if (a.targeted[i].user != b.targeted[i].user ||
        a.targeted[i].packet != b.targeted[i].packet)
      return false;
  return true;
}

}  // namespace

TEST_CASE("solver names round trip") {
  for (SolverKind kind :
       {SolverKind::DdcGraph, SolverKind::DdcBpso, SolverKind::Ssp,
        SolverKind::Sdd, SolverKind::BlindNve, SolverKind::BlindFve,
        SolverKind::BlindSve})
    CHECK(solver_from_name(solver_name(kind)) == kind);
  CHECK_THROWS_AS(solver_from_name("nope"), ConfigError);
}

TEST_CASE("belief table under certainty") {
  Session session(base_config(3, 8, kForward, GecParams::lossless(), false), 5);
  session.run_initial_phase();
  const BeliefTable table = build_belief_table(session);
  for (int i = 0; i < 3; ++i) {
    CHECK(table.erasure[i] ==
          doctest::Approx(session.erasure_belief(i)).epsilon(1e-12));
    for (int j = 0; j < 8; ++j)
      CHECK(table.innovative[i][j] ==
            (session.believed_has(i, j) ? 0.0 : 1.0));
    CHECK(table.finish[i] == 0.0);  // certain wants kill the product, and
                                    // finished users report 0 by convention
  }
}

TEST_CASE("belief table with uncertainty stays in the open interval") {
  Session session(base_config(3, 8, kForward, kDeafBackward, true), 6);
  session.run_initial_phase();
  const BeliefTable table = build_belief_table(session);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 8; ++j) {
      // every entry is Uncertain (no feedback bit arrived): the innovative
      // probability reflects the initial attempt's erasure belief
      CHECK(session.entry(i, j) == Entry::Uncertain);
      CHECK(table.innovative[i][j] > 0.0);
      CHECK(table.innovative[i][j] < 1.0);
      CHECK(table.innovative[i][j] ==
            doctest::Approx(session.erasure_belief_at_txn(i, j + 1))
                .epsilon(1e-12));
    }
}

TEST_CASE("blind policies on fresh uncertainty (downlink rule)") {
  Session session(base_config(2, 6, kForward, kDeafBackward, true), 7);
  session.run_initial_phase();
  REQUIRE(session.current_frame() == 0);
  SplitMix64 rng(1);
  // everything became Uncertain during the current frame: the pessimist and
  // the optimist both assume the packets arrived
  for (BlindPolicy policy : {BlindPolicy::Pessimist, BlindPolicy::Optimist}) {
    const auto wants = blind_effective_wants(session, policy, rng);
    for (const auto& row : wants)
      for (char w : row) CHECK(w == 0);
  }
}

TEST_CASE("blind policies on aged uncertainty (uplink rule)") {
  Session session(base_config(2, 6, kForward, kDeafBackward, true), 7);
  session.run_initial_phase();
  session.set_current_frame(3);  // the initial-phase marks are now old
  SplitMix64 rng(1);
  const auto pess = blind_effective_wants(session, BlindPolicy::Pessimist, rng);
  for (const auto& row : pess)
    for (char w : row) CHECK(w == 1);  // unheard feedback: assume still wanted
  // the whole believed Wants set is uncertain, so the optimist reinstates too
  const auto opt = blind_effective_wants(session, BlindPolicy::Optimist, rng);
  for (const auto& row : opt)
    for (char w : row) CHECK(w == 1);
}

TEST_CASE("realistic policy follows the stationary bad probability") {
  // backward chain pinned in Bad: erases everything and P_B = 1, so aged
  // uncertain entries are always kept
  Session keep(base_config(2, 5, kForward, GecParams{0.0, 0.5, 1.0, 1.0}, true),
               8);
  keep.run_initial_phase();
  keep.set_current_frame(2);
  SplitMix64 rng(3);
  const auto kept = blind_effective_wants(keep, BlindPolicy::Realistic, rng);
  for (const auto& row : kept)
    for (char w : row) CHECK(w == 1);

  // backward chain pinned in Good but still always erasing: P_B = 0, so aged
  // uncertain entries are always dropped
  Session drop(base_config(2, 5, kForward, GecParams{0.5, 0.0, 1.0, 1.0}, true),
               8);
  drop.run_initial_phase();
  drop.set_current_frame(2);
  const auto dropped = blind_effective_wants(drop, BlindPolicy::Realistic, rng);
  for (const auto& row : dropped)
    for (char w : row) CHECK(w == 0);
}

TEST_CASE("once-attempted admissibility") {
  Session session(base_config(1, 4, GecParams{0.5, 0.5, 0.0, 0.0},
                              kDeafBackward, true),
                  9);
  session.run_initial_phase();
  REQUIRE(session.believed_wants_count(0) == 4);  // every feedback bit lost

  // no history: any packet is admissible
  CHECK(enforce_once_attempted(session, 0, 0));

  session.set_current_frame(1);
  session.transmit({0}, {Target{0, 0}}, 5);
  // re-attempting packet 0 would leave no once-attempted packet behind
  CHECK_FALSE(enforce_once_attempted(session, 0, 0));
  CHECK(enforce_once_attempted(session, 0, 1));

  session.transmit({1}, {Target{0, 1}}, 6);
  // packet 1 is once-attempted, so packet 0 may go again (and vice versa)
  CHECK(enforce_once_attempted(session, 0, 0));
  CHECK(enforce_once_attempted(session, 0, 1));

  session.transmit({0}, {Target{0, 0}}, 7);
  // now only packet 1 is once-attempted; attempting it again is inadmissible
  CHECK_FALSE(enforce_once_attempted(session, 0, 1));
}

TEST_CASE("single-want users bypass the once-attempted filter") {
  Session session(base_config(1, 1, GecParams{0.5, 0.5, 0.0, 0.0},
                              kDeafBackward, true),
                  9);
  session.run_initial_phase();
  session.set_current_frame(1);
  session.transmit({0}, {Target{0, 0}}, 2);
  session.transmit({0}, {Target{0, 0}}, 3);
  CHECK(enforce_once_attempted(session, 0, 0));
}

TEST_CASE("pipelines coincide on certain state") {
  // limited session that never actually loses feedback: at every decision
  // epoch the belief is certain, so the limited pipeline (any blind policy)
  // and the perfect pipeline pick the same combination
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Session session(
        base_config(5, 8, kForward, GecParams::lossless(), true), seed);
    session.run_initial_phase();
    long slot = 8;
    long frame = 0;
    int compared = 0;
    while (!session.believed_complete() && frame < 100) {
      session.set_current_frame(++frame);
      RunnerConfig config;
      config.solver = SolverKind::DdcGraph;
      SplitMix64 scratch(seed * 1000 + frame);
      const SelectionResult perfect =
          select_perfect_pipeline(session, config, scratch);
      for (BlindPolicy policy : {BlindPolicy::Pessimist, BlindPolicy::Optimist,
                                 BlindPolicy::Realistic}) {
        config.policy = policy;
        SplitMix64 rng(seed * 1000 + frame);
        const SelectionResult limited =
            select_limited_pipeline(session, config, rng);
        CHECK(same_selection(perfect, limited));
        ++compared;
      }
      if (perfect.kappa.empty()) break;
      session.transmit(perfect.kappa, perfect.targeted, ++slot);
      ++slot;
      std::vector<char> targeted(5, 0);
      for (const Target& t : perfect.targeted) targeted[t.user] = 1;
      for (int i = 0; i < 5; ++i)
        if (session.sample_backward(i) && targeted[i])
          session.hear_feedback(i, frame, slot);
    }
    CHECK(compared > 0);
  }
}

TEST_CASE("perfect run completes and honours the identity") {
  for (SolverKind solver : {SolverKind::DdcGraph, SolverKind::DdcBpso,
                            SolverKind::Ssp, SolverKind::Sdd}) {
    Session session(
        base_config(4, 10, kForward, GecParams::lossless(), false), 17);
    RunnerConfig config;
    config.solver = solver;
    config.log_events = true;
    SplitMix64 rng(99);
    const RunResult result = run_session(session, config, rng);
    CHECK(result.completed);
    CHECK(result.completion_transmissions > 0);
    CHECK_FALSE(result.events.empty());
    for (int i = 0; i < 4; ++i) {
      const UserLedger& led = session.ledger(i);
      if (led.initial_wants == 0) continue;
      CHECK(led.completion_txn ==
            led.initial_wants + led.decoding_delay + led.erasures);
    }
  }
}

TEST_CASE("limited runs terminate for every solver") {
  for (SolverKind solver : {SolverKind::DdcGraph, SolverKind::DdcBpso,
                            SolverKind::BlindNve, SolverKind::BlindFve,
                            SolverKind::BlindSve}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      Session session(
          base_config(4, 8, kForward, kLossyBackward, true, 2, 2), seed);
      RunnerConfig config;
      config.solver = solver;
      SplitMix64 rng(seed);
      const RunResult result = run_session(session, config, rng);
      INFO(solver_name(solver), " seed ", seed);
      CHECK(result.completed);
      CHECK(session.truly_complete());
      CHECK(session.believed_complete());
    }
  }
}
