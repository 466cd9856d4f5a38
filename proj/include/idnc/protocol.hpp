#pragma once

#include <string>
#include <vector>

#include "idnc/session.hpp"
#include "idnc/solvers.hpp"

namespace idnc {

enum class BlindPolicy { Pessimist, Optimist, Realistic };

enum class SolverKind {
  DdcGraph,
  DdcBpso,
  Ssp,
  Sdd,
  BlindNve,
  BlindFve,
  BlindSve
};

SolverKind solver_from_name(const std::string& name);
const char* solver_name(SolverKind kind);

/// Per-user channel beliefs at the next transmission: e_i, the innovative
/// probability of every packet, and the finish probability.
struct BeliefTable {
  std::vector<double> erasure;
  std::vector<std::vector<double>> innovative;
  std::vector<double> finish;
};

BeliefTable build_belief_table(const Session& session);

/// Effective Wants bitmap under a blind policy. Certain Wants always stay.
/// Uncertain entries marked during the current frame had no feedback
/// opportunity yet (downlink rule); older ones passed an unheard uplink
/// (uplink rule). Pessimist drops the former and keeps the latter; Optimist
/// drops both unless the user's whole believed Wants set is uncertain;
/// Realistic keeps each with the stationary Bad probability of the forward
/// (downlink rule) or backward (uplink rule) channel, resampled per call.
std::vector<std::vector<char>> blind_effective_wants(const Session& session,
                                                     BlindPolicy policy,
                                                     SplitMix64& rng);

/// Channel-estimation constraint: attempting kappa_i must leave user i with at
/// least one packet attempted exactly once since its last heard feedback;
/// users down to a single believed wanted packet are exempt.
bool enforce_once_attempted(const Session& session, int user, int packet);

struct RunnerConfig {
  SolverKind solver = SolverKind::DdcGraph;
  BlindPolicy policy = BlindPolicy::Pessimist;  // limited-mode graph view
  BpsoParams bpso;
  long guard_factor = 50;  // abort after guard_factor * N transmissions
  bool log_events = false;
};

/// One decision epoch: picks the next packet combination from the sender's
/// current belief. Works for both feedback modes; in limited mode the blind
/// view, LG-IDNC construction, limited weights, and the once-attempted filter
/// are applied.
SelectionResult select_combination(const Session& session,
                                   const RunnerConfig& config, SplitMix64& rng);

/// The two pipelines behind select_combination, callable on any session so
/// they can be compared on identical belief state.
SelectionResult select_perfect_pipeline(const Session& session,
                                        const RunnerConfig& config,
                                        SplitMix64& rng);
SelectionResult select_limited_pipeline(const Session& session,
                                        const RunnerConfig& config,
                                        SplitMix64& rng);

struct SlotEvent {
  long slot = 0;
  long frame = 0;           // 0 during the initial phase
  std::string phase;        // "init", "down", "up"
  std::string kappa;        // packet-bitmap string
  std::string targeted;     // "user:packet" pairs joined by ';'
  std::string outcomes;     // per-user: '-' n/a, 'e' erased, 'd' decode, 'n' non-useful
  int delay_increments = 0;
};

struct RunResult {
  bool completed = false;
  long completion_transmissions = 0;  // recovery transmissions at completion
  long total_slots = 0;
  std::vector<long> user_delay;
  std::vector<long> user_completion_txn;
  std::vector<SlotEvent> events;
};

/// Runs the initial phase and the whole recovery phase of one session.
/// Perfect mode transmits every slot; limited mode runs the frame loop
/// (T_d downlink decisions, then one uplink pass where every user targeted
/// during the frame reports through its backward channel).
RunResult run_session(Session& session, const RunnerConfig& config,
                      SplitMix64& rng);

}  // namespace idnc
