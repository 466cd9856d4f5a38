#include "idnc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "idnc/beliefs.hpp"
#include "idnc/errors.hpp"
#include "idnc/graph.hpp"

namespace idnc {

SolverKind solver_from_name(const std::string& name) {
  if (name == "DDC_Graph") return SolverKind::DdcGraph;
  if (name == "DDC_BPSO") return SolverKind::DdcBpso;
  if (name == "SSP") return SolverKind::Ssp;
  if (name == "SDD") return SolverKind::Sdd;
  if (name == "Blind_NVE") return SolverKind::BlindNve;
  if (name == "Blind_FVE") return SolverKind::BlindFve;
  if (name == "Blind_SVE") return SolverKind::BlindSve;
  throw ConfigError("unknown solver: " + name);
}

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::DdcGraph: return "DDC_Graph";
    case SolverKind::DdcBpso: return "DDC_BPSO";
    case SolverKind::Ssp: return "SSP";
    case SolverKind::Sdd: return "SDD";
    case SolverKind::BlindNve: return "Blind_NVE";
    case SolverKind::BlindFve: return "Blind_FVE";
    case SolverKind::BlindSve: return "Blind_SVE";
  }
  return "?";
}

namespace {

/// Innovative probability of an Uncertain packet from its attempt history.
double uncertain_innovative(const Session& session, int user, int packet) {
  double base = 1.0;
  if (session.uncertain_since_frame(user, packet) == 0) {
    // Initial-phase feedback bit lost: condition on the initial attempt only.
    base = session.erasure_belief_at_txn(user, packet + 1);
  }
  const UserLedger& led = session.ledger(user);
  std::map<long, FrameAttemptView> by_frame;
  std::vector<long> current_packet_txns;
  for (const Attempt& a : led.attempts) {
    if (a.frame == session.current_frame()) {
      if (a.packet == packet) current_packet_txns.push_back(a.txn);
      continue;
    }
    FrameAttemptView& view = by_frame[a.frame];
    view.frame = a.frame;
    view.all_attempt_txns.push_back(a.txn);
    if (a.packet == packet) view.packet_attempt_txns.push_back(a.txn);
  }
  std::vector<FrameAttemptView> views;
  for (auto& [frame, view] : by_frame) views.push_back(std::move(view));
  return base * innovative_prob(
                    views, current_packet_txns,
                    [&](long txn) {
                      return session.erasure_belief_at_txn(user, txn);
                    },
                    [&](long frame) {
                      return session.feedback_loss_belief_at_frame(user, frame);
                    });
}

}  // namespace

BeliefTable build_belief_table(const Session& session) {
  const int m = session.num_users();
  const int n = session.num_packets();
  BeliefTable table;
  table.erasure.resize(m);
  table.innovative.assign(m, std::vector<double>(n, 0.0));
  table.finish.resize(m);
  for (int i = 0; i < m; ++i) {
    table.erasure[i] = session.erasure_belief(i);
    double finish = 1.0;
    for (int j = 0; j < n; ++j) {
      switch (session.entry(i, j)) {
        case Entry::Has: table.innovative[i][j] = 0.0; break;
        case Entry::Wants: table.innovative[i][j] = 1.0; break;
        case Entry::Uncertain:
          table.innovative[i][j] = uncertain_innovative(session, i, j);
          break;
      }
      if (session.believed_wants(i, j)) finish *= 1.0 - table.innovative[i][j];
    }
    table.finish[i] = session.believed_wants_count(i) == 0 ? 0.0 : finish;
  }
  return table;
}

std::vector<std::vector<char>> blind_effective_wants(const Session& session,
                                                     BlindPolicy policy,
                                                     SplitMix64& rng) {
  const int m = session.num_users();
  const int n = session.num_packets();
  std::vector<std::vector<char>> wants(m, std::vector<char>(n, 0));
  for (int i = 0; i < m; ++i) {
    const bool full_uncertain =
        session.believed_wants_count(i) > 0 &&
        session.uncertain_count(i) == session.believed_wants_count(i);
    for (int j = 0; j < n; ++j) {
      switch (session.entry(i, j)) {
        case Entry::Has:
          break;
        case Entry::Wants:
          wants[i][j] = 1;
          break;
        case Entry::Uncertain: {
          const bool in_frame =
              session.uncertain_since_frame(i, j) == session.current_frame();
          switch (policy) {
            case BlindPolicy::Pessimist:
              wants[i][j] = in_frame ? 0 : 1;
              break;
            case BlindPolicy::Optimist:
              wants[i][j] = (!in_frame && full_uncertain) ? 1 : 0;
              break;
            case BlindPolicy::Realistic: {
              const auto& channel = in_frame ? session.config().forward[i]
                                             : session.config().backward[i];
              wants[i][j] = rng.bernoulli(steady_state(channel).second) ? 1 : 0;
              break;
            }
          }
          break;
        }
      }
    }
  }
  return wants;
}

bool enforce_once_attempted(const Session& session, int user, int packet) {
  if (session.believed_wants_count(user) == 1) return true;
  int same = 0;
  std::map<int, int> counts;
  for (const Attempt& a : session.ledger(user).attempts) {
    ++counts[a.packet];
    if (a.packet == packet) ++same;
  }
  if (same == 0) return true;  // the new attempt itself becomes once-attempted
  for (const auto& [p, count] : counts)
    if (p != packet && count == 1) return true;
  return false;
}

namespace {

struct LayerInfo {
  std::vector<double> completion;
  std::vector<double> alpha;
  std::vector<int> user_layer;  // 0 for users outside the view
  int num_layers = 0;
  double current_max = 0.0;
};

LayerInfo compute_layers(const Session& session,
                         const std::vector<std::vector<char>>& wants) {
  const int m = session.num_users();
  LayerInfo info;
  info.completion.resize(m);
  info.alpha.resize(m);
  info.user_layer.assign(m, 0);
  for (int i = 0; i < m; ++i) {
    info.completion[i] = session.anticipated_completion(i);
    info.alpha[i] = session.ledger(i).alpha;
    info.current_max = std::max(info.current_max, info.completion[i]);
  }
  for (int i = 0; i < m; ++i) {
    bool any = false;
    for (char w : wants[i])
      if (w) {
        any = true;
        break;
      }
    if (!any) continue;
    const double slack =
        (info.current_max - info.completion[i]) * (1.0 - info.alpha[i]);
    info.user_layer[i] = std::max(1, static_cast<int>(std::ceil(slack)));
    info.num_layers = std::max(info.num_layers, info.user_layer[i]);
  }
  return info;
}

GraphInput graph_input_from_wants(const std::vector<std::vector<char>>& wants) {
  GraphInput input;
  const int m = static_cast<int>(wants.size());
  input.wants.resize(m);
  input.has.resize(m);
  for (int i = 0; i < m; ++i) {
    const int n = static_cast<int>(wants[i].size());
    input.has[i].assign(n, 0);
    for (int j = 0; j < n; ++j) {
      if (wants[i][j])
        input.wants[i].push_back(j);
      else
        input.has[i][j] = 1;  // blind views treat removed packets as held
    }
  }
  return input;
}

std::vector<std::vector<char>> believed_wants_bitmap(const Session& session) {
  std::vector<std::vector<char>> wants(
      session.num_users(), std::vector<char>(session.num_packets(), 0));
  for (int i = 0; i < session.num_users(); ++i)
    for (int j = 0; j < session.num_packets(); ++j)
      if (session.believed_wants(i, j)) wants[i][j] = 1;
  return wants;
}

void drop_inadmissible(const Session& session,
                       std::vector<std::vector<char>>& wants) {
  for (int i = 0; i < session.num_users(); ++i)
    for (int j = 0; j < session.num_packets(); ++j)
      if (wants[i][j] && !enforce_once_attempted(session, i, j))
        wants[i][j] = 0;
}

BlindPolicy view_policy(const RunnerConfig& config) {
  switch (config.solver) {
    case SolverKind::BlindNve: return BlindPolicy::Pessimist;
    case SolverKind::BlindFve: return BlindPolicy::Optimist;
    case SolverKind::BlindSve: return BlindPolicy::Realistic;
    default: return config.policy;
  }
}

std::vector<char> critical_bitmap(const Session& session) {
  std::vector<char> critical(static_cast<std::size_t>(session.num_users()), 0);
  for (int i : session.critical_set()) critical[i] = 1;
  return critical;
}

SelectionResult select_baseline(const Session& session, const CodingGraph& graph,
                                BaselinePolicy policy) {
  std::vector<int> wants_count(static_cast<std::size_t>(session.num_users()));
  std::vector<double> erasure(static_cast<std::size_t>(session.num_users()));
  for (int i = 0; i < session.num_users(); ++i) {
    wants_count[i] = session.believed_wants_count(i);
    erasure[i] = session.erasure_belief(i);
  }
  return baseline_select(graph, policy, wants_count, erasure);
}

SelectionResult select_perfect(const Session& session,
                               const RunnerConfig& config, SplitMix64& rng) {
  const std::vector<std::vector<char>> wants = believed_wants_bitmap(session);
  const LayerInfo layers = compute_layers(session, wants);

  if (config.solver == SolverKind::DdcBpso) {
    ObjectiveContext context;
    context.num_users = session.num_users();
    context.num_packets = session.num_packets();
    context.num_layers = std::max(1, layers.num_layers);
    context.wants = wants;
    context.user_layer = layers.user_layer;
    context.critical = critical_bitmap(session);
    context.limited = false;
    context.erasure.resize(session.num_users());
    for (int i = 0; i < session.num_users(); ++i)
      context.erasure[i] = session.erasure_belief(i);
    return bpso_select(context, config.bpso, rng);
  }

  CodingGraph graph = build_gidnc(graph_input_from_wants(wants));
  if (config.solver == SolverKind::DdcGraph) {
    for (int v = 0; v < graph.size(); ++v) {
      const int user = graph.vertex(v).user;
      graph.weight[v] = vertex_weight_perfect(session.erasure_belief(user));
    }
    partition_layers(graph, layers.completion, layers.alpha, layers.current_max);
    return multi_layer_select(graph);
  }
  // SSP/SDD stand-ins and the blind solvers (no uncertainty in perfect mode).
  const BaselinePolicy policy = config.solver == SolverKind::Sdd
                                    ? BaselinePolicy::Sdd
                                    : BaselinePolicy::SspMinCt;
  return select_baseline(session, graph, policy);
}

SelectionResult select_limited(const Session& session,
                               const RunnerConfig& config, SplitMix64& rng) {
  std::vector<std::vector<char>> wants =
      blind_effective_wants(session, view_policy(config), rng);
  drop_inadmissible(session, wants);
  const LayerInfo layers = compute_layers(session, wants);
  const BeliefTable beliefs = build_belief_table(session);

  if (config.solver == SolverKind::DdcBpso) {
    ObjectiveContext context;
    context.num_users = session.num_users();
    context.num_packets = session.num_packets();
    context.num_layers = std::max(1, layers.num_layers);
    context.wants = wants;
    context.user_layer = layers.user_layer;
    context.critical = critical_bitmap(session);
    context.limited = true;
    context.erasure = beliefs.erasure;
    context.innovative = [&beliefs](int user, int packet) {
      return beliefs.innovative[user][packet];
    };
    context.finish = beliefs.finish;
    return bpso_select(context, config.bpso, rng);
  }

  const GraphInput input = graph_input_from_wants(wants);
  if (config.solver == SolverKind::DdcGraph) {
    BeliefAccess access;
    access.erasure = [&beliefs](int user) { return beliefs.erasure[user]; };
    access.innovative = [&beliefs](int user, int packet) {
      return beliefs.innovative[user][packet];
    };
    access.finish = [&beliefs](int user) { return beliefs.finish[user]; };
    CodingGraph graph = build_lgidnc(input, access);
    for (int v = 0; v < graph.size(); ++v) {
      const Vertex& vx = graph.vertex(v);
      graph.weight[v] = vertex_weight_limited(
          beliefs.erasure[vx.user], beliefs.innovative[vx.user][vx.packet],
          beliefs.finish[vx.user]);
    }
    partition_layers(graph, layers.completion, layers.alpha, layers.current_max);
    return multi_layer_select(graph);
  }

  CodingGraph graph = build_gidnc(input);
  const BaselinePolicy policy = config.solver == SolverKind::Sdd
                                    ? BaselinePolicy::Sdd
                                    : BaselinePolicy::SspMinCt;
  return select_baseline(session, graph, policy);
}

/// Fallback when the policy-adjusted graph is empty but the sender still
/// believes some user is unsatisfied: poll one believed-wanted packet.
SelectionResult poll_selection(const Session& session) {
  for (int i = 0; i < session.num_users(); ++i) {
    const std::vector<int> wants = session.believed_wants_list(i);
    if (wants.empty()) continue;
    for (int j : wants) {
      if (!enforce_once_attempted(session, i, j)) continue;
      SelectionResult sel;
      sel.kappa = {j};
      sel.targeted = {Target{i, j}};
      return sel;
    }
    SelectionResult sel;
    sel.kappa = {wants.front()};
    sel.targeted = {Target{i, wants.front()}};
    return sel;
  }
  return {};
}

std::string kappa_bitmap(const std::vector<int>& kappa, int num_packets) {
  std::string bits(static_cast<std::size_t>(num_packets), '0');
  for (int j : kappa) bits[j] = '1';
  return bits;
}

SlotEvent make_event(const Transmission& tx, long frame, const char* phase,
                     int num_packets) {
  SlotEvent event;
  event.slot = tx.slot;
  event.frame = frame;
  event.phase = phase;
  event.kappa = kappa_bitmap(tx.kappa, num_packets);
  for (const Target& t : tx.targeted) {
    if (!event.targeted.empty()) event.targeted += ';';
    event.targeted += std::to_string(t.user) + ':' + std::to_string(t.packet);
  }
  for (Outcome o : tx.outcome) {
    switch (o) {
      case Outcome::NotApplicable: event.outcomes += '-'; break;
      case Outcome::Erased: event.outcomes += 'e'; break;
      case Outcome::ReceivedDecodable: event.outcomes += 'd'; break;
      case Outcome::ReceivedNonUseful:
        event.outcomes += 'n';
        ++event.delay_increments;
        break;
    }
  }
  return event;
}

}  // namespace

SelectionResult select_combination(const Session& session,
                                   const RunnerConfig& config,
                                   SplitMix64& rng) {
  return session.config().limited_feedback
             ? select_limited(session, config, rng)
             : select_perfect(session, config, rng);
}

SelectionResult select_perfect_pipeline(const Session& session,
                                        const RunnerConfig& config,
                                        SplitMix64& rng) {
  return select_perfect(session, config, rng);
}

SelectionResult select_limited_pipeline(const Session& session,
                                        const RunnerConfig& config,
                                        SplitMix64& rng) {
  return select_limited(session, config, rng);
}

RunResult run_session(Session& session, const RunnerConfig& config,
                      SplitMix64& rng) {
  const int m = session.num_users();
  const int n = session.num_packets();
  session.run_initial_phase();

  RunResult result;
  long slot = n;
  bool truth_done = session.truly_complete();
  if (truth_done) result.completion_transmissions = 0;

  auto after_transmit = [&](const Transmission& tx, long frame,
                            const char* phase) {
    if (config.log_events)
      result.events.push_back(make_event(tx, frame, phase, n));
    if (!truth_done && session.truly_complete()) {
      truth_done = true;
      result.completion_transmissions = session.recovery_transmission_count();
    }
  };

  if (!session.config().limited_feedback) {
    const long guard = config.guard_factor * n;
    while (!session.truly_complete() &&
           session.recovery_transmission_count() < guard) {
      SelectionResult sel = select_combination(session, config, rng);
      if (sel.kappa.empty()) sel = poll_selection(session);
      if (sel.kappa.empty()) break;
      const Transmission tx = session.transmit(sel.kappa, sel.targeted, ++slot);
      after_transmit(tx, 0, "down");
    }
    result.completed = session.truly_complete();
  } else {
    const FrameConfig& frame_cfg = session.config().frame;
    const long guard =
        config.guard_factor * static_cast<long>(n) * frame_cfg.slots_per_frame();
    std::vector<char> targeted_in_frame(static_cast<std::size_t>(m), 0);
    long frame = 0;
    while (!session.believed_complete() && slot < n + guard) {
      ++frame;
      session.set_current_frame(frame);
      std::fill(targeted_in_frame.begin(), targeted_in_frame.end(), 0);
      for (int d = 0; d < frame_cfg.downlink_slots; ++d) {
        ++slot;
        SelectionResult sel = select_combination(session, config, rng);
        if (sel.kappa.empty()) sel = poll_selection(session);
        if (sel.kappa.empty()) continue;  // idle downlink slot
        const Transmission tx = session.transmit(sel.kappa, sel.targeted, slot);
        for (const Target& t : sel.targeted) targeted_in_frame[t.user] = 1;
        after_transmit(tx, frame, "down");
      }
      for (int u = 1; u <= frame_cfg.uplink_slots; ++u) {
        ++slot;
        for (int i = 0; i < m; ++i) {
          if (frame_cfg.user_uplink_slot[i] != u) continue;
          // The backward channel advances once per frame for every user;
          // only users targeted during the frame actually report.
          const bool heard = session.sample_backward(i);
          if (targeted_in_frame[i] && heard) session.hear_feedback(i, frame, slot);
        }
      }
    }
    result.completed = session.believed_complete() && session.truly_complete();
    if (!truth_done)
      result.completion_transmissions = session.recovery_transmission_count();
  }

  result.total_slots = slot;
  result.user_delay.resize(m);
  result.user_completion_txn.resize(m);
  for (int i = 0; i < m; ++i) {
    result.user_delay[i] = session.ledger(i).decoding_delay;
    result.user_completion_txn[i] = session.ledger(i).completion_txn;
  }
  if (!session.config().limited_feedback && !result.completed && !truth_done)
    result.completion_transmissions = session.recovery_transmission_count();
  return result;
}

}  // namespace idnc
