#include "idnc/session.hpp"

#include <algorithm>
#include <sstream>

namespace idnc {

long FrameConfig::feedback_slot(long frame, int user) const {
  return frame * slots_per_frame() - uplink_slots + user_uplink_slot[user];
}

FrameConfig FrameConfig::make(int downlink, int uplink, int num_users) {
  if (downlink < 1 || uplink < 1)
    throw ConfigError("FrameConfig: T_d and T_u must be >= 1");
  FrameConfig cfg;
  cfg.downlink_slots = downlink;
  cfg.uplink_slots = uplink;
  cfg.user_uplink_slot.resize(num_users);
  for (int i = 0; i < num_users; ++i)
    cfg.user_uplink_slot[i] = i % uplink + 1;
  return cfg;
}

Session::Session(SessionConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  const int m = config_.num_users;
  const int n = config_.num_packets;
  if (m < 1 || n < 1) throw ConfigError("Session: M >= 1 and N >= 1 required");
  if (static_cast<int>(config_.forward.size()) != m ||
      static_cast<int>(config_.backward.size()) != m)
    throw ConfigError("Session: one forward and one backward channel per user");

  fwd_state_.resize(m);
  bwd_state_.resize(m);
  truth_has_.assign(m, std::vector<char>(n, 0));
  truth_wants_count_.assign(m, n);
  belief_.assign(m, std::vector<Entry>(n, Entry::Wants));
  uncertain_frame_.assign(m, std::vector<long>(n, -1));
  ledger_.resize(m);
  bwd_steps_.assign(m, 0);

  for (int i = 0; i < m; ++i) {
    config_.forward[i].validate();
    config_.backward[i].validate();
    fwd_rng_.emplace_back(derive_seed(seed, i, 1));
    bwd_rng_.emplace_back(derive_seed(seed, i, 2));
    // Initial states drawn from the stationary distribution.
    fwd_state_[i] = sample_stationary(config_.forward[i], fwd_rng_[i]);
    bwd_state_[i] = config_.limited_feedback
                        ? sample_stationary(config_.backward[i], bwd_rng_[i])
                        : ChannelState::Good;
    ledger_[i].alpha = average_erasure(config_.forward[i]);
  }
  if (config_.limited_feedback &&
      static_cast<int>(config_.frame.user_uplink_slot.size()) != m)
    throw ConfigError("Session: frame config lacks per-user uplink slots");
}

void Session::run_initial_phase() {
  const int m = config_.num_users;
  const int n = config_.num_packets;
  std::vector<bool> last_erased(m, false);
  for (int j = 0; j < n; ++j) {
    ++txn_count_;
    for (int i = 0; i < m; ++i) {
      SlotOutcome out = sample_slot(config_.forward[i], fwd_state_[i],
                                    fwd_rng_[i]);
      fwd_state_[i] = out.new_state;
      last_erased[i] = out.erased;
      if (!out.erased) {
        truth_has_[i][j] = 1;
        --truth_wants_count_[i];
      }
      if (config_.limited_feedback) {
        // Per-packet feedback bit through the backward channel; a lost bit
        // leaves the entry Uncertain.
        const bool heard = sample_backward(i);
        if (heard) {
          belief_[i][j] = out.erased ? Entry::Wants : Entry::Has;
          ledger_[i].has_anchor = true;
          ledger_[i].anchor_txn = txn_count_;
          ledger_[i].anchor_erased = out.erased;
          ledger_[i].has_bwd_anchor = true;
          ledger_[i].bwd_anchor_step = bwd_steps_[i];
          ledger_[i].last_heard_frame = 0;
          ledger_[i].last_feedback_slot = j + 1;
        } else {
          belief_[i][j] = Entry::Uncertain;
          uncertain_frame_[i][j] = 0;
        }
      } else {
        belief_[i][j] = out.erased ? Entry::Wants : Entry::Has;
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    ledger_[i].initial_wants = truth_wants_count_[i];
    ledger_[i].believed_initial_wants = believed_wants_count(i);
    if (!config_.limited_feedback) {
      ledger_[i].has_anchor = true;
      ledger_[i].anchor_txn = txn_count_;
      ledger_[i].anchor_erased = last_erased[i];
    }
  }
}

void Session::classify_reception(int user, const std::vector<int>& kappa,
                                 Transmission& tx) {
  int unknown = 0;
  int missing = -1;
  for (int j : kappa) {
    if (!truth_has_[user][j]) {
      ++unknown;
      missing = j;
    }
  }
  if (unknown == 1) {
    truth_has_[user][missing] = 1;
    --truth_wants_count_[user];
    tx.outcome[user] = Outcome::ReceivedDecodable;
    if (!config_.limited_feedback) belief_[user][missing] = Entry::Has;
    if (truth_wants_count_[user] == 0)
      ledger_[user].completion_txn = recovery_txn_;
  } else {
    // Non-innovative or non-instantly-decodable: one decoding-delay unit.
    ++ledger_[user].decoding_delay;
    tx.outcome[user] = Outcome::ReceivedNonUseful;
  }
}

Transmission Session::transmit(const std::vector<int>& kappa,
                               const std::vector<Target>& targeted,
                               long global_slot) {
  ++txn_count_;
  ++recovery_txn_;
  Transmission tx;
  tx.slot = global_slot;
  tx.txn = recovery_txn_;
  tx.kappa = kappa;
  tx.targeted = targeted;
  tx.outcome.assign(config_.num_users, Outcome::NotApplicable);

  for (int i = 0; i < config_.num_users; ++i) {
    SlotOutcome out = sample_slot(config_.forward[i], fwd_state_[i],
                                  fwd_rng_[i]);
    fwd_state_[i] = out.new_state;
    if (truth_wants_count_[i] == 0) continue;
    if (out.erased) {
      tx.outcome[i] = Outcome::Erased;
      ++ledger_[i].erasures;
    } else {
      classify_reception(i, kappa, tx);
    }
  }

  for (const Target& t : targeted) {
    if (config_.limited_feedback) {
      if (belief_[t.user][t.packet] != Entry::Has) {
        belief_[t.user][t.packet] = Entry::Uncertain;
        uncertain_frame_[t.user][t.packet] = current_frame_;
      }
      ledger_[t.user].attempts.push_back(
          Attempt{current_frame_, t.packet, txn_count_, global_slot});
    } else {
      // Perfect feedback: the targeted attempt's realization is observed.
      ledger_[t.user].has_anchor = true;
      ledger_[t.user].anchor_txn = txn_count_;
      ledger_[t.user].anchor_erased = tx.outcome[t.user] == Outcome::Erased;
    }
  }
  if (!config_.limited_feedback) {
    for (int i = 0; i < config_.num_users; ++i)
      ledger_[i].believed_delay = ledger_[i].decoding_delay;
  }
  return tx;
}

bool Session::sample_backward(int user) {
  ++bwd_steps_[user];
  SlotOutcome out = sample_slot(config_.backward[user], bwd_state_[user],
                                bwd_rng_[user]);
  bwd_state_[user] = out.new_state;
  return !out.erased;
}

void Session::hear_feedback(int user, long frame, long global_slot) {
  UserLedger& led = ledger_[user];
  for (int j = 0; j < config_.num_packets; ++j) {
    belief_[user][j] = truth_has_[user][j] ? Entry::Has : Entry::Wants;
    uncertain_frame_[user][j] = -1;
  }
  led.believed_delay = led.decoding_delay;  // report trusted verbatim

  // The once-attempted packet of the closed window anchors the forward-channel
  // belief: its single attempt's realization is revealed by the heard map.
  long best_txn = -1;
  int best_packet = -1;
  for (const Attempt& a : led.attempts) {
    int count = 0;
    for (const Attempt& b : led.attempts)
      if (b.packet == a.packet) ++count;
    if (count == 1 && a.txn > best_txn) {
      best_txn = a.txn;
      best_packet = a.packet;
    }
  }
  if (best_packet >= 0) {
    led.has_anchor = true;
    led.anchor_txn = best_txn;
    led.anchor_erased = !truth_has_[user][best_packet];
  }
  led.prev_heard_frame = led.last_heard_frame;
  led.last_heard_frame = frame;
  led.has_bwd_anchor = true;
  led.bwd_anchor_step = bwd_steps_[user];
  led.last_feedback_slot = global_slot;
  led.attempts.clear();
}

bool Session::truly_complete() const {
  for (int c : truth_wants_count_)
    if (c != 0) return false;
  return true;
}

bool Session::believed_complete() const {
  for (int i = 0; i < config_.num_users; ++i)
    if (believed_wants_count(i) != 0) return false;
  return true;
}

int Session::believed_wants_count(int user) const {
  int count = 0;
  for (Entry e : belief_[user])
    if (e != Entry::Has) ++count;
  return count;
}

int Session::uncertain_count(int user) const {
  int count = 0;
  for (Entry e : belief_[user])
    if (e == Entry::Uncertain) ++count;
  return count;
}

std::vector<int> Session::believed_wants_list(int user) const {
  std::vector<int> out;
  for (int j = 0; j < config_.num_packets; ++j)
    if (belief_[user][j] != Entry::Has) out.push_back(j);
  return out;
}

double Session::anticipated_completion(int user) const {
  const UserLedger& led = ledger_[user];
  if (led.believed_initial_wants == 0) return 0.0;
  if (led.alpha >= 1.0)
    throw SaturatedChannel("anticipated_completion: alpha >= 1");
  return (led.believed_initial_wants + led.believed_delay - led.alpha) /
         (1.0 - led.alpha);
}

double Session::overall_completion() const {
  double best = 0.0;
  for (int i = 0; i < config_.num_users; ++i)
    best = std::max(best, anticipated_completion(i));
  return best;
}

int Session::argmax_user() const {
  int best = 0;
  double best_value = anticipated_completion(0);
  for (int i = 1; i < config_.num_users; ++i) {
    const double value = anticipated_completion(i);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

std::vector<int> Session::critical_set() const {
  const double current_max = anticipated_completion(argmax_user());
  std::vector<int> result;
  for (int i = 0; i < config_.num_users; ++i) {
    if (believed_wants_count(i) == 0) continue;
    const UserLedger& led = ledger_[i];
    const double bumped =
        (led.believed_initial_wants + led.believed_delay + 1 - led.alpha) /
        (1.0 - led.alpha);
    if (bumped > current_max) result.push_back(i);
  }
  return result;
}

double Session::erasure_belief(int user) const {
  return erasure_belief_at_txn(user, txn_count_ + 1);
}

double Session::erasure_belief_at_txn(int user, long txn) const {
  const UserLedger& led = ledger_[user];
  if (!led.has_anchor || txn <= led.anchor_txn)
    return clamp_prob(led.alpha);  // stationary fallback
  const long elapsed = txn - led.anchor_txn;
  return clamp_prob(conditional_erasure_belief(
      config_.forward[user],
      led.anchor_erased ? Observation::Erased : Observation::Received,
      elapsed));
}

double Session::feedback_loss_belief_at_frame(int user, long frame) const {
  const UserLedger& led = ledger_[user];
  // The backward channel steps once per initial-phase slot and once per frame.
  const long step = config_.num_packets + frame;
  if (!led.has_bwd_anchor || step <= led.bwd_anchor_step)
    return clamp_prob(average_erasure(config_.backward[user]));
  return clamp_prob(feedback_loss_belief(config_.backward[user],
                                         step - led.bwd_anchor_step));
}

std::string Session::snapshot() const {
  std::ostringstream os;
  for (int i = 0; i < config_.num_users; ++i) {
    for (int j = 0; j < config_.num_packets; ++j) {
      switch (belief_[i][j]) {
        case Entry::Has: os << '0'; break;
        case Entry::Wants: os << '1'; break;
        case Entry::Uncertain: os << 'x'; break;
      }
    }
    os << " D=" << ledger_[i].believed_delay << '\n';
  }
  return os.str();
}

}  // namespace idnc
