#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idnc/gec_channel.hpp"
#include "idnc/rng.hpp"

namespace idnc {

/// Sender-side classification of one (user, packet) entry. Uncertain entries
/// are a subset of Wants: the sender cannot tell whether the packet or its
/// feedback was erased.
enum class Entry : std::uint8_t { Has, Wants, Uncertain };

/// Frame layout for the limited-feedback protocol: T_d downlink slots followed
/// by T_u uplink slots; user i may send feedback at uplink slot user_uplink_slot[i].
struct FrameConfig {
  int downlink_slots = 1;
  int uplink_slots = 1;
  std::vector<int> user_uplink_slot;  // 1-based, in 1..uplink_slots

  int slots_per_frame() const { return downlink_slots + uplink_slots; }

  /// Global slot index of user's feedback opportunity in frame n (n >= 1):
  /// n * T_f - T_u + T_ui.
  long feedback_slot(long frame, int user) const;

  /// Round-robin uplink slot assignment.
  static FrameConfig make(int downlink, int uplink, int num_users);
};

struct SessionConfig {
  int num_users = 1;
  int num_packets = 1;
  std::vector<GecParams> forward;   // one per user
  std::vector<GecParams> backward;  // one per user; lossless in perfect mode
  bool limited_feedback = false;
  FrameConfig frame;  // meaningful only when limited_feedback
};

enum class Outcome : std::uint8_t {
  NotApplicable,  // user already complete at slot start
  Erased,
  ReceivedDecodable,
  ReceivedNonUseful
};

/// One user, one intended packet.
struct Target {
  int user = 0;
  int packet = 0;
};

struct Transmission {
  long slot = 0;                 // global slot index
  long txn = 0;                  // recovery transmission index (1-based)
  std::vector<int> kappa;        // packet ids in the XOR combination
  std::vector<Target> targeted;  // tau with intended packets
  std::vector<Outcome> outcome;  // per user
};

struct Attempt {
  long frame = 0;  // 0 = initial phase
  int packet = 0;
  long txn = 0;   // forward transmission index
  long slot = 0;  // global slot
};

struct UserLedger {
  int initial_wants = 0;           // |W_i(0)|, ground truth
  int believed_initial_wants = 0;  // sender's view after the initial phase
  long decoding_delay = 0;         // D_i, ground truth
  long believed_delay = 0;         // sender's D_i (from heard reports)
  long erasures = 0;               // E_i: erased slots before completion
  double alpha = 0.0;
  long completion_txn = -1;  // recovery transmission of individual completion

  // Forward-channel belief anchor: last attempt whose realization the sender
  // learned, on the transmission clock.
  bool has_anchor = false;
  long anchor_txn = 0;
  bool anchor_erased = false;

  // Backward-channel belief anchor: last heard feedback, on the backward
  // step clock.
  bool has_bwd_anchor = false;
  long bwd_anchor_step = 0;

  long last_heard_frame = -1;  // n_i^(0)
  long prev_heard_frame = -1;  // n_i^(-1)
  long last_feedback_slot = -1;  // t_i^*, global slot

  std::vector<Attempt> attempts;  // since the last heard feedback
};

/// One broadcast session: ground truth reception state per user, the sender's
/// feedback matrix, channel states, and all per-user accounting. The class is
/// single-threaded; independent sessions may run concurrently.
class Session {
 public:
  Session(SessionConfig config, std::uint64_t seed);

  const SessionConfig& config() const { return config_; }
  int num_users() const { return config_.num_users; }
  int num_packets() const { return config_.num_packets; }

  /// Transmits the N packets uncoded, one per slot, populating Has/Wants from
  /// the realized erasures. In limited mode each user's per-packet feedback
  /// bit passes through its backward channel; entries whose bit was lost
  /// become Uncertain.
  void run_initial_phase();

  /// One coded recovery transmission. Samples every user's forward channel,
  /// applies the decoding-delay rules to ground truth and, in perfect mode,
  /// syncs the sender's belief; in limited mode marks attempted packets
  /// Uncertain and records the attempt history.
  Transmission transmit(const std::vector<int>& kappa,
                        const std::vector<Target>& targeted, long global_slot);

  /// Advances user's backward channel one step; true if the feedback got
  /// through.
  bool sample_backward(int user);

  /// Processes a heard feedback from `user` at the end of `frame`: the belief
  /// row becomes ground truth, the reported delay overwrites the believed
  /// delay, and the channel-belief anchors move to the once-attempted packet
  /// of the closed window.
  void hear_feedback(int user, long frame, long global_slot);

  bool truly_complete() const;
  bool believed_complete() const;  // no believed Wants and no Uncertain left

  // --- sender belief accessors -------------------------------------------
  Entry entry(int user, int packet) const { return belief_[user][packet]; }
  long uncertain_since_frame(int user, int packet) const {
    return uncertain_frame_[user][packet];
  }
  bool believed_has(int user, int packet) const {
    return belief_[user][packet] == Entry::Has;
  }
  bool believed_wants(int user, int packet) const {
    return belief_[user][packet] != Entry::Has;
  }
  int believed_wants_count(int user) const;
  int uncertain_count(int user) const;
  std::vector<int> believed_wants_list(int user) const;

  bool truth_has(int user, int packet) const {
    return truth_has_[user][packet] != 0;
  }
  int truth_wants_count(int user) const { return truth_wants_count_[user]; }

  const UserLedger& ledger(int user) const { return ledger_[user]; }
  long current_frame() const { return current_frame_; }
  void set_current_frame(long frame) { current_frame_ = frame; }
  long transmission_count() const { return txn_count_; }
  long recovery_transmission_count() const { return recovery_txn_; }
  long backward_step(int user) const { return bwd_steps_[user]; }

  // --- completion-time expressions (sender belief) ------------------------
  /// (|W_i(0)| + D_i - alpha_i) / (1 - alpha_i); 0 for users whose initial
  /// Wants set was empty.
  double anticipated_completion(int user) const;
  double overall_completion() const;
  /// Current argmax user of anticipated_completion; ties to the lowest index.
  int argmax_user() const;
  /// The highly critical set P(t): users with nonempty believed Wants whose
  /// one-unit delay increment would exceed the current maximum.
  std::vector<int> critical_set() const;

  // --- channel beliefs ----------------------------------------------------
  /// e_i for the next transmission (elapsed measured on the transmission
  /// clock from the anchor; stationary fallback when no anchor exists).
  double erasure_belief(int user) const;
  /// e_i at an arbitrary historical or future transmission index.
  double erasure_belief_at_txn(int user, long txn) const;
  /// f_i at the uplink of `frame`, anchored at the last heard feedback.
  double feedback_loss_belief_at_frame(int user, long frame) const;
  /// True when the stationary fallback is in force for user (no anchor).
  bool anchor_missing(int user) const { return !ledger_[user].has_anchor; }

  /// Line-oriented snapshot of the belief matrix (one row per user:
  /// 0 = Has, 1 = Wants, x = Uncertain, then the believed delay).
  std::string snapshot() const;

 private:
  void classify_reception(int user, const std::vector<int>& kappa,
                          Transmission& tx);

  SessionConfig config_;
  std::vector<ChannelState> fwd_state_;
  std::vector<ChannelState> bwd_state_;
  std::vector<SplitMix64> fwd_rng_;
  std::vector<SplitMix64> bwd_rng_;

  std::vector<std::vector<char>> truth_has_;
  std::vector<int> truth_wants_count_;
  std::vector<std::vector<Entry>> belief_;
  std::vector<std::vector<long>> uncertain_frame_;  // frame of marking, or -1
  std::vector<UserLedger> ledger_;

  long txn_count_ = 0;       // forward transmissions incl. the initial phase
  long recovery_txn_ = 0;    // recovery transmissions only
  long current_frame_ = 0;   // 0 = initial phase
  std::vector<long> bwd_steps_;
};

}  // namespace idnc
