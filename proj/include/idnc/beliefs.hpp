#pragma once

#include <functional>
#include <vector>

#include "idnc/errors.hpp"

namespace idnc {

/// One past frame of attempt history for a single (user, packet) query.
/// packet_attempt_txns are the transmissions of the frame in which the queried
/// packet was attempted; all_attempt_txns covers every attempt of the frame.
struct FrameAttemptView {
  long frame = 0;
  std::vector<long> packet_attempt_txns;
  std::vector<long> all_attempt_txns;
};

/// Probability that a packet is still innovative for a user, given its attempt
/// history since the last heard feedback. Each current-frame attempt must have
/// been erased outright (no feedback is possible mid-frame); each past frame
/// contributes a factor conditioning on the fact that no feedback was heard
/// from it (either everything was erased or the feedback itself was lost).
/// Empty histories give 1 (the empty-product convention).
double innovative_prob(
    const std::vector<FrameAttemptView>& past_frames,
    const std::vector<long>& current_frame_packet_txns,
    const std::function<double(long txn)>& erasure_at_txn,
    const std::function<double(long frame)>& feedback_loss_at_frame);

/// p_f = prod over wanted packets of (1 - p_n).
double finish_prob(const std::vector<double>& innovative_probs_over_wants);

struct NoDelayInput {
  double erasure = 0.0;      // e_i
  double innovative = 1.0;   // p_n(kappa_i); used when targeted
  double finish = 0.0;       // p_f
  bool targeted = false;
  bool all_wants_uncertain = false;  // F membership
  bool intended_uncertain = false;   // U membership
  bool wants_empty = false;
};

/// Probability that the user experiences no decoding-delay unit from the
/// transmission: the five-case table over targeting and F/U membership.
/// Throws NotApplicable for users with empty Wants.
double no_delay_prob(const NoDelayInput& input);

/// Product of no_delay_prob over the critical set; the complement of the
/// completion-time-increase probability.
double clique_no_increase_prob(const std::vector<NoDelayInput>& critical_users);

}  // namespace idnc
