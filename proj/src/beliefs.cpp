#include "idnc/beliefs.hpp"

#include <algorithm>

namespace idnc {

double innovative_prob(
    const std::vector<FrameAttemptView>& past_frames,
    const std::vector<long>& current_frame_packet_txns,
    const std::function<double(long)>& erasure_at_txn,
    const std::function<double(long)>& feedback_loss_at_frame) {
  double prob = 1.0;
  for (long txn : current_frame_packet_txns) prob *= erasure_at_txn(txn);

  for (const FrameAttemptView& view : past_frames) {
    if (view.packet_attempt_txns.empty()) continue;  // factor is 1
    double all_erased = 1.0;        // P(every attempt of the frame erased)
    for (long txn : view.all_attempt_txns) all_erased *= erasure_at_txn(txn);
    double packet_erased = 1.0;     // P(this packet's attempts erased)
    double others_erased = 1.0;     // P(the remaining attempts erased)
    for (long txn : view.all_attempt_txns) {
      const bool is_packet =
          std::find(view.packet_attempt_txns.begin(),
                    view.packet_attempt_txns.end(),
                    txn) != view.packet_attempt_txns.end();
      (is_packet ? packet_erased : others_erased) *= erasure_at_txn(txn);
    }
    const double fb_lost = feedback_loss_at_frame(view.frame);
    const double numer =
        all_erased + packet_erased * (1.0 - others_erased) * fb_lost;
    const double denom = all_erased + (1.0 - all_erased) * fb_lost;
    if (denom > 0.0) prob *= numer / denom;
  }
  return prob;
}

double finish_prob(const std::vector<double>& innovative_probs_over_wants) {
  double prob = 1.0;
  for (double pn : innovative_probs_over_wants) prob *= 1.0 - pn;
  return prob;
}

double no_delay_prob(const NoDelayInput& in) {
  if (in.wants_empty)
    throw NotApplicable("no_delay_prob: user has an empty Wants set");
  const double e = in.erasure;
  if (in.targeted) {
    if (!in.intended_uncertain && !in.all_wants_uncertain) return 1.0;
    if (in.all_wants_uncertain)
      return e + (1.0 - e) * (in.innovative + in.finish);
    return e + in.innovative - e * in.innovative;
  }
  if (in.all_wants_uncertain) return e + in.finish - e * in.finish;
  return e;
}

double clique_no_increase_prob(
    const std::vector<NoDelayInput>& critical_users) {
  double prob = 1.0;
  for (const NoDelayInput& in : critical_users) prob *= no_delay_prob(in);
  return prob;
}

}  // namespace idnc
