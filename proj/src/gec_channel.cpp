#include "idnc/gec_channel.hpp"

#include <cmath>
#include <string>

namespace idnc {

void GecParams::validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(g) || !in_unit(b) || !in_unit(p) || !in_unit(q))
    throw ConfigError("GecParams: g, b, p, q must lie in [0, 1]");
  const double mu = memory();
  if (mu < 0.0 || mu > 1.0)
    throw ConfigError("GecParams: memory factor 1 - g - b = " +
                      std::to_string(mu) + " outside [0, 1]");
  if (p > q) throw ConfigError("GecParams: requires p <= q");
}

GecParams GecParams::validated(double g, double b, double p, double q) {
  GecParams params{g, b, p, q};
  params.validate();
  return params;
}

std::pair<double, double> steady_state(const GecParams& params) {
  const double sum = params.g + params.b;
  if (sum <= 0.0)
    throw DegenerateChain("steady_state: g = b = 0 has no unique stationary");
  return {params.g / sum, params.b / sum};
}

double memory_factor(const GecParams& params) { return params.memory(); }

double average_erasure(const GecParams& params) {
  const double sum = params.g + params.b;
  if (sum <= 0.0)
    throw DegenerateChain("average_erasure: g = b = 0");
  return (params.g * params.p + params.q * params.b) / sum;
}

SlotOutcome sample_slot(const GecParams& params, ChannelState state,
                        SplitMix64& rng) {
  SlotOutcome out;
  const double erase_p = state == ChannelState::Good ? params.p : params.q;
  out.erased = rng.bernoulli(erase_p);
  const double switch_p = state == ChannelState::Good ? params.b : params.g;
  const bool switched = rng.bernoulli(switch_p);
  out.new_state = switched ? (state == ChannelState::Good ? ChannelState::Bad
                                                          : ChannelState::Good)
                           : state;
  return out;
}

ChannelState sample_stationary(const GecParams& params, SplitMix64& rng) {
  auto [pg, pb] = steady_state(params);
  (void)pb;
  return rng.bernoulli(pg) ? ChannelState::Good : ChannelState::Bad;
}

double k_step_transition(const GecParams& params, ChannelState from,
                         ChannelState to, long k) {
  if (k == 0) return from == to ? 1.0 : 0.0;
  const double mu = params.memory();
  const double cross =
      from == ChannelState::Bad ? params.g : params.b;  // from -> other
  // Closed form of cross * sum_{i=0}^{k-1} mu^i; the empty-sum convention
  // (k = 0) is handled above.
  double off;
  if (mu < 1.0) {
    off = cross * (1.0 - std::pow(mu, static_cast<double>(k))) / (1.0 - mu);
  } else {
    off = cross * static_cast<double>(k);  // mu = 1 implies cross = 0
  }
  return to == from ? 1.0 - off : off;
}

std::pair<double, double> posterior_state(const GecParams& params,
                                          bool observed_erased) {
  auto [pg, pb] = steady_state(params);
  const double like_g = observed_erased ? params.p : 1.0 - params.p;
  const double like_b = observed_erased ? params.q : 1.0 - params.q;
  const double denom = like_g * pg + like_b * pb;
  if (denom <= 0.0)
    throw ImpossibleObservation(
        "posterior_state: observation has probability zero");
  return {like_g * pg / denom, like_b * pb / denom};
}

double conditional_erasure_belief(const GecParams& params, Observation last,
                                  long elapsed) {
  auto [post_g, post_b] =
      posterior_state(params, last == Observation::Erased);
  double belief = 0.0;
  for (int s = 0; s < 2; ++s) {
    const ChannelState from = s == 0 ? ChannelState::Good : ChannelState::Bad;
    const double weight = s == 0 ? post_g : post_b;
    const double to_good =
        k_step_transition(params, from, ChannelState::Good, elapsed);
    belief += weight * (params.p * to_good + params.q * (1.0 - to_good));
  }
  return belief;
}

double feedback_loss_belief(const GecParams& backward, long elapsed) {
  return conditional_erasure_belief(backward, Observation::Received, elapsed);
}

}  // namespace idnc
