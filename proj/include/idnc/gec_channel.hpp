#pragma once

#include <cstdint>
#include <utility>

#include "idnc/errors.hpp"
#include "idnc/rng.hpp"

namespace idnc {

enum class ChannelState : std::uint8_t { Good, Bad };

/// What the sender last learned about a channel realization.
enum class Observation : std::uint8_t { Erased, Received };

/// Two-state Markov erasure channel. g: Bad->Good transition probability per
/// slot, b: Good->Bad, p: erasure probability while Good, q: while Bad.
/// The memory factor mu = 1 - g - b must lie in [0, 1] (persistence), and
/// p <= q (the Bad state erases at least as often).
struct GecParams {
  double g = 0.5;
  double b = 0.5;
  double p = 0.0;
  double q = 0.0;

  double memory() const { return 1.0 - g - b; }

  /// Throws ConfigError when the parameter set is outside the admissible region.
  void validate() const;

  static GecParams validated(double g, double b, double p, double q);

  /// A channel that never erases and never needs sampling; stands in for the
  /// backward link in the perfect-feedback mode.
  static GecParams lossless() { return GecParams{0.5, 0.5, 0.0, 0.0}; }
};

struct SlotOutcome {
  bool erased = false;
  ChannelState new_state = ChannelState::Good;
};

/// Stationary distribution (P_Good, P_Bad). Requires g + b > 0.
std::pair<double, double> steady_state(const GecParams& params);

/// mu = 1 - g - b, in [0, 1] for valid parameters.
double memory_factor(const GecParams& params);

/// Stationary erasure probability alpha = (g p + q b) / (g + b).
double average_erasure(const GecParams& params);

/// Samples one slot: the erasure uses the CURRENT state, then the state
/// advances one Markov step. The returned state governs the next slot.
SlotOutcome sample_slot(const GecParams& params, ChannelState state,
                        SplitMix64& rng);

/// Draws the initial state from the stationary distribution.
ChannelState sample_stationary(const GecParams& params, SplitMix64& rng);

/// P(state(t+k) = to | state(t) = from). k = 0 is the identity.
double k_step_transition(const GecParams& params, ChannelState from,
                         ChannelState to, long k);

/// Bayes posterior (P_Good, P_Bad) of the state at the observation slot,
/// starting from the stationary prior.
std::pair<double, double> posterior_state(const GecParams& params,
                                          bool observed_erased);

/// Probability that the slot `elapsed` steps after an observed realization is
/// erased: posterior at the observation combined with the k-step transition
/// and the per-state erasure probabilities.
double conditional_erasure_belief(const GecParams& params, Observation last,
                                  long elapsed);

/// Probability of losing a feedback `elapsed` steps after the last heard
/// (i.e. successfully received) feedback on the backward channel.
double feedback_loss_belief(const GecParams& backward, long elapsed);

/// Clamps to [1e-12, 1 - 1e-12] so log() and odds stay finite downstream.
inline double clamp_prob(double x) {
  constexpr double kEps = 1e-12;
  if (x < kEps) return kEps;
  if (x > 1.0 - kEps) return 1.0 - kEps;
  return x;
}

}  // namespace idnc
