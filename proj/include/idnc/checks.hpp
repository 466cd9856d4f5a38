#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idnc/gec_channel.hpp"

namespace idnc {

struct CheckResult {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Monte-Carlo validation of the conditional channel beliefs: for
/// `num_params` random valid parameter sets, compares
/// conditional_erasure_belief and feedback_loss_belief against conditional
/// frequencies measured on a simulated trajectory of `trials` slots. A check
/// passes within 3 standard errors of the measured frequency.
std::vector<CheckResult> validate_channel_beliefs(std::uint64_t seed,
                                                  int num_params = 20,
                                                  long trials = 1000000);

/// Brute-force check of the weight/probability equivalence: on random
/// instances the exhaustive argmax of the critical-set weight sum must attain
/// the maximum over all maximal cliques of the product of per-user no-delay
/// probabilities (relative tolerance 1e-12). `limited` switches between the
/// perfect-feedback and limited-feedback weightings.
std::vector<CheckResult> run_equivalence_oracle(std::uint64_t seed,
                                                int instances, bool limited);

inline bool all_pass(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace idnc
