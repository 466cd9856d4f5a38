#include "idnc/checks.hpp"

#include <cmath>

#include "idnc/beliefs.hpp"
#include "idnc/graph.hpp"
#include "idnc/rng.hpp"
#include "idnc/solvers.hpp"

namespace idnc {

namespace {

GecParams random_params(SplitMix64& rng) {
  const double g = rng.uniform(0.05, 0.9);
  const double b = rng.uniform(0.05, std::min(0.9, 1.0 - g));
  const double p = rng.uniform(0.0, 0.5);
  const double q = rng.uniform(p, 1.0);
  return GecParams::validated(g, b, p, q);
}

}  // namespace

std::vector<CheckResult> validate_channel_beliefs(std::uint64_t seed,
                                                  int num_params,
                                                  long trials) {
  std::vector<CheckResult> results;
  for (int set = 0; set < num_params; ++set) {
    SplitMix64 rng(derive_seed(seed, 10, static_cast<std::uint64_t>(set)));
    const GecParams params = random_params(rng);
    const long elapsed = 1 + static_cast<long>(rng.next_below(6));

    // Independent trials: observe the realization at slot 0, then measure the
    // erasure frequency `elapsed` steps later, conditioned on the observation.
    long count[2] = {0, 0};
    long erased_later[2] = {0, 0};
    for (long trial = 0; trial < trials; ++trial) {
      ChannelState state = sample_stationary(params, rng);
      const SlotOutcome first = sample_slot(params, state, rng);
      state = first.new_state;
      bool erased = false;
      for (long step = 1; step <= elapsed; ++step) {
        const SlotOutcome out = sample_slot(params, state, rng);
        state = out.new_state;
        erased = out.erased;
      }
      const int obs = first.erased ? 1 : 0;
      ++count[obs];
      if (erased) ++erased_later[obs];
    }

    for (int obs = 0; obs < 2; ++obs) {
      if (count[obs] == 0) continue;
      const double freq = static_cast<double>(erased_later[obs]) /
                          static_cast<double>(count[obs]);
      const double se = std::sqrt(std::max(freq * (1.0 - freq), 1e-12) /
                                  static_cast<double>(count[obs]));
      const double expected = conditional_erasure_belief(
          params, obs ? Observation::Erased : Observation::Received, elapsed);
      CheckResult check;
      check.name = "belief/set" + std::to_string(set) +
                   (obs ? "/erased" : "/received") + "/k" +
                   std::to_string(elapsed);
      check.expected = expected;
      check.observed = freq;
      check.tolerance = 3.0 * se;
      check.pass = std::abs(expected - freq) <= check.tolerance;
      results.push_back(check);
      if (obs == 0) {
        // The feedback-loss belief is the Received-conditioned erasure belief
        // of the backward channel; validated against the same frequencies.
        CheckResult fb = check;
        fb.name = "feedback/set" + std::to_string(set) + "/k" +
                  std::to_string(elapsed);
        fb.expected = feedback_loss_belief(params, elapsed);
        fb.pass = std::abs(fb.expected - freq) <= fb.tolerance;
        results.push_back(fb);
      }
    }
  }
  return results;
}

namespace {

struct OracleInstance {
  int num_users = 0;
  int num_packets = 0;
  std::vector<std::vector<char>> wants;
  std::vector<std::vector<char>> uncertain;
  std::vector<char> critical;
  std::vector<double> erasure;
  std::vector<std::vector<double>> innovative;
  std::vector<double> finish;
};

OracleInstance random_instance(SplitMix64& rng, bool limited) {
  for (;;) {
    OracleInstance inst;
    inst.num_users = 2 + static_cast<int>(rng.next_below(4));
    inst.num_packets = 2 + static_cast<int>(rng.next_below(5));
    inst.wants.assign(inst.num_users,
                      std::vector<char>(inst.num_packets, 0));
    inst.uncertain = inst.wants;
    int vertices = 0;
    for (int i = 0; i < inst.num_users; ++i)
      for (int j = 0; j < inst.num_packets; ++j)
        if (rng.bernoulli(0.5)) {
          inst.wants[i][j] = 1;
          ++vertices;
        }
    if (vertices < 1 || vertices > 12) continue;

    inst.critical.assign(inst.num_users, 0);
    inst.erasure.resize(inst.num_users);
    inst.innovative.assign(inst.num_users,
                           std::vector<double>(inst.num_packets, 0.0));
    inst.finish.assign(inst.num_users, 0.0);
    int num_critical = 0;
    for (int i = 0; i < inst.num_users; ++i) {
      inst.erasure[i] = rng.uniform(0.05, 0.9);
      bool wanting = false;
      bool all_uncertain = true;
      for (int j = 0; j < inst.num_packets; ++j) {
        if (!inst.wants[i][j]) continue;
        wanting = true;
        if (limited && rng.bernoulli(0.5)) {
          inst.uncertain[i][j] = 1;
          inst.innovative[i][j] = rng.uniform(0.05, 0.95);
        } else {
          inst.innovative[i][j] = 1.0;
          all_uncertain = false;
        }
      }
      if (wanting && all_uncertain) {
        double finish = 1.0;
        for (int j = 0; j < inst.num_packets; ++j)
          if (inst.wants[i][j]) finish *= 1.0 - inst.innovative[i][j];
        inst.finish[i] = finish;
      }
      if (wanting && rng.bernoulli(0.7)) {
        inst.critical[i] = 1;
        ++num_critical;
      }
    }
    if (num_critical == 0) {
      for (int i = 0; i < inst.num_users; ++i) {
        bool wanting = false;
        for (char w : inst.wants[i]) wanting |= w != 0;
        if (wanting) {
          inst.critical[i] = 1;
          ++num_critical;
          break;
        }
      }
    }
    if (num_critical >= 1 && num_critical <= 8) return inst;
  }
}

double clique_probability(const OracleInstance& inst, const CodingGraph& graph,
                          const std::vector<int>& clique) {
  std::vector<int> intended(static_cast<std::size_t>(inst.num_users), -1);
  for (int v : clique)
    intended[graph.vertex(v).user] = graph.vertex(v).packet;
  std::vector<NoDelayInput> inputs;
  for (int i = 0; i < inst.num_users; ++i) {
    if (!inst.critical[i]) continue;
    bool all_uncertain = true;
    bool wanting = false;
    for (int j = 0; j < inst.num_packets; ++j) {
      if (!inst.wants[i][j]) continue;
      wanting = true;
      if (!inst.uncertain[i][j]) all_uncertain = false;
    }
    NoDelayInput in;
    in.erasure = inst.erasure[i];
    in.finish = inst.finish[i];
    in.wants_empty = !wanting;
    in.all_wants_uncertain = wanting && all_uncertain;
    if (intended[i] >= 0) {
      in.targeted = true;
      in.innovative = inst.innovative[i][intended[i]];
      in.intended_uncertain = inst.uncertain[i][intended[i]] != 0;
    }
    inputs.push_back(in);
  }
  return clique_no_increase_prob(inputs);
}

}  // namespace

std::vector<CheckResult> run_equivalence_oracle(std::uint64_t seed,
                                                int instances, bool limited) {
  std::vector<CheckResult> results;
  for (int k = 0; k < instances; ++k) {
    SplitMix64 rng(derive_seed(seed, limited ? 21 : 20,
                               static_cast<std::uint64_t>(k)));
    const OracleInstance inst = random_instance(rng, limited);

    GraphInput input;
    input.wants.resize(inst.num_users);
    input.has.resize(inst.num_users);
    for (int i = 0; i < inst.num_users; ++i) {
      input.has[i].assign(inst.num_packets, 0);
      for (int j = 0; j < inst.num_packets; ++j) {
        if (inst.wants[i][j])
          input.wants[i].push_back(j);
        else
          input.has[i][j] = 1;
      }
    }
    CodingGraph graph = build_gidnc(input);
    for (int v = 0; v < graph.size(); ++v) {
      const Vertex& vx = graph.vertex(v);
      graph.weight[v] =
          limited ? vertex_weight_limited(inst.erasure[vx.user],
                                          inst.innovative[vx.user][vx.packet],
                                          inst.finish[vx.user])
                  : vertex_weight_perfect(inst.erasure[vx.user]);
    }

    const SelectionResult chosen = exhaustive_select(graph, inst.critical);
    double best = 0.0;
    for (const std::vector<int>& clique : maximal_cliques(graph))
      best = std::max(best, clique_probability(inst, graph, clique));

    CheckResult check;
    check.name = std::string(limited ? "oracle/limited/" : "oracle/perfect/") +
                 std::to_string(k);
    check.expected = best;
    check.observed = clique_probability(inst, graph, chosen.clique);
    check.tolerance = 1e-12 * std::max(1.0, best);
    check.pass = std::abs(check.expected - check.observed) <= check.tolerance;
    results.push_back(check);
  }
  return results;
}

}  // namespace idnc
