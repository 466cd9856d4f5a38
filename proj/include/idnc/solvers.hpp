#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "idnc/graph.hpp"
#include "idnc/rng.hpp"
#include "idnc/session.hpp"

namespace idnc {

struct SelectionResult {
  std::vector<int> kappa;        // packet combination
  std::vector<Target> targeted;  // tau with intended packets
  std::vector<int> clique;       // selected vertex indices, when graph-based
  double score = 0.0;            // diagnostic: sum of w* over the selection
};

/// One pass of the maximum-weight vertex search over a candidate set: pick
/// argmax of (w* + 1) * (neighbour w* sum within the candidate's layer),
/// restrict to common neighbours, repeat. Ties resolve lexicographically by
/// (w, w*, lowest vertex id).
std::vector<int> greedy_layer_clique(const CodingGraph& graph,
                                     std::vector<int> candidates);

/// Runs greedy_layer_clique on layer 1, then on each subsequent layer
/// restricted to common neighbours of the accumulated clique. The layer-1
/// selection is never altered by later layers.
SelectionResult multi_layer_select(const CodingGraph& graph);

/// Layer-free greedy over the whole graph (stand-in baselines use this with
/// their own weights).
SelectionResult single_layer_select(const CodingGraph& graph);

/// All maximal cliques (Bron-Kerbosch). Test oracle; capped at 16 vertices.
std::vector<std::vector<int>> maximal_cliques(const CodingGraph& graph);

/// Exhaustive argmax of the w* sum over critical-user vertices across all
/// maximal cliques; deterministic tie-break by sorted vertex ids.
SelectionResult exhaustive_select(const CodingGraph& graph,
                                  const std::vector<char>& critical_user);

struct BpsoParams {
  int num_particles = 0;  // 0: use the number of packets (sparse init)
  int num_iterations = 10;
  double c1 = 2.0;
  double c2 = 2.0;
  double inertia_min = -1.0;
  double inertia_max = 1.0;

  void validate() const;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct BpsoResult {
  std::vector<char> best_position;
  double best_score = 0.0;
  std::vector<double> gbest_trace;  // best score after each iteration
};

/// Binary PSO over bit vectors with per-bit flip probabilities: two velocity
/// components (0->1 and 1->0) pulled toward the personal and global bests,
/// normalized through the sigmoid. The first min(L, num_bits) particles start
/// sparse (particle k = bit k alone); the rest start with one random bit.
BpsoResult bpso_optimize(
    int num_bits, const BpsoParams& params,
    const std::function<double(const std::vector<char>&)>& objective,
    SplitMix64& rng);

/// Inputs for the layered BPSO objective, one decision epoch.
struct ObjectiveContext {
  int num_users = 0;
  int num_packets = 0;
  int num_layers = 1;
  std::vector<std::vector<char>> wants;  // effective Wants bitmap per user
  std::vector<int> user_layer;           // 1..h; 0 for users without vertices
  std::vector<char> critical;            // P(t) membership
  bool limited = false;
  std::vector<double> erasure;  // e_i
  std::function<double(int user, int packet)> innovative;  // limited mode
  std::vector<double> finish;                              // limited mode

  /// Users for whom the position is instantly decodable under the effective
  /// Wants view (exactly one wanted bit set), with their intended packets.
  std::vector<Target> decode_targets(const std::vector<char>& bits) const;

  /// Sum over targeted users of M * (h - layer) plus the sigmoid-squashed
  /// vertex weight (restricted to critical targeted users in limited mode).
  double layered_objective(const std::vector<char>& bits) const;
};

/// Runs BPSO on the layered objective and decodes the best position.
SelectionResult bpso_select(const ObjectiveContext& context,
                            const BpsoParams& params, SplitMix64& rng);

enum class BaselinePolicy { SspMinCt, Sdd };

/// Stand-in baselines: layer-free greedy with substituted weights
/// (SspMinCt: |W_i| * log(1/e_i); Sdd: 1 - e_i). Approximations of the
/// published shortest-stochastic-path and sum-decoding-delay policies, used
/// only for trend comparisons.
SelectionResult baseline_select(const CodingGraph& graph, BaselinePolicy policy,
                                const std::vector<int>& wants_count,
                                const std::vector<double>& erasure);

}  // namespace idnc
