#include "idnc/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "idnc/errors.hpp"
#include "idnc/gec_channel.hpp"

namespace idnc {

namespace {

SelectionResult from_clique(const CodingGraph& graph, std::vector<int> clique) {
  SelectionResult result;
  std::sort(clique.begin(), clique.end());
  for (int v : clique) {
    const Vertex& vx = graph.vertex(v);
    result.targeted.push_back(Target{vx.user, vx.packet});
    result.score += graph.weight[v];
    if (std::find(result.kappa.begin(), result.kappa.end(), vx.packet) ==
        result.kappa.end())
      result.kappa.push_back(vx.packet);
  }
  std::sort(result.kappa.begin(), result.kappa.end());
  result.clique = std::move(clique);
  return result;
}

}  // namespace

std::vector<int> greedy_layer_clique(const CodingGraph& graph,
                                     std::vector<int> candidates) {
  std::vector<int> picked;
  while (!candidates.empty()) {
    int best = -1;
    double best_w = 0.0, best_ws = 0.0;
    for (int v : candidates) {
      double neighbour_sum = 0.0;
      for (int u : candidates)
        if (u != v && graph.layer[u] == graph.layer[v] && graph.adjacent(v, u))
          neighbour_sum += graph.weight[u];
      const double w = (graph.weight[v] + 1.0) * neighbour_sum;
      const double ws = graph.weight[v];
      if (best < 0 || w > best_w || (w == best_w && ws > best_ws) ||
          (w == best_w && ws == best_ws && v < best)) {
        best = v;
        best_w = w;
        best_ws = ws;
      }
    }
    picked.push_back(best);
    std::vector<int> next;
    for (int u : candidates)
      if (u != best && graph.adjacent(best, u)) next.push_back(u);
    candidates.swap(next);
  }
  return picked;
}

SelectionResult multi_layer_select(const CodingGraph& graph) {
  std::vector<int> clique;
  for (int l = 1; l <= graph.num_layers; ++l) {
    std::vector<int> candidates;
    for (int v = 0; v < graph.size(); ++v) {
      if (graph.layer[v] != l) continue;
      bool compatible = true;
      for (int c : clique)
        if (!graph.adjacent(v, c)) {
          compatible = false;
          break;
        }
      if (compatible) candidates.push_back(v);
    }
    const std::vector<int> added = greedy_layer_clique(graph, candidates);
    clique.insert(clique.end(), added.begin(), added.end());
  }
  return from_clique(graph, std::move(clique));
}

SelectionResult single_layer_select(const CodingGraph& graph) {
  std::vector<int> candidates(static_cast<std::size_t>(graph.size()));
  for (int v = 0; v < graph.size(); ++v) candidates[v] = v;
  CodingGraph flat = graph;
  std::fill(flat.layer.begin(), flat.layer.end(), 1);
  flat.num_layers = flat.size() ? 1 : 0;
  return from_clique(graph, greedy_layer_clique(flat, std::move(candidates)));
}

namespace {

using Mask = std::uint32_t;

void bron_kerbosch(const std::vector<Mask>& adj, Mask r, Mask p, Mask x,
                   std::vector<std::vector<int>>& out) {
  if (p == 0 && x == 0) {
    std::vector<int> clique;
    for (int v = 0; v < 32; ++v)
      if (r & (Mask{1} << v)) clique.push_back(v);
    out.push_back(std::move(clique));
    return;
  }
  // Pivot on the vertex of P | X with the most neighbours in P.
  int pivot = -1, best_deg = -1;
  Mask px = p | x;
  for (int v = 0; v < 32; ++v) {
    if (!(px & (Mask{1} << v))) continue;
    const int deg = std::popcount(p & adj[v]);
    if (deg > best_deg) {
      best_deg = deg;
      pivot = v;
    }
  }
  Mask ext = p & ~adj[pivot];
  for (int v = 0; v < 32; ++v) {
    const Mask bit = Mask{1} << v;
    if (!(ext & bit)) continue;
    bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], out);
    p &= ~bit;
    x |= bit;
  }
}

}  // namespace

std::vector<std::vector<int>> maximal_cliques(const CodingGraph& graph) {
  if (graph.size() > 16)
    throw TooLarge("maximal_cliques: graph exceeds 16 vertices");
  if (graph.size() == 0) return {};
  std::vector<Mask> adj(static_cast<std::size_t>(graph.size()), 0);
  for (int a = 0; a < graph.size(); ++a)
    for (int b = 0; b < graph.size(); ++b)
      if (a != b && graph.adjacent(a, b)) adj[a] |= Mask{1} << b;
  std::vector<std::vector<int>> cliques;
  bron_kerbosch(adj, 0, (Mask{1} << graph.size()) - 1, 0, cliques);
  return cliques;
}

SelectionResult exhaustive_select(const CodingGraph& graph,
                                  const std::vector<char>& critical_user) {
  const std::vector<std::vector<int>> cliques = maximal_cliques(graph);
  if (cliques.empty()) return {};
  int best = -1;
  double best_score = 0.0;
  for (int c = 0; c < static_cast<int>(cliques.size()); ++c) {
    double score = 0.0;
    for (int v : cliques[c])
      if (critical_user[graph.vertex(v).user]) score += graph.weight[v];
    if (best < 0 || score > best_score ||
        (score == best_score && cliques[c] < cliques[best])) {
      best = c;
      best_score = score;
    }
  }
  return from_clique(graph, cliques[best]);
}

void BpsoParams::validate() const {
  if (num_particles < 0 || num_iterations < 1)
    throw ConfigError("bpso: need num_particles >= 0, num_iterations >= 1");
  if (c1 < 0 || c2 < 0 || inertia_min > inertia_max)
    throw ConfigError("bpso: invalid coefficients");
}

BpsoResult bpso_optimize(
    int num_bits, const BpsoParams& params,
    const std::function<double(const std::vector<char>&)>& objective,
    SplitMix64& rng) {
  params.validate();
  if (num_bits < 1) throw ConfigError("bpso: need at least one bit");
  const int L = params.num_particles > 0 ? params.num_particles : num_bits;

  std::vector<std::vector<char>> pos(L, std::vector<char>(num_bits, 0));
  for (int k = 0; k < L; ++k) {
    const int bit = k < num_bits ? k : static_cast<int>(rng.next_below(
                                           static_cast<std::uint64_t>(num_bits)));
    pos[k][bit] = 1;
  }
  std::vector<std::vector<double>> v1(L, std::vector<double>(num_bits, 0.0));
  std::vector<std::vector<double>> v0 = v1;

  std::vector<std::vector<char>> pbest = pos;
  std::vector<double> pbest_score(L);
  BpsoResult result;
  int gbest = 0;
  for (int k = 0; k < L; ++k) {
    pbest_score[k] = objective(pos[k]);
    if (k == 0 || pbest_score[k] > pbest_score[gbest]) gbest = k;
  }
  result.best_position = pbest[gbest];
  result.best_score = pbest_score[gbest];

  // Inertia is drawn once per invocation; r1 and r2 once per iteration.
  const double w = rng.uniform(params.inertia_min, params.inertia_max);
  for (int iter = 0; iter < params.num_iterations; ++iter) {
    const double r1 = rng.next_double();
    const double r2 = rng.next_double();
    for (int k = 0; k < L; ++k) {
      for (int j = 0; j < num_bits; ++j) {
        const double d1 = params.c1 * r1 * (pbest[k][j] ? 1.0 : -1.0);
        const double d2 =
            params.c2 * r2 * (result.best_position[j] ? 1.0 : -1.0);
        v1[k][j] = w * v1[k][j] + d1 + d2;
        v0[k][j] = w * v0[k][j] - d1 - d2;
        const double vc = pos[k][j] ? v0[k][j] : v1[k][j];
        if (rng.next_double() < sigmoid(vc)) pos[k][j] ^= 1;
      }
      const double score = objective(pos[k]);
      if (score > pbest_score[k]) {
        pbest_score[k] = score;
        pbest[k] = pos[k];
      }
      if (score > result.best_score) {
        result.best_score = score;
        result.best_position = pos[k];
      }
    }
    result.gbest_trace.push_back(result.best_score);
  }
  return result;
}

std::vector<Target> ObjectiveContext::decode_targets(
    const std::vector<char>& bits) const {
  std::vector<Target> targets;
  for (int i = 0; i < num_users; ++i) {
    int wanted = -1, count = 0;
    for (int j = 0; j < num_packets; ++j) {
      if (bits[j] && wants[i][j]) {
        wanted = j;
        if (++count > 1) break;
      }
    }
    if (count == 1) targets.push_back(Target{i, wanted});
  }
  return targets;
}

double ObjectiveContext::layered_objective(const std::vector<char>& bits) const {
  const double big_m = static_cast<double>(num_users);
  double value = 0.0;
  for (const Target& t : decode_targets(bits)) {
    if (user_layer[t.user] < 1) continue;
    value += big_m * static_cast<double>(num_layers - user_layer[t.user]);
    if (limited) {
      if (critical[t.user])
        value += sigmoid(vertex_weight_limited(
            erasure[t.user], innovative(t.user, t.packet), finish[t.user]));
    } else {
      value += sigmoid(vertex_weight_perfect(erasure[t.user]));
    }
  }
  return value;
}

SelectionResult bpso_select(const ObjectiveContext& context,
                            const BpsoParams& params, SplitMix64& rng) {
  const BpsoResult best = bpso_optimize(
      context.num_packets, params,
      [&context](const std::vector<char>& bits) {
        return context.layered_objective(bits);
      },
      rng);
  SelectionResult result;
  // Bits wanted by nobody never influence targeting; dropping them keeps the
  // combination minimal.
  for (int j = 0; j < context.num_packets; ++j) {
    if (!best.best_position[j]) continue;
    bool wanted = false;
    for (int i = 0; i < context.num_users && !wanted; ++i)
      wanted = context.wants[i][j] != 0;
    if (wanted) result.kappa.push_back(j);
  }
  result.targeted = context.decode_targets(best.best_position);
  result.score = best.best_score;
  return result;
}

SelectionResult baseline_select(const CodingGraph& graph, BaselinePolicy policy,
                                const std::vector<int>& wants_count,
                                const std::vector<double>& erasure) {
  CodingGraph weighted = graph;
  for (int v = 0; v < weighted.size(); ++v) {
    const int user = weighted.vertex(v).user;
    const double e = clamp_prob(erasure[user]);
    weighted.weight[v] = policy == BaselinePolicy::SspMinCt
                             ? wants_count[user] * std::log(1.0 / e)
                             : 1.0 - e;
  }
  return single_layer_select(weighted);
}

}  // namespace idnc
