#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "idnc/errors.hpp"

namespace idnc {

struct Vertex {
  int user = 0;
  int packet = 0;
};

/// Coding-opportunity graph: a vertex per (user, wanted packet), an edge per
/// pairwise-compatible combination. Adjacency is stored as bitset rows.
class CodingGraph {
 public:
  CodingGraph() = default;
  explicit CodingGraph(std::vector<Vertex> vertices);

  int size() const { return static_cast<int>(vertices_.size()); }
  const Vertex& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  void set_edge(int a, int b);
  bool adjacent(int a, int b) const {
    return (adj_[a][static_cast<std::size_t>(b) >> 6] >> (b & 63)) & 1u;
  }

  std::vector<double> weight;  // w* per vertex
  std::vector<int> layer;      // 1..num_layers per vertex
  int num_layers = 0;

  /// Adjacency-list text dump (one line per vertex) for debugging and goldens.
  std::string dump() const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<std::vector<std::uint64_t>> adj_;
};

/// Per-user inputs for graph construction, taken from the sender's belief
/// (possibly filtered by a blind policy).
struct GraphInput {
  // effective Wants per user: vertices are created for exactly these packets
  std::vector<std::vector<int>> wants;
  // believed Has per user (bitmap over packets), for the j-in-H_k condition
  std::vector<std::vector<char>> has;
};

/// G-IDNC graph: edge iff the packets coincide or each side holds the other's
/// packet. Same-user vertices are never adjacent.
CodingGraph build_gidnc(const GraphInput& input);

/// Belief inputs for the limited-feedback (LG-IDNC) construction.
struct PairBeliefs {
  double e_i = 0, e_k = 0;        // erasure beliefs
  double pn_i_j = 0, pn_i_l = 0;  // innovative probabilities, user i
  double pn_k_j = 0, pn_k_l = 0;  // innovative probabilities, user k
  double pf_i = 0, pf_k = 0;      // finish probabilities
};

/// Expected decoding-delay increase for users i and k from sending j XOR l
/// (combined = true) or the single packet j (combined = false; the l-terms
/// collapse with pn(l) = 0).
double expected_pair_delay(const PairBeliefs& beliefs, bool combined);

/// Access to the belief quantities needed by the LG-IDNC edge test.
struct BeliefAccess {
  std::function<double(int user)> erasure;               // e_i(t)
  std::function<double(int user, int packet)> innovative;  // p_{i,n}(j,t)
  std::function<double(int user)> finish;                // p_{i,f}(t)
};

/// LG-IDNC graph: edge iff C1 (same packet) or C2 (the pair's expected delay
/// for the combination is no worse than for either packet alone).
CodingGraph build_lgidnc(const GraphInput& input, const BeliefAccess& beliefs);

/// Assigns each vertex its criticality layer n = max(1, ceil((C_max - C_i)
/// * (1 - alpha_i))) and records the layer count.
void partition_layers(CodingGraph& graph,
                      const std::vector<double>& anticipated_completion,
                      const std::vector<double>& alpha, double current_max);

/// Perfect-feedback vertex weight log(1 / e_i), on the clamped erasure belief.
double vertex_weight_perfect(double erasure_belief);

/// Limited-feedback vertex weight log(1 + p_n / (e/(1-e) + p_f)).
double vertex_weight_limited(double erasure_belief, double innovative_prob,
                             double finish_prob);

}  // namespace idnc
