#include "idnc/graph.hpp"

#include <cmath>
#include <sstream>

#include "idnc/gec_channel.hpp"

namespace idnc {

CodingGraph::CodingGraph(std::vector<Vertex> vertices)
    : vertices_(std::move(vertices)) {
  const std::size_t words = (vertices_.size() + 63) / 64;
  adj_.assign(vertices_.size(), std::vector<std::uint64_t>(words, 0));
  weight.assign(vertices_.size(), 0.0);
  layer.assign(vertices_.size(), 1);
  num_layers = vertices_.empty() ? 0 : 1;
}

void CodingGraph::set_edge(int a, int b) {
  adj_[a][static_cast<std::size_t>(b) >> 6] |= 1ull << (b & 63);
  adj_[b][static_cast<std::size_t>(a) >> 6] |= 1ull << (a & 63);
}

std::string CodingGraph::dump() const {
  std::ostringstream os;
  for (int v = 0; v < size(); ++v) {
    os << v << " (" << vertices_[v].user << "," << vertices_[v].packet << "):";
    for (int u = 0; u < size(); ++u)
      if (u != v && adjacent(v, u)) os << ' ' << u;
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<Vertex> make_vertices(const GraphInput& input) {
  std::vector<Vertex> vertices;
  for (int i = 0; i < static_cast<int>(input.wants.size()); ++i)
    for (int j : input.wants[i]) vertices.push_back(Vertex{i, j});
  return vertices;
}

}  // namespace

CodingGraph build_gidnc(const GraphInput& input) {
  CodingGraph graph(make_vertices(input));
  for (int a = 0; a < graph.size(); ++a) {
    const Vertex& va = graph.vertex(a);
    for (int b = a + 1; b < graph.size(); ++b) {
      const Vertex& vb = graph.vertex(b);
      if (va.user == vb.user) continue;
      const bool same_packet = va.packet == vb.packet;
      const bool swap_decodable = input.has[vb.user][va.packet] &&
                                  input.has[va.user][vb.packet];
      if (same_packet || swap_decodable) graph.set_edge(a, b);
    }
  }
  return graph;
}

double expected_pair_delay(const PairBeliefs& b, bool combined) {
  auto side = [combined](double e, double pn_j, double pn_l, double pf) {
    const double pl = combined ? pn_l : 0.0;
    return (1.0 - e) *
           (pn_j * pl + (1.0 - pn_j) * (1.0 - pl) * (1.0 - pf));
  };
  return side(b.e_i, b.pn_i_j, b.pn_i_l, b.pf_i) +
         side(b.e_k, b.pn_k_j, b.pn_k_l, b.pf_k);
}

CodingGraph build_lgidnc(const GraphInput& input, const BeliefAccess& beliefs) {
  CodingGraph graph(make_vertices(input));
  for (int a = 0; a < graph.size(); ++a) {
    const Vertex& va = graph.vertex(a);
    for (int b = a + 1; b < graph.size(); ++b) {
      const Vertex& vb = graph.vertex(b);
      if (va.user == vb.user) continue;
      if (va.packet == vb.packet) {  // C1
        graph.set_edge(a, b);
        continue;
      }
      PairBeliefs pb;
      pb.e_i = beliefs.erasure(va.user);
      pb.e_k = beliefs.erasure(vb.user);
      pb.pn_i_j = beliefs.innovative(va.user, va.packet);
      pb.pn_i_l = beliefs.innovative(va.user, vb.packet);
      pb.pn_k_j = beliefs.innovative(vb.user, va.packet);
      pb.pn_k_l = beliefs.innovative(vb.user, vb.packet);
      pb.pf_i = beliefs.finish(va.user);
      pb.pf_k = beliefs.finish(vb.user);
      const double combined = expected_pair_delay(pb, true);
      // d(l) alone: swap the roles of j and l.
      PairBeliefs swapped = pb;
      std::swap(swapped.pn_i_j, swapped.pn_i_l);
      std::swap(swapped.pn_k_j, swapped.pn_k_l);
      const double alone_j = expected_pair_delay(pb, false);
      const double alone_l = expected_pair_delay(swapped, false);
      if (combined <= std::min(alone_j, alone_l)) graph.set_edge(a, b);  // C2
    }
  }
  return graph;
}

void partition_layers(CodingGraph& graph,
                      const std::vector<double>& anticipated_completion,
                      const std::vector<double>& alpha, double current_max) {
  int max_layer = 0;
  for (int v = 0; v < graph.size(); ++v) {
    const int user = graph.vertex(v).user;
    const double slack =
        (current_max - anticipated_completion[user]) * (1.0 - alpha[user]);
    // Boundary ties take the smaller index.
    int n = static_cast<int>(std::ceil(slack));
    if (n < 1) n = 1;
    graph.layer[v] = n;
    max_layer = std::max(max_layer, n);
  }
  graph.num_layers = max_layer;
}

double vertex_weight_perfect(double erasure_belief) {
  return std::log(1.0 / clamp_prob(erasure_belief));
}

double vertex_weight_limited(double erasure_belief, double innovative_prob,
                             double finish_prob) {
  const double e = clamp_prob(erasure_belief);
  return std::log1p(innovative_prob / (e / (1.0 - e) + finish_prob));
}

}  // namespace idnc
