#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "idnc/gec_channel.hpp"
#include "idnc/graph.hpp"
#include "idnc/rng.hpp"
#include "idnc/solvers.hpp"

using namespace idnc;

namespace {

/// Random belief-side instance. With partition = true every packet is either
/// held or wanted (a certain sender state); otherwise some packets are neither
/// (as blind views produce).
GraphInput random_input(SplitMix64& rng, int max_users = 5, int max_packets = 8,
                        bool partition = false) {
  const int m = 2 + static_cast<int>(rng.next_below(max_users - 1));
  const int n = 3 + static_cast<int>(rng.next_below(max_packets - 2));
  GraphInput input;
  input.wants.resize(m);
  input.has.assign(m, std::vector<char>(n, 0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      if (rng.bernoulli(0.5))
        input.has[i][j] = 1;
      else if (partition || rng.bernoulli(0.7))
        input.wants[i].push_back(j);
    }
  return input;
}

/// Certainty beliefs derived from a graph input: wanted packets are innovative
/// for sure, held packets are not, so the finish probability (the product of
/// 1 - p_n over the Wants set) vanishes for every vertex-bearing user.
BeliefAccess certainty_beliefs(const GraphInput& input,
                               const std::vector<double>& erasure) {
  BeliefAccess access;
  access.erasure = [erasure](int user) { return erasure[user]; };
  access.innovative = [input](int user, int packet) {
    for (int j : input.wants[user])
      if (j == packet) return 1.0;
    return 0.0;
  };
  access.finish = [](int) { return 0.0; };
  return access;
}

}  // namespace

TEST_CASE("gidnc edge conditions on a hand-built instance") {
  // user 0 wants {0, 1} and holds {2}; user 1 wants {0, 2} and holds {1};
  // user 2 wants {2} and holds {0, 1}
  GraphInput input;
  input.wants = {{0, 1}, {0, 2}, {2}};
  input.has = {{0, 0, 1}, {0, 1, 0}, {1, 1, 0}};
  const CodingGraph g = build_gidnc(input);
  REQUIRE(g.size() == 5);
  // vertex order: (0,0) (0,1) (1,0) (1,2) (2,2)
  auto idx = [&g](int user, int packet) {
    for (int v = 0; v < g.size(); ++v)
      if (g.vertex(v).user == user && g.vertex(v).packet == packet) return v;
    return -1;
  };
  CHECK(g.adjacent(idx(0, 0), idx(1, 0)));        // same packet
  CHECK(g.adjacent(idx(0, 1), idx(1, 2)));        // mutual swap
  CHECK_FALSE(g.adjacent(idx(0, 0), idx(1, 2)));  // user 1 lacks packet 0? no:
  // (0,0) vs (1,2): needs has[1][0] and has[0][2]; has[1][0] = 0, so no edge
  CHECK_FALSE(g.adjacent(idx(0, 0), idx(0, 1)));  // same user, never adjacent
  CHECK(g.adjacent(idx(0, 1), idx(2, 2)));        // has[2][1] and has[0][2]
  CHECK(g.adjacent(idx(1, 2), idx(2, 2)));        // same packet
}

TEST_CASE("gidnc edges match the pairwise rule on random instances") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const GraphInput input = random_input(rng);
    const CodingGraph g = build_gidnc(input);
    for (int a = 0; a < g.size(); ++a)
      for (int b = 0; b < g.size(); ++b) {
        if (a == b) continue;
        const Vertex& va = g.vertex(a);
        const Vertex& vb = g.vertex(b);
        bool expected = false;
        if (va.user != vb.user)
          expected = va.packet == vb.packet ||
                     (input.has[vb.user][va.packet] &&
                      input.has[va.user][vb.packet]);
        CHECK(g.adjacent(a, b) == expected);
        CHECK(g.adjacent(a, b) == g.adjacent(b, a));
      }
  }
}

TEST_CASE("every maximal clique is instantly decodable for its users") {
  SplitMix64 rng(55);
  int nontrivial = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const GraphInput input = random_input(rng, 4, 6);
    const CodingGraph g = build_gidnc(input);
    if (g.size() == 0 || g.size() > 16) continue;
    for (const std::vector<int>& clique : maximal_cliques(g)) {
      std::set<int> users;
      std::set<int> kappa;
      for (int v : clique) {
        // at most one vertex per user in any clique
        CHECK(users.insert(g.vertex(v).user).second);
        kappa.insert(g.vertex(v).packet);
      }
      if (clique.size() > 1) ++nontrivial;
      for (int v : clique) {
        // the user misses exactly its own packet within the combination
        int unknown = 0;
        for (int j : kappa)
          if (!input.has[g.vertex(v).user][j]) ++unknown;
        CHECK(unknown == 1);
        CHECK_FALSE(input.has[g.vertex(v).user][g.vertex(v).packet]);
      }
    }
  }
  CHECK(nontrivial > 50);  // the generator must exercise real coding cases
}

TEST_CASE("expected pair delay, frozen arithmetic") {
  PairBeliefs b;
  b.e_i = 0.2;
  b.e_k = 0.4;
  b.pn_i_j = 0.9;
  b.pn_i_l = 0.3;
  b.pn_k_j = 0.2;
  b.pn_k_l = 0.8;
  b.pf_i = 0.05;
  b.pf_k = 0.1;
  CHECK(expected_pair_delay(b, true) ==
        doctest::Approx(0.4516).epsilon(1e-12));
  CHECK(expected_pair_delay(b, false) ==
        doctest::Approx(0.508).epsilon(1e-12));
}

TEST_CASE("lgidnc degenerates to gidnc under certainty") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const GraphInput input = random_input(rng, 5, 8, true);
    std::vector<double> erasure(input.wants.size());
    for (double& e : erasure) e = rng.uniform(0.05, 0.95);
    const CodingGraph g = build_gidnc(input);
    const CodingGraph lg = build_lgidnc(input, certainty_beliefs(input, erasure));
    REQUIRE(lg.size() == g.size());
    for (int a = 0; a < g.size(); ++a)
      for (int b = 0; b < g.size(); ++b)
        if (a != b) CHECK(lg.adjacent(a, b) == g.adjacent(a, b));
  }
}

TEST_CASE("lgidnc can join vertices the certainty graph rejects") {
  // two users, each probably holding the other's packet but not for sure:
  // the expected delay of the XOR stays below either single packet
  GraphInput input;
  input.wants = {{0}, {1}};
  input.has = {{0, 0}, {0, 0}};  // the sender is not certain of any holding
  BeliefAccess access;
  access.erasure = [](int) { return 0.3; };
  // packet 1 is almost surely known to user 0 and vice versa
  access.innovative = [](int user, int packet) {
    return user == packet ? 1.0 : 0.05;
  };
  access.finish = [](int) { return 0.0; };
  const CodingGraph g = build_gidnc(input);
  const CodingGraph lg = build_lgidnc(input, access);
  REQUIRE(g.size() == 2);
  CHECK_FALSE(g.adjacent(0, 1));
  // d(0 xor 1) = 2 * 0.7 * (1 * 0.05) = 0.07; d(j alone) = 0.7 * 0.95 = 0.665
  CHECK(lg.adjacent(0, 1));
}

TEST_CASE("layer partition formula and boundaries") {
  std::vector<Vertex> vertices = {Vertex{0, 0}, Vertex{1, 0}, Vertex{2, 0},
                                  Vertex{3, 0}};
  CodingGraph g(std::move(vertices));
  const double cmax = 20.0;
  // slacks: user 0 on the maximum (0), user 1 inside layer 1 (0.6),
  // user 2 exactly on the layer-2 boundary (2.0), user 3 just past it
  const std::vector<double> completion = {20.0, 18.8, 16.0, 15.9};
  const std::vector<double> alpha = {0.5, 0.5, 0.5, 0.5};
  partition_layers(g, completion, alpha, cmax);
  CHECK(g.layer[0] == 1);
  CHECK(g.layer[1] == 1);
  CHECK(g.layer[2] == 2);  // the tie keeps the smaller layer index
  CHECK(g.layer[3] == 3);  // ceil(2.05) = 3
  CHECK(g.num_layers == 3);
}

TEST_CASE("vertex weights") {
  CHECK(vertex_weight_perfect(0.25) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(vertex_weight_limited(0.5, 1.0, 0.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // under certainty (pn = 1, pf = 0) the limited weight collapses to the
  // perfect one for every erasure level
  SplitMix64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const double e = rng.uniform(0.01, 0.99);
    CHECK(vertex_weight_limited(e, 1.0, 0.0) ==
          doctest::Approx(vertex_weight_perfect(e)).epsilon(1e-12));
  }

  // monotonicity: more reliable channels and likelier innovation weigh more
  CHECK(vertex_weight_perfect(0.1) > vertex_weight_perfect(0.2));
  CHECK(vertex_weight_limited(0.3, 0.9, 0.1) >
        vertex_weight_limited(0.3, 0.5, 0.1));
}

TEST_CASE("graph dump is stable") {
  GraphInput input;
  input.wants = {{0}, {0}};
  input.has = {{0}, {0}};
  const CodingGraph g = build_gidnc(input);
  CHECK(g.dump() == "0 (0,0): 1\n1 (1,0): 0\n");
}
