#include <chrono>

#include "doctest.h"
#include "support.hpp"

using namespace entevolve;
using testing::random_tensor;

namespace {

IndexSpec up(std::size_t d) { return {d, Variance::Up}; }
IndexSpec down(std::size_t d) { return {d, Variance::Down}; }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Format;
}

// M_1 ... M_n as (Down, Up) matrices with dims[k] x dims[k+1].
TensorNetworkGraph chain(const std::vector<std::size_t>& dims, Rng& rng) {
  std::vector<NetworkNode> nodes;
  std::vector<Edge> edges;
  const std::size_t n = dims.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    nodes.push_back(NetworkNode::dense(static_cast<NodeId>(k),
                                       random_tensor({down(dims[k]), up(dims[k + 1])}, rng)));
    if (k > 0) edges.push_back({{static_cast<NodeId>(k - 1), 1}, {static_cast<NodeId>(k), 0}});
  }
  return TensorNetworkGraph::build(std::move(nodes), std::move(edges),
                                   {{0, 0}, {static_cast<NodeId>(n - 1), 1}});
}

bool wires_normalized(const TensorNetworkGraph& g) {
  for (const auto& n : g.nodes()) {
    if (n.kind == NodeKind::Dense) continue;
    for (std::size_t leg = 0; leg < 2; ++leg) {
      const auto e = g.edge_at({n.id, leg});
      if (!e) continue;
      if (n.kind == NodeKind::Delta) return false;
      const Edge& edge = g.edges()[*e];
      const LegRef other = edge.a.node == n.id ? edge.b : edge.a;
      const NodeKind ok = g.node(other.node).kind;
      if ((n.kind == NodeKind::Cup && ok == NodeKind::Cap) ||
          (n.kind == NodeKind::Cap && ok == NodeKind::Cup)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("build validates legs, dims and variance") {
  Rng rng(1);
  const auto a = NetworkNode::dense(0, random_tensor({down(2), up(3)}, rng));
  const auto b = NetworkNode::dense(1, random_tensor({down(3), up(2)}, rng));
  const auto c = NetworkNode::dense(2, random_tensor({down(2)}, rng));
  CHECK_NOTHROW(TensorNetworkGraph::build({a, b}, {{{0, 1}, {1, 0}}}, {{0, 0}, {1, 1}}));
  CHECK(code_of([&] {
          TensorNetworkGraph::build({a, b}, {{{0, 1}, {7, 0}}}, {{0, 0}, {1, 0}, {1, 1}});
        }) == ErrorCode::DanglingEdge);
  CHECK(code_of([&] {
          TensorNetworkGraph::build({a, b}, {{{0, 0}, {1, 0}}}, {{0, 1}, {1, 1}});
        }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] {
          TensorNetworkGraph::build({a, c}, {{{0, 0}, {2, 0}}}, {{0, 1}});
        }) == ErrorCode::VarianceMismatch);
  CHECK(code_of([&] {
          TensorNetworkGraph::build({a, b}, {{{0, 1}, {1, 0}}}, {{0, 0}, {0, 0}, {1, 1}});
        }) == ErrorCode::DuplicateLeg);
  CHECK(code_of([&] {
          TensorNetworkGraph::build({a, b}, {{{0, 1}, {1, 0}}}, {{0, 0}});
        }) == ErrorCode::OpenLegMismatch);
  CHECK(code_of([&] { TensorNetworkGraph::build({}, {}, {}); }) == ErrorCode::InvalidArgument);
  NetworkNode fake = NetworkNode::dense(3, random_tensor({down(2), down(2)}, rng));
  fake.kind = NodeKind::Cup;
  CHECK(code_of([&] { TensorNetworkGraph::build({fake}, {}, {{3, 0}, {3, 1}}); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("single node without edges evaluates to its tensor") {
  Rng rng(2);
  const Tensor t = random_tensor({down(2), up(3), down(2)}, rng);
  const auto g = TensorNetworkGraph::build({NetworkNode::dense(4, t)}, {},
                                           {{4, 0}, {4, 1}, {4, 2}});
  CHECK(evaluate(g) == t);
  // Open-leg order permutes the result.
  const auto h = TensorNetworkGraph::build({NetworkNode::dense(4, t)}, {},
                                           {{4, 2}, {4, 0}, {4, 1}});
  CHECK(evaluate(h) == permute(t, {2, 0, 1}));
}

TEST_CASE("closed delta loop is the scalar d") {
  for (std::size_t d = 1; d <= 6; ++d) {
    const auto g =
        TensorNetworkGraph::build({NetworkNode::delta(0, d)}, {{{0, 0}, {0, 1}}}, {});
    const Tensor v = evaluate(g);
    CHECK(v.is_scalar());
    CHECK(v.scalar_value() == complex(static_cast<double>(d)));
  }
}

TEST_CASE("reduced density operator network matches partial trace") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t da = 1 + rng.below(4), db = 1 + rng.below(4);
    const Tensor psi = random_tensor({down(da), down(db)}, rng);
    const Tensor bra = bend(bend(conjugate(psi), 0), 1);
    const auto g = TensorNetworkGraph::build(
        {NetworkNode::dense(0, psi), NetworkNode::dense(1, bra)}, {{{0, 1}, {1, 1}}},
        {{0, 0}, {1, 0}});
    CHECK(g.open_legs().size() == 2);
    const Tensor expect = partial_trace(outer(psi, bra), {1, 3});
    CHECK(relative_diff(evaluate(g), expect) <= 1e-13);
  }
}

TEST_CASE("gamma network equals the triple-loop oracle") {
  Rng rng(4);
  const std::size_t di = 3, dj = 2, dk = 4, dl = 2, dm = 3;
  const Tensor t = random_tensor({up(di), down(dj), down(dk)}, rng, true);
  const Tensor a = random_tensor({up(dj), down(dl)}, rng, true);
  const Tensor b = random_tensor({up(dk), down(dm)}, rng, true);
  const auto g = TensorNetworkGraph::build(
      {NetworkNode::dense(0, t), NetworkNode::dense(1, a), NetworkNode::dense(2, b)},
      {{{0, 1}, {1, 0}}, {{0, 2}, {2, 0}}}, {{0, 0}, {1, 1}, {2, 1}});
  for (const auto& plan : {plan_greedy(g), plan_exhaustive(g)}) {
    const Tensor gamma = evaluate(g, plan);
    for (std::size_t i = 0; i < di; ++i)
      for (std::size_t l = 0; l < dl; ++l)
        for (std::size_t m = 0; m < dm; ++m) {
          complex acc{};
          for (std::size_t j = 0; j < dj; ++j)
            for (std::size_t k = 0; k < dk; ++k)
              acc += t.at({i, j, k}) * a.at({j, l}) * b.at({k, m});
          CHECK(gamma.at({i, l, m}) == acc);
        }
  }
}

TEST_CASE("evaluation matches brute-force summation on random graphs") {
  testing::GraphSpec spec;
  spec.max_nodes = 5;
  spec.max_edges = 6;
  spec.max_open = 2;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto g = testing::random_graph(seed, spec);
    const auto expect = testing::naive_network(g);
    const Tensor got = evaluate(g);
    CHECK(got.rank() == g.open_legs().size());
    CHECK(testing::rel_diff(expect, got.data()) <= 1e-12);
  }
}

TEST_CASE("greedy and exhaustive plans agree") {
  testing::GraphSpec spec;
  spec.max_nodes = 8;
  spec.max_edges = 12;
  spec.max_dim = 3;
  for (std::uint64_t seed = 100; seed < 300; ++seed) {
    const auto g = testing::random_graph(seed, spec);
    REQUIRE(g.edges().size() <= kExhaustiveEdgeLimit);
    const auto pg = plan_greedy(g);
    const auto pe = plan_exhaustive(g);
    CHECK(pe.estimated_cost <= pg.estimated_cost);
    CHECK(plan_cost(g, pg.steps) == doctest::Approx(pg.estimated_cost));
    CHECK(plan_cost(g, pe.steps) == doctest::Approx(pe.estimated_cost));
    CHECK(relative_diff(evaluate(g, pg), evaluate(g, pe)) <= 1e-10);
  }
}

TEST_CASE("greedy contracts a square chain left to right") {
  Rng rng(5);
  for (std::size_t n = 2; n <= 6; ++n) {
    const std::size_t d = 3;
    const auto g = chain(std::vector<std::size_t>(n + 1, d), rng);
    const auto plan = plan_greedy(g);
    std::vector<std::size_t> expect(n - 1);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(plan.steps == expect);
    CHECK(plan.estimated_cost == doctest::Approx(static_cast<double>((n - 1) * d * d * d)));
  }
}

TEST_CASE("single edge and two-node graphs") {
  Rng rng(6);
  const auto g = chain({2, 3, 4}, rng);
  CHECK(plan_greedy(g).steps == std::vector<std::size_t>{0});
  CHECK(plan_exhaustive(g).steps == plan_greedy(g).steps);
  CHECK(plan_exhaustive(g).estimated_cost == plan_greedy(g).estimated_cost);
}

TEST_CASE("star graph: greedy absorbs small spokes first") {
  Rng rng(7);
  // Hub with legs of dims 5, 2, 4, 3; each spoke is a vector.
  const std::vector<std::size_t> dims{5, 2, 4, 3};
  std::vector<IndexSpec> hub_idx;
  for (auto d : dims) hub_idx.push_back(down(d));
  std::vector<NetworkNode> nodes{NetworkNode::dense(0, random_tensor(hub_idx, rng))};
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const NodeId id = static_cast<NodeId>(k + 1);
    nodes.push_back(NetworkNode::dense(id, random_tensor({up(dims[k])}, rng)));
    edges.push_back({{0, k}, {id, 0}});
  }
  const auto g = TensorNetworkGraph::build(nodes, edges, {});
  const auto plan = plan_greedy(g);
  // Largest spoke first shrinks the hub most; the plan is monotone in cost.
  CHECK(plan.steps == std::vector<std::size_t>{0, 2, 3, 1});
  std::vector<std::size_t> naive{0, 1, 2, 3};
  CHECK(plan.estimated_cost <= plan_cost(g, naive));
  std::vector<std::size_t> worst{1, 3, 2, 0};
  CHECK(plan.estimated_cost < plan_cost(g, worst));
  CHECK(relative_diff(evaluate(g, plan), evaluate(g, ContractionPlan{worst, 0.0})) <= 1e-12);
}

TEST_CASE("a chain where greedy is strictly beaten by exhaustive") {
  // Search small four-matrix chains for one where the locally smallest
  // result is the wrong first move.
  Rng rng(8);
  bool found = false;
  for (int attempt = 0; attempt < 2000 && !found; ++attempt) {
    std::vector<std::size_t> dims(5);
    for (auto& d : dims) d = 1 + rng.below(9);
    const auto g = chain(dims, rng);
    const auto pg = plan_greedy(g);
    const auto pe = plan_exhaustive(g);
    CHECK(pe.estimated_cost <= pg.estimated_cost);
    if (pe.estimated_cost < pg.estimated_cost) {
      found = true;
      CHECK(relative_diff(evaluate(g, pg), evaluate(g, pe)) <= 1e-10);
      MESSAGE("greedy " << pg.estimated_cost << " vs exhaustive " << pe.estimated_cost);
    }
  }
  CHECK(found);
}

TEST_CASE("plan guards") {
  Rng rng(9);
  const auto big = chain(std::vector<std::size_t>(15, 2), rng);  // 13 edges
  CHECK(code_of([&] { plan_exhaustive(big); }) == ErrorCode::GraphTooLarge);
  CHECK_NOTHROW(plan_greedy(big));
  const auto g = chain({2, 2, 2, 2}, rng);
  CHECK(code_of([&] { evaluate(g, ContractionPlan{{0}, 0.0}); }) == ErrorCode::IncompletePlan);
  CHECK(code_of([&] { evaluate(g, ContractionPlan{{0, 9}, 0.0}); }) ==
        ErrorCode::IncompletePlan);
  // Repeating a consumed edge is a no-op.
  CHECK(relative_diff(evaluate(g, ContractionPlan{{0, 0, 1}, 0.0}), evaluate(g)) == 0.0);
}

TEST_CASE("estimated cost tracks multiply-adds on chains") {
  Rng rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::size_t> dims(2 + rng.below(6));
    for (auto& d : dims) d = 1 + rng.below(6);
    const auto g = chain(dims, rng);
    const auto plan = plan_greedy(g);
    const Evaluation ev = evaluate_counted(g, plan);
    CHECK(ev.multiply_adds <= 2.0 * plan.estimated_cost);
    CHECK(plan.estimated_cost <= 2.0 * ev.multiply_adds);
  }
}

TEST_CASE("disconnected components multiply out in node-id order") {
  Rng rng(11);
  const Tensor a = random_tensor({down(2)}, rng);
  const Tensor b = random_tensor({up(3)}, rng);
  const auto g = TensorNetworkGraph::build(
      {NetworkNode::dense(5, b), NetworkNode::dense(2, a)}, {}, {{5, 0}, {2, 0}});
  CHECK(evaluate(g) == permute(outer(a, b), {1, 0}));
}

TEST_CASE("snake chain rewrites to a single wire") {
  for (std::size_t d = 1; d <= 5; ++d) {
    const auto g = TensorNetworkGraph::build({NetworkNode::cap(0, d), NetworkNode::cup(1, d)},
                                             {{{0, 1}, {1, 0}}}, {{0, 0}, {1, 1}});
    const auto r = rewrite_snake(g);
    REQUIRE(r.graph.nodes().size() == 1);
    CHECK(r.graph.nodes().front().kind == NodeKind::Delta);
    CHECK(r.graph.edges().empty());
    CHECK(evaluate(r.graph) == make_delta(d));
    CHECK(evaluate(g) == make_delta(d));
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].rule == "snake");
    CHECK(r.events[0].before == r.events[0].after);
  }
}

TEST_CASE("networks without wire nodes are left alone") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = testing::random_graph(seed, {});
    const auto r = rewrite_snake(g);
    CHECK(r.events.empty());
    CHECK(r.graph.edges() == g.edges());
    CHECK(r.graph.open_legs() == g.open_legs());
  }
}

TEST_CASE("rewrite soundness with injected wires") {
  testing::GraphSpec spec;
  spec.max_nodes = 4;
  spec.max_edges = 5;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto base = testing::random_graph(seed, spec);
    const auto g = testing::inject_wires(base, seed + 1000, 1 + seed % 4);
    const std::size_t wires = g.count_kind(NodeKind::Delta) + g.count_kind(NodeKind::Cup) +
                              g.count_kind(NodeKind::Cap);
    const auto r = rewrite_snake(g);
    CHECK(r.graph.signature() == g.signature());
    CHECK(r.events.size() <= wires);
    CHECK(wires_normalized(r.graph));
    for (const auto& ev : r.events) CHECK(ev.before == ev.after);
    CHECK(relative_diff(evaluate(r.graph), evaluate(g)) <= 1e-12);
    // Rewriting is idempotent.
    CHECK(rewrite_snake(r.graph).events.empty());
  }
}

TEST_CASE("map-state duality keeps the value") {
  Rng rng(12);
  for (std::size_t d = 1; d <= 6; ++d) {
    const Tensor psi = random_tensor({down(d), down(d)}, rng);
    const auto g = TensorNetworkGraph::build({NetworkNode::dense(0, psi)}, {}, {{0, 0}, {0, 1}});
    const auto dual = apply_map_state_duality(g, 0, 1);
    CHECK(dual.graph.count_kind(NodeKind::Cap) == 1);
    CHECK(dual.graph.node(0).tensor == bend(psi, 1));
    CHECK(dual.event.before == dual.event.after);
    CHECK(evaluate(dual.graph) == psi);
    // Bending back through rewrite_snake restores a plain state network.
    const auto again = apply_map_state_duality(dual.graph, 0, 0);
    CHECK(evaluate(again.graph) == psi);
  }
}

TEST_CASE("duality on a Bell node gives a scaled identity") {
  const std::size_t d = 3;
  const Tensor bell = scale(make_cap(d), 1.0 / std::sqrt(3.0));
  const auto g = TensorNetworkGraph::build({NetworkNode::dense(0, bell)}, {}, {{0, 0}, {0, 1}});
  const auto dual = apply_map_state_duality(g, 0, 1);
  CHECK(relative_diff(dual.graph.node(0).tensor, scale(make_delta(d), 1.0 / std::sqrt(3.0))) ==
        0.0);
}

TEST_CASE("duality preconditions") {
  Rng rng(13);
  const auto g = TensorNetworkGraph::build(
      {NetworkNode::dense(0, random_tensor({down(2), down(2)}, rng)),
       NetworkNode::dense(1, random_tensor({up(2)}, rng)),
       NetworkNode::dense(2, random_tensor({down(2), down(2), down(2)}, rng))},
      {{{0, 1}, {1, 0}}}, {{0, 0}, {2, 0}, {2, 1}, {2, 2}});
  CHECK(code_of([&] { apply_map_state_duality(g, 0, 1); }) == ErrorCode::LegNotOpen);
  CHECK(code_of([&] { apply_map_state_duality(g, 2, 0); }) == ErrorCode::NotStateLike);
  CHECK(code_of([&] { apply_map_state_duality(g, 9, 0); }) == ErrorCode::DanglingEdge);
}
