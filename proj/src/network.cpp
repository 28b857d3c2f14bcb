#include "entevolve/network.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace entevolve {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Dense: return "dense";
    case NodeKind::Delta: return "delta";
    case NodeKind::Cup: return "cup";
    case NodeKind::Cap: return "cap";
  }
  return "dense";
}

NetworkNode NetworkNode::dense(NodeId id, Tensor t) {
  return NetworkNode{id, NodeKind::Dense, std::move(t)};
}
NetworkNode NetworkNode::delta(NodeId id, std::size_t d) {
  return NetworkNode{id, NodeKind::Delta, make_delta(d)};
}
NetworkNode NetworkNode::cup(NodeId id, std::size_t d) {
  return NetworkNode{id, NodeKind::Cup, make_cup(d)};
}
NetworkNode NetworkNode::cap(NodeId id, std::size_t d) {
  return NetworkNode{id, NodeKind::Cap, make_cap(d)};
}

namespace {

std::string describe(LegRef l) {
  std::ostringstream os;
  os << "(" << l.node << "," << l.leg << ")";
  return os.str();
}

void check_wire_kind(const NetworkNode& n) {
  if (n.kind == NodeKind::Dense) return;
  const Tensor expected = n.kind == NodeKind::Delta ? make_delta(n.tensor.index(0).dim)
                          : n.kind == NodeKind::Cup ? make_cup(n.tensor.index(0).dim)
                                                    : make_cap(n.tensor.index(0).dim);
  if (n.tensor.rank() != 2 || n.tensor.dims() != expected.dims() ||
      n.tensor.index(0).variance != expected.index(0).variance ||
      n.tensor.index(1).variance != expected.index(1).variance) {
    std::ostringstream os;
    os << "node " << n.id << " tagged " << to_string(n.kind)
       << " does not have the matching wire shape";
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
}

}  // namespace

TensorNetworkGraph TensorNetworkGraph::build(std::vector<NetworkNode> nodes,
                                             std::vector<Edge> edges,
                                             std::vector<LegRef> open_legs) {
  if (nodes.empty()) {
    throw Error(ErrorCode::InvalidArgument, "network has no nodes");
  }
  TensorNetworkGraph g;
  std::sort(nodes.begin(), nodes.end(),
            [](const NetworkNode& x, const NetworkNode& y) { return x.id < y.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!g.position_.emplace(nodes[i].id, i).second) {
      throw Error(ErrorCode::DuplicateLeg,
                  "duplicate node id " + std::to_string(nodes[i].id));
    }
    check_wire_kind(nodes[i]);
  }
  g.nodes_ = std::move(nodes);

  std::map<LegRef, int> use;
  auto claim = [&](LegRef l) {
    if (!g.has_node(l.node) || l.leg >= g.node(l.node).leg_count()) {
      throw Error(ErrorCode::DanglingEdge, "leg " + describe(l) + " does not exist");
    }
    if (use[l]++ > 0) {
      throw Error(ErrorCode::DuplicateLeg, "leg " + describe(l) + " used twice");
    }
  };

  for (const auto& e : edges) {
    claim(e.a);
    claim(e.b);
    const IndexSpec& sa = g.leg_spec(e.a);
    const IndexSpec& sb = g.leg_spec(e.b);
    if (sa.dim != sb.dim) {
      std::ostringstream os;
      os << "edge " << describe(e.a) << "-" << describe(e.b) << " joins dims "
         << sa.dim << " and " << sb.dim;
      throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (sa.variance == sb.variance) {
      throw Error(ErrorCode::VarianceMismatch, "edge " + describe(e.a) + "-" +
                                                   describe(e.b) +
                                                   " joins equal variances");
    }
  }
  for (const auto& l : open_legs) claim(l);

  for (const auto& n : g.nodes_) {
    for (std::size_t leg = 0; leg < n.leg_count(); ++leg) {
      if (!use.contains(LegRef{n.id, leg})) {
        throw Error(ErrorCode::OpenLegMismatch,
                    "leg " + describe({n.id, leg}) +
                        " is neither in an edge nor in the open-leg list");
      }
    }
  }
  g.edges_ = std::move(edges);
  g.open_ = std::move(open_legs);
  return g;
}

bool TensorNetworkGraph::has_node(NodeId id) const {
  return position_.contains(id);
}

const NetworkNode& TensorNetworkGraph::node(NodeId id) const {
  auto it = position_.find(id);
  if (it == position_.end()) {
    throw Error(ErrorCode::DanglingEdge, "no node with id " + std::to_string(id));
  }
  return nodes_[it->second];
}

const IndexSpec& TensorNetworkGraph::leg_spec(LegRef leg) const {
  return node(leg.node).tensor.index(leg.leg);
}

std::optional<std::size_t> TensorNetworkGraph::edge_at(LegRef leg) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].a == leg || edges_[i].b == leg) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TensorNetworkGraph::open_position(LegRef leg) const {
  auto it = std::find(open_.begin(), open_.end(), leg);
  if (it == open_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - open_.begin());
}

std::vector<LegSignature> TensorNetworkGraph::signature() const {
  std::vector<LegSignature> sig;
  sig.reserve(open_.size());
  for (const auto& l : open_) {
    const auto& s = leg_spec(l);
    sig.push_back({s.dim, s.variance});
  }
  return sig;
}

NodeId TensorNetworkGraph::next_free_id() const {
  return nodes_.empty() ? 0 : nodes_.back().id + 1;
}

std::size_t TensorNetworkGraph::count_kind(NodeKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(),
      [kind](const NetworkNode& n) { return n.kind == kind; }));
}

// ---------------------------------------------------------------------------
// Contraction engine

namespace {

// Cluster bookkeeping shared by the planners and the evaluator.  Tensors are
// carried only when the engine evaluates; planners run it symbolically.
class ClusterEngine {
 public:
  ClusterEngine(const TensorNetworkGraph& g, bool with_tensors)
      : g_(g), consumed_(g.edges().size(), false) {
    for (const auto& n : g.nodes()) {
      Cluster c;
      c.min_id = n.id;
      for (std::size_t leg = 0; leg < n.leg_count(); ++leg) {
        c.legs.push_back({n.id, leg});
      }
      if (with_tensors) c.tensor = n.tensor;
      owner_[n.id] = clusters_.size();
      clusters_.push_back(std::move(c));
    }
  }

  bool consumed(std::size_t e) const { return consumed_[e]; }
  bool done() const {
    return std::all_of(consumed_.begin(), consumed_.end(), [](bool b) { return b; });
  }

  // Dimension product of the tensor the step would produce.
  double result_size(std::size_t e) const {
    const Edge& edge = g_.edges()[e];
    const std::size_t ca = owner_.at(edge.a.node);
    const std::size_t cb = owner_.at(edge.b.node);
    if (ca == cb) {
      const double d = static_cast<double>(g_.leg_spec(edge.a).dim);
      return size(ca) / (d * d);
    }
    const double shared = shared_product(ca, cb);
    return size(ca) * size(cb) / (shared * shared);
  }

  // Executes one step; returns its cost under the planner model.
  double step(std::size_t e) {
    if (e >= consumed_.size()) {
      throw Error(ErrorCode::IncompletePlan,
                  "plan step names edge " + std::to_string(e) + " which does not exist");
    }
    if (consumed_[e]) return 0.0;
    ++executed_;
    const Edge& edge = g_.edges()[e];
    std::size_t ca = owner_.at(edge.a.node);
    std::size_t cb = owner_.at(edge.b.node);

    if (ca == cb) {
      Cluster& c = clusters_[ca];
      const std::size_t pa = position(c, edge.a);
      const std::size_t pb = position(c, edge.b);
      const double d = static_cast<double>(g_.leg_spec(edge.a).dim);
      const double cost = size(ca) / d;
      if (c.tensor) {
        c.tensor = partial_trace(*c.tensor, {pa, pb});
        multiply_adds_ += cost;
      }
      c.legs.erase(c.legs.begin() + static_cast<std::ptrdiff_t>(std::max(pa, pb)));
      c.legs.erase(c.legs.begin() + static_cast<std::ptrdiff_t>(std::min(pa, pb)));
      consumed_[e] = true;
      return cost;
    }

    if (clusters_[cb].min_id < clusters_[ca].min_id) std::swap(ca, cb);
    Cluster& left = clusters_[ca];
    Cluster& right = clusters_[cb];

    std::vector<IndexPair> pairs;
    std::vector<bool> used_left(left.legs.size(), false);
    std::vector<bool> used_right(right.legs.size(), false);
    double shared = 1.0;
    for (std::size_t i = 0; i < consumed_.size(); ++i) {
      if (consumed_[i]) continue;
      const Edge& x = g_.edges()[i];
      const std::size_t oa = owner_.at(x.a.node);
      const std::size_t ob = owner_.at(x.b.node);
      LegRef lhs, rhs;
      if (oa == ca && ob == cb) {
        lhs = x.a;
        rhs = x.b;
      } else if (oa == cb && ob == ca) {
        lhs = x.b;
        rhs = x.a;
      } else {
        continue;
      }
      const std::size_t pl = position(left, lhs);
      const std::size_t pr = position(right, rhs);
      pairs.emplace_back(pl, pr);
      used_left[pl] = used_right[pr] = true;
      shared *= static_cast<double>(g_.leg_spec(lhs).dim);
      consumed_[i] = true;
    }

    const double cost = size(ca) * size(cb) / shared;
    if (left.tensor) {
      multiply_adds_ += contraction_cost(*left.tensor, *right.tensor, pairs);
      left.tensor = contract(*left.tensor, *right.tensor, pairs);
      right.tensor.reset();
    }
    std::vector<LegRef> legs;
    for (std::size_t i = 0; i < left.legs.size(); ++i) {
      if (!used_left[i]) legs.push_back(left.legs[i]);
    }
    for (std::size_t i = 0; i < right.legs.size(); ++i) {
      if (!used_right[i]) legs.push_back(right.legs[i]);
    }
    left.legs = std::move(legs);
    right.alive = false;
    for (auto& [id, owner] : owner_) {
      if (owner == cb) owner = ca;
    }
    return cost;
  }

  Evaluation finish() {
    if (!done()) {
      throw Error(ErrorCode::IncompletePlan, "plan leaves edges uncontracted");
    }
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
      if (clusters_[i].alive) alive.push_back(i);
    }
    std::sort(alive.begin(), alive.end(), [&](std::size_t x, std::size_t y) {
      return clusters_[x].min_id < clusters_[y].min_id;
    });

    Tensor value = *clusters_[alive.front()].tensor;
    std::vector<LegRef> legs = clusters_[alive.front()].legs;
    for (std::size_t k = 1; k < alive.size(); ++k) {
      const Cluster& c = clusters_[alive[k]];
      value = outer(value, *c.tensor);
      legs.insert(legs.end(), c.legs.begin(), c.legs.end());
    }

    std::vector<std::size_t> order;
    order.reserve(g_.open_legs().size());
    for (const auto& l : g_.open_legs()) {
      order.push_back(static_cast<std::size_t>(
          std::find(legs.begin(), legs.end(), l) - legs.begin()));
    }
    return Evaluation{permute(value, order), multiply_adds_, executed_};
  }

 private:
  struct Cluster {
    NodeId min_id = 0;
    std::vector<LegRef> legs;
    std::optional<Tensor> tensor;
    bool alive = true;
  };

  double size(std::size_t c) const {
    double s = 1.0;
    for (const auto& l : clusters_[c].legs) s *= static_cast<double>(g_.leg_spec(l).dim);
    return s;
  }

  double shared_product(std::size_t ca, std::size_t cb) const {
    double shared = 1.0;
    for (std::size_t i = 0; i < consumed_.size(); ++i) {
      if (consumed_[i]) continue;
      const Edge& x = g_.edges()[i];
      const std::size_t oa = owner_.at(x.a.node);
      const std::size_t ob = owner_.at(x.b.node);
      if ((oa == ca && ob == cb) || (oa == cb && ob == ca)) {
        shared *= static_cast<double>(g_.leg_spec(x.a).dim);
      }
    }
    return shared;
  }

  static std::size_t position(const Cluster& c, LegRef l) {
    return static_cast<std::size_t>(std::find(c.legs.begin(), c.legs.end(), l) -
                                    c.legs.begin());
  }

  const TensorNetworkGraph& g_;
  std::vector<Cluster> clusters_;
  std::map<NodeId, std::size_t> owner_;
  std::vector<bool> consumed_;
  double multiply_adds_ = 0.0;
  std::size_t executed_ = 0;
};

bool edge_key_less(const TensorNetworkGraph& g, std::size_t x, std::size_t y) {
  const Edge& ex = g.edges()[x];
  const Edge& ey = g.edges()[y];
  if (ex.first() != ey.first()) return ex.first() < ey.first();
  return ex.second() < ey.second();
}

}  // namespace

Evaluation evaluate_counted(const TensorNetworkGraph& g,
                            const std::optional<ContractionPlan>& plan) {
  const ContractionPlan chosen = plan ? *plan : plan_greedy(g);
  ClusterEngine engine(g, true);
  for (auto e : chosen.steps) engine.step(e);
  return engine.finish();
}

Tensor evaluate(const TensorNetworkGraph& g,
                const std::optional<ContractionPlan>& plan) {
  return evaluate_counted(g, plan).tensor;
}

double plan_cost(const TensorNetworkGraph& g, const std::vector<std::size_t>& steps) {
  ClusterEngine engine(g, false);
  double cost = 0.0;
  for (auto e : steps) cost += engine.step(e);
  return cost;
}

ContractionPlan plan_greedy(const TensorNetworkGraph& g) {
  ClusterEngine engine(g, false);
  ContractionPlan plan;
  while (!engine.done()) {
    std::optional<std::size_t> best;
    double best_size = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      if (engine.consumed(e)) continue;
      const double s = engine.result_size(e);
      if (!best || s < best_size || (s == best_size && edge_key_less(g, e, *best))) {
        best = e;
        best_size = s;
      }
    }
    plan.estimated_cost += engine.step(*best);
    plan.steps.push_back(*best);
  }
  return plan;
}

ContractionPlan plan_exhaustive(const TensorNetworkGraph& g) {
  const std::size_t n_edges = g.edges().size();
  if (n_edges > kExhaustiveEdgeLimit) {
    throw Error(ErrorCode::GraphTooLarge,
                "exhaustive planning refused: " + std::to_string(n_edges) +
                    " edges exceeds the limit of " +
                    std::to_string(kExhaustiveEdgeLimit));
  }
  // The consumed-edge set determines the cluster structure, so the search
  // over all edge orders collapses to a search over subsets.
  const std::uint32_t full = (1u << n_edges) - 1u;
  struct Entry {
    double cost = -1.0;
    std::size_t step = 0;
    std::uint32_t next = 0;
  };
  std::vector<Entry> memo(std::size_t{1} << n_edges);

  auto replay = [&](std::uint32_t mask) {
    ClusterEngine engine(g, false);
    // Replaying edges in index order reproduces the same clusters.
    for (std::size_t e = 0; e < n_edges; ++e) {
      if ((mask >> e) & 1u) engine.step(e);
    }
    return engine;
  };

  auto solve = [&](auto&& self, std::uint32_t mask) -> double {
    if (mask == full) return 0.0;
    Entry& slot = memo[mask];
    if (slot.cost >= 0.0) return slot.cost;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_step = 0;
    std::uint32_t best_next = 0;
    for (std::size_t e = 0; e < n_edges; ++e) {
      if ((mask >> e) & 1u) continue;
      ClusterEngine engine = replay(mask);
      const double cost = engine.step(e);
      std::uint32_t next = 0;
      for (std::size_t i = 0; i < n_edges; ++i) {
        if (engine.consumed(i)) next |= 1u << i;
      }
      const double total = cost + self(self, next);
      if (total < best) {
        best = total;
        best_step = e;
        best_next = next;
      }
    }
    memo[mask] = Entry{best, best_step, best_next};
    return best;
  };

  ContractionPlan plan;
  plan.estimated_cost = solve(solve, 0u);
  for (std::uint32_t mask = 0; mask != full;) {
    plan.steps.push_back(memo[mask].step);
    mask = memo[mask].next;
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Rewrites

namespace {

// Mutable working copy used while rewriting.
struct Workspace {
  std::vector<NetworkNode> nodes;
  std::vector<Edge> edges;
  std::vector<LegRef> open;

  explicit Workspace(const TensorNetworkGraph& g)
      : nodes(g.nodes()), edges(g.edges()), open(g.open_legs()) {}

  NetworkNode* find(NodeId id) {
    for (auto& n : nodes) {
      if (n.id == id) return &n;
    }
    return nullptr;
  }

  NodeId fresh_id() const {
    NodeId m = 0;
    for (const auto& n : nodes) m = std::max(m, n.id + 1);
    return m;
  }

  std::optional<std::size_t> edge_at(LegRef l) const {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].a == l || edges[i].b == l) return i;
    }
    return std::nullopt;
  }

  static LegRef other_end(const Edge& e, LegRef l) { return e.a == l ? e.b : e.a; }

  std::vector<LegSignature> signature() {
    std::vector<LegSignature> sig;
    for (const auto& l : open) {
      const auto& s = find(l.node)->tensor.index(l.leg);
      sig.push_back({s.dim, s.variance});
    }
    return sig;
  }

  // Points whatever referenced `from` (edge endpoint or open slot) at `to`.
  void redirect(LegRef from, LegRef to) {
    for (auto& e : edges) {
      if (e.a == from) e.a = to;
      if (e.b == from) e.b = to;
    }
    for (auto& l : open) {
      if (l == from) l = to;
    }
  }

  void erase_edges(std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end(), std::greater<>());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (auto i : idx) edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(i));
  }

  void erase_node(NodeId id) {
    std::erase_if(nodes, [id](const NetworkNode& n) { return n.id == id; });
  }
};

bool is_wire(NodeKind k) { return k != NodeKind::Dense; }

// One snake rewrite; false when no rule applies.
bool snake_step(Workspace& w, RewriteEvent& ev) {
  std::vector<NodeId> order;
  for (const auto& n : w.nodes) {
    if (is_wire(n.kind)) order.push_back(n.id);
  }
  std::sort(order.begin(), order.end());

  for (NodeId id : order) {
    const NetworkNode node = *w.find(id);
    const std::size_t d = node.tensor.index(0).dim;
    const auto e0 = w.edge_at({id, 0});
    const auto e1 = w.edge_at({id, 1});

    if (node.kind == NodeKind::Delta) {
      if (!e0 && !e1) continue;
      ev.nodes = {id};
      if (e0 && e1 && *e0 == *e1) {
        // Closed loop: the traced identity is the scalar d.
        const NodeId s = w.fresh_id();
        ev.rule = "delta-loop";
        ev.edges = {*e0};
        ev.nodes.push_back(s);
        w.erase_edges({*e0});
        w.erase_node(id);
        w.nodes.push_back(NetworkNode::dense(s, Tensor::scalar(static_cast<double>(d))));
        return true;
      }
      ev.rule = "delta-elimination";
      if (e0 && e1) {
        const LegRef x = Workspace::other_end(w.edges[*e0], {id, 0});
        const LegRef y = Workspace::other_end(w.edges[*e1], {id, 1});
        ev.edges = {*e0, *e1};
        w.erase_edges({*e0, *e1});
        w.edges.push_back({x, y});
      } else {
        const std::size_t joined = e0 ? 0 : 1;
        const std::size_t e = e0 ? *e0 : *e1;
        const LegRef x = Workspace::other_end(w.edges[e], {id, joined});
        ev.edges = {e};
        w.erase_edges({e});
        w.redirect({id, 1 - joined}, x);
      }
      w.erase_node(id);
      return true;
    }

    // Cup or cap: look for the opposite wire on either leg.
    const NodeKind partner_kind =
        node.kind == NodeKind::Cup ? NodeKind::Cap : NodeKind::Cup;
    for (std::size_t leg = 0; leg < 2; ++leg) {
      const auto e = leg == 0 ? e0 : e1;
      if (!e) continue;
      const LegRef far = Workspace::other_end(w.edges[*e], {id, leg});
      const NetworkNode* partner = w.find(far.node);
      if (partner->kind != partner_kind || far.node == id) continue;

      const NodeId cup_id = node.kind == NodeKind::Cup ? id : far.node;
      const NodeId cap_id = node.kind == NodeKind::Cup ? far.node : id;
      const LegRef cup_free{cup_id, node.kind == NodeKind::Cup ? 1 - leg : 1 - far.leg};
      const LegRef cap_free{cap_id, node.kind == NodeKind::Cup ? 1 - far.leg : 1 - leg};
      ev.nodes = {std::min(cup_id, cap_id), std::max(cup_id, cap_id)};

      const auto loop = w.edge_at(cup_free);
      if (loop && Workspace::other_end(w.edges[*loop], cup_free) == cap_free) {
        const NodeId s = w.fresh_id();
        ev.rule = "snake-loop";
        ev.edges = {*e, *loop};
        ev.nodes.push_back(s);
        w.erase_edges({*e, *loop});
        w.erase_node(cup_id);
        w.erase_node(cap_id);
        w.nodes.push_back(NetworkNode::dense(s, Tensor::scalar(static_cast<double>(d))));
        return true;
      }

      // Zig-zag: cap and cup joined on one leg collapse to an identity
      // wire.  The delta's Down leg continues the cap, its Up leg the cup.
      const NodeId wire_id = w.fresh_id();
      ev.rule = "snake";
      ev.edges = {*e};
      ev.nodes.push_back(wire_id);
      w.erase_edges({*e});
      w.nodes.push_back(NetworkNode::delta(wire_id, d));
      w.redirect(cap_free, {wire_id, 0});
      w.redirect(cup_free, {wire_id, 1});
      w.erase_node(cup_id);
      w.erase_node(cap_id);
      return true;
    }
  }
  return false;
}

}  // namespace

RewriteResult rewrite_snake(const TensorNetworkGraph& g) {
  Workspace w(g);
  std::vector<RewriteEvent> events;
  for (;;) {
    RewriteEvent ev;
    ev.before = w.signature();
    if (!snake_step(w, ev)) break;
    ev.after = w.signature();
    events.push_back(std::move(ev));
  }
  if (events.empty()) return RewriteResult{g, {}};
  return RewriteResult{
      TensorNetworkGraph::build(std::move(w.nodes), std::move(w.edges), std::move(w.open)),
      std::move(events)};
}

DualityResult apply_map_state_duality(const TensorNetworkGraph& g, NodeId node_id,
                                      std::size_t leg) {
  const NetworkNode& node = g.node(node_id);
  if (node.leg_count() != 2) {
    throw Error(ErrorCode::NotStateLike,
                "map-state duality needs a valence-2 node; node " +
                    std::to_string(node_id) + " has " +
                    std::to_string(node.leg_count()) + " legs");
  }
  if (leg >= 2 || !g.open_position({node_id, leg})) {
    throw Error(ErrorCode::LegNotOpen, "leg " + std::to_string(leg) + " of node " +
                                           std::to_string(node_id) + " is not open");
  }

  Workspace w(g);
  RewriteEvent ev;
  ev.rule = "map-state-duality";
  ev.before = w.signature();

  const IndexSpec spec = node.tensor.index(leg);
  const NodeId wire_id = w.fresh_id();
  NetworkNode* target = w.find(node_id);
  target->kind = NodeKind::Dense;
  target->tensor = bend(node.tensor, leg);

  NetworkNode wire = spec.variance == Variance::Down ? NetworkNode::cap(wire_id, spec.dim)
                                                     : NetworkNode::cup(wire_id, spec.dim);
  w.nodes.push_back(std::move(wire));
  w.redirect({node_id, leg}, {wire_id, 1});
  w.edges.push_back({{node_id, leg}, {wire_id, 0}});

  ev.nodes = {node_id, wire_id};
  ev.edges = {w.edges.size() - 1};
  ev.after = w.signature();
  auto graph =
      TensorNetworkGraph::build(std::move(w.nodes), std::move(w.edges), std::move(w.open));
  return DualityResult{std::move(graph), std::move(ev)};
}

}  // namespace entevolve
