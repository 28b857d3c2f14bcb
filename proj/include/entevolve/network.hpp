#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entevolve/tensor.hpp"

namespace entevolve {

// Wire tensors are tagged at construction so rewrite rules match on the tag
// and never on numeric content.
enum class NodeKind { Dense, Delta, Cup, Cap };

std::string_view to_string(NodeKind kind);

using NodeId = int;

struct LegRef {
  NodeId node = 0;
  std::size_t leg = 0;

  friend auto operator<=>(const LegRef&, const LegRef&) = default;
};

struct Edge {
  LegRef a;
  LegRef b;

  // Endpoints ordered so that first() <= second().
  LegRef first() const { return a < b ? a : b; }
  LegRef second() const { return a < b ? b : a; }
  bool is_self_loop() const { return a.node == b.node; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct NetworkNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Dense;
  Tensor tensor;

  std::size_t leg_count() const { return tensor.rank(); }

  static NetworkNode dense(NodeId id, Tensor t);
  static NetworkNode delta(NodeId id, std::size_t d);
  static NetworkNode cup(NodeId id, std::size_t d);
  static NetworkNode cap(NodeId id, std::size_t d);
};

struct LegSignature {
  std::size_t dim;
  Variance variance;
  friend bool operator==(const LegSignature&, const LegSignature&) = default;
};

/// A validated tensor network.
///
/// Every leg of every node is either in exactly one edge or listed exactly
/// once in the open-leg order.  Edge endpoints carry equal dimension and
/// opposite variance.  The open-leg order is the index order of the
/// evaluated tensor and is kept stable by every rewrite.
class TensorNetworkGraph {
 public:
  static TensorNetworkGraph build(std::vector<NetworkNode> nodes,
                                  std::vector<Edge> edges,
                                  std::vector<LegRef> open_legs);

  // Nodes sorted by id.
  const std::vector<NetworkNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<LegRef>& open_legs() const { return open_; }

  const NetworkNode& node(NodeId id) const;
  bool has_node(NodeId id) const;
  const IndexSpec& leg_spec(LegRef leg) const;
  // Edge index touching the leg, if any.
  std::optional<std::size_t> edge_at(LegRef leg) const;
  std::optional<std::size_t> open_position(LegRef leg) const;

  std::vector<LegSignature> signature() const;
  NodeId next_free_id() const;
  std::size_t count_kind(NodeKind kind) const;

 private:
  std::vector<NetworkNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<LegRef> open_;
  std::map<NodeId, std::size_t> position_;
};

struct ContractionPlan {
  // Edge indices into TensorNetworkGraph::edges().  A step joins the two
  // clusters holding its endpoints over every edge running between them,
  // or traces the edge when both endpoints already share a cluster.  A step
  // naming an edge already absorbed by an earlier join is a no-op.
  std::vector<std::size_t> steps;
  double estimated_cost = 0.0;
};

struct Evaluation {
  Tensor tensor;
  // Multiply-adds performed by the contraction kernels.
  double multiply_adds = 0.0;
  std::size_t executed_steps = 0;
};

/// Evaluates with the given plan, or the greedy plan when none is given.
Tensor evaluate(const TensorNetworkGraph& g,
                const std::optional<ContractionPlan>& plan = std::nullopt);
Evaluation evaluate_counted(const TensorNetworkGraph& g,
                            const std::optional<ContractionPlan>& plan =
                                std::nullopt);

// Estimated cost of executing `steps` on g under the planner cost model.
double plan_cost(const TensorNetworkGraph& g,
                 const std::vector<std::size_t>& steps);

ContractionPlan plan_greedy(const TensorNetworkGraph& g);

inline constexpr std::size_t kExhaustiveEdgeLimit = 12;
ContractionPlan plan_exhaustive(const TensorNetworkGraph& g);

struct RewriteEvent {
  std::string rule;
  std::vector<NodeId> nodes;
  std::vector<std::size_t> edges;
  std::vector<LegSignature> before;
  std::vector<LegSignature> after;
};

struct RewriteResult {
  TensorNetworkGraph graph;
  std::vector<RewriteEvent> events;
};

/// Removes every delta node on an edge and every cup/cap pair joined by a
/// wire, leaving the network's value exactly unchanged.
RewriteResult rewrite_snake(const TensorNetworkGraph& g);

struct DualityResult {
  TensorNetworkGraph graph;
  RewriteEvent event;
};

/// Bends the open leg of a valence-2 node through an explicit wire tensor:
/// the node becomes its bent (matrix) form with that leg joined to a new
/// cap (or cup) whose free leg takes over the open slot.
DualityResult apply_map_state_duality(const TensorNetworkGraph& g, NodeId node,
                                      std::size_t leg);

}  // namespace entevolve
