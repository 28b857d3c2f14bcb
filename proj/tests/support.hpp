// Shared fixtures and brute-force oracles for the test binaries.  Nothing
// here calls the contraction kernels under test.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "entevolve/network.hpp"
#include "entevolve/quantum.hpp"
#include "entevolve/random.hpp"
#include "entevolve/tensor.hpp"

namespace testing {

using namespace entevolve;

inline std::vector<complex> random_data(std::size_t n, Rng& rng, bool integer = false) {
  std::vector<complex> v(n);
  for (auto& z : v) {
    if (integer) {
      z = {static_cast<double>(static_cast<int>(rng.below(7)) - 3),
           static_cast<double>(static_cast<int>(rng.below(7)) - 3)};
    } else {
      // Entries of modulus <= 1.
      const double r = rng.uniform();
      const double t = 2.0 * 3.14159265358979323846 * rng.uniform();
      z = std::polar(r, t);
    }
  }
  return v;
}

inline std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline Tensor random_tensor(std::vector<IndexSpec> idx, Rng& rng, bool integer = false) {
  std::size_t n = 1;
  for (const auto& s : idx) n *= s.dim;
  return Tensor(std::move(idx), random_data(n, rng, integer));
}

// Row-major odometer over `dims`.
inline bool next_multi(std::vector<std::size_t>& m, const std::vector<std::size_t>& dims) {
  for (std::size_t i = m.size(); i-- > 0;) {
    if (++m[i] < dims[i]) return true;
    m[i] = 0;
  }
  return false;
}

/// Contraction by enumerating every index of a and b; entries whose paired
/// indices differ are skipped.
inline std::vector<complex> naive_contract(const Tensor& a, const Tensor& b,
                                           const std::vector<IndexPair>& pairs,
                                           std::vector<std::size_t>* out_dims = nullptr) {
  std::vector<bool> a_used(a.rank()), b_used(b.rank());
  for (auto [p, q] : pairs) a_used[p] = b_used[q] = true;
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < a.rank(); ++i) if (!a_used[i]) dims.push_back(a.index(i).dim);
  for (std::size_t i = 0; i < b.rank(); ++i) if (!b_used[i]) dims.push_back(b.index(i).dim);
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * dims[i];
  std::vector<complex> out(product(dims));

  const auto adims = a.dims();
  const auto bdims = b.dims();
  std::vector<std::size_t> ma(a.rank(), 0);
  do {
    std::vector<std::size_t> mb(b.rank(), 0);
    do {
      bool match = true;
      for (auto [p, q] : pairs) match = match && ma[p] == mb[q];
      if (!match) continue;
      std::size_t flat = 0, k = 0;
      for (std::size_t i = 0; i < a.rank(); ++i) if (!a_used[i]) flat += ma[i] * strides[k++];
      for (std::size_t i = 0; i < b.rank(); ++i) if (!b_used[i]) flat += mb[i] * strides[k++];
      out[flat] += a.at(ma) * b.at(mb);
    } while (next_multi(mb, bdims));
  } while (next_multi(ma, adims));
  if (out_dims) *out_dims = dims;
  return out;
}

/// Evaluates a network by summing over every joint assignment of edge and
/// open indices.  Exponential; only for small graphs.
inline std::vector<complex> naive_network(const TensorNetworkGraph& g) {
  std::map<LegRef, std::size_t> slot;  // leg -> variable
  std::vector<std::size_t> dims;
  for (const auto& l : g.open_legs()) {
    slot[l] = dims.size();
    dims.push_back(g.leg_spec(l).dim);
  }
  const std::size_t n_open = dims.size();
  for (const auto& e : g.edges()) {
    slot[e.a] = slot[e.b] = dims.size();
    dims.push_back(g.leg_spec(e.a).dim);
  }
  std::vector<std::size_t> open_dims(dims.begin(), dims.begin() + n_open);
  std::vector<complex> out(product(open_dims));
  std::vector<std::size_t> m(dims.size(), 0);
  do {
    complex term{1.0, 0.0};
    for (const auto& n : g.nodes()) {
      std::vector<std::size_t> idx(n.leg_count());
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = m[slot.at({n.id, k})];
      term *= n.tensor.at(idx);
      if (term == complex{}) break;
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < n_open; ++i) flat = flat * dims[i] + m[i];
    out[flat] += term;
  } while (next_multi(m, dims));
  return out;
}

inline double rel_diff(const std::vector<complex>& a, std::span<const complex> b) {
  double scale = 1.0, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return a.size() == b.size() ? diff / scale : 1e300;
}

struct GraphSpec {
  std::size_t max_nodes = 6;
  std::size_t max_edges = 8;
  std::size_t max_dim = 3;
  std::size_t max_open = 3;
  std::size_t max_rank = 4;
  bool self_loops = true;
};

/// Random dense network.  Edges are drawn first and legs are shuffled per
/// node so leg order carries no structure.
inline TensorNetworkGraph random_graph(std::uint64_t seed, const GraphSpec& spec) {
  Rng rng(seed);
  const std::size_t n = 1 + rng.below(spec.max_nodes);
  struct Leg { std::size_t dim; Variance var; int tag; };  // tag: edge end or open
  std::vector<std::vector<Leg>> legs(n);
  const std::size_t m = rng.below(spec.max_edges + 1);
  std::vector<std::size_t> edge_dim;
  int tag = 0;
  for (std::size_t e = 0; e < m; ++e) {
    std::size_t u = rng.below(n), v = rng.below(n);
    if (u == v && (!spec.self_loops || rng.uniform() < 0.7)) v = (u + 1) % n;
    if (legs[u].size() >= spec.max_rank || legs[v].size() + (u == v) >= spec.max_rank) continue;
    const std::size_t d = 1 + rng.below(spec.max_dim);
    legs[u].push_back({d, Variance::Down, tag});
    legs[v].push_back({d, Variance::Up, tag + 1});
    edge_dim.push_back(d);
    tag += 2;
  }
  const std::size_t open = rng.below(spec.max_open + 1);
  for (std::size_t o = 0; o < open; ++o) {
    const std::size_t u = rng.below(n);
    if (legs[u].size() >= spec.max_rank) continue;
    legs[u].push_back({1 + rng.below(spec.max_dim),
                       rng.below(2) ? Variance::Up : Variance::Down, -1 - static_cast<int>(o)});
  }

  std::vector<NetworkNode> nodes;
  std::map<int, LegRef> where;
  std::vector<LegRef> open_legs;
  for (std::size_t u = 0; u < n; ++u) {
    std::shuffle(legs[u].begin(), legs[u].end(), rng.engine());
    std::vector<IndexSpec> idx;
    const NodeId id = static_cast<NodeId>(3 * u + 1);  // sparse ids
    for (std::size_t k = 0; k < legs[u].size(); ++k) {
      idx.emplace_back(legs[u][k].dim, legs[u][k].var);
      if (legs[u][k].tag >= 0) where[legs[u][k].tag] = {id, k};
      else open_legs.push_back({id, k});
    }
    nodes.push_back(NetworkNode::dense(id, random_tensor(std::move(idx), rng)));
  }
  std::vector<Edge> edges;
  for (int t = 0; t < tag; t += 2) edges.push_back({where.at(t), where.at(t + 1)});
  std::shuffle(edges.begin(), edges.end(), rng.engine());
  std::shuffle(open_legs.begin(), open_legs.end(), rng.engine());
  return TensorNetworkGraph::build(std::move(nodes), std::move(edges), std::move(open_legs));
}

/// Copy of g with `count` wire gadgets spliced in: cup-cap snakes and deltas
/// on edges and open legs, and closed wire loops.  The value is unchanged
/// up to the factor d of each closed loop, which `loop_factor` collects.
inline TensorNetworkGraph inject_wires(const TensorNetworkGraph& g, std::uint64_t seed,
                                       std::size_t count, complex* loop_factor = nullptr) {
  Rng rng(seed);
  std::vector<NetworkNode> nodes = g.nodes();
  std::vector<Edge> edges = g.edges();
  std::vector<LegRef> open = g.open_legs();
  NodeId next = g.next_free_id();
  complex factor{1.0, 0.0};
  auto spec = [&](LegRef l) -> const IndexSpec& {
    for (const auto& n : nodes) if (n.id == l.node) return n.tensor.index(l.leg);
    throw std::logic_error("leg");
  };

  for (std::size_t c = 0; c < count; ++c) {
    // The first gadget is always a cup-cap snake.
    const std::size_t choice = c == 0 ? 0 : rng.below(4);
    if (choice == 3 || (edges.empty() && open.empty())) {
      // Closed cup-cap loop.
      const std::size_t d = 1 + rng.below(3);
      const NodeId cup = next++, cap = next++;
      nodes.push_back(NetworkNode::cup(cup, d));
      nodes.push_back(NetworkNode::cap(cap, d));
      edges.push_back({{cup, 0}, {cap, 0}});
      edges.push_back({{cap, 1}, {cup, 1}});
      factor *= static_cast<double>(d);
      continue;
    }
    const bool on_edge = !edges.empty() && (open.empty() || rng.below(3) != 0);
    const bool use_delta = choice == 2;
    if (on_edge) {
      const std::size_t k = rng.below(edges.size());
      LegRef down = edges[k].a, up = edges[k].b;
      if (spec(down).variance == Variance::Up) std::swap(down, up);
      const std::size_t d = spec(down).dim;
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(k));
      if (use_delta) {
        const NodeId w = next++;
        nodes.push_back(NetworkNode::delta(w, d));
        edges.push_back({down, {w, 1}});
        edges.push_back({{w, 0}, up});
      } else {
        const NodeId cup = next++, cap = next++;
        nodes.push_back(NetworkNode::cup(cup, d));
        nodes.push_back(NetworkNode::cap(cap, d));
        edges.push_back({down, {cup, 0}});
        edges.push_back({{cup, 1}, {cap, 0}});
        edges.push_back({{cap, 1}, up});
      }
    } else {
      const std::size_t k = rng.below(open.size());
      const LegRef leg = open[k];
      const IndexSpec& s = spec(leg);
      const std::size_t d = s.dim;
      if (use_delta) {
        const NodeId w = next++;
        nodes.push_back(NetworkNode::delta(w, d));
        if (s.variance == Variance::Down) {
          edges.push_back({leg, {w, 1}});
          open[k] = {w, 0};
        } else {
          edges.push_back({{w, 0}, leg});
          open[k] = {w, 1};
        }
      } else {
        const NodeId cup = next++, cap = next++;
        nodes.push_back(NetworkNode::cup(cup, d));
        nodes.push_back(NetworkNode::cap(cap, d));
        if (s.variance == Variance::Down) {
          edges.push_back({leg, {cup, 0}});
          edges.push_back({{cup, 1}, {cap, 0}});
          open[k] = {cap, 1};
        } else {
          edges.push_back({{cap, 1}, leg});
          edges.push_back({{cap, 0}, {cup, 0}});
          open[k] = {cup, 1};
        }
      }
    }
  }
  if (loop_factor) *loop_factor = factor;
  return TensorNetworkGraph::build(std::move(nodes), std::move(edges), std::move(open));
}

}  // namespace testing
