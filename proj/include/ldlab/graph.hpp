#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "ldlab/errors.hpp"

namespace ldlab {

__extension__ typedef __int128 Int128;
__extension__ typedef unsigned __int128 UInt128;

/// Edge set of a subgraph of K_n; the vertex set is the union of endpoints.
struct LabeledGraph {
  std::vector<std::pair<int, int>> edges;  ///< sorted, i < j, no duplicates

  std::size_t num_edges() const { return edges.size(); }

  std::vector<int> vertices() const {
    std::vector<int> v;
    v.reserve(2 * edges.size());
    for (auto [i, j] : edges) {
      v.push_back(i);
      v.push_back(j);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  /// Normalizes orientation and order; throws on loops or duplicates.
  static LabeledGraph from_edges(std::vector<std::pair<int, int>> e) {
    for (auto& [i, j] : e) {
      if (i == j || i < 0 || j < 0) fail(ErrorCode::InvalidParams, "invalid edge");
      if (i > j) std::swap(i, j);
    }
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end()) fail(ErrorCode::InvalidParams, "duplicate edge");
    return LabeledGraph{std::move(e)};
  }

  static LabeledGraph cycle(int m) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < m; ++i) e.emplace_back(i, (i + 1) % m);
    return from_edges(std::move(e));
  }

  static LabeledGraph path(int edges_count) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < edges_count; ++i) e.emplace_back(i, i + 1);
    return from_edges(std::move(e));
  }
};

struct GraphStats {
  int num_vertices = 0;
  int num_edges = 0;
  int excess = 0;  ///< |E| - |V|
  std::vector<int> leaves;
  int indep_cycles = 0;  ///< components that are exactly a cycle
  int components = 0;
  int cycle_rank = 0;  ///< |E| - |V| + components
};

/// Same graph with vertices renamed to 0..|V|-1 in increasing label order.
inline LabeledGraph compact(const LabeledGraph& H, int* num_vertices = nullptr) {
  const auto vs = H.vertices();
  std::map<int, int> id;
  for (std::size_t k = 0; k < vs.size(); ++k) id[vs[k]] = static_cast<int>(k);
  LabeledGraph out;
  out.edges.reserve(H.edges.size());
  for (auto [i, j] : H.edges) out.edges.emplace_back(id[i], id[j]);
  std::sort(out.edges.begin(), out.edges.end());
  if (num_vertices) *num_vertices = static_cast<int>(vs.size());
  return out;
}

inline GraphStats graph_stats(const LabeledGraph& H) {
  int nv = 0;
  const LabeledGraph G = compact(H, &nv);
  GraphStats s;
  s.num_vertices = nv;
  s.num_edges = static_cast<int>(G.edges.size());
  s.excess = s.num_edges - s.num_vertices;

  std::vector<int> deg(nv, 0), parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [i, j] : G.edges) {
    ++deg[i];
    ++deg[j];
    parent[find(i)] = find(j);
  }
  const auto labels = H.vertices();
  for (int v = 0; v < nv; ++v)
    if (deg[v] == 1) s.leaves.push_back(labels[v]);

  // A component is an independent cycle iff every vertex in it has degree 2.
  std::vector<char> all_two(nv, 1);
  for (int v = 0; v < nv; ++v)
    if (deg[v] != 2) all_two[find(v)] = 0;
  for (int v = 0; v < nv; ++v)
    if (find(v) == v) {
      ++s.components;
      if (all_two[v]) ++s.indep_cycles;
    }
  s.cycle_rank = s.num_edges - s.num_vertices + s.components;
  return s;
}

inline std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  UInt128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

/// All edges of K_n in lexicographic order.
inline std::vector<std::pair<int, int>> complete_graph_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return e;
}

/**
 * @brief Stream every edge subset of K_n with at most dmax edges to `visit`.
 *
 * Subsets come grouped by size, each size in lexicographic order of edge
 * index, so every LabeledGraph is already sorted. Starts with the empty
 * graph. Guard: C(n,2) <= 40 or dmax <= 3.
 */
template <class Visit>
void enumerate_edge_subsets(int n, int dmax, Visit&& visit) {
  if (n < 0 || dmax < 0) fail(ErrorCode::InvalidParams, "n and dmax must be nonnegative");
  const auto all = complete_graph_edges(n);
  const int m = static_cast<int>(all.size());
  if (!(m <= 40 || dmax <= 3)) fail(ErrorCode::TooLarge, "edge-subset enumeration guard exceeded");
  const int top = std::min(dmax, m);
  LabeledGraph g;
  std::vector<int> idx;
  for (int k = 0; k <= top; ++k) {
    idx.resize(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      g.edges.clear();
      for (int t : idx) g.edges.push_back(all[t]);
      visit(static_cast<const LabeledGraph&>(g));
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == m - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int r = pos + 1; r < k; ++r) idx[r] = idx[r - 1] + 1;
    }
  }
}

/// Debug dump: one graph per line as space-separated "i-j" pairs.
inline void write_edge_list(std::ostream& os, const LabeledGraph& H) {
  for (std::size_t k = 0; k < H.edges.size(); ++k) {
    if (k) os << ' ';
    os << H.edges[k].first << '-' << H.edges[k].second;
  }
  os << '\n';
}

}  // namespace ldlab
