#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "ldlab/graph.hpp"

using namespace ldlab;

namespace {

std::size_t count_subsets(int n, int dmax) {
  std::size_t c = 0;
  enumerate_edge_subsets(n, dmax, [&](const LabeledGraph&) { ++c; });
  return c;
}

}  // namespace

TEST(Enumerate, SmallCounts) {
  EXPECT_EQ(count_subsets(2, 5), 2u);
  EXPECT_EQ(count_subsets(3, 3), 8u);
  EXPECT_EQ(count_subsets(0, 3), 1u);
}

TEST(Enumerate, CountIsPartialBinomialSum) {
  for (int n = 2; n <= 6; ++n)
    for (int d = 0; d <= 4; ++d) {
      const int m = n * (n - 1) / 2;
      std::uint64_t expect = 0;
      for (int k = 0; k <= std::min(d, m); ++k) expect += binomial_u64(m, k);
      EXPECT_EQ(count_subsets(n, d), expect) << "n=" << n << " d=" << d;
    }
}

TEST(Enumerate, SubsetsAreDistinctSortedAndGroupedBySize) {
  std::set<std::vector<std::pair<int, int>>> seen;
  std::size_t last_size = 0;
  enumerate_edge_subsets(5, 3, [&](const LabeledGraph& g) {
    EXPECT_TRUE(std::is_sorted(g.edges.begin(), g.edges.end()));
    EXPECT_GE(g.num_edges(), last_size);
    last_size = g.num_edges();
    EXPECT_TRUE(seen.insert(g.edges).second);
  });
  EXPECT_EQ(seen.size(), 1u + 10u + 45u + 120u);
}

TEST(Enumerate, GuardRejectsLargeRequests) {
  try {
    enumerate_edge_subsets(10, 5, [](const LabeledGraph&) {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
  EXPECT_NO_THROW(enumerate_edge_subsets(9, 1, [](const LabeledGraph&) {}));
}

TEST(GraphStats, Triangle) {
  const GraphStats s = graph_stats(LabeledGraph::cycle(3));
  EXPECT_EQ(s.excess, 0);
  EXPECT_TRUE(s.leaves.empty());
  EXPECT_EQ(s.indep_cycles, 1);
  EXPECT_EQ(s.cycle_rank, 1);
}

TEST(GraphStats, SingleEdgeAndPath) {
  const GraphStats e = graph_stats(LabeledGraph::from_edges({{4, 9}}));
  EXPECT_EQ(e.excess, -1);
  EXPECT_EQ(e.leaves, (std::vector<int>{4, 9}));
  EXPECT_EQ(e.indep_cycles, 0);
  const GraphStats p = graph_stats(LabeledGraph::path(2));
  EXPECT_EQ(p.excess, -1);
  EXPECT_EQ(p.leaves.size(), 2u);
  EXPECT_EQ(p.indep_cycles, 0);
}

TEST(GraphStats, DisjointCyclesAndTheta) {
  // Two disjoint squares plus a theta graph (two vertices joined by three paths).
  LabeledGraph g = LabeledGraph::from_edges(
      {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {10, 11}, {11, 12}, {12, 13}, {10, 13}, {20, 21}, {21, 22}, {20, 23},
       {23, 22}, {20, 24}, {24, 22}});
  const GraphStats s = graph_stats(g);
  EXPECT_EQ(s.components, 3);
  EXPECT_EQ(s.indep_cycles, 2);
  EXPECT_EQ(s.num_vertices, 13);
  EXPECT_EQ(s.num_edges, 14);
  EXPECT_EQ(s.cycle_rank, 4);
  EXPECT_TRUE(s.leaves.empty());
}

TEST(LabeledGraph, NormalizesAndRejectsBadEdges) {
  const LabeledGraph g = LabeledGraph::from_edges({{3, 1}, {0, 2}});
  EXPECT_EQ(g.edges, (std::vector<std::pair<int, int>>{{0, 2}, {1, 3}}));
  EXPECT_THROW(LabeledGraph::from_edges({{1, 1}}), Error);
  EXPECT_THROW(LabeledGraph::from_edges({{1, 2}, {2, 1}}), Error);
}

TEST(LabeledGraph, CompactRenamesInOrder) {
  int nv = 0;
  const LabeledGraph c = compact(LabeledGraph::from_edges({{5, 9}, {2, 9}}), &nv);
  EXPECT_EQ(nv, 3);
  EXPECT_EQ(c.edges, (std::vector<std::pair<int, int>>{{0, 2}, {1, 2}}));
}

TEST(Binomial, KnownValues) {
  EXPECT_EQ(binomial_u64(10, 3), 120u);
  EXPECT_EQ(binomial_u64(5, 7), 0u);
  EXPECT_EQ(binomial_u64(60, 30), 118264581564861424ULL);
}

TEST(WriteEdgeList, Format) {
  std::ostringstream os;
  write_edge_list(os, LabeledGraph::path(2));
  EXPECT_EQ(os.str(), "0-1 1-2\n");
}
