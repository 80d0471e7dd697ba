#include <gtest/gtest.h>

#include <cmath>

#include "ldlab/advantage.hpp"
#include "oracles.hpp"

using namespace ldlab;

TEST(ExpTrunc, PartialSums) {
  EXPECT_EQ(exp_trunc(1.0, 0), 1.0);
  EXPECT_EQ(exp_trunc(1.0, 1), 2.0);
  EXPECT_NEAR(exp_trunc(2.0, 3), 1 + 2 + 2 + 8.0 / 6, 1e-15);
  EXPECT_NEAR(exp_trunc(0.5, 60), std::exp(0.5), 1e-15);
  EXPECT_NEAR(log_exp_trunc(3.0, 4), std::log(exp_trunc(3.0, 4)), 1e-14);
  EXPECT_TRUE(std::isfinite(log_exp_trunc(1e6, 50)));
}

TEST(SubmatrixOverlap, DocumentedValues) {
  EXPECT_EQ(adv2_submatrix_overlap(50, 0.0, 0.3, 8).value, 1.0);
  EXPECT_EQ(adv2_submatrix_overlap(50, 2.0, 0.3, 0).value, 1.0);
  EXPECT_DOUBLE_EQ(adv2_submatrix_overlap(1, 1.0, 1.0, 1).value, 2.0);
}

TEST(SubmatrixOverlap, MatchesPairEnumeration) {
  for (int n : {1, 3, 5})
    for (double rho : {0.2, 0.5, 0.9})
      for (int D : {1, 2, 5})
        EXPECT_NEAR(adv2_submatrix_overlap(n, 0.7, rho, D).value, oracle::submatrix_overlap(n, 0.7, rho, D),
                    1e-12 * oracle::submatrix_overlap(n, 0.7, rho, D));
}

TEST(SubmatrixOverlap, MonotoneInDegreeAndOverflowsToInfinity) {
  double prev = 1.0;
  for (int D = 0; D <= 12; ++D) {
    const double v = adv2_submatrix_overlap(200, 0.3, 0.2, D).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
  const auto big = adv2_submatrix_overlap(4000, 50.0, 0.5, 400);
  EXPECT_TRUE(big.overflow());
}

TEST(GraphSum, DocumentedValues) {
  EXPECT_EQ(adv2_graph_sum_binary(10, 0.4, 0.5, 0).value, 1.0);
  EXPECT_NEAR(adv2_graph_sum_binary(10, 0.4, 0.5, 1).value, 1 + 45 * 0.16 * std::pow(0.5, 4), 1e-14);
  EXPECT_DOUBLE_EQ(adv2_graph_sum_binary(2, 1.0, 1.0, 1).value, 2.0);
}

TEST(GraphSum, ClassCountsMatchEnumerations) {
  for (int n = 2; n <= 6; ++n)
    for (int D = 0; D <= 4; ++D) {
      const double fast = adv2_graph_sum_binary(n, 0.8, 0.6, D).value;
      EXPECT_NEAR(fast, graph_sum_binary_enumerated(n, 0.8, 0.6, D), 1e-12 * fast);
      EXPECT_NEAR(fast, oracle::graph_sum(n, 0.8, 0.6, D), 1e-12 * fast);
    }
}

TEST(GraphSum, GuardAndLargeN) {
  EXPECT_THROW(adv2_graph_sum_binary(20, 0.5, 0.5, 4), Error);
  const auto r = adv2_graph_sum_binary(1000000, 1e-3, 0.1, 3);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GT(r.value, 1.0);
}

TEST(Omega, LeafAndCycleValues) {
  EXPECT_EQ(omega_expectation(LabeledGraph::from_edges({{0, 1}}), 3), 0.0);
  for (int q = 2; q <= 6; ++q)
    for (int m = 3; m <= 8; ++m) {
      const OmegaRational r = omega_expectation_exact(LabeledGraph::cycle(m), q);
      EXPECT_TRUE(r.numerator == static_cast<Int128>(q - 1) * r.denominator) << "m=" << m << " q=" << q;
    }
  const OmegaRational tri = omega_expectation_exact(LabeledGraph::cycle(3), 3);
  EXPECT_TRUE(tri.denominator == 27);
  EXPECT_TRUE(tri.numerator == 54);
}

TEST(Omega, SubsetExpansionAgreesWithBruteForce) {
  RandomStream rng(1, 0);
  for (int r = 0; r < 40; ++r) {
    const int v = 3 + static_cast<int>(rng.uniform_int(3));
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < v; ++i)
      for (int j = i + 1; j < v; ++j)
        if (rng.bernoulli(0.6)) e.emplace_back(i, j);
    if (e.empty()) continue;
    const LabeledGraph g = LabeledGraph::from_edges(e);
    int nv = 0;
    const LabeledGraph c = compact(g, &nv);
    for (int q : {2, 3, 4}) {
      const auto a = detail::omega_brute_force(c, nv, q);
      const auto b = detail::omega_subset_expansion(c, nv, q);
      EXPECT_TRUE(a.numerator == b.numerator && a.denominator == b.denominator);
      std::vector<oracle::Edge> S;
      for (auto [i, j] : c.edges) S.push_back({i, j});
      EXPECT_NEAR(a.value(), oracle::label_product(nv, q, S), 1e-12);
    }
  }
}

TEST(SbmExact, DegreeTwoIsExactlyOne) {
  for (int n : {4, 6})
    for (int q : {2, 3}) EXPECT_EQ(adv2_sbm_exact(n, q, 1.5, 0.6, 2).value, 1.0);
  EXPECT_EQ(adv2_sbm_exact(6, 3, 2.0, 0.0, 4).value, 1.0);
}

TEST(SbmExact, MatchesLabelingOracle) {
  for (int n = 3; n <= 5; ++n)
    for (int q : {2, 3})
      for (int D = 3; D <= 4; ++D) {
        const double got = adv2_sbm_exact(n, q, 1.2, 0.7, D).value;
        const double want = oracle::sbm_adv2(n, q, 1.2, 0.7, D);
        EXPECT_NEAR(got, want, 1e-10 * want) << n << " " << q << " " << D;
      }
}

TEST(SbmExact, Guard) { EXPECT_THROW(adv2_sbm_exact(9, 2, 1.0, 0.5, 3), Error); }

TEST(Chain, DocumentedValues) {
  EXPECT_DOUBLE_EQ(chain_expectation(0.3, 0.2, 1, 3, 1, 1), 0.3 + 0.2 * 2);
  EXPECT_DOUBLE_EQ(chain_expectation(0.3, 0.2, 1, 3, 1, 2), 0.3 - 0.2);
  EXPECT_DOUBLE_EQ(chain_expectation(0.7, 0.0, 4, 3, 0, 2), std::pow(0.7, 4));
  EXPECT_DOUBLE_EQ(chain_expectation(0.0, 1.0, 3, 2, 1, 1), 1.0);
}

TEST(Chain, MatchesInteriorEnumeration) {
  for (int l = 1; l <= 5; ++l)
    for (int q = 2; q <= 4; ++q)
      for (int s0 = 0; s0 < q; ++s0)
        for (int sl = 0; sl < q; ++sl)
          EXPECT_NEAR(chain_expectation(0.4, 0.3, l, q, s0, sl), oracle::chain(0.4, 0.3, l, q, s0, sl), 1e-14);
}

TEST(AngularSurrogate, DocumentedValues) {
  EXPECT_EQ(adv2_angular_surrogate(2, 0.0, 9).value, 1.0);
  EXPECT_EQ(adv2_angular_surrogate(2, 0.8, 0).value, 1.0);
  for (int L : {1, 2, 3})
    EXPECT_NEAR(adv2_angular_surrogate(L, 0.6, 1).value, std::pow(1 + 0.36 / 2, 2 * L), 1e-14);
  EXPECT_NEAR(adv2_angular_surrogate(1, 0.5, 40).value, 4.0 / 3.0, 1e-9);
}

TEST(AngularMc, DocumentedValues) {
  const RandomStream rng(3, 0);
  const auto zero = adv2_angular_mc(30, 2, 0.0, 5, 200, rng);
  EXPECT_EQ(zero.value, 1.0);
  EXPECT_EQ(zero.stderr_, 0.0);
  EXPECT_EQ(adv2_angular_mc(30, 2, 0.9, 0, 200, rng).value, 1.0);
  const double lam = 0.9;
  const auto one = adv2_angular_mc(1, 1, lam, 1, 40000, rng);
  EXPECT_NEAR(one.value, 1 + lam * lam + std::pow(lam, 4) / 8, 3 * one.stderr_);
  EXPECT_THROW(adv2_angular_mc(10, 1, 0.5, 2, 50, rng), Error);
}

TEST(AngularMc, ThreadCountDoesNotChangeResult) {
  const RandomStream rng(4, 0);
  const auto a = adv2_angular_mc(40, 2, 0.5, 4, 500, rng, 1);
  const auto b = adv2_angular_mc(40, 2, 0.5, 4, 500, rng, 3);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(OrthMc, OneDimensionalCaseIsSignSynchronization) {
  // U = (2B - n)/sqrt(n) with B ~ Bin(n, 1/2).
  const int n = 9, D = 3;
  const double lam = 0.8;
  double exact = 0.0;
  for (int b = 0; b <= n; ++b) {
    const double u = (2.0 * b - n) / std::sqrt(double(n));
    exact += std::exp(std::lgamma(n + 1.0) - std::lgamma(b + 1.0) - std::lgamma(n - b + 1.0)) * std::pow(0.5, n) *
             oracle::exp_trunc(lam * lam * u * u, D);
  }
  const auto mc = adv2_orth_mc(n, 1, lam, D, 20000, RandomStream(5, 0));
  EXPECT_NEAR(mc.value, exact, 4 * mc.stderr_);
  EXPECT_EQ(adv2_orth_mc(n, 2, 0.0, D, 100, RandomStream(5, 1)).value, 1.0);
  EXPECT_EQ(adv2_orth_surrogate(3, 0.0, 5).value, 1.0);
}

TEST(InterpolationGap, ZeroSignalIsFlat) {
  const auto g = moment_interpolation_gap(20, 2, 0.0, 4, 5, 100, RandomStream(6, 0));
  EXPECT_EQ(g.F_t, 1.0);
  EXPECT_EQ(g.F_next, 1.0);
  EXPECT_EQ(g.rel_gap, 0.0);
}

TEST(InterpolationGap, EndpointsMatchSurrogateAndMc) {
  // t = n-1 then F_{t+1} uses Gaussians for every summand: the Gaussian surrogate at finite n.
  const int n = 40;
  const auto g = moment_interpolation_gap(n, 1, 0.5, 4, n - 1, 20000, RandomStream(7, 0));
  EXPECT_NEAR(g.F_next, adv2_angular_surrogate(1, 0.5, 4).value, 4 * g.F_next_stderr);
  const auto g0 = moment_interpolation_gap(n, 1, 0.5, 4, 0, 20000, RandomStream(7, 1));
  const auto mc = adv2_angular_mc(n, 1, 0.5, 4, 20000, RandomStream(7, 2));
  EXPECT_NEAR(g0.F_t, mc.value, 4 * std::hypot(g0.F_t_stderr, mc.stderr_));
}

TEST(KsThreshold, DocumentedValues) {
  EXPECT_DOUBLE_EQ(ks_threshold(0.0, {2.0, 3.0}, {0.5, 0.4}).F_value, std::max(0.25 * 2.0, 0.16 * 3.0));
  EXPECT_NEAR(ks_threshold(1.0, {5.0}, {0.3}).F_value, 0.09 * 5.0, 1e-15);
  // rho=1, Delta=(0.3,0.4): lambda^2 d chosen to give these deltas.
  EXPECT_NEAR(ks_threshold(1.0, {0.3, 0.4}, {1.0, 1.0}).F_value, 0.7, 1e-15);
  EXPECT_TRUE(std::isinf(ks_threshold(0.5, {4.0}, {1.0}).F_value));
}

TEST(TransferChain, DocumentedValues) {
  const auto one = transfer_chain_sum(5, 0.7, {0.8});
  EXPECT_NEAR(one.recursion, std::pow(0.8, 5), 1e-15);
  const auto first = transfer_chain_sum(1, 0.7, {0.2, 0.3, 0.4});
  EXPECT_NEAR(first.recursion, 0.9, 1e-15);
  const double rho = 0.8, r = std::pow(rho, 4), x = 0.6, y = 0.9;
  const auto two = transfer_chain_sum(2, rho, {x, y});
  EXPECT_NEAR(two.recursion, x * x + y * y + 2 * r * x * y, 1e-15);
}

TEST(TransferChain, RecursionAgreesWithWordOracle) {
  RandomStream rng(8, 0);
  for (int t = 0; t < 20; ++t) {
    const int L = 1 + static_cast<int>(rng.uniform_int(3));
    const int len = 1 + static_cast<int>(rng.uniform_int(8));
    std::vector<double> delta(L);
    for (auto& d : delta) d = rng.uniform(0.1, 1.5);
    const double rho = rng.uniform();
    const auto res = transfer_chain_sum(len, rho, delta);
    ASSERT_TRUE(res.brute_force_available);
    const double want = oracle::word_sum(len, std::pow(rho, 4), delta);
    EXPECT_NEAR(res.recursion, want, 1e-10 * want);
    EXPECT_NEAR(res.brute_force, want, 1e-10 * want);
  }
}

TEST(TransferChain, SpectralRadiusMatchesEigenvalue) {
  const RealMatrix P = transfer_matrix(0.6, {0.3, 0.8, 0.5});
  Eigen::EigenSolver<RealMatrix> es(P);
  double mx = 0;
  for (int i = 0; i < 3; ++i) mx = std::max(mx, std::abs(es.eigenvalues()(i)));
  EXPECT_NEAR(spectral_radius_power(P), mx, 1e-12);
}
