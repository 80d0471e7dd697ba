#include <gtest/gtest.h>

#include <cmath>

#include "ldlab/projection.hpp"
#include "ldlab/random.hpp"

using namespace ldlab;

namespace {

RealMatrix random_symmetric(int n, RandomStream& rng) {
  RealMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) A(i, j) = A(j, i) = rng.normal();
  return A;
}

double min_eig(const RealMatrix& M) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST(EntrywiseCap, DocumentedCases) {
  RealMatrix Y(2, 2);
  Y << 0.5, -1, 1, 0.25;
  EXPECT_EQ(project_entrywise_cap(Y, 1.0), Y);
  RealMatrix five(1, 1);
  five << 5;
  EXPECT_EQ(project_entrywise_cap(five, 2.0)(0, 0), 2.0);
  EXPECT_EQ(project_entrywise_cap(Y, 0.0), RealMatrix::Zero(2, 2));
  EXPECT_THROW(project_entrywise_cap(Y, -1.0), Error);
}

TEST(PsdShift, DocumentedCases) {
  RealMatrix psd(2, 2);
  psd << 2, 1, 1, 2;
  EXPECT_EQ(project_psd_shift(psd, RealMatrix::Zero(2, 2)), psd);
  const RealMatrix d = Eigen::Vector2d(1, -3).asDiagonal();
  const RealMatrix pd = project_psd_shift(d, RealMatrix::Zero(2, 2));
  EXPECT_NEAR((pd - RealMatrix(Eigen::Vector2d(1, 0).asDiagonal())).norm(), 0.0, 1e-12);
  const RealMatrix m2 = -2.0 * RealMatrix::Identity(3, 3);
  const RealMatrix r = project_psd_shift(m2, RealMatrix::Identity(3, 3));
  EXPECT_NEAR((r + RealMatrix::Identity(3, 3)).norm(), 0.0, 1e-12);
}

TEST(PsdShift, IsNearestPointProperty) {
  // Projection onto a convex set: <Y - P, Z - P> <= 0 for Z in the set.
  RandomStream rng(1, 0);
  const RealMatrix S = 0.3 * RealMatrix::Identity(6, 6);
  for (int r = 0; r < 20; ++r) {
    const RealMatrix Y = random_symmetric(6, rng);
    const RealMatrix P = project_psd_shift(Y, S);
    EXPECT_GE(min_eig(P + S), -1e-10);
    for (int t = 0; t < 5; ++t) {
      RealMatrix G = random_symmetric(6, rng);
      const RealMatrix Z = G * G.transpose() - S;  // Z + S is PSD
      EXPECT_LE(((Y - P).array() * (Z - P).array()).sum(), 1e-8);
    }
  }
}

TEST(MinNormCorrelated, FeasibleInputIsNotExceeded) {
  RealMatrix X(2, 2);
  X << 1, 0.5, 0.5, 1;
  ConstraintSetK K{2.0, RealMatrix::Zero(2, 2)};
  const double c = 0.5, M = 2.0;  // (c/2) M = 0.5 <= ||X||_F
  const auto res = min_norm_correlated(X, c, M, K);
  EXPECT_TRUE(res.feasible);
  EXPECT_LE(res.Q_hat.norm(), X.norm() + 1e-8);
}

TEST(MinNormCorrelated, ScalarCaseIsIntervalProjection) {
  RealMatrix X(1, 1);
  X << 1;
  ConstraintSetK K{2.0, RealMatrix::Constant(1, 1, 0.5)};
  const double c = 0.6, M = 2.0;  // beta = 0.6 <= tau
  const auto res = min_norm_correlated(X, c, M, K);
  EXPECT_NEAR(res.Q_hat(0, 0), 0.6, 1e-6);
}

TEST(MinNormCorrelated, HoelderInfeasibility) {
  RealMatrix X = RealMatrix::Identity(3, 3);
  ConstraintSetK K{0.1, RealMatrix::Zero(3, 3)};
  try {
    min_norm_correlated(X, 1.0, 10.0, K);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
  }
}

TEST(MinNormCorrelated, OutputLiesInTheIntersection) {
  RandomStream rng(2, 0);
  for (int r = 0; r < 15; ++r) {
    const int n = 4 + r % 5;
    const double tau = 0.5;
    const RealMatrix S = 0.2 * RealMatrix::Identity(n, n);
    const double c = 0.5;
    // Q0 = tau v v^T with a sign vector v is in K, so the intersection holds Q0 / 2 strictly inside the cap.
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const RealMatrix Q0 = tau * v * v.transpose();
    const RealMatrix X = Q0 / tau + 0.5 * random_symmetric(n, rng);
    const double inner = (X.array() * Q0.array()).sum();
    ASSERT_GT(inner, 0.0);
    const double M = inner / (c * X.norm());  // half-space threshold is <X,Q0>/2
    const auto res = min_norm_correlated(X, c, M, ConstraintSetK{tau, S});
    const RealMatrix& Q = res.Q_hat;
    EXPECT_LE(Q.cwiseAbs().maxCoeff(), tau + 1e-5);
    EXPECT_GE(min_eig(Q + S), -1e-5);
    EXPECT_GE((X.array() * Q.array()).sum(), 0.5 * c * M * X.norm() * (1 - 1e-5));
  }
}

TEST(MinNormCorrelated, TwoByTwoAgreesWithGridSearch) {
  RealMatrix X(2, 2);
  X << 1.0, 0.3, 0.3, -0.2;
  const double tau = 0.8, c = 0.5, M = 1.2;
  const RealMatrix S = 0.1 * RealMatrix::Identity(2, 2);
  const auto res = min_norm_correlated(X, c, M, ConstraintSetK{tau, S});
  const double beta = 0.5 * c * M * X.norm();
  double best = HUGE_VAL;
  const int g = 320;
  for (int a = 0; a <= g; ++a)
    for (int b = 0; b <= g; ++b)
      for (int d = 0; d <= g; d += 1) {
        const double y11 = -tau + 2 * tau * a / g, y12 = -tau + 2 * tau * b / g, y22 = -tau + 2 * tau * d / g;
        if (X(0, 0) * y11 + 2 * X(0, 1) * y12 + X(1, 1) * y22 < beta) continue;
        const double p = y11 + 0.1, q = y22 + 0.1;
        if (p < 0 || q < 0 || p * q < y12 * y12) continue;
        best = std::min(best, std::sqrt(y11 * y11 + 2 * y12 * y12 + y22 * y22));
      }
  EXPECT_NEAR(res.Q_hat.norm(), best, 1e-2);
  EXPECT_LE(res.Q_hat.norm(), best + 1e-6);
}

TEST(ModelConstraint, SignalMatrixLiesInK) {
  RandomStream rng(3, 0);
  const auto sbm = ModelSpec::sbm(60, 3, 6.0, 0.5);
  const auto inst = sample_planted(sbm, rng);
  const RealMatrix& T = real_layers(inst.theta_matrix)[0];
  const auto mc = model_constraint(sbm);
  EXPECT_LE(T.cwiseAbs().maxCoeff(), mc.K.tau + 1e-12);
  EXPECT_GE(min_eig(T + mc.K.shift), -1e-9);
  const auto pds = ModelSpec::planted_dense_subgraph(50, 0.2, 0.1, 0.5);
  const auto pi = sample_planted(pds, rng);
  const auto pmc = model_constraint(pds);
  EXPECT_LE(real_layers(pi.theta_matrix)[0].cwiseAbs().maxCoeff(), pmc.K.tau);
  EXPECT_DOUBLE_EQ(pmc.M, 0.4 * 0.2 * 50);
  EXPECT_THROW(model_constraint(ModelSpec::planted_submatrix(5, 1, 0.5)), Error);
}
