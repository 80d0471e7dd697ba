#include <gtest/gtest.h>

#include <cmath>

#include "ldlab/model.hpp"

using namespace ldlab;

namespace {

double offdiag_mean(const RealMatrix& Y) {
  const auto n = Y.rows();
  double s = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) s += Y(i, j);
  return s / (0.5 * n * (n - 1));
}

}  // namespace

TEST(Model, FullSupportSubmatrixHasAllOnesSignal) {
  RandomStream rng(1, 0);
  const Instance inst = sample_planted(ModelSpec::planted_submatrix(3, 1.0, 1.0), rng);
  EXPECT_EQ(inst.latent.theta, Eigen::VectorXd::Ones(3));
  EXPECT_EQ(real_layers(inst.theta_matrix)[0], RealMatrix::Ones(3, 3));
  EXPECT_TRUE(inst.planted);
}

TEST(Model, ZeroSignalSubmatrixMatchesNullMoments) {
  const auto spec = ModelSpec::planted_submatrix(40, 0.0, 0.3);
  double off_p = 0, diag_p = 0, off_q = 0, diag_q = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    RandomStream a(9, r), b(10, r);
    const RealMatrix P = real_layers(sample_planted(spec, a).observation)[0];
    const RealMatrix Q = real_layers(sample_null(spec, b).observation)[0];
    off_p += (P.squaredNorm() - P.diagonal().squaredNorm()) / (40.0 * 39.0);
    off_q += (Q.squaredNorm() - Q.diagonal().squaredNorm()) / (40.0 * 39.0);
    diag_p += P.diagonal().squaredNorm() / 40.0;
    diag_q += Q.diagonal().squaredNorm() / 40.0;
  }
  EXPECT_NEAR(off_p / reps, 1.0, 0.02);
  EXPECT_NEAR(off_q / reps, 1.0, 0.02);
  EXPECT_NEAR(diag_p / reps, 2.0, 0.1);
  EXPECT_NEAR(diag_q / reps, 2.0, 0.1);
}

TEST(Model, FullyAssortativeSbmHasNoCrossEdges) {
  // q=2, lambda=1, d/n=0.3: within 0.6, across 0.
  const auto spec = ModelSpec::sbm(200, 2, 60.0, 1.0);
  RandomStream rng(4, 0);
  const Instance inst = sample_planted(spec, rng);
  const RealMatrix& Y = real_layers(inst.observation)[0];
  const auto& s = inst.latent.labels;
  double same = 0, same_edges = 0, cross_edges = 0;
  for (int i = 0; i < 200; ++i)
    for (int j = i + 1; j < 200; ++j) {
      if (s[i] == s[j]) {
        ++same;
        same_edges += Y(i, j);
      } else {
        cross_edges += Y(i, j);
      }
    }
  EXPECT_EQ(cross_edges, 0.0);
  EXPECT_NEAR(same_edges / same, 0.6, 5 * std::sqrt(0.24 / same));
}

TEST(Model, SbmSignalHasTheDocumentedNorm) {
  // ||Theta||_F^2 = (q-1) lambda^2 d^2 when labels are exactly balanced.
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 3);
  const RealMatrix T = detail::sbm_signal(labels, 3, 5.0, 0.4);
  EXPECT_NEAR(T.squaredNorm(), 2 * 0.16 * 25.0, 1e-9);
}

TEST(Model, HaarOrthogonalIsOrthogonal) {
  RandomStream rng(5, 0);
  for (int d : {1, 2, 3, 5, 8}) {
    for (int r = 0; r < 20; ++r) {
      const RealMatrix O = haar_orthogonal(d, rng);
      EXPECT_LE((O.transpose() * O - RealMatrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Model, HaarOneDimensionalIsFairSign) {
  RandomStream rng(6, 0);
  const int trials = 20000;
  int plus = 0;
  for (int t = 0; t < trials; ++t) {
    const double v = haar_orthogonal(1, rng)(0, 0);
    ASSERT_TRUE(v == 1.0 || v == -1.0);
    plus += v > 0;
  }
  EXPECT_NEAR(plus / double(trials), 0.5, 3.0 / std::sqrt(trials));
}

TEST(Model, HaarSecondMomentIsOneOverD) {
  RandomStream rng(7, 0);
  const int trials = 20000;
  double s = 0;
  for (int t = 0; t < trials; ++t) s += std::pow(haar_orthogonal(2, rng)(0, 0), 2);
  EXPECT_NEAR(s / trials, 0.5, 3.0 / std::sqrt(trials));
}

TEST(Model, HermitianNoiseIsHermitianWithUnitEntryVariance) {
  RandomStream rng(8, 0);
  const ComplexMatrix W = hermitian_gaussian(120, rng);
  EXPECT_LE((W - W.adjoint()).cwiseAbs().maxCoeff(), 0.0);
  double off = 0;
  for (int i = 0; i < 120; ++i)
    for (int j = i + 1; j < 120; ++j) off += std::norm(W(i, j));
  EXPECT_NEAR(off / (120 * 119 / 2), 1.0, 0.03);
}

TEST(Model, PlantedDenseSubgraphDensities) {
  const auto spec = ModelSpec::planted_dense_subgraph(300, 0.5, 0.1, 0.4);
  RandomStream rng(11, 0);
  const Instance inst = sample_planted(spec, rng);
  const RealMatrix& Y = real_layers(inst.observation)[0];
  const auto& th = inst.latent.theta;
  double in = 0, in_n = 0, out = 0, out_n = 0;
  for (int i = 0; i < 300; ++i)
    for (int j = i + 1; j < 300; ++j) {
      if (th(i) * th(j) > 0) in += Y(i, j), ++in_n;
      else out += Y(i, j), ++out_n;
    }
  EXPECT_NEAR(in / in_n, 0.4, 5 * std::sqrt(0.24 / in_n));
  EXPECT_NEAR(out / out_n, 0.1, 5 * std::sqrt(0.09 / out_n));
  EXPECT_EQ(Y.diagonal().cwiseAbs().sum(), 0.0);
}

TEST(Model, NullGraphHasBaseRate) {
  const auto spec = ModelSpec::sbm(300, 3, 30.0, 0.5);
  RandomStream rng(12, 0);
  const RealMatrix Y = real_layers(sample_null(spec, rng).observation)[0];
  EXPECT_NEAR(offdiag_mean(Y), 0.1, 5 * std::sqrt(0.09 / (300 * 299 / 2)));
}

TEST(Model, ObservationShapes) {
  RandomStream rng(13, 0);
  const Instance ang = sample_planted(ModelSpec::angular_sync(10, 3, 1.0), rng);
  ASSERT_TRUE(is_complex(ang.observation));
  EXPECT_EQ(num_layers(ang.observation), 3u);
  const Instance orth = sample_planted(ModelSpec::orth_sync(6, 3, 1.0), rng);
  EXPECT_EQ(real_layers(orth.observation)[0].rows(), 18);
  EXPECT_EQ(orth.latent.blocks.size(), 6u);
  const Instance ml = sample_planted(ModelSpec::multilayer_sbm(20, 2, 0.5, {3.0, 4.0}, {0.5, 0.2}), rng);
  EXPECT_EQ(num_layers(ml.observation), 2u);
  EXPECT_EQ(ml.latent.layer_labels.size(), 2u);
  const Instance mln = sample_null(ModelSpec::multilayer_sbm(20, 2, 0.5, {3.0, 4.0}, {0.5, 0.2}), rng);
  EXPECT_EQ(num_layers(mln.observation), 2u);
}

TEST(Model, OrthSignalIsBlockProduct) {
  RandomStream rng(14, 0);
  const auto spec = ModelSpec::orth_sync(4, 2, 2.0);
  const Instance inst = sample_planted(spec, rng);
  const RealMatrix& T = real_layers(inst.theta_matrix)[0];
  const auto& O = inst.latent.blocks;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const RealMatrix expect = (2.0 / 2.0) * O[i].transpose() * O[j];
      EXPECT_LE((T.block(2 * i, 2 * j, 2, 2) - expect).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Model, ValidationRejectsOutOfDomainParameters) {
  RandomStream rng(1, 1);
  EXPECT_THROW(validate(ModelSpec::planted_submatrix(10, -1.0, 0.5)), Error);
  EXPECT_THROW(validate(ModelSpec::planted_submatrix(10, 1.0, 1.5)), Error);
  EXPECT_THROW(validate(ModelSpec::planted_dense_subgraph(10, 0.5, 0.6, 0.4)), Error);
  EXPECT_THROW(validate(ModelSpec::sbm(10, 1, 2.0, 0.5)), Error);
  EXPECT_THROW(validate(ModelSpec::sbm(10, 2, 8.0, 0.5)), Error);  // (1+lambda) d/n > 1
  EXPECT_THROW(validate(ModelSpec::multilayer_sbm(10, 2, 0.5, {1.0}, {0.5, 0.5})), Error);
  try {
    sample_planted(ModelSpec::planted_submatrix(5000, 1.0, 0.1), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
  EXPECT_THROW(validate(ModelSpec::orth_sync(1000, 5, 1.0)), Error);
}

TEST(Model, EdgeListRoundTrip) {
  RandomStream rng(15, 0);
  const RealMatrix Y = real_layers(sample_null(ModelSpec::sbm(50, 2, 5.0, 0.3), rng).observation)[0];
  const EdgeList e = to_edge_list(Y);
  EXPECT_EQ(from_edge_list(50, e), Y);
  RealMatrix bad = Y;
  bad(0, 1) = bad(1, 0) = 0.5;
  EXPECT_THROW(to_edge_list(bad), Error);
}

TEST(Model, ModelKindNamesRoundTrip) {
  for (auto k : {ModelKind::PlantedSubmatrix, ModelKind::PlantedDenseSubgraph, ModelKind::SBM, ModelKind::AngularSync,
                 ModelKind::OrthSync, ModelKind::MultiLayerSBM})
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  EXPECT_FALSE(parse_model_kind("nope").has_value());
}
