#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ldlab/errors.hpp"
#include "ldlab/model.hpp"

namespace ldlab {

/// K = { Y : max|Y_ij| <= tau, Y + shift PSD }.
struct ConstraintSetK {
  double tau = 0.0;
  RealMatrix shift;
};

struct ProjectionResult {
  RealMatrix Q_hat;
  int iterations = 0;
  double residual = 0.0;  ///< Frobenius gap between the last two cycle iterates
  bool feasible = false;
};

struct DykstraOptions {
  int max_cycles = 5000;
  double rel_tol = 1e-8;
  double feas_tol = 1e-6;
};

inline RealMatrix project_entrywise_cap(const RealMatrix& Y, double tau) {
  if (tau < 0.0) fail(ErrorCode::InvalidParams, "tau must be nonnegative");
  return Y.cwiseMax(-tau).cwiseMin(tau);
}

/// Nearest R (Frobenius) with R + shift PSD: clip the spectrum of Y + shift at 0.
inline RealMatrix project_psd_shift(const RealMatrix& Y, const RealMatrix& shift) {
  if (Y.rows() != Y.cols() || shift.rows() != Y.rows() || shift.cols() != Y.cols())
    fail(ErrorCode::ShapeMismatch, "project_psd_shift needs equal square shapes");
  const RealMatrix Z = Y + shift;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(Z);
  if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
  const Eigen::VectorXd& w = es.eigenvalues();
  if (w.minCoeff() >= 0.0) return Y;
  const RealMatrix& V = es.eigenvectors();
  RealMatrix P = V * w.cwiseMax(0.0).asDiagonal() * V.transpose();
  P = 0.5 * (P + P.transpose());
  return P - shift;
}

namespace detail {

inline RealMatrix project_halfspace(const RealMatrix& Z, const RealMatrix& X, double x_norm2, double beta) {
  const double g = beta - (X.array() * Z.array()).sum();
  if (g <= 0.0) return Z;
  return Z + (g / x_norm2) * X;
}

}  // namespace detail

/**
 * @brief Minimum Frobenius-norm Q in K with <X,Q> >= (c/2) M ||X||_F.
 *
 * Cyclic Dykstra from the origin over half-space, cap, PSD-shift (in that
 * order). The limit is the projection of 0 onto the intersection.
 */
inline ProjectionResult min_norm_correlated(const RealMatrix& X, double c, double M, const ConstraintSetK& K,
                                            const DykstraOptions& opt = {}) {
  const Eigen::Index n = X.rows();
  if (X.cols() != n || K.shift.rows() != n || K.shift.cols() != n)
    fail(ErrorCode::ShapeMismatch, "X and shift must be equal square shapes");
  if (!(c > 0.0 && c <= 1.0)) fail(ErrorCode::InvalidParams, "c must lie in (0,1]");
  if (!(M > 0.0)) fail(ErrorCode::InvalidParams, "M must be positive");
  if (K.tau < 0.0) fail(ErrorCode::InvalidParams, "tau must be nonnegative");
  const double xf = X.norm();
  if (xf == 0.0) fail(ErrorCode::ZeroEstimator, "X is zero");
  const double beta = 0.5 * c * M * xf;
  // Hoelder: <X,Q> <= tau ||X||_1 on the cap.
  if (K.tau * X.cwiseAbs().sum() < beta) fail(ErrorCode::Infeasible, "half-space misses the entrywise cap");

  const double x_norm2 = xf * xf;
  const double tol = opt.rel_tol * (1.0 + xf);
  RealMatrix x = RealMatrix::Zero(n, n);
  RealMatrix p1 = RealMatrix::Zero(n, n), p2 = RealMatrix::Zero(n, n), p3 = RealMatrix::Zero(n, n);
  ProjectionResult res;
  for (int cycle = 1; cycle <= opt.max_cycles; ++cycle) {
    const RealMatrix prev = x;
    RealMatrix y = detail::project_halfspace(x + p1, X, x_norm2, beta);
    p1 += x - y;
    x = y;
    y = project_entrywise_cap(x + p2, K.tau);
    p2 += x - y;
    x = y;
    y = project_psd_shift(x + p3, K.shift);
    p3 += x - y;
    x = y;
    res.iterations = cycle;
    res.residual = (x - prev).norm();
    if (res.residual < tol) break;
  }
  res.Q_hat = x;

  const double cap_violation = std::max(0.0, x.cwiseAbs().maxCoeff() - K.tau);
  const double half_violation = std::max(0.0, beta - (X.array() * x.array()).sum()) / xf;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(x + K.shift, Eigen::EigenvaluesOnly);
  const double psd_violation = std::max(0.0, -es.eigenvalues().minCoeff());
  const double scale = 1.0 + beta / xf;
  res.feasible = cap_violation <= opt.feas_tol * scale && half_violation <= opt.feas_tol * scale &&
                 psd_violation <= opt.feas_tol * scale;
  if (!res.feasible && res.residual >= tol)
    fail(ErrorCode::MaxIterations, "Dykstra did not reach a feasible point within the cycle budget");
  if (!res.feasible) fail(ErrorCode::Infeasible, "Dykstra stalled outside the intersection");
  return res;
}

/// K and the norm scale M matching a binary model's signal matrix.
struct ModelConstraint {
  ConstraintSetK K;
  double M = 0.0;
};

inline ModelConstraint model_constraint(const ModelSpec& s) {
  ModelConstraint mc;
  const int n = s.n;
  switch (s.kind) {
    case ModelKind::PlantedDenseSubgraph:
      mc.K.tau = s.p1;
      mc.K.shift = RealMatrix::Zero(n, n);
      mc.M = (s.p1 - s.p0) * s.rho * n;
      break;
    case ModelKind::SBM:
      mc.K.tau = (s.q - 1) * s.lambda * s.d / n;
      mc.K.shift = (s.lambda * s.d / n) * RealMatrix::Identity(n, n);
      mc.M = std::sqrt(static_cast<double>(s.q - 1)) * s.lambda * s.d;
      break;
    case ModelKind::MultiLayerSBM: {
      const double d1 = s.layer_degrees.at(0), l1 = s.layer_lambdas.at(0);
      mc.K.tau = (1.0 + (s.q - 1) * l1) * d1 / n;
      mc.K.shift = (l1 * d1 / n) * RealMatrix::Identity(n, n);
      mc.M = std::sqrt(static_cast<double>(s.q - 1)) * l1 * d1;
      break;
    }
    default:
      fail(ErrorCode::InvalidSpec, "projection constraint is defined for binary models only");
  }
  return mc;
}

}  // namespace ldlab
