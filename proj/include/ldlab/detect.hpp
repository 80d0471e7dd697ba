#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/model.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/projection.hpp"
#include "ldlab/random.hpp"
#include "ldlab/split.hpp"
#include "ldlab/stats.hpp"

namespace ldlab {

// ---------------------------------------------------------------------------
// Top eigenpair

template <class Scalar>
struct TopEigen {
  double value = 0.0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
  int lanczos_steps = 0;  ///< 0 when the dense solver was used
};

namespace detail {

template <class Scalar>
TopEigen<Scalar> top_eigen_dense(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(A);
  if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
  TopEigen<Scalar> r;
  const Eigen::Index last = A.rows() - 1;
  r.value = es.eigenvalues()(last);
  r.vector = es.eigenvectors().col(last);
  return r;
}

}  // namespace detail

/**
 * @brief Largest eigenvalue and a unit eigenvector of a self-adjoint matrix.
 *
 * Dense solver up to `dense_cutoff`; above it, Lanczos with full
 * reorthogonalization from a fixed start vector, stopping once the Ritz
 * residual falls below 1e-10 max(1, |theta|). Falls back to the dense
 * solver if Lanczos exhausts its step budget.
 */
template <class Scalar>
TopEigen<Scalar> top_eigenpair(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A, int dense_cutoff = 256,
                               double tol = 1e-10) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = A.rows();
  if (A.cols() != n || n == 0) fail(ErrorCode::ShapeMismatch, "top_eigenpair needs a nonempty square matrix");
  if (n <= dense_cutoff) return detail::top_eigen_dense<Scalar>(A);

  const int m_max = static_cast<int>(std::min<Eigen::Index>(n, 600));
  Mat Q(n, m_max + 1);
  std::vector<double> alpha, beta;
  const CounterRandom start(0x6c616e637a6f7331ULL);
  Vec q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = Scalar(start.uniform(static_cast<std::uint64_t>(i)) - 0.5);
  Q.col(0) = q.normalized();
  for (int j = 0; j < m_max; ++j) {
    Vec w = A * Q.col(j);
    const double a = std::real(Q.col(j).dot(w));
    alpha.push_back(a);
    w -= Scalar(a) * Q.col(j);
    if (j > 0) w -= Scalar(beta[j - 1]) * Q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vec h = Q.leftCols(j + 1).adjoint() * w;
      w -= Q.leftCols(j + 1) * h;
    }
    const double b = w.norm();
    const bool check = ((j + 1) % 10 == 0) || j + 1 == m_max || b < 1e-300;
    if (check) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), j + 1);
      Eigen::VectorXd sub(j);
      for (int k = 0; k < j; ++k) sub(k) = beta[k];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts;
      ts.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double theta = ts.eigenvalues()(j);
      const Eigen::VectorXd s = ts.eigenvectors().col(j);
      const double res = b * std::abs(s(j));
      if (res <= tol * std::max(1.0, std::abs(theta)) || b < 1e-300) {
        TopEigen<Scalar> r;
        r.value = theta;
        r.vector = (Q.leftCols(j + 1) * s.cast<Scalar>()).normalized();
        r.lanczos_steps = j + 1;
        return r;
      }
    }
    beta.push_back(b);
    Q.col(j + 1) = w / Scalar(b);
  }
  return detail::top_eigen_dense<Scalar>(A);
}

// ---------------------------------------------------------------------------
// Estimators (all act on one matrix of the A half)

/// X = v v^* for the top eigenvector v; ||X||_F = 1.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> spectral_estimator(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  const auto top = top_eigenpair<Scalar>(A);
  return top.vector * top.vector.adjoint();
}

/// Indicator of the top ceil(rho n) degree vertices; ties go to the smaller index.
inline RealMatrix degree_estimator(const RealMatrix& A, double rho) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) fail(ErrorCode::ShapeMismatch, "degree_estimator needs a square matrix");
  if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::InvalidParams, "rho must lie in [0,1]");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (A(i, j) != 0.0 && A(i, j) != 1.0) fail(ErrorCode::NonBinaryInput, "degree_estimator needs a 0/1 matrix");
  const Eigen::VectorXd deg = A.rowwise().sum();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return deg(x) > deg(y); });
  const auto k = static_cast<Eigen::Index>(std::ceil(rho * static_cast<double>(n) - 1e-12));
  Eigen::VectorXd sel = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < std::min(k, n); ++t) sel(order[t]) = 1.0;
  return sel * sel.transpose();
}

// ---------------------------------------------------------------------------
// One-sided statistic

/// Entry-variance structure of a null noise matrix, used to standardize <X, W>.
struct NoiseProfile {
  enum class Kind { Independent, Symmetric, Hermitian };
  Kind kind = Kind::Independent;
  double diag_variance = 1.0;
};

inline NoiseProfile noise_profile(const ModelSpec& s) {
  switch (s.kind) {
    case ModelKind::PlantedSubmatrix:
    case ModelKind::OrthSync:
      return {NoiseProfile::Kind::Symmetric, 2.0};
    case ModelKind::AngularSync:
      return {NoiseProfile::Kind::Hermitian, 1.0};
    default:
      return {NoiseProfile::Kind::Independent, 1.0};
  }
}

/// Standard deviation of Re<X, W> for W drawn from `profile` (unit off-diagonal variance).
template <class Scalar>
double null_sd(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X, const NoiseProfile& profile) {
  if (profile.kind == NoiseProfile::Kind::Independent) return X.norm();
  const Eigen::Index n = X.rows();
  double var = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xr = std::real(X(i, i));
    var += profile.diag_variance * xr * xr;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (profile.kind == NoiseProfile::Kind::Symmetric) {
        const double a = std::real(X(i, j)) + std::real(X(j, i));
        var += a * a;
      } else {
        const Complex a = std::conj(Complex(X(i, j))) + Complex(X(j, i));
        var += 0.5 * std::norm(a);
      }
    }
  }
  return std::sqrt(var);
}

/// Re<X, B - center> / sd, where sd = ||X||_F for the default independent profile.
template <class Scalar>
double one_sided_statistic(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X,
                           const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& B,
                           const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& center,
                           const NoiseProfile& profile = {}) {
  if (X.rows() != B.rows() || X.cols() != B.cols() || center.rows() != B.rows() || center.cols() != B.cols())
    fail(ErrorCode::ShapeMismatch, "statistic operands differ in shape");
  const double sd = null_sd<Scalar>(X, profile);
  if (!(sd > 0.0)) fail(ErrorCode::ZeroEstimator, "estimator output is zero");
  const Scalar ip = (X.array().conjugate() * (B - center).array()).sum();
  return std::real(ip) / sd;
}

// ---------------------------------------------------------------------------
// One-sided test pipeline

enum class EstimatorKind { Spectral, Degree, Oracle, Zero };

inline const char* to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::Spectral: return "spectral";
    case EstimatorKind::Degree: return "degree";
    case EstimatorKind::Oracle: return "oracle";
    case EstimatorKind::Zero: return "zero";
  }
  return "unknown";
}

inline std::optional<EstimatorKind> parse_estimator(const std::string& s) {
  for (auto e : {EstimatorKind::Spectral, EstimatorKind::Degree, EstimatorKind::Oracle, EstimatorKind::Zero})
    if (s == to_string(e)) return e;
  return std::nullopt;
}

/**
 * Fixed: reject when the standardized statistic is >= value.
 * Correlation: reject when <X, B - center> >= tau(c) ||X||_F; value holds c.
 * Pilot: Correlation with c estimated from pilot_trials planted runs.
 */
struct ThresholdRule {
  enum class Kind { Fixed, Correlation, Pilot };
  Kind kind = Kind::Fixed;
  double value = 5.0;
  int pilot_trials = 50;
};

inline const char* to_string(ThresholdRule::Kind k) {
  switch (k) {
    case ThresholdRule::Kind::Fixed: return "fixed";
    case ThresholdRule::Kind::Correlation: return "correlation";
    case ThresholdRule::Kind::Pilot: return "pilot";
  }
  return "unknown";
}

struct OneSidedSetup {
  ModelSpec spec;  ///< target model; planted trials draw from its boosted version
  EstimatorKind estimator = EstimatorKind::Spectral;
  SplitParams split = GaussianSplitParams{0.1};
  ThresholdRule threshold;
  bool project = false;     ///< run min_norm_correlated on X (binary models)
  double project_c = 0.3;
  std::size_t trials_P = 200;
  std::size_t trials_Q = 1000;
  int layer = 0;            ///< which observation matrix the estimator sees
  unsigned threads = 1;
};

struct TestReport {
  std::string model;
  ModelSpec spec;
  SplitParams split;
  std::string estimator;
  std::string threshold_rule;
  double threshold = 0.0;  ///< Fixed: level in sd units; Correlation/Pilot: coefficient in ||X||_F units
  double c_used = 0.0;     ///< correlation constant behind a correlation-form threshold (0 for Fixed)
  std::size_t trials_P = 0, trials_Q = 0;
  double typeI = 0.0;
  Interval typeI_ci;
  double typeII = 0.0;
  double typeII_lo = 0.0;
  double typeII_hi = 1.0;  ///< one-sided 95% upper bound
  std::size_t invalid_P = 0, invalid_Q = 0;
  bool projection_active = false;
  double projection_mean_iterations = 0.0;
  std::size_t projection_infeasible = 0;
  std::uint64_t seed = 0;
};

/// Parameters for the planted side: lambda * sqrt(1+kappa^2) or densities / a.
inline ModelSpec boosted_spec(const ModelSpec& s, const SplitParams& split) {
  ModelSpec b = s;
  if (is_binary(s.kind)) {
    if (!std::holds_alternative<BernoulliSplitParams>(split))
      fail(ErrorCode::InvalidParams, "binary models need a Bernoulli split");
    const double a = std::get<BernoulliSplitParams>(split).a;
    if (!(a > 0.0)) fail(ErrorCode::InvalidParams, "Bernoulli retention a must be positive");
    switch (s.kind) {
      case ModelKind::PlantedDenseSubgraph:
        b.p0 = s.p0 / a;
        b.p1 = s.p1 / a;
        break;
      case ModelKind::SBM:
        b.d = s.d / a;
        break;
      default:
        for (auto& d : b.layer_degrees) d /= a;
        break;
    }
  } else {
    if (!std::holds_alternative<GaussianSplitParams>(split))
      fail(ErrorCode::InvalidParams, "Gaussian models need a Gaussian split");
    const double k = std::get<GaussianSplitParams>(split).kappa;
    b.lambda = s.lambda * std::sqrt(1.0 + k * k);
  }
  validate(b);
  return b;
}

/// Split parameters with the Bernoulli base rate filled in from the boosted null.
inline SplitParams resolved_split(const OneSidedSetup& st) {
  if (std::holds_alternative<BernoulliSplitParams>(st.split)) {
    BernoulliSplitParams p = std::get<BernoulliSplitParams>(st.split);
    p.p = base_rate(boosted_spec(st.spec, st.split), st.layer);
    return p;
  }
  return st.split;
}

/// Threshold coefficient (units of ||X||_F) for correlation constant c.
inline double correlation_threshold(const ModelSpec& s, const SplitParams& split, double c) {
  if (is_binary(s.kind)) {
    const ModelConstraint mc = model_constraint(boosted_spec(s, split));
    return c / 8.0 * mc.M;
  }
  const double k = std::get<GaussianSplitParams>(split).kappa;
  const double kinv2 = 1.0 / (k * k);
  switch (s.kind) {
    case ModelKind::PlantedSubmatrix:
      return c / 4.0 * s.lambda * s.rho * s.n * std::sqrt((1.0 + k * k) / (1.0 + kinv2));
    case ModelKind::AngularSync:
      return c / (8.0 * std::sqrt(1.0 + kinv2)) * s.lambda * std::sqrt(static_cast<double>(s.n));
    case ModelKind::OrthSync:
      return c / (8.0 * std::sqrt(1.0 + kinv2)) * s.lambda * std::sqrt(static_cast<double>(s.n) * s.dim);
    default:
      fail(ErrorCode::InvalidSpec, "no correlation threshold for this model");
  }
}

struct TrialOutcome {
  bool valid = false;
  bool reject = false;  ///< test output 1 ("planted")
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double raw_ratio = std::numeric_limits<double>::quiet_NaN();  ///< <X,B-center>/||X||_F
  double correlation = std::numeric_limits<double>::quiet_NaN(); ///< with the reference signal, if any
  int projection_iterations = -1;
  bool projection_infeasible = false;
};

/**
 * @brief One evaluation of the pipeline split -> estimate -> (project) -> statistic.
 *
 * `reference` supplies the latent signal to the oracle estimator and the
 * correlation diagnostic; it is never used by the other estimators.
 */
class OneSidedTest {
 public:
  OneSidedTest(OneSidedSetup setup, double correlation_coefficient = 0.0)
      : st_(std::move(setup)), split_(resolved_split(st_)), boosted_(boosted_spec(st_.spec, st_.split)),
        profile_(noise_profile(st_.spec)), corr_coef_(correlation_coefficient) {}

  const OneSidedSetup& setup() const { return st_; }
  const ModelSpec& boosted() const { return boosted_; }
  const SplitParams& split() const { return split_; }

  TrialOutcome evaluate(const Instance& y, const Instance* reference, RandomStream& rng) const {
    TrialOutcome out;
    const SplitPair sp = std::holds_alternative<GaussianSplitParams>(split_)
                             ? gaussian_split(y.observation, std::get<GaussianSplitParams>(split_), rng,
                                              null_diag_variance(st_.spec))
                             : bernoulli_split(y.observation, std::get<BernoulliSplitParams>(split_), rng);
    if (is_complex(sp.A))
      return finish<Complex>(complex_layers(sp.A).at(st_.layer), complex_layers(sp.B).at(st_.layer), reference, out);
    return finish<double>(real_layers(sp.A).at(st_.layer), real_layers(sp.B).at(st_.layer), reference, out);
  }

 private:
  template <class Scalar>
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  template <class Scalar>
  const Mat<Scalar>* reference_signal(const Instance* ref) const {
    if (!ref || !ref->planted) return nullptr;
    if constexpr (std::is_same_v<Scalar, double>) {
      const auto& t = real_layers(ref->theta_matrix);
      return t.empty() ? nullptr : &t.at(st_.layer);
    } else {
      const auto& t = complex_layers(ref->theta_matrix);
      return t.empty() ? nullptr : &t.at(st_.layer);
    }
  }

  template <class Scalar>
  TrialOutcome finish(const Mat<Scalar>& A, const Mat<Scalar>& B, const Instance* reference, TrialOutcome out) const {
    const Mat<Scalar>* sig = reference_signal<Scalar>(reference);
    Mat<Scalar> X;
    switch (st_.estimator) {
      case EstimatorKind::Spectral:
        X = spectral_estimator<Scalar>(A);
        break;
      case EstimatorKind::Degree:
        if constexpr (std::is_same_v<Scalar, double>) {
          const double rho = st_.spec.kind == ModelKind::PlantedDenseSubgraph ? st_.spec.rho : 1.0 / st_.spec.q;
          X = degree_estimator(A, rho);
        } else {
          fail(ErrorCode::InvalidParams, "degree estimator needs a graph observation");
        }
        break;
      case EstimatorKind::Oracle:
        X = sig ? *sig : Mat<Scalar>::Zero(A.rows(), A.cols());
        break;
      case EstimatorKind::Zero:
        X = Mat<Scalar>::Zero(A.rows(), A.cols());
        break;
    }
    if constexpr (std::is_same_v<Scalar, double>) {
      if (st_.project && X.norm() > 0.0) {
        const ModelConstraint mc = model_constraint(boosted_);
        try {
          const ProjectionResult pr = min_norm_correlated(X, st_.project_c, mc.M, mc.K);
          X = pr.Q_hat;
          out.projection_iterations = pr.iterations;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Infeasible && e.code() != ErrorCode::MaxIterations) throw;
          out.projection_infeasible = true;
          return out;
        }
      }
    }
    const double xf = X.norm();
    if (!(xf > 0.0)) return out;  // ZeroEstimator: trial invalid, test outputs 0

    Mat<Scalar> center = Mat<Scalar>::Zero(B.rows(), B.cols());
    if (std::holds_alternative<BernoulliSplitParams>(split_)) {
      const auto& bp = std::get<BernoulliSplitParams>(split_);
      center.setConstant(Scalar(bp.p * bp.b));
      center.diagonal().setZero();
    }
    out.valid = true;
    out.statistic = one_sided_statistic<Scalar>(X, B, center, profile_);
    out.raw_ratio = one_sided_statistic<Scalar>(X, B, center);
    if (sig && sig->norm() > 0.0)
      out.correlation = std::real((X.array().conjugate() * sig->array()).sum()) / (xf * sig->norm());
    if (st_.threshold.kind == ThresholdRule::Kind::Fixed)
      out.reject = out.statistic >= st_.threshold.value;
    else
      out.reject = out.raw_ratio >= corr_coef_;
    return out;
  }

  OneSidedSetup st_;
  SplitParams split_;
  ModelSpec boosted_;
  NoiseProfile profile_;
  double corr_coef_;
};

/// Streams: planted trials (seed,0), null trials (seed,1), pilot trials (seed,2); trial i uses substream i.
inline RandomStream trial_stream(std::uint64_t seed, std::uint64_t family, std::size_t i) {
  return RandomStream(seed, family).substream(i);
}

inline std::vector<TrialOutcome> run_planted_trials(const OneSidedTest& test, std::size_t trials, std::uint64_t seed,
                                                    std::uint64_t family = 0) {
  return parallel_map<TrialOutcome>(trials, test.setup().threads, [&](std::size_t i) {
    RandomStream s = trial_stream(seed, family, i);
    const Instance y = sample_planted(test.boosted(), s);
    return test.evaluate(y, &y, s);
  });
}

/// Null trials; the oracle's reference is an independent draw of the planted law.
inline std::vector<TrialOutcome> run_null_trials(const OneSidedTest& test, std::size_t trials, std::uint64_t seed) {
  const bool needs_ref = test.setup().estimator == EstimatorKind::Oracle;
  return parallel_map<TrialOutcome>(trials, test.setup().threads, [&](std::size_t i) {
    RandomStream s = trial_stream(seed, 1, i);
    const Instance y = sample_null(test.boosted(), s);
    if (needs_ref) {
      RandomStream rs = s.substream(0x7265665f64726177ULL);
      const Instance ref = sample_planted(test.boosted(), rs);
      return test.evaluate(y, &ref, s);
    }
    return test.evaluate(y, nullptr, s);
  });
}

/// Mean planted-side correlation over pilot trials, clipped into [0.01, 1].
inline double pilot_correlation(const OneSidedSetup& st, std::uint64_t seed) {
  const OneSidedTest probe(st, 0.0);
  const auto out = run_planted_trials(probe, static_cast<std::size_t>(st.threshold.pilot_trials), seed, 2);
  std::vector<double> c;
  for (const auto& o : out)
    if (o.valid && std::isfinite(o.correlation)) c.push_back(o.correlation);
  const double m = c.empty() ? 0.0 : mean_and_stderr(c).mean;
  return std::clamp(m, 0.01, 1.0);
}

/// Threshold bookkeeping resolved before any trial runs.
struct ResolvedThreshold {
  double c = 0.0;
  double coefficient = 0.0;  ///< correlation coefficient (Correlation/Pilot)
};

inline ResolvedThreshold resolve_threshold(const OneSidedSetup& st, std::uint64_t seed) {
  ResolvedThreshold r;
  switch (st.threshold.kind) {
    case ThresholdRule::Kind::Fixed:
      break;
    case ThresholdRule::Kind::Correlation:
      r.c = st.threshold.value;
      r.coefficient = correlation_threshold(st.spec, st.split, r.c);
      break;
    case ThresholdRule::Kind::Pilot:
      r.c = pilot_correlation(st, seed);
      r.coefficient = correlation_threshold(st.spec, st.split, r.c);
      break;
  }
  return r;
}

inline TestReport summarize(const OneSidedSetup& st, const ResolvedThreshold& rt, const std::vector<TrialOutcome>& P,
                            const std::vector<TrialOutcome>& Q, std::uint64_t seed) {
  TestReport r;
  r.model = to_string(st.spec.kind);
  r.spec = st.spec;
  r.split = resolved_split(st);
  r.estimator = to_string(st.estimator);
  r.threshold_rule = to_string(st.threshold.kind);
  r.threshold = st.threshold.kind == ThresholdRule::Kind::Fixed ? st.threshold.value : rt.coefficient;
  r.c_used = rt.c;
  r.trials_P = P.size();
  r.trials_Q = Q.size();
  std::size_t kp = 0, kq = 0, iters = 0, projected = 0;
  for (const auto& o : P) {
    kp += o.reject;
    r.invalid_P += !o.valid;
  }
  for (const auto& o : Q) {
    kq += o.reject;
    r.invalid_Q += !o.valid;
  }
  for (const auto* side : {&P, &Q})
    for (const auto& o : *side) {
      if (o.projection_iterations >= 0) {
        iters += static_cast<std::size_t>(o.projection_iterations);
        ++projected;
      }
      r.projection_infeasible += o.projection_infeasible;
    }
  r.typeI = P.empty() ? 0.0 : static_cast<double>(kp) / P.size();
  r.typeI_ci = wilson_interval(kp, P.size());
  r.typeII = Q.empty() ? 0.0 : static_cast<double>(kq) / Q.size();
  r.typeII_lo = wilson_interval(kq, Q.size()).lo;
  r.typeII_hi = wilson_upper(kq, Q.size());
  r.projection_active = st.project;
  r.projection_mean_iterations = projected ? static_cast<double>(iters) / projected : 0.0;
  r.seed = seed;
  return r;
}

/// Full experiment: planted trials on the boosted model, null trials on its null.
inline TestReport run_one_sided_experiment(const OneSidedSetup& st, std::uint64_t seed) {
  const ResolvedThreshold rt = resolve_threshold(st, seed);
  const OneSidedTest test(st, rt.coefficient);
  const auto P = run_planted_trials(test, st.trials_P, seed);
  const auto Q = run_null_trials(test, st.trials_Q, seed);
  return summarize(st, rt, P, Q, seed);
}

// ---------------------------------------------------------------------------
// Hidden informative sample

/// A detector maps one observation (plus private randomness) to 0/1.
using Detector = std::function<bool(const Instance&, RandomStream&)>;

inline Detector pipeline_detector(std::shared_ptr<const OneSidedTest> test) {
  return [test](const Instance& y, RandomStream& rng) { return test->evaluate(y, nullptr, rng).reject; };
}

/// Global-sum detector: sum_{i<j} (Y_ij - center) / sqrt(C(n,2) var) >= level on matrix 0.
inline Detector sum_detector(double level, double center = 0.0, double var = 1.0) {
  return [=](const Instance& y, RandomStream&) {
    const RealMatrix& Y = real_layers(y.observation).at(0);
    const Eigen::Index n = Y.rows();
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) s += Y(i, j) - center;
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return s / std::sqrt(pairs * var) >= level;
  };
}

struct RateEstimate {
  double rate = 0.0;
  Interval ci;
  double stderr_ = 0.0;
  std::size_t trials = 0;
};

inline RateEstimate rate_of(std::size_t k, std::size_t n) {
  RateEstimate r;
  r.trials = n;
  r.rate = n ? static_cast<double>(k) / n : 0.0;
  r.ci = wilson_interval(k, n);
  r.stderr_ = n ? std::sqrt(r.rate * (1.0 - r.rate) / n) : 0.0;
  return r;
}

/// Per-sample false-alarm rate of `detector` under the null of `spec`.
inline RateEstimate measure_false_alarm(const ModelSpec& spec, const Detector& detector, std::size_t trials,
                                        std::uint64_t seed, unsigned threads = 1) {
  const auto hits = parallel_map<char>(trials, threads, [&](std::size_t i) -> char {
    RandomStream s = trial_stream(seed, 3, i);
    const Instance y = sample_null(spec, s);
    return detector(y, s) ? 1 : 0;
  });
  return rate_of(static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1)), trials);
}

struct HiddenSampleReport {
  int M = 0;
  RateEstimate power;        ///< under H1: one planted sample at a uniform index
  RateEstimate false_alarm;  ///< under H0: all samples null
  std::uint64_t seed = 0;
};

/**
 * OR-rule over M samples. Trial i of each hypothesis uses its own stream;
 * sample j of a trial uses substream j, so stopping at the first positive
 * does not change any other draw.
 */
inline HiddenSampleReport hidden_sample_experiment(const ModelSpec& spec, int M, const Detector& detector,
                                                   std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  if (M < 1) fail(ErrorCode::InvalidParams, "M must be at least 1");
  auto run = [&](bool planted_side) {
    const auto hits = parallel_map<char>(trials, threads, [&](std::size_t i) -> char {
      RandomStream base = trial_stream(seed, planted_side ? 4 : 5, i);
      const int hidden = planted_side ? static_cast<int>(base.uniform_int(static_cast<std::uint64_t>(M))) : -1;
      for (int j = 0; j < M; ++j) {
        RandomStream s = base.substream(static_cast<std::uint64_t>(j));
        const Instance y = (j == hidden) ? sample_planted(spec, s) : sample_null(spec, s);
        if (detector(y, s)) return 1;
      }
      return 0;
    });
    return rate_of(static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1)), trials);
  };
  HiddenSampleReport r;
  r.M = M;
  r.power = run(true);
  r.false_alarm = run(false);
  r.seed = seed;
  return r;
}

// ---------------------------------------------------------------------------
// Contiguity verdict

struct ContiguityInputs {
  double adv_sq = 1.0;           ///< Delta; +inf allowed as a marker
  double runtime_exponent = 1.0; ///< T
  double dimension = 1.0;        ///< N
  double degree = 1.0;           ///< D
  double heuristic_constant = 1.0;  ///< C
  double type1 = 0.0;            ///< type-I accuracy c of the candidate test
  double type1_floor = 0.05;     ///< c_min
  double epsilon = 0.0;
  double slack = 0.01;           ///< eta
};

struct ContiguityVerdict {
  bool cond_degree = false;
  bool cond_type1 = false;
  bool cond_eps = false;
  bool ruled_out = false;
  double margin_degree = 0.0;  ///< D/C - (log Delta + (T+1) log N)
  double margin_type1 = 0.0;   ///< c - c_min
  double margin_eps = 0.0;     ///< eta - eps Delta
};

inline ContiguityVerdict contiguity_verdict(const ContiguityInputs& in) {
  if (!(in.adv_sq >= 1.0) || !(in.heuristic_constant > 0.0) || !(in.dimension >= 1.0) || in.epsilon < 0.0)
    fail(ErrorCode::InvalidParams, "contiguity inputs out of range");
  ContiguityVerdict v;
  v.margin_degree = in.degree / in.heuristic_constant -
                    (std::log(in.adv_sq) + (in.runtime_exponent + 1.0) * std::log(in.dimension));
  v.cond_degree = v.margin_degree >= 0.0;
  v.margin_type1 = in.type1 - in.type1_floor;
  v.cond_type1 = v.margin_type1 >= 0.0;
  // An infinite advantage never certifies; otherwise eps = 0 carries no load.
  const double load = std::isinf(in.adv_sq) ? in.adv_sq : (in.epsilon == 0.0 ? 0.0 : in.epsilon * in.adv_sq);
  v.margin_eps = in.slack - load;
  v.cond_eps = v.margin_eps >= 0.0;
  v.ruled_out = v.cond_degree && v.cond_type1 && v.cond_eps;
  return v;
}

}  // namespace ldlab
