#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/model.hpp"
#include "ldlab/random.hpp"
#include "ldlab/stats.hpp"

namespace ldlab {

struct GaussianSplitParams {
  double kappa = 0.1;
};

/// a = b = 1/2 keeps every cell nonnegative for all p; larger values need p >= (a+b-1)/(ab).
struct BernoulliSplitParams {
  double p = 0.0;
  double a = 0.5;
  double b = 0.5;
};

using SplitParams = std::variant<GaussianSplitParams, BernoulliSplitParams>;

struct SplitPair {
  Observation A;
  Observation B;
  SplitParams params;
  std::uint64_t external_key = 0;  ///< key of the counter stream that drew Z or (xi, xi')
};

/// Cells ordered (1,1), (1,0), (0,1), (0,0) for (xi, xi').
using PairTable = std::array<double, 4>;

/// Joint law of (xi, xi'): masses pab, a-pab, b-pab, 1-a-b+pab.
inline PairTable bernoulli_pair_pmf(const BernoulliSplitParams& prm) {
  const double p = prm.p, a = prm.a, b = prm.b;
  if (!(p >= 0.0 && p <= 1.0 && a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
    fail(ErrorCode::InvalidParams, "p, a, b must lie in [0,1]");
  const double pab = p * a * b;
  CompensatedSum rest;
  rest.add(1.0);
  rest.add(-a);
  rest.add(-b);
  rest.add(pab);
  PairTable t{pab, a - pab, b - pab, rest.value()};
  for (double c : t)
    if (c < 0.0) fail(ErrorCode::InvalidParams, "Bernoulli split cell mass is negative");
  return t;
}

/// E[Y xi' | Y xi = a_val] for Y ~ Ber(q) independent of (xi, xi').
/// Formula only: the pair table itself need not be valid here.
inline double conditional_mean_b(double q, const BernoulliSplitParams& prm, double a_val) {
  for (double v : {q, prm.p, prm.a, prm.b})
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidParams, "q, p, a, b must lie in [0,1]");
  const double qa = q * prm.a;
  if (qa >= 1.0) fail(ErrorCode::DegenerateConditioning, "qa = 1 leaves Y*xi = 0 with probability zero");
  return q * prm.b - ((q - prm.p) * prm.b / (1.0 - qa)) * (a_val - qa);
}

namespace detail {

inline std::uint64_t entry_index(std::size_t layer, Eigen::Index m, Eigen::Index i, Eigen::Index j) {
  return (static_cast<std::uint64_t>(layer) * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(i)) *
             static_cast<std::uint64_t>(m) +
         static_cast<std::uint64_t>(j);
}

inline void require_square_symmetric(const RealMatrix& Y) {
  if (Y.rows() != Y.cols()) fail(ErrorCode::ShapeMismatch, "observation must be square");
}

}  // namespace detail

/**
 * @brief A = (Y + kZ)/sqrt(1+k^2), B = (Y - Z/k)/sqrt(1+k^-2).
 *
 * Z copies the null structure of Y: symmetric (Hermitian for complex
 * layers), unit off-diagonal variance, diagonal variance `diag_variance`.
 * Z_ij depends only on (key, layer, i, j).
 */
inline SplitPair gaussian_split(const Observation& Y, const GaussianSplitParams& prm, RandomStream& rng,
                                double diag_variance = 1.0) {
  if (!(prm.kappa > 0.0) || !std::isfinite(prm.kappa)) fail(ErrorCode::InvalidParams, "kappa must be positive");
  const double k = prm.kappa;
  const double sa = 1.0 / std::sqrt(1.0 + k * k);
  const double sb = 1.0 / std::sqrt(1.0 + 1.0 / (k * k));
  const double dsd = std::sqrt(diag_variance);
  SplitPair out;
  out.params = prm;
  out.external_key = rng.next_u64();
  const CounterRandom cr(out.external_key);

  if (Y.index() == 0) {
    std::vector<RealMatrix> A, B;
    const auto& layers = std::get<0>(Y);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const RealMatrix& y = layers[l];
      detail::require_square_symmetric(y);
      const Eigen::Index m = y.rows();
      RealMatrix a(m, m), b(m, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
          double z = cr.normal(detail::entry_index(l, m, i, j));
          if (i == j) z *= dsd;
          a(i, j) = sa * (y(i, j) + k * z);
          b(i, j) = sb * (y(i, j) - z / k);
          a(j, i) = a(i, j);
          b(j, i) = b(i, j);
        }
      A.push_back(std::move(a));
      B.push_back(std::move(b));
    }
    out.A = std::move(A);
    out.B = std::move(B);
  } else {
    std::vector<ComplexMatrix> A, B;
    const auto& layers = std::get<1>(Y);
    const double h = std::sqrt(0.5);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const ComplexMatrix& y = layers[l];
      if (y.rows() != y.cols()) fail(ErrorCode::ShapeMismatch, "observation must be square");
      const Eigen::Index m = y.rows();
      ComplexMatrix a(m, m), b(m, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
          double z0, z1;
          cr.normal_pair(detail::entry_index(l, m, i, j), 0, z0, z1);
          const Complex z = (i == j) ? Complex(dsd * z0, 0.0) : Complex(h * z0, h * z1);
          a(i, j) = sa * (y(i, j) + k * z);
          b(i, j) = sb * (y(i, j) - z / k);
          a(j, i) = std::conj(a(i, j));
          b(j, i) = std::conj(b(i, j));
        }
      A.push_back(std::move(a));
      B.push_back(std::move(b));
    }
    out.A = std::move(A);
    out.B = std::move(B);
  }
  return out;
}

/// Convenience overload choosing the diagonal variance of `spec`'s null.
inline SplitPair gaussian_split(const Observation& Y, const ModelSpec& spec, const GaussianSplitParams& prm,
                                RandomStream& rng) {
  return gaussian_split(Y, prm, rng, null_diag_variance(spec));
}

/**
 * @brief A_i = Y_i xi_i and B_i = Y_i xi'_i on the strict upper triangle, mirrored.
 *
 * (xi, xi') come from one counter uniform per entry by inverse CDF on the
 * four-cell table. Diagonal entries must be 0 and stay 0.
 */
inline SplitPair bernoulli_split(const Observation& Y, const BernoulliSplitParams& prm, RandomStream& rng) {
  const PairTable t = bernoulli_pair_pmf(prm);
  const double c1 = t[0], c2 = t[0] + t[1], c3 = t[0] + t[1] + t[2];
  const auto& layers = real_layers(Y);
  SplitPair out;
  out.params = prm;
  out.external_key = rng.next_u64();
  const CounterRandom cr(out.external_key);
  std::vector<RealMatrix> A, B;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const RealMatrix& y = layers[l];
    detail::require_square_symmetric(y);
    const Eigen::Index m = y.rows();
    RealMatrix a = RealMatrix::Zero(m, m), b = RealMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (y(i, i) != 0.0) fail(ErrorCode::NonBinaryInput, "graph observation must have zero diagonal");
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const double v = y(i, j);
        if (v != 0.0 && v != 1.0) fail(ErrorCode::NonBinaryInput, "entry is neither 0 nor 1");
        if (y(j, i) != v) fail(ErrorCode::NonBinaryInput, "graph observation must be symmetric");
        const double u = cr.uniform(detail::entry_index(l, m, i, j));
        const double xi = (u < c2) ? 1.0 : 0.0;
        const double xi2 = (u < c1 || (u >= c2 && u < c3)) ? 1.0 : 0.0;
        a(i, j) = a(j, i) = v * xi;
        b(i, j) = b(j, i) = v * xi2;
      }
    }
    A.push_back(std::move(a));
    B.push_back(std::move(b));
  }
  out.A = std::move(A);
  out.B = std::move(B);
  return out;
}

}  // namespace ldlab
