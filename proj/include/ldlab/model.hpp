#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/random.hpp"

namespace ldlab {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// One matrix per layer; single-matrix models use a family of size one.
using Observation = std::variant<std::vector<RealMatrix>, std::vector<ComplexMatrix>>;

enum class ModelKind { PlantedSubmatrix, PlantedDenseSubgraph, SBM, AngularSync, OrthSync, MultiLayerSBM };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::PlantedSubmatrix: return "planted_submatrix";
    case ModelKind::PlantedDenseSubgraph: return "planted_dense_subgraph";
    case ModelKind::SBM: return "sbm";
    case ModelKind::AngularSync: return "angular_sync";
    case ModelKind::OrthSync: return "orth_sync";
    case ModelKind::MultiLayerSBM: return "multilayer_sbm";
  }
  return "unknown";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (ModelKind k : {ModelKind::PlantedSubmatrix, ModelKind::PlantedDenseSubgraph, ModelKind::SBM,
                      ModelKind::AngularSync, ModelKind::OrthSync, ModelKind::MultiLayerSBM})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

inline bool is_binary(ModelKind k) {
  return k == ModelKind::PlantedDenseSubgraph || k == ModelKind::SBM || k == ModelKind::MultiLayerSBM;
}

/// Largest n stored as a dense matrix.
inline constexpr int kDenseLimit = 4096;

/**
 * @brief Parameters of one planted model and its paired null.
 *
 * Field use per kind:
 *  - PlantedSubmatrix: n, lambda, rho
 *  - PlantedDenseSubgraph: n, rho, p0, p1
 *  - SBM: n, q, d, lambda
 *  - AngularSync: n, L, lambda
 *  - OrthSync: n, dim, lambda
 *  - MultiLayerSBM: n, q, rho, L, layer_degrees, layer_lambdas
 */
struct ModelSpec {
  ModelKind kind = ModelKind::PlantedSubmatrix;
  int n = 1;
  double lambda = 0.0;
  double rho = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  int q = 2;
  double d = 0.0;
  int dim = 1;
  int L = 1;
  std::vector<double> layer_degrees;
  std::vector<double> layer_lambdas;

  static ModelSpec planted_submatrix(int n, double lambda, double rho) {
    ModelSpec s;
    s.kind = ModelKind::PlantedSubmatrix;
    s.n = n;
    s.lambda = lambda;
    s.rho = rho;
    return s;
  }
  static ModelSpec planted_dense_subgraph(int n, double rho, double p0, double p1) {
    ModelSpec s;
    s.kind = ModelKind::PlantedDenseSubgraph;
    s.n = n;
    s.rho = rho;
    s.p0 = p0;
    s.p1 = p1;
    return s;
  }
  static ModelSpec sbm(int n, int q, double d, double lambda) {
    ModelSpec s;
    s.kind = ModelKind::SBM;
    s.n = n;
    s.q = q;
    s.d = d;
    s.lambda = lambda;
    return s;
  }
  static ModelSpec angular_sync(int n, int L, double lambda) {
    ModelSpec s;
    s.kind = ModelKind::AngularSync;
    s.n = n;
    s.L = L;
    s.lambda = lambda;
    return s;
  }
  static ModelSpec orth_sync(int n, int dim, double lambda) {
    ModelSpec s;
    s.kind = ModelKind::OrthSync;
    s.n = n;
    s.dim = dim;
    s.lambda = lambda;
    return s;
  }
  static ModelSpec multilayer_sbm(int n, int q, double rho, std::vector<double> degrees,
                                  std::vector<double> lambdas) {
    ModelSpec s;
    s.kind = ModelKind::MultiLayerSBM;
    s.n = n;
    s.q = q;
    s.rho = rho;
    s.L = static_cast<int>(degrees.size());
    s.layer_degrees = std::move(degrees);
    s.layer_lambdas = std::move(lambdas);
    return s;
  }

  /// Number of matrices in the observation family.
  int num_layers() const {
    return (kind == ModelKind::AngularSync || kind == ModelKind::MultiLayerSBM) ? L : 1;
  }
  /// Side length of each observation matrix.
  int side() const { return kind == ModelKind::OrthSync ? n * dim : n; }
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidSpec, what);
}
inline bool finite(double x) { return std::isfinite(x); }
inline void check_sbm_layer(int n, int q, double d, double lambda, const std::string& tag) {
  require(finite(d) && d > 0.0, tag + ": degree must be positive");
  require(finite(lambda) && lambda >= 0.0 && lambda <= 1.0, tag + ": lambda must lie in [0,1]");
  require(d / n <= 1.0, tag + ": d/n must be at most 1");
  require((1.0 + (q - 1) * lambda) * d / n <= 1.0, tag + ": (1+(q-1)lambda)d/n must be at most 1");
}
}  // namespace detail

/// Throws InvalidSpec when the parameters leave their domains.
inline void validate(const ModelSpec& s) {
  using detail::finite;
  using detail::require;
  require(s.n >= 1, "n must be positive");
  require(s.side() <= kDenseLimit, "observation side exceeds the dense storage limit " + std::to_string(kDenseLimit));
  switch (s.kind) {
    case ModelKind::PlantedSubmatrix:
      require(finite(s.lambda) && s.lambda >= 0.0, "lambda must be nonnegative");
      require(finite(s.rho) && s.rho >= 0.0 && s.rho <= 1.0, "rho must lie in [0,1]");
      break;
    case ModelKind::PlantedDenseSubgraph:
      require(finite(s.rho) && s.rho >= 0.0 && s.rho <= 1.0, "rho must lie in [0,1]");
      require(finite(s.p0) && finite(s.p1) && s.p0 >= 0.0 && s.p0 <= s.p1 && s.p1 <= 1.0,
              "need 0 <= p0 <= p1 <= 1");
      break;
    case ModelKind::SBM:
      require(s.q >= 2, "q must be at least 2");
      detail::check_sbm_layer(s.n, s.q, s.d, s.lambda, "sbm");
      break;
    case ModelKind::AngularSync:
      require(s.L >= 1, "L must be positive");
      require(finite(s.lambda) && s.lambda >= 0.0, "lambda must be nonnegative");
      break;
    case ModelKind::OrthSync:
      require(s.dim >= 1, "block dimension must be positive");
      require(finite(s.lambda) && s.lambda >= 0.0, "lambda must be nonnegative");
      break;
    case ModelKind::MultiLayerSBM:
      require(s.q >= 2, "q must be at least 2");
      require(s.L >= 1, "L must be positive");
      require(finite(s.rho) && s.rho >= 0.0 && s.rho <= 1.0, "rho must lie in [0,1]");
      require(static_cast<int>(s.layer_degrees.size()) == s.L && static_cast<int>(s.layer_lambdas.size()) == s.L,
              "per-layer lists must have length L");
      for (int l = 0; l < s.L; ++l)
        detail::check_sbm_layer(s.n, s.q, s.layer_degrees[l], s.layer_lambdas[l], "layer " + std::to_string(l + 1));
      break;
  }
}

/// Edge probability of the null graph in layer `layer` (binary kinds only).
inline double base_rate(const ModelSpec& s, int layer = 0) {
  switch (s.kind) {
    case ModelKind::PlantedDenseSubgraph: return s.p0;
    case ModelKind::SBM: return s.d / s.n;
    case ModelKind::MultiLayerSBM: return s.layer_degrees.at(layer) / s.n;
    default: return 0.0;
  }
}

/// Diagonal noise variance of the Gaussian null (off-diagonal variance is 1).
inline double null_diag_variance(const ModelSpec& s) {
  return (s.kind == ModelKind::PlantedSubmatrix || s.kind == ModelKind::OrthSync) ? 2.0 : 1.0;
}

struct Latent {
  Eigen::VectorXd theta;                      ///< support indicator (submatrix, dense subgraph)
  std::vector<int> labels;                    ///< communities in [0,q)
  std::vector<std::vector<int>> layer_labels;  ///< per-layer labels (multi-layer SBM)
  Eigen::VectorXd phases;                     ///< angles in [0, 2pi)
  std::vector<RealMatrix> blocks;             ///< O_1..O_n

  bool empty() const {
    return theta.size() == 0 && labels.empty() && layer_labels.empty() && phases.size() == 0 && blocks.empty();
  }
};

struct Instance {
  ModelKind kind = ModelKind::PlantedSubmatrix;
  bool planted = false;
  Observation observation;
  Latent latent;
  Observation theta_matrix;  ///< empty family for null draws
};

inline std::size_t num_layers(const Observation& obs) {
  return std::visit([](const auto& v) { return v.size(); }, obs);
}

inline bool is_complex(const Observation& obs) { return obs.index() == 1; }

inline const std::vector<RealMatrix>& real_layers(const Observation& obs) {
  if (obs.index() != 0) fail(ErrorCode::ShapeMismatch, "expected a real observation");
  return std::get<0>(obs);
}

inline const std::vector<ComplexMatrix>& complex_layers(const Observation& obs) {
  if (obs.index() != 1) fail(ErrorCode::ShapeMismatch, "expected a complex observation");
  return std::get<1>(obs);
}

// ---------------------------------------------------------------------------
// Building blocks

/// Symmetric matrix, off-diagonal N(0,1), diagonal N(0, diag_var). Row-major over i<=j.
inline RealMatrix symmetric_gaussian(int m, double diag_var, RandomStream& rng) {
  RealMatrix W(m, m);
  const double dsd = std::sqrt(diag_var);
  for (int i = 0; i < m; ++i) {
    W(i, i) = dsd * rng.normal();
    for (int j = i + 1; j < m; ++j) {
      const double z = rng.normal();
      W(i, j) = z;
      W(j, i) = z;
    }
  }
  return W;
}

/// GUE-style Hermitian matrix: off-diagonal x+iy with x,y ~ N(0,1/2); real N(0,1) diagonal.
inline ComplexMatrix hermitian_gaussian(int m, RandomStream& rng) {
  ComplexMatrix W(m, m);
  const double h = std::sqrt(0.5);
  for (int i = 0; i < m; ++i) {
    W(i, i) = Complex(rng.normal(), 0.0);
    for (int j = i + 1; j < m; ++j) {
      const double x = h * rng.normal();
      const double y = h * rng.normal();
      W(i, j) = Complex(x, y);
      W(j, i) = Complex(x, -y);
    }
  }
  return W;
}

/// Symmetric 0/1 matrix with zero diagonal and P(Y_ij = 1) = prob(i, j) for i<j.
template <class Prob>
RealMatrix bernoulli_graph(int m, Prob&& prob, RandomStream& rng) {
  RealMatrix Y = RealMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double v = rng.uniform() < prob(i, j) ? 1.0 : 0.0;
      Y(i, j) = v;
      Y(j, i) = v;
    }
  return Y;
}

/// Haar-distributed element of O(d): QR of a Gaussian matrix with sign(diag R) folded into Q.
inline RealMatrix haar_orthogonal(int d, RandomStream& rng) {
  if (d < 1) fail(ErrorCode::InvalidSpec, "haar_orthogonal needs d >= 1");
  RealMatrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<RealMatrix> qr(G);
  RealMatrix Q = qr.householderQ();
  const RealMatrix& R = qr.matrixQR();
  for (int j = 0; j < d; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

namespace detail {

inline std::vector<int> uniform_labels(int n, int q, RandomStream& rng) {
  std::vector<int> s(n);
  for (auto& x : s) x = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(q)));
  return s;
}

/// Keep label with probability (1+(q-1)rho)/q, else move to one of the other q-1 labels uniformly.
inline std::vector<int> perturb_labels(const std::vector<int>& base, int q, double rho, RandomStream& rng) {
  const double keep = (1.0 + (q - 1) * rho) / q;
  std::vector<int> out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (rng.uniform() < keep) {
      out[i] = base[i];
    } else {
      int c = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(q - 1)));
      out[i] = c >= base[i] ? c + 1 : c;
    }
  }
  return out;
}

inline RealMatrix sbm_signal(const std::vector<int>& labels, int q, double d, double lambda) {
  const int n = static_cast<int>(labels.size());
  RealMatrix T(n, n);
  const double scale = lambda * d / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) T(i, j) = (labels[i] == labels[j] ? q - 1.0 : -1.0) * scale;
  return T;
}

inline RealMatrix sbm_layer(const std::vector<int>& labels, int q, double d, double lambda, RandomStream& rng) {
  const int n = static_cast<int>(labels.size());
  const double p_in = (1.0 + (q - 1) * lambda) * d / n;
  const double p_out = (1.0 - lambda) * d / n;
  return bernoulli_graph(n, [&](int i, int j) { return labels[i] == labels[j] ? p_in : p_out; }, rng);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Samplers

inline Instance sample_planted(const ModelSpec& spec, RandomStream& rng) {
  validate(spec);
  Instance inst;
  inst.kind = spec.kind;
  inst.planted = true;
  const int n = spec.n;
  switch (spec.kind) {
    case ModelKind::PlantedSubmatrix: {
      Eigen::VectorXd theta(n);
      for (int i = 0; i < n; ++i) theta(i) = rng.uniform() < spec.rho ? 1.0 : 0.0;
      RealMatrix T = spec.lambda * theta * theta.transpose();
      RealMatrix Y = T + symmetric_gaussian(n, 2.0, rng);
      inst.latent.theta = theta;
      inst.observation = std::vector<RealMatrix>{std::move(Y)};
      inst.theta_matrix = std::vector<RealMatrix>{std::move(T)};
      break;
    }
    case ModelKind::PlantedDenseSubgraph: {
      Eigen::VectorXd theta(n);
      for (int i = 0; i < n; ++i) theta(i) = rng.uniform() < spec.rho ? 1.0 : 0.0;
      const double gap = spec.p1 - spec.p0;
      RealMatrix Y = bernoulli_graph(
          n, [&](int i, int j) { return spec.p0 + gap * theta(i) * theta(j); }, rng);
      inst.latent.theta = theta;
      inst.observation = std::vector<RealMatrix>{std::move(Y)};
      inst.theta_matrix = std::vector<RealMatrix>{RealMatrix(gap * theta * theta.transpose())};
      break;
    }
    case ModelKind::SBM: {
      auto labels = detail::uniform_labels(n, spec.q, rng);
      RealMatrix Y = detail::sbm_layer(labels, spec.q, spec.d, spec.lambda, rng);
      inst.observation = std::vector<RealMatrix>{std::move(Y)};
      inst.theta_matrix = std::vector<RealMatrix>{detail::sbm_signal(labels, spec.q, spec.d, spec.lambda)};
      inst.latent.labels = std::move(labels);
      break;
    }
    case ModelKind::AngularSync: {
      Eigen::VectorXd phi(n);
      for (int i = 0; i < n; ++i) phi(i) = 2.0 * std::numbers::pi * rng.uniform();
      const double scale = spec.lambda / std::sqrt(static_cast<double>(n));
      std::vector<ComplexMatrix> ys, ts;
      for (int l = 1; l <= spec.L; ++l) {
        Eigen::VectorXcd x(n);
        for (int i = 0; i < n; ++i) x(i) = std::polar(1.0, l * phi(i));
        // Filled by hand so T is exactly Hermitian with a real diagonal.
        ComplexMatrix T(n, n);
        for (int i = 0; i < n; ++i) {
          T(i, i) = Complex(scale, 0.0);
          for (int j = i + 1; j < n; ++j) {
            T(i, j) = scale * x(i) * std::conj(x(j));
            T(j, i) = std::conj(T(i, j));
          }
        }
        ys.push_back(T + hermitian_gaussian(n, rng));
        ts.push_back(std::move(T));
      }
      inst.latent.phases = phi;
      inst.observation = std::move(ys);
      inst.theta_matrix = std::move(ts);
      break;
    }
    case ModelKind::OrthSync: {
      const int d = spec.dim;
      RealMatrix U(d, n * d);
      for (int i = 0; i < n; ++i) {
        RealMatrix O = haar_orthogonal(d, rng);
        U.block(0, i * d, d, d) = O;
        inst.latent.blocks.push_back(std::move(O));
      }
      RealMatrix T = (spec.lambda / std::sqrt(static_cast<double>(n))) * (U.transpose() * U);
      RealMatrix Y = T + symmetric_gaussian(n * d, 2.0, rng);
      inst.observation = std::vector<RealMatrix>{std::move(Y)};
      inst.theta_matrix = std::vector<RealMatrix>{std::move(T)};
      break;
    }
    case ModelKind::MultiLayerSBM: {
      auto labels = detail::uniform_labels(n, spec.q, rng);
      std::vector<RealMatrix> ys, ts;
      for (int l = 0; l < spec.L; ++l) {
        auto ll = detail::perturb_labels(labels, spec.q, spec.rho, rng);
        const double d = spec.layer_degrees[l], lam = spec.layer_lambdas[l];
        ys.push_back(detail::sbm_layer(ll, spec.q, d, lam, rng));
        ts.push_back(detail::sbm_signal(ll, spec.q, d, lam));
        inst.latent.layer_labels.push_back(std::move(ll));
      }
      inst.latent.labels = std::move(labels);
      inst.observation = std::move(ys);
      inst.theta_matrix = std::move(ts);
      break;
    }
  }
  return inst;
}

inline Instance sample_null(const ModelSpec& spec, RandomStream& rng) {
  validate(spec);
  Instance inst;
  inst.kind = spec.kind;
  inst.planted = false;
  const int n = spec.n;
  switch (spec.kind) {
    case ModelKind::PlantedSubmatrix:
      inst.observation = std::vector<RealMatrix>{symmetric_gaussian(n, 2.0, rng)};
      inst.theta_matrix = std::vector<RealMatrix>{};
      break;
    case ModelKind::OrthSync:
      inst.observation = std::vector<RealMatrix>{symmetric_gaussian(n * spec.dim, 2.0, rng)};
      inst.theta_matrix = std::vector<RealMatrix>{};
      break;
    case ModelKind::AngularSync: {
      std::vector<ComplexMatrix> ys;
      for (int l = 0; l < spec.L; ++l) ys.push_back(hermitian_gaussian(n, rng));
      inst.observation = std::move(ys);
      inst.theta_matrix = std::vector<ComplexMatrix>{};
      break;
    }
    case ModelKind::PlantedDenseSubgraph:
    case ModelKind::SBM:
    case ModelKind::MultiLayerSBM: {
      std::vector<RealMatrix> ys;
      for (int l = 0; l < spec.num_layers(); ++l) {
        const double p = base_rate(spec, l);
        ys.push_back(bernoulli_graph(n, [p](int, int) { return p; }, rng));
      }
      inst.observation = std::move(ys);
      inst.theta_matrix = std::vector<RealMatrix>{};
      break;
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Edge-list view of binary observations (lossless for 0/1 symmetric, zero diagonal).

using EdgeList = std::vector<std::pair<int, int>>;

inline EdgeList to_edge_list(const RealMatrix& Y) {
  EdgeList e;
  for (int i = 0; i < Y.rows(); ++i)
    for (int j = i + 1; j < Y.cols(); ++j) {
      if (Y(i, j) == 1.0)
        e.emplace_back(i, j);
      else if (Y(i, j) != 0.0)
        fail(ErrorCode::NonBinaryInput, "entry is neither 0 nor 1");
    }
  return e;
}

inline RealMatrix from_edge_list(int n, const EdgeList& edges) {
  RealMatrix Y = RealMatrix::Zero(n, n);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) fail(ErrorCode::ShapeMismatch, "edge out of range");
    Y(i, j) = 1.0;
    Y(j, i) = 1.0;
  }
  return Y;
}

}  // namespace ldlab
