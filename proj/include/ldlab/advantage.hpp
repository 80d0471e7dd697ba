#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/graph.hpp"
#include "ldlab/model.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/random.hpp"
#include "ldlab/stats.hpp"

namespace ldlab {

enum class AdvMethod { OverlapExact, GraphSum, SBMExact, MonteCarlo, GaussianSurrogate, ClosedFormBound };
enum class AdvMeaning { UpperBoundOnAdvSq, ExactAdvSq, MCEstimateOfBound };

inline const char* to_string(AdvMethod m) {
  switch (m) {
    case AdvMethod::OverlapExact: return "OverlapExact";
    case AdvMethod::GraphSum: return "GraphSum";
    case AdvMethod::SBMExact: return "SBMExact";
    case AdvMethod::MonteCarlo: return "MonteCarlo";
    case AdvMethod::GaussianSurrogate: return "GaussianSurrogate";
    case AdvMethod::ClosedFormBound: return "ClosedFormBound";
  }
  return "Unknown";
}

inline const char* to_string(AdvMeaning m) {
  switch (m) {
    case AdvMeaning::UpperBoundOnAdvSq: return "UpperBoundOnAdvSq";
    case AdvMeaning::ExactAdvSq: return "ExactAdvSq";
    case AdvMeaning::MCEstimateOfBound: return "MCEstimateOfBound";
  }
  return "Unknown";
}

/// value == +inf marks overflow / divergence.
struct AdvantageReport {
  int D = 0;
  double value = 1.0;
  double stderr_ = 0.0;
  AdvMethod method = AdvMethod::OverlapExact;
  AdvMeaning meaning = AdvMeaning::UpperBoundOnAdvSq;
  std::size_t trials = 0;

  bool overflow() const { return std::isinf(value); }
};

// ---------------------------------------------------------------------------
// Truncated exponential

inline double exp_trunc(double x, int D) {
  if (D < 0) fail(ErrorCode::InvalidParams, "D must be nonnegative");
  CompensatedSum s;
  double term = 1.0;
  s.add(term);
  for (int k = 1; k <= D; ++k) {
    term *= x / k;
    s.add(term);
  }
  return s.value();
}

/// log of exp_trunc(x, D) for x >= 0, stable when the sum itself would overflow.
inline double log_exp_trunc(double x, int D) {
  if (x == 0.0 || D == 0) return 0.0;
  const double lx = std::log(x);
  double mx = 0.0;
  std::vector<double> lt(D + 1);
  for (int k = 0; k <= D; ++k) {
    lt[k] = k * lx - std::lgamma(k + 1.0);
    mx = std::max(mx, lt[k]);
  }
  CompensatedSum s;
  for (double v : lt) s.add(std::exp(v - mx));
  return mx + std::log(s.value());
}

// ---------------------------------------------------------------------------
// Planted submatrix: overlap ~ Bin(n, rho^2)

inline AdvantageReport adv2_submatrix_overlap(long long n, double lambda, double rho, int D) {
  if (n < 1 || !(rho >= 0.0 && rho <= 1.0) || !(lambda >= 0.0) || D < 0)
    fail(ErrorCode::InvalidParams, "need n >= 1, rho in [0,1], lambda >= 0, D >= 0");
  AdvantageReport r;
  r.D = D;
  r.method = AdvMethod::OverlapExact;
  r.meaning = AdvMeaning::UpperBoundOnAdvSq;
  if (lambda == 0.0 || D == 0 || rho == 0.0) return r;  // every term is pmf(k) * 1 or k = 0 a.s.

  const double r2 = rho * rho;
  const double lr = std::log(r2);
  const double l1r = r2 < 1.0 ? std::log1p(-r2) : -std::numeric_limits<double>::infinity();
  const double lfn = std::lgamma(static_cast<double>(n) + 1.0);
  const double l2 = lambda * lambda;
  // Terms are exp(lpmf + log exp_trunc); summed relative to the largest log-term.
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n + 1));
  for (long long k = 0; k <= n; ++k) {
    double lp;
    if (r2 == 1.0)
      lp = (k == n) ? 0.0 : -std::numeric_limits<double>::infinity();
    else
      lp = lfn - std::lgamma(k + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0) + k * lr + (n - k) * l1r;
    if (lp < -800.0) {
      all.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    const double kk = static_cast<double>(k);
    const double v = lp + log_exp_trunc(l2 * kk * kk, D);
    all.push_back(v);
    mx = std::max(mx, v);
  }
  CompensatedSum s;
  for (double v : all)
    if (std::isfinite(v)) s.add(std::exp(v - mx));
  const double lv = mx + std::log(s.value());
  if (lv > std::log(std::numeric_limits<double>::max())) {
    r.value = std::numeric_limits<double>::infinity();
    return r;
  }
  r.value = std::max(1.0, std::exp(lv));
  return r;
}

// ---------------------------------------------------------------------------
// Binary graph sum over S in K_n with |E(S)| <= D of lambda^{2|E|} rho^{2|V|}

inline double pds_effective_snr(double p0, double p1) {
  if (!(p0 > 0.0 && p0 < 1.0)) fail(ErrorCode::InvalidParams, "p0 must lie in (0,1)");
  return (p1 - p0) / std::sqrt(p0 * (1.0 - p0));
}

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt big_binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (long long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

/// Number of graphs on v labeled vertices with e edges and no isolated vertex (inclusion-exclusion).
inline BigInt spanning_edge_sets(int v, int e) {
  BigInt total = 0;
  for (int j = 0; j <= v; ++j) {
    const long long slots = static_cast<long long>(v - j) * (v - j - 1) / 2;
    BigInt term = big_binomial(v, j) * big_binomial(slots, e);
    if (j % 2) total -= term;
    else total += term;
  }
  return total;
}

inline double big_log(const BigInt& x) {
  // log of a positive big integer via its leading bits.
  const std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 1000) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 64;
  BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

}  // namespace detail

/**
 * Sum grouped by (|V|, |E|): C(n,v) * #{edge sets spanning exactly v labeled
 * vertices with e edges} * lambda^{2e} rho^{2v}. Same terms as the
 * edge-subset sum, counted exactly.
 */
inline AdvantageReport adv2_graph_sum_binary(long long n, double lambda, double rho, int D) {
  if (n < 1 || D < 0 || !(lambda >= 0.0) || !(rho >= 0.0 && rho <= 1.0))
    fail(ErrorCode::InvalidParams, "need n >= 1, D >= 0, lambda >= 0, rho in [0,1]");
  if (!(n <= 12 || D <= 3)) fail(ErrorCode::TooLarge, "graph-sum guard: need n <= 12 or D <= 3");
  AdvantageReport r;
  r.D = D;
  r.method = AdvMethod::GraphSum;
  r.meaning = AdvMeaning::ExactAdvSq;
  CompensatedSum s;
  s.add(1.0);
  if (lambda == 0.0 || rho == 0.0) {
    r.value = 1.0;
    return r;
  }
  const double ll = std::log(lambda), lr = std::log(rho);
  const long long vmax = std::min<long long>(n, 2LL * D);
  for (int v = 2; v <= vmax; ++v) {
    const detail::BigInt choose_v = detail::big_binomial(n, v);
    const int emax = std::min<long long>(D, static_cast<long long>(v) * (v - 1) / 2);
    for (int e = (v + 1) / 2; e <= emax; ++e) {
      const detail::BigInt cnt = detail::spanning_edge_sets(v, e);
      if (cnt <= 0) continue;
      const double lt = detail::big_log(choose_v) + detail::big_log(cnt) + 2.0 * e * ll + 2.0 * v * lr;
      s.add(std::exp(lt));
    }
  }
  r.value = s.value();
  return r;
}

/// Same sum by explicit enumeration of edge subsets (small n only).
inline double graph_sum_binary_enumerated(int n, double lambda, double rho, int D) {
  CompensatedSum s;
  enumerate_edge_subsets(n, D, [&](const LabeledGraph& H) {
    const int v = static_cast<int>(H.vertices().size());
    s.add(std::pow(lambda, 2.0 * H.num_edges()) * std::pow(rho, 2.0 * v));
  });
  return s.value();
}

// ---------------------------------------------------------------------------
// Community-label products: E over uniform sigma of prod_{(i,j) in H} (q 1{s_i = s_j} - 1)

/// Exact rational value numerator / denominator with denominator = q^|V|.
struct OmegaRational {
  Int128 numerator = 0;
  Int128 denominator = 1;
  double value() const { return static_cast<double>(static_cast<long double>(numerator) / denominator); }
};

namespace detail {

inline Int128 ipow128(long long b, int e) {
  Int128 r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

inline OmegaRational omega_brute_force(const LabeledGraph& G, int v, int q) {
  OmegaRational out;
  out.denominator = ipow128(q, v);
  std::vector<int> s(v, 0);
  Int128 total = 0;
  while (true) {
    Int128 prod = 1;
    for (auto [i, j] : G.edges) {
      prod *= (s[i] == s[j]) ? (q - 1) : -1;
    }
    total += prod;
    int pos = 0;
    while (pos < v && ++s[pos] == q) s[pos++] = 0;
    if (pos == v) break;
  }
  out.numerator = total;
  return out;
}

/// Expand prod (q 1{e} - 1) over edge subsets F: sum (-1)^{|E\F|} q^{|F| + c(F)} / q^v.
inline OmegaRational omega_subset_expansion(const LabeledGraph& G, int v, int q) {
  const int m = static_cast<int>(G.edges.size());
  OmegaRational out;
  out.denominator = ipow128(q, v);
  Int128 total = 0;
  std::vector<int> parent(v);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    int comps = v, f = 0;
    for (int k = 0; k < m; ++k)
      if (mask >> k & 1) {
        ++f;
        const int a = find(G.edges[k].first), b = find(G.edges[k].second);
        if (a != b) {
          parent[a] = b;
          --comps;
        }
      }
    const Int128 t = ipow128(q, f + comps);
    total += ((m - f) % 2) ? -t : t;
  }
  out.numerator = total;
  return out;
}

}  // namespace detail

/**
 * Exact E prod omega as a rational. Brute force over q^|V| labelings when
 * that is at most 1e8; otherwise leaves give 0 and leafless graphs with at
 * most 26 edges use the edge-subset expansion.
 */
inline OmegaRational omega_expectation_exact(const LabeledGraph& H, int q) {
  if (q < 2) fail(ErrorCode::InvalidParams, "q must be at least 2");
  int v = 0;
  const LabeledGraph G = compact(H, &v);
  if (v == 0) return OmegaRational{1, 1};
  if (v * std::log10(static_cast<double>(q)) <= 8.0) return detail::omega_brute_force(G, v, q);
  if (v > 30) fail(ErrorCode::TooLarge, "too many vertices for exact label expectation");
  if (!graph_stats(G).leaves.empty()) return OmegaRational{0, detail::ipow128(q, v)};
  if (G.edges.size() <= 26) return detail::omega_subset_expansion(G, v, q);
  fail(ErrorCode::TooLarge, "graph too large for exact label expectation");
}

inline double omega_expectation(const LabeledGraph& H, int q) { return omega_expectation_exact(H, q).value(); }

/// Edge weight (lambda^2 d) / (n (1 - d/n)) of the normalized SBM basis.
inline double sbm_edge_weight(int n, double d, double lambda) {
  const double p = d / n;
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParams, "need 0 < d/n < 1");
  return lambda * lambda * d / (n * (1.0 - p));
}

inline AdvantageReport adv2_sbm_exact(int n, int q, double d, double lambda, int D) {
  if (n > 8 || D > 5) fail(ErrorCode::TooLarge, "SBM exact guard: need n <= 8 and D <= 5");
  if (n < 1 || D < 0 || q < 2) fail(ErrorCode::InvalidParams, "need n >= 1, D >= 0, q >= 2");
  const double w = sbm_edge_weight(n, d, lambda);
  AdvantageReport r;
  r.D = D;
  r.method = AdvMethod::SBMExact;
  r.meaning = AdvMeaning::ExactAdvSq;
  CompensatedSum s;
  std::map<std::vector<std::pair<int, int>>, double> cache;
  enumerate_edge_subsets(n, D, [&](const LabeledGraph& H) {
    if (H.edges.empty()) {
      s.add(1.0);
      return;
    }
    // A leaf forces the label product to average to zero.
    std::vector<int> deg(n, 0);
    for (auto [i, j] : H.edges) {
      ++deg[i];
      ++deg[j];
    }
    for (int x : deg)
      if (x == 1) return;
    auto key = compact(H).edges;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, omega_expectation(H, q)).first;
    const double om = it->second;
    s.add(std::pow(w, static_cast<double>(H.num_edges())) * om * om);
  });
  r.value = s.value();
  return r;
}

/// E[prod_{k=1..l} (a + b omega(s_{k-1}, s_k)) | s_0, s_l] with uniform interior labels.
inline double chain_expectation(double a, double b, int l, int q, int s0, int sl) {
  if (l < 1 || q < 2 || s0 < 0 || s0 >= q || sl < 0 || sl >= q)
    fail(ErrorCode::InvalidParams, "need l >= 1, q >= 2 and labels in [0,q)");
  const double omega = (s0 == sl) ? q - 1.0 : -1.0;
  return std::pow(a, l) + std::pow(b, l) * omega;
}

// ---------------------------------------------------------------------------
// Gaussian-moment surrogates

/// sum_{k<=D} lambda^{2k} E[z^{2k}] / k! for z ~ N(0, var).
inline double gaussian_moment_sum(double lambda, int D, double var) {
  CompensatedSum s;
  double t = 1.0;
  s.add(t);
  const double l2v = lambda * lambda * var;
  for (int k = 1; k <= D; ++k) {
    t *= l2v * (2.0 * k - 1.0) / k;
    s.add(t);
  }
  return s.value();
}

inline AdvantageReport adv2_angular_surrogate(int L, double lambda, int D) {
  if (L < 1 || D < 0 || !(lambda >= 0.0)) fail(ErrorCode::InvalidParams, "need L >= 1, D >= 0, lambda >= 0");
  AdvantageReport r;
  r.D = D;
  r.method = AdvMethod::GaussianSurrogate;
  r.meaning = AdvMeaning::UpperBoundOnAdvSq;
  const double base = gaussian_moment_sum(lambda, D, 0.5);
  r.value = std::isfinite(base) ? std::pow(base, 2.0 * L) : std::numeric_limits<double>::infinity();
  return r;
}

inline AdvantageReport adv2_orth_surrogate(int d, double lambda, int D) {
  if (d < 1 || D < 0 || !(lambda >= 0.0)) fail(ErrorCode::InvalidParams, "need d >= 1, D >= 0, lambda >= 0");
  AdvantageReport r;
  r.D = D;
  r.method = AdvMethod::GaussianSurrogate;
  r.meaning = AdvMeaning::UpperBoundOnAdvSq;
  const double base = gaussian_moment_sum(lambda, D, 1.0 / d);
  r.value = std::isfinite(base) ? std::pow(base, static_cast<double>(d) * d) : std::numeric_limits<double>::infinity();
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo bounds for synchronization models

namespace detail {

inline AdvantageReport mc_report(const std::vector<double>& vals, int D) {
  const MeanEstimate m = mean_and_stderr(vals);
  AdvantageReport r;
  r.D = D;
  r.value = m.mean;
  r.stderr_ = m.stderr_;
  r.method = AdvMethod::MonteCarlo;
  r.meaning = AdvMeaning::MCEstimateOfBound;
  r.trials = vals.size();
  return r;
}

}  // namespace detail

/// Trial t uses rng.substream(t); the result does not depend on `threads`.
inline AdvantageReport adv2_angular_mc(int n, int L, double lambda, int D, std::size_t trials,
                                       const RandomStream& rng, unsigned threads = 1) {
  if (n < 1 || L < 1 || D < 0 || !(lambda >= 0.0)) fail(ErrorCode::InvalidParams, "invalid angular MC parameters");
  if (trials < 100) fail(ErrorCode::InvalidParams, "need at least 100 trials");
  const double l2 = lambda * lambda;
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  auto vals = parallel_map<double>(trials, threads, [&](std::size_t t) {
    RandomStream s = rng.substream(t);
    std::vector<double> U(L, 0.0), V(L, 0.0);
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * s.uniform();
      for (int l = 0; l < L; ++l) {
        U[l] += std::sin((l + 1) * th);
        V[l] += std::cos((l + 1) * th);
      }
    }
    double prod = 1.0;
    for (int l = 0; l < L; ++l) {
      const double u = U[l] * inv, v = V[l] * inv;
      prod *= exp_trunc(l2 * u * u, D) * exp_trunc(l2 * v * v, D);
    }
    return prod;
  });
  return detail::mc_report(vals, D);
}

inline AdvantageReport adv2_orth_mc(int n, int d, double lambda, int D, std::size_t trials, const RandomStream& rng,
                                    unsigned threads = 1) {
  if (n < 1 || d < 1 || D < 0 || !(lambda >= 0.0)) fail(ErrorCode::InvalidParams, "invalid orthogonal MC parameters");
  if (d > 12) fail(ErrorCode::TooLarge, "block dimension above 12");
  if (trials < 100) fail(ErrorCode::InvalidParams, "need at least 100 trials");
  const double l2 = lambda * lambda;
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  auto vals = parallel_map<double>(trials, threads, [&](std::size_t t) {
    RandomStream s = rng.substream(t);
    RealMatrix U = RealMatrix::Zero(d, d);
    for (int j = 0; j < n; ++j) U += haar_orthogonal(d, s);
    double prod = 1.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const double u = U(a, b) * inv;
        prod *= exp_trunc(l2 * u * u, D);
      }
    return prod;
  });
  return detail::mc_report(vals, D);
}

struct InterpolationGap {
  int t = 0;
  double F_t = 1.0, F_t_stderr = 0.0;
  double F_next = 1.0, F_next_stderr = 0.0;
  double rel_gap = 0.0;         ///< F_{t+1}/F_t - 1
  double rel_gap_stderr = 0.0;  ///< delta-method stderr from paired differences
};

/**
 * F_t uses N(0,1/2) draws for summands 1..t and sin/cos(l theta_j) after.
 * F_t and F_{t+1} share every draw except summand t+1.
 */
inline InterpolationGap moment_interpolation_gap(int n, int L, double lambda, int D, int t, std::size_t trials,
                                                 const RandomStream& rng, unsigned threads = 1) {
  if (t < 0 || t >= n) fail(ErrorCode::InvalidParams, "need 0 <= t < n");
  if (L < 1 || D < 0 || !(lambda >= 0.0) || trials < 2) fail(ErrorCode::InvalidParams, "invalid interpolation parameters");
  const double l2 = lambda * lambda;
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  const double h = std::sqrt(0.5);
  struct Pair {
    double a = 0.0, b = 0.0;
  };
  auto vals = parallel_map<Pair>(trials, threads, [&](std::size_t tr) {
    RandomStream s = rng.substream(tr);
    std::vector<double> U(L, 0.0), V(L, 0.0), dU_trig(L), dV_trig(L), dU_g(L), dV_g(L);
    for (int j = 1; j <= n; ++j) {
      const double th = 2.0 * std::numbers::pi * s.uniform();
      for (int l = 0; l < L; ++l) {
        const double zs = h * s.normal(), zc = h * s.normal();
        const double ts = std::sin((l + 1) * th), tc = std::cos((l + 1) * th);
        if (j == t + 1) {
          dU_trig[l] = ts;
          dV_trig[l] = tc;
          dU_g[l] = zs;
          dV_g[l] = zc;
        } else if (j <= t) {
          U[l] += zs;
          V[l] += zc;
        } else {
          U[l] += ts;
          V[l] += tc;
        }
      }
    }
    Pair p{1.0, 1.0};
    for (int l = 0; l < L; ++l) {
      const double ua = (U[l] + dU_trig[l]) * inv, va = (V[l] + dV_trig[l]) * inv;
      const double ub = (U[l] + dU_g[l]) * inv, vb = (V[l] + dV_g[l]) * inv;
      p.a *= exp_trunc(l2 * ua * ua, D) * exp_trunc(l2 * va * va, D);
      p.b *= exp_trunc(l2 * ub * ub, D) * exp_trunc(l2 * vb * vb, D);
    }
    return p;
  });
  std::vector<double> a(trials), b(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    a[i] = vals[i].a;
    b[i] = vals[i].b;
  }
  const MeanEstimate ma = mean_and_stderr(a), mb = mean_and_stderr(b);
  InterpolationGap g;
  g.t = t;
  g.F_t = ma.mean;
  g.F_t_stderr = ma.stderr_;
  g.F_next = mb.mean;
  g.F_next_stderr = mb.stderr_;
  g.rel_gap = mb.mean / ma.mean - 1.0;
  std::vector<double> lin(trials);
  for (std::size_t i = 0; i < trials; ++i) lin[i] = (b[i] - (1.0 + g.rel_gap) * a[i]) / ma.mean;
  g.rel_gap_stderr = mean_and_stderr(lin).stderr_;
  return g;
}

// ---------------------------------------------------------------------------
// Multi-layer thresholds

struct ThresholdReport {
  double F_value = 0.0;
  double sigma_plus = 0.0;
  bool below_threshold = false;
};

/// P = diag(Delta) R with R = 1 on the diagonal and rho^4 off it.
inline RealMatrix transfer_matrix(double rho, const std::vector<double>& delta) {
  const int L = static_cast<int>(delta.size());
  const double r4 = std::pow(rho, 4);
  RealMatrix P(L, L);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) P(a, b) = delta[a] * (a == b ? 1.0 : r4);
  return P;
}

/// Perron root of a nonnegative matrix by power iteration from the all-ones vector.
inline double spectral_radius_power(const RealMatrix& P, int max_iter = 100000, double tol = 1e-15) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(P.rows());
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = P * x;
    const double nrm = y.lpNorm<Eigen::Infinity>();
    if (nrm == 0.0) return 0.0;
    y /= nrm;
    const double diff = (y - x).lpNorm<Eigen::Infinity>();
    x = y;
    est = nrm;
    if (diff < tol) break;
  }
  return est;
}

inline std::vector<double> layer_deltas(const std::vector<double>& d_list, const std::vector<double>& lambda_list) {
  if (d_list.size() != lambda_list.size() || d_list.empty())
    fail(ErrorCode::InvalidParams, "degree and lambda lists must be nonempty and equally long");
  std::vector<double> delta(d_list.size());
  for (std::size_t l = 0; l < d_list.size(); ++l) delta[l] = lambda_list[l] * lambda_list[l] * d_list[l];
  return delta;
}

inline ThresholdReport ks_threshold(double rho, const std::vector<double>& d_list, const std::vector<double>& lambda_list) {
  if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::InvalidParams, "rho must lie in [0,1]");
  const auto delta = layer_deltas(d_list, lambda_list);
  const double r4 = std::pow(rho, 4);
  double mx = 0.0;
  CompensatedSum s;
  bool infinite = false;
  for (double dl : delta) {
    mx = std::max(mx, dl);
    const double den = 1.0 - (1.0 - r4) * dl;
    if (den <= 0.0)
      infinite = true;
    else
      s.add(r4 * dl / den);
  }
  ThresholdReport r;
  r.F_value = infinite ? std::numeric_limits<double>::infinity() : std::max(mx, s.value());
  r.sigma_plus = spectral_radius_power(transfer_matrix(rho, delta));
  r.below_threshold = r.F_value < 1.0;
  return r;
}

struct TransferChainResult {
  double recursion = 0.0;
  double brute_force = std::numeric_limits<double>::quiet_NaN();
  bool brute_force_available = false;
  double sigma_plus = 0.0;
};

/**
 * Sum over words w in [L]^len of rho^{4 #changes(w)} prod Delta_{w_i},
 * once by the vector recursion X(t+1) = P X(t), once by enumeration when
 * L^len <= 1e7.
 */
inline TransferChainResult transfer_chain_sum(int len, double rho, const std::vector<double>& delta) {
  if (len < 1 || delta.empty()) fail(ErrorCode::InvalidParams, "need len >= 1 and nonempty Delta");
  const int L = static_cast<int>(delta.size());
  const RealMatrix P = transfer_matrix(rho, delta);
  TransferChainResult out;
  Eigen::VectorXd X = Eigen::Map<const Eigen::VectorXd>(delta.data(), L);
  for (int t = 1; t < len; ++t) X = P * X;
  out.recursion = X.sum();
  out.sigma_plus = spectral_radius_power(P);

  const double words = std::pow(static_cast<double>(L), len);
  if (words <= 1e7) {
    const double r4 = std::pow(rho, 4);
    std::vector<int> w(len, 0);
    CompensatedSum s;
    while (true) {
      double prod = delta[w[0]];
      for (int i = 1; i < len; ++i) prod *= delta[w[i]] * (w[i] == w[i - 1] ? 1.0 : r4);
      s.add(prod);
      int pos = 0;
      while (pos < len && ++w[pos] == L) w[pos++] = 0;
      if (pos == len) break;
    }
    out.brute_force = s.value();
    out.brute_force_available = true;
  }
  return out;
}

}  // namespace ldlab
