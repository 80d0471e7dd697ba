#pragma once

// Reference computations used only by tests. Each one takes a different
// route from the library code it checks: plain loops over bitmasks and
// labelings, no shared helpers beyond Eigen.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline double exp_trunc(double x, int D) {
  double s = 1.0, t = 1.0;
  for (int k = 1; k <= D; ++k) {
    t *= x / k;
    s += t;
  }
  return s;
}

/// E over independent theta, theta' in {0,1}^n (Bernoulli(rho) entries) of exp_trunc(lambda^2 <theta,theta'>^2, D).
inline double submatrix_overlap(int n, double lambda, double rho, int D) {
  const std::uint32_t full = 1u << n;
  double total = 0.0;
  for (std::uint32_t a = 0; a < full; ++a) {
    const int ka = __builtin_popcount(a);
    const double pa = std::pow(rho, ka) * std::pow(1 - rho, n - ka);
    for (std::uint32_t b = 0; b < full; ++b) {
      const int kb = __builtin_popcount(b);
      const double pb = std::pow(rho, kb) * std::pow(1 - rho, n - kb);
      const int k = __builtin_popcount(a & b);
      total += pa * pb * exp_trunc(lambda * lambda * k * k, D);
    }
  }
  return total;
}

struct Edge {
  int i, j;
};

inline std::vector<Edge> all_edges(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return e;
}

/// Sum over edge subsets S of K_n with |S| <= D of lambda^{2|S|} rho^{2|V(S)|}, by bitmask.
inline double graph_sum(int n, double lambda, double rho, int D) {
  const auto edges = all_edges(n);
  const int m = static_cast<int>(edges.size());
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    const int e = __builtin_popcountll(mask);
    if (e > D) continue;
    std::uint32_t verts = 0;
    for (int k = 0; k < m; ++k)
      if (mask >> k & 1) verts |= (1u << edges[k].i) | (1u << edges[k].j);
    total += std::pow(lambda, 2.0 * e) * std::pow(rho, 2.0 * __builtin_popcount(verts));
  }
  return total;
}

/// E over uniform labels of prod_{e in S} (q 1{same} - 1), summing all q^n labelings of all n vertices.
inline double label_product(int n, int q, const std::vector<Edge>& S) {
  std::vector<int> s(n, 0);
  double total = 0.0, count = 0.0;
  while (true) {
    double prod = 1.0;
    for (const auto& e : S) prod *= (s[e.i] == s[e.j]) ? (q - 1.0) : -1.0;
    total += prod;
    count += 1.0;
    int pos = 0;
    while (pos < n && ++s[pos] == q) s[pos++] = 0;
    if (pos == n) break;
  }
  return total / count;
}

/**
 * Adv^2 for the SBM as sum over S of (E_P f_S)^2 with f_S the normalized
 * centered edge product: E_P f_S = (lambda d/n / sqrt(p(1-p)))^{|S|} E prod omega,
 * p = d/n.
 */
inline double sbm_adv2(int n, int q, double d, double lambda, int D) {
  const auto edges = all_edges(n);
  const int m = static_cast<int>(edges.size());
  const double p = d / n;
  const double amp = lambda * p / std::sqrt(p * (1 - p));
  double total = 0.0;
  std::vector<Edge> S;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    const int e = __builtin_popcountll(mask);
    if (e > D) continue;
    S.clear();
    for (int k = 0; k < m; ++k)
      if (mask >> k & 1) S.push_back(edges[k]);
    const double mean = std::pow(amp, e) * label_product(n, q, S);
    total += mean * mean;
  }
  return total;
}

/// E[prod_{k=1..l} (a + b omega(s_{k-1}, s_k))] over uniform interior labels s_1..s_{l-1}.
inline double chain(double a, double b, int l, int q, int s0, int sl) {
  const int interior = l - 1;
  std::vector<int> s(interior, 0);
  double total = 0.0, count = 0.0;
  while (true) {
    double prod = 1.0;
    int prev = s0;
    for (int k = 0; k < l; ++k) {
      const int next = (k == l - 1) ? sl : s[k];
      prod *= a + b * ((prev == next) ? (q - 1.0) : -1.0);
      prev = next;
    }
    total += prod;
    count += 1.0;
    int pos = 0;
    while (pos < interior && ++s[pos] == q) s[pos++] = 0;
    if (pos == interior) break;
  }
  return total / count;
}

/// Sum over words in [L]^len of prod Delta_{w_i} times r4 per letter change.
inline double word_sum(int len, double r4, const std::vector<double>& delta) {
  const int L = static_cast<int>(delta.size());
  std::vector<int> w(len, 0);
  double total = 0.0;
  while (true) {
    double prod = 1.0;
    for (int i = 0; i < len; ++i) prod *= delta[w[i]] * ((i > 0 && w[i] != w[i - 1]) ? r4 : 1.0);
    total += prod;
    int pos = 0;
    while (pos < len && ++w[pos] == L) w[pos++] = 0;
    if (pos == len) break;
  }
  return total;
}

}  // namespace oracle
