#pragma once

// Shared generators and independent scalar-loop oracles. The oracles stay on
// plain std::vector arithmetic so they share no code path with the matrix
// kernels they are used to check.

#include <cmath>
#include <limits>
#include <vector>

#include "mtsa/attention_params.hpp"
#include "mtsa/matrix.hpp"
#include "mtsa/rng.hpp"

namespace mtsa::testutil {

inline Matrix<double> random_mat(int rows, int cols, Rng& rng, double lo = -1.0,
                                 double hi = 1.0) {
  return uniform_init<double>(rows, cols, lo, hi, rng);
}

using Grid = std::vector<std::vector<double>>;

inline Grid to_grid(const Matrix<double>& m) {
  Grid g(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

/// Triple-loop product, the matmul oracle.
inline Grid grid_matmul(const Grid& a, const Grid& b) {
  const std::size_t m = a.size(), k = b.size(), n = b[0].size();
  Grid c(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t = 0; t < k; ++t) c[i][j] += a[i][t] * b[t][j];
  return c;
}

inline double oracle_act(Activation fn, double x) {
  switch (fn) {
    case Activation::relu: return x > 0 ? x : 0.0;
    case Activation::elu: return x > 0 ? x : std::exp(x) - 1.0;
    case Activation::tanh: return std::tanh(x);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::log_sigmoid: return std::log(1.0 / (1.0 + std::exp(-x)));
    case Activation::identity: return x;
  }
  return x;
}

/// Softmax-weighted sum of value columns for one score vector.
inline std::vector<double> attend_oracle(const std::vector<double>& scores,
                                         const Grid& values) {
  const std::size_t n = scores.size();
  double mx = -std::numeric_limits<double>::infinity();
  for (double s : scores) mx = std::max(mx, s);
  std::vector<double> p(n, 0.0);
  if (mx != -std::numeric_limits<double>::infinity()) {
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = std::exp(scores[i] - mx);
      denom += p[i];
    }
    for (auto& v : p) v /= denom;
  }
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t l = 0; l < values.size(); ++l)
    for (std::size_t i = 0; i < n; ++i) out[l] += p[i] * values[l][i];
  return out;
}

/// Scalar-loop scaled dot-product attention: for each query, softmax of
/// key-query inner products over keys, then the weighted sum of values.
inline Grid scaled_dot_oracle(const Grid& q, const Grid& k, const Grid& v) {
  const std::size_t d_i = q.size(), m = q[0].size(), n = k[0].size();
  const std::size_t d_h = v.size();
  Grid out(d_h, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> scores(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < d_i; ++t) scores[i] += k[t][i] * q[t][j];
      scores[i] /= std::sqrt(static_cast<double>(d_i));
    }
    const auto col = attend_oracle(scores, v);
    for (std::size_t l = 0; l < d_h; ++l) out[l][j] = col[l];
  }
  return out;
}

/// Scalar-loop tensorized attention with every index written out: project
/// q/k/v, build the full (key, query, feature) score tensor from the
/// token2token and source2token parts plus the mask, softmax over keys per
/// (query, feature), and sum the value features. All-masked cells yield 0.
inline Matrix<double> tsa_scalar_oracle(const Matrix<double>& x,
                                        const Matrix<double>& mask_additive,
                                        const TsaParams<double>& p,
                                        const ScaleFns& fns) {
  const int n = x.cols();
  const int d_i = p.d_i(), d_h = p.d_h(), d_a = p.d_a(), d_e = p.d_e();

  Grid q(d_i, std::vector<double>(n, 0.0)), k = q;
  Grid v(d_h, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < d_i; ++a)
      for (int e = 0; e < d_e; ++e) {
        q[a][j] += p.w_t1(a, e) * x(e, j);
        k[a][j] += p.w_t2(a, e) * x(e, j);
      }
    for (int l = 0; l < d_h; ++l)
      for (int e = 0; e < d_e; ++e) v[l][j] += p.w_t3(l, e) * x(e, j);
  }

  // token2token scores
  Grid r(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < d_i; ++a) r[i][j] += k[a][i] * q[a][j];
      r[i][j] /= std::sqrt(static_cast<double>(d_i));
    }

  // source2token scores per key
  Grid s(d_h, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    std::vector<double> hidden(d_a, 0.0);
    for (int a = 0; a < d_a; ++a) {
      double acc = p.b_s1(a, 0);
      for (int b = 0; b < d_i; ++b) acc += p.w_s1(a, b) * k[b][i];
      hidden[a] = oracle_act(fns.sigma_m, acc);
    }
    for (int l = 0; l < d_h; ++l) {
      double acc = p.b_s2(l, 0);
      for (int a = 0; a < d_a; ++a) acc += p.w_s2(l, a) * hidden[a];
      s[l][i] = acc;
    }
  }

  Matrix<double> out(d_h, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < d_h; ++l) {
      std::vector<double> scores(n);
      for (int i = 0; i < n; ++i)
        scores[i] = oracle_act(fns.sigma_t, r[i][j]) +
                    oracle_act(fns.sigma_s, s[l][i]) + mask_additive(i, j);
      const auto weighted = attend_oracle(scores, {v[l]});
      out(l, j) = weighted[0];
    }
  }
  return out;
}

}  // namespace mtsa::testutil
