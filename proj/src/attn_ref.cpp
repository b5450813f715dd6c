#include "mtsa/attn_ref.hpp"

#include <cmath>

namespace mtsa {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

template <typename T>
Matrix<T> stack2(const Matrix<T>& a, const Matrix<T>& b) {
  return vconcat<T>({&a, &b});
}

}  // namespace

template <typename T>
Matrix<T> attend(const Matrix<T>& scores, const Matrix<T>& values) {
  require(scores.cols() == 1 && scores.rows() == values.cols(),
          "attend: scores must be n x 1 with n = value columns");
  const Matrix<T> p = column_softmax(scores);
  return matmul(values, p);
}

template <typename T>
T dot_score(const DotCompat<T>& p, const Matrix<T>& x_i, const Matrix<T>& q) {
  const Matrix<T> a = matmul(p.w1, x_i);
  const Matrix<T> b = matmul(p.w2, q);
  T s = T(0);
  for (int i = 0; i < a.rows(); ++i) s += a(i, 0) * b(i, 0);
  return s;
}

template <typename T>
T additive_score(const AdditiveCompat<T>& p, const Matrix<T>& x_i,
                 const Matrix<T>& q) {
  const Matrix<T> cat = stack2(x_i, q);
  const Matrix<T> hidden = activation(p.sigma_a, affine(p.w_a, cat, p.b_a));
  T s = p.b;
  for (int i = 0; i < hidden.rows(); ++i) s += p.w(i, 0) * hidden(i, 0);
  return s;
}

template <typename T>
Matrix<T> multidim_score(const MultiDimCompat<T>& p, const Matrix<T>& x_i,
                         const Matrix<T>& q) {
  const Matrix<T> cat = stack2(x_i, q);
  const Matrix<T> hidden = activation(p.sigma_a, affine(p.w_a, cat, p.b_a));
  return affine(p.w, hidden, p.b);
}

template <typename T>
Matrix<T> masked_score(const MaskedCompat<T>& p, const Matrix<T>& x_i,
                       const Matrix<T>& x_j, T mask_ij) {
  require(p.c > T(0), "masked_score: c must be positive");
  const Matrix<T> cat = stack2(x_i, x_j);
  Matrix<T> t = affine(p.w_m, cat, p.b_m);
  for (int l = 0; l < t.rows(); ++l)
    t(l, 0) = p.c * std::tanh(t(l, 0) / p.c) + mask_ij;
  return t;
}

template <typename T>
Matrix<T> scaled_dot_attention(const Matrix<T>& q, const Matrix<T>& k,
                               const Matrix<T>& v) {
  require(q.rows() == k.rows(), "scaled_dot_attention: q/k dims disagree");
  require(k.cols() == v.cols(), "scaled_dot_attention: k/v lengths disagree");
  const T alpha = T(1) / std::sqrt(static_cast<T>(q.rows()));
  const Matrix<T> scores = matmul_tn(k, q, alpha);  // n x m, rows = keys
  const Matrix<T> p = column_softmax(scores);
  return matmul(v, p);
}

template <typename T>
MhaParams<T> init_mha_params(int d_model, int heads, Rng& rng) {
  if (heads < 1 || d_model % heads != 0)
    throw ConfigError("init_mha_params: heads must divide d_model");
  const int d_head = d_model / heads;
  MhaParams<T> p;
  p.heads.reserve(heads);
  for (int c = 0; c < heads; ++c) {
    MhaHeadProj<T> h;
    h.w_q = glorot_init<T>(d_head, d_model, rng);
    h.w_k = glorot_init<T>(d_head, d_model, rng);
    h.w_v = glorot_init<T>(d_head, d_model, rng);
    p.heads.push_back(std::move(h));
  }
  p.w_o = glorot_init<T>(d_model, d_model, rng);
  return p;
}

template <typename T>
Matrix<T> multi_head_attention(const Matrix<T>& q, const Matrix<T>& k,
                               const Matrix<T>& v, const MhaParams<T>& params) {
  require(!params.heads.empty(), "multi_head_attention: no heads");
  std::vector<Matrix<T>> outs;
  outs.reserve(params.heads.size());
  for (const auto& h : params.heads)
    outs.push_back(scaled_dot_attention(matmul(h.w_q, q), matmul(h.w_k, k),
                                        matmul(h.w_v, v)));
  std::vector<const Matrix<T>*> parts;
  parts.reserve(outs.size());
  for (const auto& o : outs) parts.push_back(&o);
  const Matrix<T> cat = vconcat(parts);
  require(params.w_o.cols() == cat.rows(), "multi_head_attention: w_o shape");
  return matmul(params.w_o, cat);
}

template <typename T>
Matrix<T> masked_self_attention(const Matrix<T>& x, const PositionalMask<T>& mask,
                                const MaskedCompat<T>& params) {
  const int n = x.cols();
  const int d_e = x.rows();
  require(mask.n == n, "masked_self_attention: mask size");
  require(params.w_m.rows() == d_e && params.w_m.cols() == 2 * d_e,
          "masked_self_attention: w_m shape");

  // per-feature n x n score matrices
  std::vector<Matrix<T>> scores(d_e, Matrix<T>(n, n));
  for (int j = 0; j < n; ++j) {
    const Matrix<T> xj = column(x, j);
    for (int i = 0; i < n; ++i) {
      const Matrix<T> f = masked_score(params, column(x, i), xj, mask.additive(i, j));
      for (int l = 0; l < d_e; ++l) scores[l](i, j) = f(l, 0);
    }
  }

  Matrix<T> out(d_e, n);
  for (int l = 0; l < d_e; ++l) {
    const Matrix<T> p = column_softmax(scores[l]);
    for (int j = 0; j < n; ++j) {
      T acc = T(0);
      for (int i = 0; i < n; ++i) acc += p(i, j) * x(l, i);
      out(l, j) = acc;
    }
  }
  return out;
}

template <typename T>
Matrix<T> disa(const Matrix<T>& x, const MaskedCompat<T>& params_fw,
               const MaskedCompat<T>& params_bw) {
  const int n = x.cols();
  const auto fw = cached_mask<T>({MaskKind::forward, 0}, n);
  const auto bw = cached_mask<T>({MaskKind::backward, 0}, n);
  const Matrix<T> a = masked_self_attention(x, *fw, params_fw);
  const Matrix<T> b = masked_self_attention(x, *bw, params_bw);
  return stack2(a, b);
}

template <typename T>
PoolParams<T> init_pool_params(int d, int d_a, Rng& rng) {
  PoolParams<T> p;
  p.w1 = glorot_init<T>(d_a, d, rng);
  p.b1 = Matrix<T>(d_a, 1);
  p.w2 = glorot_init<T>(d, d_a, rng);
  p.b2 = Matrix<T>(d, 1);
  return p;
}

template <typename T>
Matrix<T> source2token_pool(const Matrix<T>& x, const PoolParams<T>& params) {
  require(params.w1.cols() == x.rows(), "source2token_pool: w1 shape");
  require(params.w2.rows() == x.rows(), "source2token_pool: w2 shape");
  const Matrix<T> scores =
      affine(params.w2, activation(params.sigma_m, affine(params.w1, x, params.b1)),
             params.b2);
  const Matrix<T> weights = row_softmax(scores);
  Matrix<T> out(x.rows(), 1);
  for (int l = 0; l < x.rows(); ++l) {
    T acc = T(0);
    for (int i = 0; i < x.cols(); ++i) acc += weights(l, i) * x(l, i);
    out(l, 0) = acc;
  }
  return out;
}

template <typename T>
Matrix<T> tsa_naive(const Matrix<T>& x, const PositionalMask<T>& mask,
                    const TsaParams<T>& params, const ScaleFns& fns) {
  validate(params);
  validate(fns);
  const int n = x.cols();
  require(x.rows() == params.d_e(), "tsa_naive: input dim");
  require(mask.n == n, "tsa_naive: mask size");
  const int d_h = params.d_h();

  const Matrix<T> q = matmul(params.w_t1, x);
  const Matrix<T> k = matmul(params.w_t2, x);
  const Matrix<T> v = matmul(params.w_t3, x);

  const T alpha = T(1) / std::sqrt(static_cast<T>(params.d_i()));
  const Matrix<T> t2t = activation(fns.sigma_t, matmul_tn(k, q, alpha));  // n x n
  const Matrix<T> s2t =
      activation(fns.sigma_s,
                 affine(params.w_s2,
                        activation(fns.sigma_m, affine(params.w_s1, k, params.b_s1)),
                        params.b_s2));  // d_h x n

  // Full tensor, one n x n slice per feature.
  std::vector<Matrix<T>> slices;
  slices.reserve(d_h);
  for (int l = 0; l < d_h; ++l) {
    Matrix<T> f(n, n);
    for (int i = 0; i < n; ++i) {
      const T sl = s2t(l, i);
      for (int j = 0; j < n; ++j) f(i, j) = t2t(i, j) + sl + mask.additive(i, j);
    }
    slices.push_back(std::move(f));
  }

  // Probability tensor; scores stay alive until every slice is normalized.
  std::vector<Matrix<T>> probs;
  probs.reserve(d_h);
  for (int l = 0; l < d_h; ++l) probs.push_back(column_softmax(slices[l]));

  Matrix<T> out(d_h, n);
  for (int l = 0; l < d_h; ++l) {
    const Matrix<T>& p = probs[l];
    for (int j = 0; j < n; ++j) {
      T acc = T(0);
      for (int i = 0; i < n; ++i) acc += p(i, j) * v(l, i);
      out(l, j) = acc;
    }
  }
  return out;
}

template <typename T>
Matrix<T> mtsa_naive_forward(const Matrix<T>& x, const MtsaParams<T>& params,
                             const AttentionConfig& cfg) {
  validate(params, cfg);
  const int n = x.cols();
  std::vector<Matrix<T>> outs;
  outs.reserve(params.heads.size());
  for (std::size_t c = 0; c < params.heads.size(); ++c) {
    const auto mask = cached_mask<T>(params.mask_assignment[c], n);
    outs.push_back(tsa_naive(x, *mask, params.heads[c], cfg.fns));
  }
  std::vector<const Matrix<T>*> parts;
  parts.reserve(outs.size());
  for (const auto& o : outs) parts.push_back(&o);
  const Matrix<T> cat = vconcat(parts);
  return matmul(params.w_o, cat);
}

#define MTSA_INSTANTIATE(T)                                                          \
  template Matrix<T> attend(const Matrix<T>&, const Matrix<T>&);                     \
  template T dot_score(const DotCompat<T>&, const Matrix<T>&, const Matrix<T>&);     \
  template T additive_score(const AdditiveCompat<T>&, const Matrix<T>&,              \
                            const Matrix<T>&);                                       \
  template Matrix<T> multidim_score(const MultiDimCompat<T>&, const Matrix<T>&,      \
                                    const Matrix<T>&);                               \
  template Matrix<T> masked_score(const MaskedCompat<T>&, const Matrix<T>&,          \
                                  const Matrix<T>&, T);                              \
  template Matrix<T> scaled_dot_attention(const Matrix<T>&, const Matrix<T>&,        \
                                          const Matrix<T>&);                         \
  template MhaParams<T> init_mha_params(int, int, Rng&);                             \
  template Matrix<T> multi_head_attention(const Matrix<T>&, const Matrix<T>&,        \
                                          const Matrix<T>&, const MhaParams<T>&);    \
  template Matrix<T> masked_self_attention(const Matrix<T>&, const PositionalMask<T>&, \
                                           const MaskedCompat<T>&);                  \
  template Matrix<T> disa(const Matrix<T>&, const MaskedCompat<T>&,                  \
                          const MaskedCompat<T>&);                                   \
  template PoolParams<T> init_pool_params(int, int, Rng&);                           \
  template Matrix<T> source2token_pool(const Matrix<T>&, const PoolParams<T>&);      \
  template Matrix<T> tsa_naive(const Matrix<T>&, const PositionalMask<T>&,           \
                               const TsaParams<T>&, const ScaleFns&);                \
  template Matrix<T> mtsa_naive_forward(const Matrix<T>&, const MtsaParams<T>&,      \
                                        const AttentionConfig&);

MTSA_INSTANTIATE(float)
MTSA_INSTANTIATE(double)

#undef MTSA_INSTANTIATE

}  // namespace mtsa
