#include "mtsa/mtsa_fast.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

namespace mtsa {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

/// Masked token2token scores sigma_t(k^T q / sqrt(div)) + additive mask.
template <typename T>
Matrix<T> masked_t2t_scores(const Matrix<T>& q, const Matrix<T>& k,
                            const PositionalMask<T>& mask, Activation sigma_t,
                            Step3Divisor divisor, int d_i, int d_h) {
  const int div_dim = divisor == Step3Divisor::query_key_dim ? d_i : d_h;
  const T alpha = T(1) / std::sqrt(static_cast<T>(div_dim));
  Matrix<T> r = matmul_tn(k, q, alpha);
  if (sigma_t != Activation::identity) r = activation(sigma_t, r);
  return add(r, mask.additive);
}

/// Source2token scores sigma_s(w_s2 sigma_m(w_s1 k + b_s1) + b_s2).
template <typename T>
Matrix<T> s2t_scores(const Matrix<T>& k, const TsaParams<T>& params,
                     const ScaleFns& fns) {
  Matrix<T> s = affine(params.w_s2,
                       activation(fns.sigma_m, affine(params.w_s1, k, params.b_s1)),
                       params.b_s2);
  if (fns.sigma_s != Activation::identity) s = activation(fns.sigma_s, s);
  return s;
}

}  // namespace

template <typename T>
DropoutMaskPair<T> sample_dropout(const AttentionConfig& cfg, int n, Rng& rng) {
  if (!(cfg.p_ad > 0.0 && cfg.p_ad <= 1.0))
    throw ConfigError("sample_dropout: p_ad must be in (0, 1]");
  const double keep = std::sqrt(cfg.p_ad);
  const T kept = static_cast<T>(1.0 / keep);

  DropoutMaskPair<T> pair;
  pair.mask_x = Matrix<T>(cfg.d_h, n);
  pair.mask_r = Matrix<T>(n, n);
  for (std::size_t i = 0; i < pair.mask_x.size(); ++i)
    pair.mask_x.data()[i] = rng.bernoulli(keep) ? kept : T(0);
  for (std::size_t i = 0; i < pair.mask_r.size(); ++i)
    pair.mask_r.data()[i] = rng.bernoulli(keep) ? kept : T(0);
  return pair;
}

template <typename T>
Matrix<T> tsa_head_fast(const Matrix<T>& x, const PositionalMask<T>& mask,
                        const TsaParams<T>& params, const ScaleFns& fns,
                        bool stabilize, const DropoutMaskPair<T>* dropout,
                        Step3Divisor divisor) {
  validate(params);
  validate(fns);
  const int n = x.cols();
  const int d_h = params.d_h();
  require(x.rows() == params.d_e(), "tsa_head_fast: input dim");
  require(mask.n == n, "tsa_head_fast: mask size");
  if (dropout) {
    require(dropout->mask_x.rows() == d_h && dropout->mask_x.cols() == n,
            "tsa_head_fast: dropout mask_x shape");
    require(dropout->mask_r.rows() == n && dropout->mask_r.cols() == n,
            "tsa_head_fast: dropout mask_r shape");
  }
  constexpr T eps = T(1e-12);
  const T neg_inf = -std::numeric_limits<T>::infinity();

  Matrix<T> r_scores;  // n x n, masked
  Matrix<T> s_scores;  // d_h x n
  {
    Matrix<T> q = matmul(params.w_t1, x);
    Matrix<T> k = matmul(params.w_t2, x);
    r_scores = masked_t2t_scores(q, k, mask, fns.sigma_t, divisor,
                                 params.d_i(), d_h);
    q = Matrix<T>();
    s_scores = s2t_scores(k, params, fns);
  }

  // Shifts are constant in the key index, so they cancel between numerator
  // and denominator; eps is rescaled below to keep the result identical to
  // the unshifted computation.
  Matrix<T> col_shift(1, n);
  Matrix<T> row_shift(d_h, 1);
  if (stabilize) {
    for (int j = 0; j < n; ++j) {
      T mx = neg_inf;
      for (int i = 0; i < n; ++i) mx = std::max(mx, r_scores(i, j));
      col_shift(0, j) = mx == neg_inf ? T(0) : mx;  // fully masked column
    }
    for (int l = 0; l < d_h; ++l) {
      T mx = neg_inf;
      for (int i = 0; i < n; ++i) mx = std::max(mx, s_scores(l, i));
      row_shift(l, 0) = mx;
    }
    for (int j = 0; j < n; ++j) {
      const T c = col_shift(0, j);
      for (int i = 0; i < n; ++i) r_scores(i, j) -= c;
    }
    for (int l = 0; l < d_h; ++l) {
      const T c = row_shift(l, 0);
      for (int i = 0; i < n; ++i) s_scores(l, i) -= c;
    }
  }

  Matrix<T> e_r = exp_elem(r_scores);
  r_scores = Matrix<T>();
  Matrix<T> e_s = exp_elem(s_scores);
  s_scores = Matrix<T>();

  Matrix<T> numer;
  {
    Matrix<T> v = matmul(params.w_t3, x);
    Matrix<T> e_x = mul(v, e_s);
    v = Matrix<T>();
    numer = dropout ? matmul(mul(dropout->mask_x, e_x), mul(dropout->mask_r, e_r))
                    : matmul(e_x, e_r);
  }
  Matrix<T> denom = matmul(e_s, e_r);
  e_r = Matrix<T>();
  e_s = Matrix<T>();

  Matrix<T> out(d_h, n);
  bool finite = true;
  for (int l = 0; l < d_h; ++l) {
    for (int j = 0; j < n; ++j) {
      const T e = stabilize
                      ? eps * std::exp(-(row_shift(l, 0) + col_shift(0, j)))
                      : eps;
      const T h = numer(l, j) / (denom(l, j) + e);
      finite = finite && std::isfinite(h);
      out(l, j) = h;
    }
  }
  if (!finite)
    throw NumericError("tsa_head_fast: non-finite output; enable stabilization");
  return out;
}

template <typename T>
Matrix<T> mtsa_forward(const Matrix<T>& x, const MtsaParams<T>& params,
                       const AttentionConfig& cfg, Rng* rng,
                       Step3Divisor divisor, bool parallel_heads) {
  validate(params, cfg);
  require(x.rows() == cfg.d_e, "mtsa_forward: input dim");
  const int n = x.cols();
  const int h = cfg.heads;
  const bool use_dropout = rng != nullptr && cfg.p_ad < 1.0;

  std::vector<DropoutMaskPair<T>> dropouts;
  if (use_dropout) {
    Rng base(rng->next_u64());
    dropouts.reserve(h);
    for (int c = 0; c < h; ++c) {
      Rng head_rng = base.split(static_cast<std::uint64_t>(c));
      dropouts.push_back(sample_dropout<T>(cfg, n, head_rng));
    }
  }

  std::vector<Matrix<T>> outs(h);
  auto run_head = [&](int c) {
    const auto mask = cached_mask<T>(params.mask_assignment[c], n);
    outs[c] = tsa_head_fast(x, *mask, params.heads[c], cfg.fns, cfg.stabilize,
                            use_dropout ? &dropouts[c] : nullptr, divisor);
  };

  if (parallel_heads && h > 1) {
    AllocMeter* meter = active_alloc_meter();
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(h);
    workers.reserve(h);
    for (int c = 0; c < h; ++c) {
      workers.emplace_back([&, c] {
        MeterScope scope(meter);
        try {
          run_head(c);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (int c = 0; c < h; ++c) run_head(c);
  }

  std::vector<const Matrix<T>*> parts;
  parts.reserve(h);
  for (const auto& o : outs) parts.push_back(&o);
  const Matrix<T> cat = vconcat(parts);
  return matmul(params.w_o, cat);
}

template <typename T>
HeadAttentionMaps<T> head_attention_maps(const Matrix<T>& x,
                                         const PositionalMask<T>& mask,
                                         const TsaParams<T>& params,
                                         const ScaleFns& fns,
                                         Step3Divisor divisor) {
  validate(params);
  validate(fns);
  require(x.rows() == params.d_e(), "head_attention_maps: input dim");
  require(mask.n == x.cols(), "head_attention_maps: mask size");

  const Matrix<T> q = matmul(params.w_t1, x);
  const Matrix<T> k = matmul(params.w_t2, x);

  HeadAttentionMaps<T> maps;
  // column_softmax of the masked scores == columns of exp(scores) divided by
  // their sums, with all-masked columns pinned to zero
  maps.token2token = column_softmax(
      masked_t2t_scores(q, k, mask, fns.sigma_t, divisor, params.d_i(),
                        params.d_h()));
  maps.source2token = affine(
      params.w_s2, activation(fns.sigma_m, affine(params.w_s1, k, params.b_s1)),
      params.b_s2);
  return maps;
}

#define MTSA_INSTANTIATE(T)                                                         \
  template DropoutMaskPair<T> sample_dropout(const AttentionConfig&, int, Rng&);    \
  template Matrix<T> tsa_head_fast(const Matrix<T>&, const PositionalMask<T>&,      \
                                   const TsaParams<T>&, const ScaleFns&, bool,      \
                                   const DropoutMaskPair<T>*, Step3Divisor);        \
  template Matrix<T> mtsa_forward(const Matrix<T>&, const MtsaParams<T>&,           \
                                  const AttentionConfig&, Rng*, Step3Divisor, bool); \
  template HeadAttentionMaps<T> head_attention_maps(                                \
      const Matrix<T>&, const PositionalMask<T>&, const TsaParams<T>&,              \
      const ScaleFns&, Step3Divisor);

MTSA_INSTANTIATE(float)
MTSA_INSTANTIATE(double)

#undef MTSA_INSTANTIATE

}  // namespace mtsa
