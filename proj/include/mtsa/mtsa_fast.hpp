#pragma once

#include <cstdint>

#include "mtsa/attention_params.hpp"
#include "mtsa/masks.hpp"
#include "mtsa/matrix.hpp"
#include "mtsa/rng.hpp"

namespace mtsa {

// Matrix-only tensorized attention. Produces the same output as tsa_naive
// without materializing any n x n x d_h tensor: masked token2token weights
// and source2token weights are exponentiated separately and combined with
// two d_h x n matrix products followed by an entrywise normalization.

/// Divisor of the token2token score scaling. The query/key dimension is the
/// default; the per-head value dimension is selectable so the mismatch
/// between the two conventions can be demonstrated against the oracle.
enum class Step3Divisor { query_key_dim, value_dim };

/// Inverted-dropout masks for the two factors of the output numerator.
/// Entries are 0 or 1/sqrt(p_ad); each factor keeps entries with probability
/// sqrt(p_ad), so a joint (key, feature, query) contribution survives with
/// probability p_ad.
template <typename T>
struct DropoutMaskPair {
  Matrix<T> mask_x;  // d_h x n, applied to the value-weight factor
  Matrix<T> mask_r;  // n x n, applied to the masked token2token factor
  std::uint64_t seed = 0;
};

template <typename T>
DropoutMaskPair<T> sample_dropout(const AttentionConfig& cfg, int n, Rng& rng);

/// One fast attention head:
///   q, k, v       = projections of x
///   r             = sigma_t(k^T q / sqrt(d_i)) + additive mask
///   s             = sigma_s(source2token scores of k)
///   e_r, e_s      = exp(r), exp(s);  e_x = v (*) e_s
///   out           = (e_x * e_r) (/) (e_s * e_r + eps)
/// with (*) and (/) entrywise. Fully masked query columns come out as exact
/// zeros via the eps term. When `stabilize` is set, per-query maxima of the
/// masked token2token scores and per-feature maxima of the source2token
/// scores are subtracted before exponentiation and eps is rescaled to match,
/// which leaves the result unchanged while keeping every exponent <= 0.
template <typename T>
Matrix<T> tsa_head_fast(const Matrix<T>& x, const PositionalMask<T>& mask,
                        const TsaParams<T>& params, const ScaleFns& fns,
                        bool stabilize,
                        const DropoutMaskPair<T>* dropout = nullptr,
                        Step3Divisor divisor = Step3Divisor::query_key_dim);

/// Multi-head multi-mask forward pass: w_o * [head_1; ...; head_h], each head
/// running tsa_head_fast under its assigned mask. Passing an rng enables
/// training-mode attention dropout when cfg.p_ad < 1 (one independent stream
/// per head); a null rng is evaluation mode and ignores dropout entirely.
template <typename T>
Matrix<T> mtsa_forward(const Matrix<T>& x, const MtsaParams<T>& params,
                       const AttentionConfig& cfg, Rng* rng = nullptr,
                       Step3Divisor divisor = Step3Divisor::query_key_dim,
                       bool parallel_heads = false);

/// Attention maps of one head for inspection/export: the normalized masked
/// token2token weights (columns sum to 1 where any key is admitted, all-zero
/// otherwise) and the raw source2token score matrix.
template <typename T>
struct HeadAttentionMaps {
  Matrix<T> token2token;   // n x n
  Matrix<T> source2token;  // d_h x n
};

template <typename T>
HeadAttentionMaps<T> head_attention_maps(
    const Matrix<T>& x, const PositionalMask<T>& mask, const TsaParams<T>& params,
    const ScaleFns& fns, Step3Divisor divisor = Step3Divisor::query_key_dim);

}  // namespace mtsa
