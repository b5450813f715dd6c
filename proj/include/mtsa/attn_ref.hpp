#pragma once

#include <vector>

#include "mtsa/attention_params.hpp"
#include "mtsa/masks.hpp"
#include "mtsa/matrix.hpp"

namespace mtsa {

// Reference implementations of the attention family. These favor
// transparency over speed; tsa_naive in particular materializes the full
// n x n x d_h score tensor and is the correctness oracle for the
// matrix-only fast path.

/// Softmax the scores (n x 1) and return the weighted sum of value columns.
template <typename T>
Matrix<T> attend(const Matrix<T>& scores, const Matrix<T>& values);

/// Dot-product compatibility: <w1 * x_i, w2 * q>.
template <typename T>
struct DotCompat {
  Matrix<T> w1;  // d_i x d_e
  Matrix<T> w2;  // d_i x d_q
};

template <typename T>
T dot_score(const DotCompat<T>& p, const Matrix<T>& x_i, const Matrix<T>& q);

/// Additive (MLP) compatibility: w^T sigma_a(w_a [x_i; q] + b_a) + b.
template <typename T>
struct AdditiveCompat {
  Matrix<T> w_a;  // d_a x (d_e + d_q)
  Matrix<T> b_a;  // d_a x 1
  Matrix<T> w;    // d_a x 1
  T b = T(0);
  Activation sigma_a = Activation::tanh;
};

template <typename T>
T additive_score(const AdditiveCompat<T>& p, const Matrix<T>& x_i,
                 const Matrix<T>& q);

/// Multi-dim compatibility: the additive form with w^T widened to a matrix,
/// producing one score per feature.
template <typename T>
struct MultiDimCompat {
  Matrix<T> w_a;  // d_a x (d_e + d_q)
  Matrix<T> b_a;  // d_a x 1
  Matrix<T> w;    // d_e x d_a
  Matrix<T> b;    // d_e x 1
  Activation sigma_a = Activation::tanh;
};

template <typename T>
Matrix<T> multidim_score(const MultiDimCompat<T>& p, const Matrix<T>& x_i,
                         const Matrix<T>& q);

/// Mask-aware multi-dim compatibility used by masked self-attention:
/// c * tanh((w_m [x_i; x_j] + b_m) / c) + mask entry. The tanh clip keeps
/// scores in (-c, c) before the mask is added.
template <typename T>
struct MaskedCompat {
  Matrix<T> w_m;  // d_e x 2*d_e
  Matrix<T> b_m;  // d_e x 1
  T c = T(5);
};

template <typename T>
Matrix<T> masked_score(const MaskedCompat<T>& p, const Matrix<T>& x_i,
                       const Matrix<T>& x_j, T mask_ij);

/// v * softmax(k^T q / sqrt(d_i)) with the softmax normalizing over keys for
/// each query. q: d_i x m, k: d_i x n, v: d_h x n -> d_h x m.
template <typename T>
Matrix<T> scaled_dot_attention(const Matrix<T>& q, const Matrix<T>& k,
                               const Matrix<T>& v);

template <typename T>
struct MhaHeadProj {
  Matrix<T> w_q;
  Matrix<T> w_k;
  Matrix<T> w_v;
};

template <typename T>
struct MhaParams {
  std::vector<MhaHeadProj<T>> heads;
  Matrix<T> w_o;
};

template <typename T>
MhaParams<T> init_mha_params(int d_model, int heads, Rng& rng);

/// Parameter-untied scaled dot-product attention per subspace, outputs
/// concatenated and re-projected.
template <typename T>
Matrix<T> multi_head_attention(const Matrix<T>& q, const Matrix<T>& k,
                               const Matrix<T>& v, const MhaParams<T>& params);

/// Masked multi-dim self-attention over a single sequence: per query j and
/// feature l, softmax over keys of masked_score, then a weighted sum of x.
/// Fully masked queries produce zero columns.
template <typename T>
Matrix<T> masked_self_attention(const Matrix<T>& x, const PositionalMask<T>& mask,
                                const MaskedCompat<T>& params);

/// Forward-mask and backward-mask self-attentions stacked vertically
/// (2*d_e x n), giving each token bi-directional order information.
template <typename T>
Matrix<T> disa(const Matrix<T>& x, const MaskedCompat<T>& params_fw,
               const MaskedCompat<T>& params_bw);

/// Query-free multi-dim attention over the whole sequence; the sentence
/// embedding head. Per feature l the weights are softmax_i of score(x_i)_l.
template <typename T>
struct PoolParams {
  Matrix<T> w1;  // d_a x d
  Matrix<T> b1;  // d_a x 1
  Matrix<T> w2;  // d x d_a
  Matrix<T> b2;  // d x 1
  Activation sigma_m = Activation::relu;
};

template <typename T>
PoolParams<T> init_pool_params(int d, int d_a, Rng& rng);

template <typename T>
Matrix<T> source2token_pool(const Matrix<T>& x, const PoolParams<T>& params);

/// Naive tensorized self-attention. Builds the full score tensor
/// score[i, j, l] = sigma_t(token2token[i, j]) + sigma_s(source2token[l, i])
///                + mask[i, j]
/// as d_h stacked n x n matrices, softmaxes over i per (j, l), and returns
/// the weighted sums of value features (d_h x n). Both the score stack and
/// the probability stack pass through the active AllocMeter; that 2*n^2*d_h
/// working set is exactly what the fast path avoids.
template <typename T>
Matrix<T> tsa_naive(const Matrix<T>& x, const PositionalMask<T>& mask,
                    const TsaParams<T>& params, const ScaleFns& fns);

/// Multi-head multi-mask composition over the naive path:
/// w_o * [head_1; ...; head_h].
template <typename T>
Matrix<T> mtsa_naive_forward(const Matrix<T>& x, const MtsaParams<T>& params,
                             const AttentionConfig& cfg);

}  // namespace mtsa
