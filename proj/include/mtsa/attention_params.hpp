#pragma once

#include <vector>

#include "mtsa/masks.hpp"
#include "mtsa/matrix.hpp"
#include "mtsa/rng.hpp"

namespace mtsa {

/// Scale functions applied to the two alignment-score families before they
/// are combined, plus the hidden activation of the source2token scorer.
/// sigma_t and sigma_s are restricted to log_sigmoid or identity: log_sigmoid
/// turns a score into a sigmoid-scaled multiplicative factor under the
/// softmax's exponential and keeps scores from growing large, while identity
/// keeps the contribution additive.
struct ScaleFns {
  Activation sigma_t = Activation::log_sigmoid;
  Activation sigma_s = Activation::identity;
  Activation sigma_m = Activation::relu;
};

void validate(const ScaleFns& fns);

/// One tensorized-attention head: query/key/value projections plus the
/// two-layer source2token scorer.
template <typename T>
struct TsaParams {
  Matrix<T> w_t1;  // d_i x d_e, query projection
  Matrix<T> w_t2;  // d_i x d_e, key projection
  Matrix<T> w_t3;  // d_h x d_e, value projection
  Matrix<T> w_s1;  // d_a x d_i
  Matrix<T> b_s1;  // d_a x 1
  Matrix<T> w_s2;  // d_h x d_a
  Matrix<T> b_s2;  // d_h x 1

  int d_e() const { return w_t1.cols(); }
  int d_i() const { return w_t1.rows(); }
  int d_h() const { return w_t3.rows(); }
  int d_a() const { return w_s1.rows(); }
};

template <typename T>
TsaParams<T> init_tsa_params(int d_e, int d_i, int d_h, int d_a, Rng& rng);

template <typename T>
void validate(const TsaParams<T>& p);

/// Dimensions and knobs of a multi-head attention block. d_h is the per-head
/// value dimension (already divided by the head count).
struct AttentionConfig {
  int d_e = 0;
  int d_i = 0;
  int d_h = 0;
  int d_a = 0;
  int heads = 1;
  ScaleFns fns;
  double p_ad = 1.0;  // attention-dropout keep probability, in (0, 1]
  bool stabilize = true;

  void validate() const;
};

/// Scores are bounded only when both scale functions are log_sigmoid; that is
/// the one case where exponentiation cannot overflow without shifting.
bool default_stabilize(const ScaleFns& fns);

AttentionConfig make_config(int d_e, int d_i, int d_h, int d_a, int heads,
                            ScaleFns fns = {}, double p_ad = 1.0);

/// First ceil(h/2) heads read the sequence forward, the rest backward.
std::vector<MaskSpec> default_mask_assignment(int heads);

/// All heads plus the output projection. Heads are parameter-independent;
/// the mask each head uses is data, so any assignment can be benchmarked.
template <typename T>
struct MtsaParams {
  std::vector<TsaParams<T>> heads;
  Matrix<T> w_o;  // (h*d_h) x (h*d_h)
  std::vector<MaskSpec> mask_assignment;
};

template <typename T>
MtsaParams<T> init_mtsa_params(const AttentionConfig& cfg, Rng& rng);

template <typename T>
void validate(const MtsaParams<T>& p, const AttentionConfig& cfg);

}  // namespace mtsa
