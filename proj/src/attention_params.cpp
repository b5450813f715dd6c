#include "mtsa/attention_params.hpp"

namespace mtsa {

void validate(const ScaleFns& fns) {
  auto scale_ok = [](Activation a) {
    return a == Activation::log_sigmoid || a == Activation::identity;
  };
  if (!scale_ok(fns.sigma_t) || !scale_ok(fns.sigma_s))
    throw ConfigError("scale functions must be log_sigmoid or identity");
}

template <typename T>
TsaParams<T> init_tsa_params(int d_e, int d_i, int d_h, int d_a, Rng& rng) {
  TsaParams<T> p;
  p.w_t1 = glorot_init<T>(d_i, d_e, rng);
  p.w_t2 = glorot_init<T>(d_i, d_e, rng);
  p.w_t3 = glorot_init<T>(d_h, d_e, rng);
  p.w_s1 = glorot_init<T>(d_a, d_i, rng);
  p.b_s1 = Matrix<T>(d_a, 1);
  p.w_s2 = glorot_init<T>(d_h, d_a, rng);
  p.b_s2 = Matrix<T>(d_h, 1);
  return p;
}

template <typename T>
void validate(const TsaParams<T>& p) {
  const int d_e = p.w_t1.cols(), d_i = p.w_t1.rows();
  const int d_h = p.w_t3.rows(), d_a = p.w_s1.rows();
  if (d_e < 1 || d_i < 1 || d_h < 1 || d_a < 1)
    throw DimensionError("TsaParams: dimensions must be >= 1");
  if (p.w_t2.rows() != d_i || p.w_t2.cols() != d_e)
    throw DimensionError("TsaParams: w_t2 shape");
  if (p.w_t3.cols() != d_e) throw DimensionError("TsaParams: w_t3 shape");
  if (p.w_s1.cols() != d_i) throw DimensionError("TsaParams: w_s1 shape");
  if (p.b_s1.rows() != d_a || p.b_s1.cols() != 1)
    throw DimensionError("TsaParams: b_s1 shape");
  if (p.w_s2.rows() != d_h || p.w_s2.cols() != d_a)
    throw DimensionError("TsaParams: w_s2 shape");
  if (p.b_s2.rows() != d_h || p.b_s2.cols() != 1)
    throw DimensionError("TsaParams: b_s2 shape");
}

void AttentionConfig::validate() const {
  if (d_e < 1 || d_i < 1 || d_h < 1 || d_a < 1)
    throw ConfigError("AttentionConfig: dimensions must be >= 1");
  if (heads < 1) throw ConfigError("AttentionConfig: heads must be >= 1");
  if (!(p_ad > 0.0 && p_ad <= 1.0))
    throw ConfigError("AttentionConfig: p_ad must be in (0, 1]");
  mtsa::validate(fns);
}

bool default_stabilize(const ScaleFns& fns) {
  return !(fns.sigma_t == Activation::log_sigmoid &&
           fns.sigma_s == Activation::log_sigmoid);
}

AttentionConfig make_config(int d_e, int d_i, int d_h, int d_a, int heads,
                            ScaleFns fns, double p_ad) {
  AttentionConfig cfg;
  cfg.d_e = d_e;
  cfg.d_i = d_i;
  cfg.d_h = d_h;
  cfg.d_a = d_a;
  cfg.heads = heads;
  cfg.fns = fns;
  cfg.p_ad = p_ad;
  cfg.stabilize = default_stabilize(fns);
  cfg.validate();
  return cfg;
}

std::vector<MaskSpec> default_mask_assignment(int heads) {
  std::vector<MaskSpec> out(heads);
  const int fw = (heads + 1) / 2;
  for (int c = 0; c < heads; ++c)
    out[c].kind = c < fw ? MaskKind::forward : MaskKind::backward;
  return out;
}

template <typename T>
MtsaParams<T> init_mtsa_params(const AttentionConfig& cfg, Rng& rng) {
  cfg.validate();
  MtsaParams<T> p;
  p.heads.reserve(cfg.heads);
  for (int c = 0; c < cfg.heads; ++c)
    p.heads.push_back(init_tsa_params<T>(cfg.d_e, cfg.d_i, cfg.d_h, cfg.d_a, rng));
  const int d_out = cfg.heads * cfg.d_h;
  p.w_o = glorot_init<T>(d_out, d_out, rng);
  p.mask_assignment = default_mask_assignment(cfg.heads);
  return p;
}

template <typename T>
void validate(const MtsaParams<T>& p, const AttentionConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(p.heads.size()) != cfg.heads)
    throw DimensionError("MtsaParams: head count does not match config");
  if (static_cast<int>(p.mask_assignment.size()) != cfg.heads)
    throw DimensionError("MtsaParams: mask assignment count does not match config");
  for (const auto& h : p.heads) {
    validate(h);
    if (h.d_e() != cfg.d_e || h.d_i() != cfg.d_i || h.d_h() != cfg.d_h ||
        h.d_a() != cfg.d_a)
      throw DimensionError("MtsaParams: head dimensions do not match config");
  }
  const int d_out = cfg.heads * cfg.d_h;
  if (p.w_o.rows() != d_out || p.w_o.cols() != d_out)
    throw DimensionError("MtsaParams: w_o must be square with side heads*d_h");
}

#define MTSA_INSTANTIATE(T)                                                \
  template TsaParams<T> init_tsa_params(int, int, int, int, Rng&);         \
  template void validate(const TsaParams<T>&);                             \
  template MtsaParams<T> init_mtsa_params(const AttentionConfig&, Rng&);   \
  template void validate(const MtsaParams<T>&, const AttentionConfig&);

MTSA_INSTANTIATE(float)
MTSA_INSTANTIATE(double)

#undef MTSA_INSTANTIATE

}  // namespace mtsa
