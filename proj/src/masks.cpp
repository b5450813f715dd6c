#include "mtsa/masks.hpp"

#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

namespace mtsa {

MaskKind mask_kind_from_string(const std::string& name) {
  if (name == "forward" || name == "fw") return MaskKind::forward;
  if (name == "backward" || name == "bw") return MaskKind::backward;
  if (name == "none") return MaskKind::none;
  if (name == "window") return MaskKind::window;
  throw ConfigError("unknown mask kind: " + name);
}

std::string to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::forward: return "forward";
    case MaskKind::backward: return "backward";
    case MaskKind::none: return "none";
    case MaskKind::window: return "window";
  }
  return "?";
}

namespace {

bool admits(MaskKind kind, int w, int i, int j) {
  switch (kind) {
    case MaskKind::forward: return i < j;
    case MaskKind::backward: return i > j;
    case MaskKind::none: return true;
    case MaskKind::window: return i != j && std::abs(i - j) <= w;
  }
  return false;
}

}  // namespace

template <typename T>
PositionalMask<T> make_mask(MaskKind kind, int n, int w) {
  if (n < 1) throw ConfigError("make_mask: n must be >= 1");
  if (kind == MaskKind::window && w < 1)
    throw ConfigError("make_mask: window masks need half-width w >= 1");

  const T neg_inf = -std::numeric_limits<T>::infinity();
  PositionalMask<T> mask;
  mask.spec = {kind, kind == MaskKind::window ? w : 0};
  mask.n = n;
  mask.additive = Matrix<T>(n, n);
  mask.multiplicative = Matrix<T>(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool open = admits(kind, w, i, j);
      mask.additive(i, j) = open ? T(0) : neg_inf;
      mask.multiplicative(i, j) = open ? T(1) : T(0);
    }
  }
  return mask;
}

template <typename T>
PositionalMask<T> make_mask(const MaskSpec& spec, int n) {
  return make_mask<T>(spec.kind, n, spec.w);
}

template <typename T>
std::shared_ptr<const PositionalMask<T>> cached_mask(const MaskSpec& spec, int n) {
  using Key = std::tuple<MaskKind, int, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const PositionalMask<T>>> cache;

  const Key key{spec.kind, n, spec.kind == MaskKind::window ? spec.w : 0};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  // cached masks are shared infrastructure, not per-call temporaries
  MeterScope unmetered(nullptr);
  auto mask = std::make_shared<const PositionalMask<T>>(make_mask<T>(spec, n));
  cache.emplace(key, mask);
  return mask;
}

template <typename T>
std::vector<int> fully_masked_queries(const PositionalMask<T>& mask) {
  std::vector<int> out;
  for (int j = 0; j < mask.n; ++j) {
    bool all_zero = true;
    for (int i = 0; i < mask.n && all_zero; ++i)
      all_zero = mask.multiplicative(i, j) == T(0);
    if (all_zero) out.push_back(j);
  }
  return out;
}

#define MTSA_INSTANTIATE(T)                                                           \
  template PositionalMask<T> make_mask(MaskKind, int, int);                           \
  template PositionalMask<T> make_mask(const MaskSpec&, int);                         \
  template std::shared_ptr<const PositionalMask<T>> cached_mask(const MaskSpec&, int); \
  template std::vector<int> fully_masked_queries(const PositionalMask<T>&);

MTSA_INSTANTIATE(float)
MTSA_INSTANTIATE(double)

#undef MTSA_INSTANTIATE

}  // namespace mtsa
