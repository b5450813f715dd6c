#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mtsa/matrix.hpp"

namespace mtsa {

enum class MaskKind { forward, backward, none, window };

MaskKind mask_kind_from_string(const std::string& name);
std::string to_string(MaskKind kind);

/// Mask kind plus the half-width a window mask needs.
struct MaskSpec {
  MaskKind kind = MaskKind::none;
  int w = 0;

  bool operator==(const MaskSpec&) const = default;
};

/// n x n positional mask in both additive ({0, -inf}, added to alignment
/// scores) and multiplicative ({1, 0} = exp(additive)) forms.
///
/// Rows index the key/dependent token i, columns the query/governor token j.
/// forward admits i < j, backward admits i > j, window admits 0 < |i-j| <= w;
/// the diagonal is masked for all three, so the first query of a forward mask
/// and the last of a backward mask have no keys at all.
template <typename T>
struct PositionalMask {
  MaskSpec spec;
  int n = 0;
  Matrix<T> additive;
  Matrix<T> multiplicative;
};

template <typename T>
PositionalMask<T> make_mask(MaskKind kind, int n, int w = 0);

template <typename T>
PositionalMask<T> make_mask(const MaskSpec& spec, int n);

/// Cached immutable masks keyed by (kind, n, w); insertion is synchronized.
template <typename T>
std::shared_ptr<const PositionalMask<T>> cached_mask(const MaskSpec& spec, int n);

/// Query indices j whose multiplicative column is all zeros.
template <typename T>
std::vector<int> fully_masked_queries(const PositionalMask<T>& mask);

}  // namespace mtsa
