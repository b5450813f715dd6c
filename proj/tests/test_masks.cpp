#include <doctest.h>

#include <limits>

#include "mtsa/masks.hpp"

using namespace mtsa;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("forward mask admits keys strictly before the query") {
  const auto m = make_mask<double>(MaskKind::forward, 3);
  // rows = key index, cols = query index
  const MatD expect(3, 3, {-kInf, 0, 0, -kInf, -kInf, 0, -kInf, -kInf, -kInf});
  CHECK(max_abs_diff(m.additive, expect) == 0.0);
}

TEST_CASE("backward mask is the transpose of forward") {
  const auto fw = make_mask<double>(MaskKind::forward, 3);
  const auto bw = make_mask<double>(MaskKind::backward, 3);
  CHECK(max_abs_diff(bw.multiplicative, transpose(fw.multiplicative)) == 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(fw.multiplicative(i, i) == 0.0);
    CHECK(bw.multiplicative(i, i) == 0.0);
  }
}

TEST_CASE("none mask admits everything") {
  const auto m = make_mask<double>(MaskKind::none, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(m.additive(i, j) == 0.0);
      CHECK(m.multiplicative(i, j) == 1.0);
    }
}

TEST_CASE("window mask admits 0 < |i-j| <= w") {
  const auto m = make_mask<double>(MaskKind::window, 5, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const bool open = i != j && std::abs(i - j) <= 2;
      CHECK(m.multiplicative(i, j) == (open ? 1.0 : 0.0));
    }
}

TEST_CASE("mask constructors validate their inputs") {
  CHECK_THROWS_AS(make_mask<double>(MaskKind::forward, 0), ConfigError);
  CHECK_THROWS_AS(make_mask<double>(MaskKind::window, 4, 0), ConfigError);
  CHECK_THROWS_AS(mask_kind_from_string("diagonal"), ConfigError);
  CHECK(mask_kind_from_string("fw") == MaskKind::forward);
}

TEST_CASE("additive and multiplicative forms agree under exp") {
  for (const MaskKind kind :
       {MaskKind::forward, MaskKind::backward, MaskKind::none, MaskKind::window}) {
    const auto m = make_mask<double>(kind, 6, 2);
    CHECK(max_abs_diff(exp_elem(m.additive), m.multiplicative) == 0.0);
  }
}

TEST_CASE("fully masked queries") {
  const auto fw = make_mask<double>(MaskKind::forward, 3);
  CHECK(fully_masked_queries(fw) == std::vector<int>{0});

  const auto bw = make_mask<double>(MaskKind::backward, 3);
  CHECK(fully_masked_queries(bw) == std::vector<int>{2});

  const auto none = make_mask<double>(MaskKind::none, 5);
  CHECK(fully_masked_queries(none).empty());

  const auto single = make_mask<double>(MaskKind::forward, 1);
  CHECK(fully_masked_queries(single) == std::vector<int>{0});
}

TEST_CASE("forward and backward cover each off-diagonal entry exactly once") {
  for (int n = 2; n <= 9; ++n) {
    const auto fw = make_mask<double>(MaskKind::forward, n);
    const auto bw = make_mask<double>(MaskKind::backward, n);
    const MatD both = add(fw.multiplicative, bw.multiplicative);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(both(i, j) == (i == j ? 0.0 : 1.0));
  }
}

TEST_CASE("mask cache returns shared instances per (kind, n, w)") {
  const auto a = cached_mask<double>({MaskKind::forward, 0}, 8);
  const auto b = cached_mask<double>({MaskKind::forward, 0}, 8);
  CHECK(a.get() == b.get());
  const auto c = cached_mask<double>({MaskKind::forward, 0}, 9);
  CHECK(a.get() != c.get());
  const auto w1 = cached_mask<double>({MaskKind::window, 1}, 8);
  const auto w2 = cached_mask<double>({MaskKind::window, 2}, 8);
  CHECK(w1.get() != w2.get());
}
