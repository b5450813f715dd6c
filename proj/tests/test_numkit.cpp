#include <doctest.h>

#include <cmath>
#include <limits>

#include "mtsa/alloc_meter.hpp"
#include "mtsa/matrix.hpp"
#include "mtsa/rng.hpp"
#include "test_util.hpp"

using namespace mtsa;
using testutil::grid_matmul;
using testutil::random_mat;
using testutil::to_grid;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("matmul identity and forced values") {
  const MatD i2 = MatD::identity(2);
  const MatD b(2, 2, {3, 1, 2, 4});
  const MatD c = matmul(i2, b);
  CHECK(max_abs_diff(c, b) == 0.0);

  const MatD a(1, 2, {1, 2});
  const MatD d(2, 1, {3, 4});
  CHECK(matmul(a, d)(0, 0) == 11.0);
}

TEST_CASE("matmul matches the triple-loop oracle") {
  Rng rng(42);
  const MatD a = random_mat(7, 5, rng);
  const MatD b = random_mat(5, 3, rng);
  const auto expect = grid_matmul(to_grid(a), to_grid(b));
  const MatD got = matmul(a, b);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(got(i, j) - expect[i][j]) <= 1e-12);
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
  CHECK_THROWS_AS(matmul(MatD(2, 3), MatD(2, 3)), DimensionError);
  CHECK_THROWS_AS(matmul_tn(MatD(2, 3), MatD(3, 3)), DimensionError);
}

TEST_CASE("matmul_tn equals transpose-then-multiply") {
  Rng rng(7);
  const MatD a = random_mat(4, 6, rng);
  const MatD b = random_mat(4, 5, rng);
  CHECK(max_abs_diff(matmul_tn(a, b, 0.5), scale(matmul(transpose(a), b), 0.5)) <=
        1e-15);
}

TEST_CASE("matmul associativity and transpose identities") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MatD a = random_mat(8, 8, rng);
    const MatD b = random_mat(8, 8, rng);
    const MatD c = random_mat(8, 8, rng);
    const MatD left = matmul(matmul(a, b), c);
    const MatD right = matmul(a, matmul(b, c));
    CHECK(max_abs_diff(left, right) <= 1e-10 * std::max(1.0, max_abs(left)));
    CHECK(max_abs_diff(transpose(matmul(a, b)),
                       matmul(transpose(b), transpose(a))) <= 1e-12);
  }
}

TEST_CASE("elementwise operations") {
  const MatD z(1, 2, {0.0, -kInf});
  const MatD e = exp_elem(z);
  CHECK(e(0, 0) == 1.0);
  CHECK(e(0, 1) == 0.0);  // exp(-inf) is exactly zero

  const MatD a(1, 2, {2, 3});
  const MatD b(1, 2, {4, 5});
  const MatD m = mul(a, b);
  CHECK(m(0, 0) == 8.0);
  CHECK(m(0, 1) == 15.0);

  CHECK(add(a, b)(0, 1) == 8.0);
  CHECK(sub(b, a)(0, 0) == 2.0);
  CHECK_THROWS_AS(add(MatD(1, 2), MatD(2, 1)), DimensionError);
}

TEST_CASE("division and stabilized division") {
  const MatD zero(1, 1);
  CHECK(div_eps(zero, zero, 1e-12)(0, 0) == 0.0);
  CHECK_THROWS_AS(div(MatD(1, 1, {1.0}), zero), NumericError);
  const MatD num(1, 1, {6.0});
  const MatD den(1, 1, {3.0});
  CHECK(div(num, den)(0, 0) == 2.0);
}

TEST_CASE("activation values") {
  const MatD x0(1, 1, {0.0});
  CHECK(activation(Activation::sigmoid, x0)(0, 0) == doctest::Approx(0.5));
  CHECK(activation(Activation::log_sigmoid, x0)(0, 0) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  const MatD xm1(1, 1, {-1.0});
  CHECK(activation(Activation::relu, xm1)(0, 0) == 0.0);
  CHECK(activation(Activation::elu, xm1)(0, 0) ==
        doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-12));

  const MatD big(1, 1, {400.0});
  CHECK(std::abs(activation(Activation::tanh, big)(0, 0) - 1.0) <= 1e-12);
  CHECK(std::isfinite(activation(Activation::log_sigmoid, MatD(1, 1, {-745.0}))(0, 0)));
  CHECK(activation(Activation::identity, big)(0, 0) == 400.0);

  CHECK_THROWS_AS(activation_from_string("swish"), ConfigError);
  CHECK(activation_from_string("log_sigmoid") == Activation::log_sigmoid);
}

TEST_CASE("glorot bounds follow sqrt(6/(rows+cols))") {
  Rng rng(11);
  const MatD big = glorot_init<double>(300, 300, rng);
  CHECK(max_abs(big) < 0.1);

  const MatD tiny = glorot_init<double>(1, 2, rng);
  CHECK(max_abs(tiny) < std::sqrt(2.0));
}

TEST_CASE("glorot entries stay strictly inside the bound") {
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const int r = 1 + static_cast<int>(rng.below(12));
    const int c = 1 + static_cast<int>(rng.below(12));
    const double bound = std::sqrt(6.0 / (r + c));
    const MatD m = glorot_init<double>(r, c, rng);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        CHECK(m(i, j) > -bound);
        CHECK(m(i, j) < bound);
      }
    const MatF mf = glorot_init<float>(r, c, rng);
    const float bf = static_cast<float>(bound);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        CHECK(mf(i, j) > -bf);
        CHECK(mf(i, j) < bf);
      }
  }
}

TEST_CASE("glorot sample mean is centered") {
  Rng rng(5);
  const int rows = 100, cols = 1000;  // 1e5 samples
  const MatD m = glorot_init<double>(rows, cols, rng);
  const double b = std::sqrt(6.0 / (rows + cols));
  CHECK(std::abs(sum(m) / (rows * cols)) <= 0.01 * b);
}

TEST_CASE("column_softmax basics and conventions") {
  const MatD even(3, 1, {0, 0, 0});
  const MatD p = column_softmax(even);
  for (int i = 0; i < 3; ++i) CHECK(p(i, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const MatD masked(3, 1, {-kInf, 0, 0});
  const MatD pm = column_softmax(masked);
  CHECK(pm(0, 0) == 0.0);
  CHECK(pm(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pm(2, 0) == doctest::Approx(0.5).epsilon(1e-12));

  const MatD all_masked(3, 1, {-kInf, -kInf, -kInf});
  const MatD pz = column_softmax(all_masked);
  for (int i = 0; i < 3; ++i) CHECK(pz(i, 0) == 0.0);

  const MatD bad(1, 1, {std::numeric_limits<double>::quiet_NaN()});
  CHECK_THROWS_AS(column_softmax(bad), NumericError);
}

TEST_CASE("masked softmax columns with support sum to one and stay finite") {
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(10));
    MatD scores = random_mat(n, n, rng, -30.0, 30.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rng.bernoulli(0.4)) scores(i, j) = -kInf;
    const MatD p = column_softmax(scores);
    for (int j = 0; j < n; ++j) {
      double colsum = 0.0;
      bool support = false;
      for (int i = 0; i < n; ++i) {
        CHECK(!std::isnan(p(i, j)));
        CHECK(p(i, j) >= 0.0);
        CHECK(p(i, j) <= 1.0);
        colsum += p(i, j);
        support = support || scores(i, j) != -kInf;
      }
      if (support)
        CHECK(std::abs(colsum - 1.0) <= 1e-12);
      else
        CHECK(colsum == 0.0);
    }
  }
  // single precision variant of the normalization bound
  Rng rngf(19);
  MatF sf = uniform_init<float>(6, 6, -5.0f, 5.0f, rngf);
  const MatF pf = column_softmax(sf);
  for (int j = 0; j < 6; ++j) {
    float colsum = 0.0f;
    for (int i = 0; i < 6; ++i) colsum += pf(i, j);
    CHECK(std::abs(colsum - 1.0f) <= 1e-6f);
  }
}

TEST_CASE("row_softmax matches column_softmax of the transpose") {
  Rng rng(23);
  const MatD s = random_mat(4, 7, rng, -3.0, 3.0);
  CHECK(max_abs_diff(row_softmax(s), transpose(column_softmax(transpose(s)))) <=
        1e-15);
}

TEST_CASE("alloc meter tracks peak float counts") {
  AllocMeter meter;
  {
    MeterScope scope(meter);
    MatD m(12, 7);
    CHECK(meter.current_floats() == 84);
    CHECK(meter.peak_floats() == 84);
  }
  CHECK(meter.current_floats() == 0);
  CHECK(meter.peak_floats() == 84);

  meter.reset();
  CHECK(meter.peak_floats() == 0);
  {
    MeterScope scope(meter);
    MatD a(3, 5);
    { MatD b(10, 10); }  // freed before peak is read
    MatD c(2, 2);
    CHECK(meter.peak_floats() == 115);
    CHECK(meter.current_floats() == 19);
    CHECK(meter.peak_floats() >= meter.current_floats());
  }

  // moves transfer accounting instead of double counting
  meter.reset();
  {
    MeterScope scope(meter);
    MatD a(4, 4);
    MatD b = std::move(a);
    CHECK(meter.current_floats() == 16);
  }
  CHECK(meter.current_floats() == 0);
}

TEST_CASE("meter scopes nest and suspend") {
  AllocMeter outer;
  {
    MeterScope scope(outer);
    {
      MeterScope off(nullptr);
      MatD hidden(8, 8);
      CHECK(outer.current_floats() == 0);
    }
    MatD seen(2, 3);
    CHECK(outer.current_floats() == 6);
  }
}

TEST_CASE("rng streams are reproducible and well-ranged") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double o = c.uniform_open();
    CHECK(o > 0.0);
    CHECK(o < 1.0);
    CHECK(c.below(10) < 10);
  }

  // split streams differ from the parent and from each other
  Rng base(99);
  Rng s0 = base.split(0), s1 = base.split(1);
  CHECK(s0.next_u64() != s1.next_u64());
}
