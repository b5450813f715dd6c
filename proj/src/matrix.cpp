#include "mtsa/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtsa/rng.hpp"

namespace mtsa {

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "elu") return Activation::elu;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "log_sigmoid") return Activation::log_sigmoid;
  if (name == "identity") return Activation::identity;
  throw ConfigError("unknown activation: " + name);
}

std::string to_string(Activation fn) {
  switch (fn) {
    case Activation::relu: return "relu";
    case Activation::elu: return "elu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::log_sigmoid: return "log_sigmoid";
    case Activation::identity: return "identity";
  }
  return "?";
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions disagree");
  Matrix<T> c(a.rows(), b.cols());
  const int m = a.rows(), k = a.cols(), n = b.cols();
  for (int i = 0; i < m; ++i) {
    T* ci = c.row(i);
    const T* ai = a.row(i);
    for (int t = 0; t < k; ++t) {
      const T av = ai[t];
      const T* bt = b.row(t);
      for (int j = 0; j < n; ++j) ci[j] += av * bt[j];
    }
  }
  return c;
}

template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b, T alpha) {
  require(a.rows() == b.rows(), "matmul_tn: inner dimensions disagree");
  Matrix<T> c(a.cols(), b.cols());
  const int m = a.cols(), k = a.rows(), n = b.cols();
  for (int t = 0; t < k; ++t) {
    const T* at = a.row(t);
    const T* bt = b.row(t);
    for (int i = 0; i < m; ++i) {
      T* ci = c.row(i);
      const T av = at[i];
      for (int j = 0; j < n; ++j) ci[j] += av * bt[j];
    }
  }
  if (alpha != T(1)) {
    for (int i = 0; i < m; ++i) {
      T* ci = c.row(i);
      for (int j = 0; j < n; ++j) ci[j] *= alpha;
    }
  }
  return c;
}

template <typename T>
Matrix<T> affine(const Matrix<T>& w, const Matrix<T>& x, const Matrix<T>& bias) {
  require(bias.rows() == w.rows() && bias.cols() == 1, "affine: bias shape");
  Matrix<T> c = matmul(w, x);
  for (int i = 0; i < c.rows(); ++i) {
    const T bv = bias(i, 0);
    T* ci = c.row(i);
    for (int j = 0; j < c.cols(); ++j) ci[j] += bv;
  }
  return c;
}

template <typename T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> c(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
  return c;
}

namespace {

template <typename T, typename F>
Matrix<T> binary_op(const Matrix<T>& a, const Matrix<T>& b, F f, const char* what) {
  require(a.same_shape(b), what);
  Matrix<T> c(a.rows(), a.cols());
  const T* pa = a.data();
  const T* pb = b.data();
  T* pc = c.data();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) pc[i] = f(pa[i], pb[i]);
  return c;
}

}  // namespace

template <typename T>
Matrix<T> add(const Matrix<T>& a, const Matrix<T>& b) {
  return binary_op(a, b, [](T x, T y) { return x + y; }, "add: shape mismatch");
}

template <typename T>
Matrix<T> sub(const Matrix<T>& a, const Matrix<T>& b) {
  return binary_op(a, b, [](T x, T y) { return x - y; }, "sub: shape mismatch");
}

template <typename T>
Matrix<T> mul(const Matrix<T>& a, const Matrix<T>& b) {
  return binary_op(a, b, [](T x, T y) { return x * y; }, "mul: shape mismatch");
}

template <typename T>
Matrix<T> div(const Matrix<T>& a, const Matrix<T>& b) {
  require(a.same_shape(b), "div: shape mismatch");
  Matrix<T> c(a.rows(), a.cols());
  const T* pa = a.data();
  const T* pb = b.data();
  T* pc = c.data();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (pb[i] == T(0)) throw NumericError("div: zero denominator");
    pc[i] = pa[i] / pb[i];
  }
  return c;
}

template <typename T>
Matrix<T> div_eps(const Matrix<T>& a, const Matrix<T>& b, T eps) {
  return binary_op(a, b, [eps](T x, T y) { return x / (y + eps); },
                   "div_eps: shape mismatch");
}

template <typename T>
Matrix<T> exp_elem(const Matrix<T>& a) {
  Matrix<T> c(a.rows(), a.cols());
  const T* pa = a.data();
  T* pc = c.data();
  for (std::size_t i = 0; i < a.size(); ++i) pc[i] = std::exp(pa[i]);
  return c;
}

template <typename T>
Matrix<T> scale(const Matrix<T>& a, T alpha) {
  Matrix<T> c(a.rows(), a.cols());
  const T* pa = a.data();
  T* pc = c.data();
  for (std::size_t i = 0; i < a.size(); ++i) pc[i] = alpha * pa[i];
  return c;
}

template <typename T>
Matrix<T> add_colvec(const Matrix<T>& a, const Matrix<T>& bias) {
  require(bias.rows() == a.rows() && bias.cols() == 1, "add_colvec: bias shape");
  Matrix<T> c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const T bv = bias(i, 0);
    const T* ai = a.row(i);
    T* ci = c.row(i);
    for (int j = 0; j < a.cols(); ++j) ci[j] = ai[j] + bv;
  }
  return c;
}

template <typename T>
Matrix<T> activation(Activation fn, const Matrix<T>& x) {
  Matrix<T> c(x.rows(), x.cols());
  const T* px = x.data();
  T* pc = c.data();
  for (std::size_t i = 0; i < x.size(); ++i) pc[i] = apply_activation(fn, px[i]);
  return c;
}

template <typename T>
Matrix<T> column_softmax(const Matrix<T>& scores) {
  const T neg_inf = -std::numeric_limits<T>::infinity();
  Matrix<T> p(scores.rows(), scores.cols());
  for (int j = 0; j < scores.cols(); ++j) {
    T mx = neg_inf;
    for (int i = 0; i < scores.rows(); ++i) {
      const T v = scores(i, j);
      if (std::isnan(v)) throw NumericError("column_softmax: NaN input");
      if (v > mx) mx = v;
    }
    if (mx == neg_inf) continue;  // fully masked column stays all-zero
    T denom = T(0);
    for (int i = 0; i < scores.rows(); ++i) {
      const T e = std::exp(scores(i, j) - mx);
      p(i, j) = e;
      denom += e;
    }
    for (int i = 0; i < scores.rows(); ++i) p(i, j) /= denom;
  }
  return p;
}

template <typename T>
Matrix<T> row_softmax(const Matrix<T>& scores) {
  const T neg_inf = -std::numeric_limits<T>::infinity();
  Matrix<T> p(scores.rows(), scores.cols());
  for (int i = 0; i < scores.rows(); ++i) {
    const T* si = scores.row(i);
    T* pi = p.row(i);
    T mx = neg_inf;
    for (int j = 0; j < scores.cols(); ++j) {
      if (std::isnan(si[j])) throw NumericError("row_softmax: NaN input");
      if (si[j] > mx) mx = si[j];
    }
    if (mx == neg_inf) continue;
    T denom = T(0);
    for (int j = 0; j < scores.cols(); ++j) {
      pi[j] = std::exp(si[j] - mx);
      denom += pi[j];
    }
    for (int j = 0; j < scores.cols(); ++j) pi[j] /= denom;
  }
  return p;
}

template <typename T>
Matrix<T> glorot_init(int rows, int cols, Rng& rng) {
  require(rows >= 1 && cols >= 1, "glorot_init: dimensions must be positive");
  const double bound = std::sqrt(6.0 / (rows + cols));
  const T tb = static_cast<T>(bound);
  Matrix<T> m(rows, cols);
  T* pm = m.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    T v = static_cast<T>((2.0 * rng.uniform_open() - 1.0) * bound);
    // float rounding can land exactly on the bound; nudge inward
    if (v >= tb) v = std::nextafter(tb, T(0));
    if (v <= -tb) v = std::nextafter(-tb, T(0));
    pm[i] = v;
  }
  return m;
}

template <typename T>
Matrix<T> uniform_init(int rows, int cols, T lo, T hi, Rng& rng) {
  Matrix<T> m(rows, cols);
  T* pm = m.data();
  for (std::size_t i = 0; i < m.size(); ++i)
    pm[i] = static_cast<T>(rng.uniform(lo, hi));
  return m;
}

template <typename T>
Matrix<T> vconcat(const std::vector<const Matrix<T>*>& parts) {
  require(!parts.empty(), "vconcat: no parts");
  const int cols = parts[0]->cols();
  int rows = 0;
  for (const auto* p : parts) {
    require(p->cols() == cols, "vconcat: column counts disagree");
    rows += p->rows();
  }
  Matrix<T> c(rows, cols);
  int at = 0;
  for (const auto* p : parts) {
    for (int i = 0; i < p->rows(); ++i)
      std::copy(p->row(i), p->row(i) + cols, c.row(at + i));
    at += p->rows();
  }
  return c;
}

template <typename T>
Matrix<T> column(const Matrix<T>& a, int j) {
  require(j >= 0 && j < a.cols(), "column: index out of range");
  Matrix<T> c(a.rows(), 1);
  for (int i = 0; i < a.rows(); ++i) c(i, 0) = a(i, j);
  return c;
}

template <typename T>
Matrix<T> gather_columns(const Matrix<T>& a, const std::vector<int>& ids) {
  Matrix<T> c(a.rows(), static_cast<int>(ids.size()));
  for (int j = 0; j < c.cols(); ++j) {
    require(ids[j] >= 0 && ids[j] < a.cols(), "gather_columns: index out of range");
    for (int i = 0; i < a.rows(); ++i) c(i, j) = a(i, ids[j]);
  }
  return c;
}

template <typename T>
T sum(const Matrix<T>& a) {
  T s = T(0);
  const T* pa = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += pa[i];
  return s;
}

template <typename T>
T max_abs(const Matrix<T>& a) {
  T s = T(0);
  const T* pa = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(pa[i]));
  return s;
}

template <typename T>
T max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  require(a.same_shape(b), "max_abs_diff: shape mismatch");
  T s = T(0);
  const T* pa = a.data();
  const T* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(pa[i] - pb[i]));
  return s;
}

#define MTSA_INSTANTIATE(T)                                                        \
  template Matrix<T> matmul(const Matrix<T>&, const Matrix<T>&);                   \
  template Matrix<T> matmul_tn(const Matrix<T>&, const Matrix<T>&, T);             \
  template Matrix<T> affine(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&); \
  template Matrix<T> transpose(const Matrix<T>&);                                  \
  template Matrix<T> add(const Matrix<T>&, const Matrix<T>&);                      \
  template Matrix<T> sub(const Matrix<T>&, const Matrix<T>&);                      \
  template Matrix<T> mul(const Matrix<T>&, const Matrix<T>&);                      \
  template Matrix<T> div(const Matrix<T>&, const Matrix<T>&);                      \
  template Matrix<T> div_eps(const Matrix<T>&, const Matrix<T>&, T);               \
  template Matrix<T> exp_elem(const Matrix<T>&);                                   \
  template Matrix<T> scale(const Matrix<T>&, T);                                   \
  template Matrix<T> add_colvec(const Matrix<T>&, const Matrix<T>&);               \
  template Matrix<T> activation(Activation, const Matrix<T>&);                     \
  template Matrix<T> column_softmax(const Matrix<T>&);                             \
  template Matrix<T> row_softmax(const Matrix<T>&);                                \
  template Matrix<T> glorot_init(int, int, Rng&);                                  \
  template Matrix<T> uniform_init(int, int, T, T, Rng&);                           \
  template Matrix<T> vconcat(const std::vector<const Matrix<T>*>&);                \
  template Matrix<T> column(const Matrix<T>&, int);                                \
  template Matrix<T> gather_columns(const Matrix<T>&, const std::vector<int>&);    \
  template T sum(const Matrix<T>&);                                                \
  template T max_abs(const Matrix<T>&);                                            \
  template T max_abs_diff(const Matrix<T>&, const Matrix<T>&);

MTSA_INSTANTIATE(float)
MTSA_INSTANTIATE(double)

#undef MTSA_INSTANTIATE

}  // namespace mtsa
