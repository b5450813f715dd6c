#pragma once

#include <cstddef>
#include <type_traits>
#include <vector>

#include "mtsa/alloc_meter.hpp"
#include "mtsa/common.hpp"

namespace mtsa {

class Rng;

/// Dense row-major matrix with explicit element type (float or double).
/// Values are treated as immutable once an operation has returned them;
/// element writes only happen while a result is being filled in.
///
/// Entries are finite except for additive positional-mask storage, where
/// -inf marks a forbidden key/query pair.
template <typename T>
class Matrix {
  static_assert(std::is_floating_point_v<T>, "Matrix supports float or double");

 public:
  Matrix() = default;

  Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    check_shape(rows, cols);
    data_.assign(static_cast<std::size_t>(rows) * cols, T(0));
    register_alloc();
  }

  Matrix(int rows, int cols, std::vector<T> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    check_shape(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows) * cols)
      throw DimensionError("Matrix: value count does not match rows*cols");
    register_alloc();
  }

  Matrix(const Matrix& other)
      : rows_(other.rows_), cols_(other.cols_), data_(other.data_) {
    register_alloc();
  }

  Matrix(Matrix&& other) noexcept
      : rows_(other.rows_), cols_(other.cols_), data_(std::move(other.data_)),
        meter_(other.meter_) {
    other.rows_ = other.cols_ = 0;
    other.data_.clear();
    other.meter_ = nullptr;
  }

  Matrix& operator=(const Matrix& other) {
    if (this != &other) {
      release_alloc();
      rows_ = other.rows_;
      cols_ = other.cols_;
      data_ = other.data_;
      register_alloc();
    }
    return *this;
  }

  Matrix& operator=(Matrix&& other) noexcept {
    if (this != &other) {
      release_alloc();
      rows_ = other.rows_;
      cols_ = other.cols_;
      data_ = std::move(other.data_);
      meter_ = other.meter_;
      other.rows_ = other.cols_ = 0;
      other.data_.clear();
      other.meter_ = nullptr;
    }
    return *this;
  }

  ~Matrix() { release_alloc(); }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix constant(int rows, int cols, T value) {
    Matrix m(rows, cols);
    for (auto& v : m.data_) v = value;
    return m;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  T& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  const T* data() const noexcept { return data_.data(); }
  T* data() noexcept { return data_.data(); }

  const T* row(int i) const noexcept {
    return data_.data() + static_cast<std::size_t>(i) * cols_;
  }
  T* row(int i) noexcept {
    return data_.data() + static_cast<std::size_t>(i) * cols_;
  }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  static void check_shape(int rows, int cols) {
    if (rows < 0 || cols < 0) throw DimensionError("Matrix: negative dimension");
  }

  void register_alloc() {
    meter_ = active_alloc_meter();
    if (meter_ && !data_.empty()) meter_->on_alloc(data_.size());
  }

  void release_alloc() noexcept {
    if (meter_ && !data_.empty()) meter_->on_free(data_.size());
    meter_ = nullptr;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
  AllocMeter* meter_ = nullptr;
};

using MatF = Matrix<float>;
using MatD = Matrix<double>;

// ---- kernels -------------------------------------------------------------

/// C = A * B. Inner dimensions must agree.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b);

/// C = alpha * (A^T * B), without materializing the transpose.
template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b, T alpha = T(1));

/// W * x + bias, bias a column vector broadcast over columns of the product.
template <typename T>
Matrix<T> affine(const Matrix<T>& w, const Matrix<T>& x, const Matrix<T>& bias);

template <typename T>
Matrix<T> transpose(const Matrix<T>& a);

template <typename T>
Matrix<T> add(const Matrix<T>& a, const Matrix<T>& b);

template <typename T>
Matrix<T> sub(const Matrix<T>& a, const Matrix<T>& b);

template <typename T>
Matrix<T> mul(const Matrix<T>& a, const Matrix<T>& b);

/// Entrywise a / b; throws NumericError if any b entry is zero.
template <typename T>
Matrix<T> div(const Matrix<T>& a, const Matrix<T>& b);

/// Entrywise a / (b + eps); 0/(0+eps) is 0 by construction.
template <typename T>
Matrix<T> div_eps(const Matrix<T>& a, const Matrix<T>& b, T eps);

/// Entrywise exp; exp(-inf) is exactly 0.
template <typename T>
Matrix<T> exp_elem(const Matrix<T>& a);

template <typename T>
Matrix<T> scale(const Matrix<T>& a, T alpha);

/// a + bias * ones(1, cols): bias is rows x 1.
template <typename T>
Matrix<T> add_colvec(const Matrix<T>& a, const Matrix<T>& bias);

template <typename T>
Matrix<T> activation(Activation fn, const Matrix<T>& x);

/// Softmax down each column. Stabilized by the column max; a column whose
/// entries are all -inf yields an all-zero column rather than NaN.
template <typename T>
Matrix<T> column_softmax(const Matrix<T>& scores);

/// Softmax along each row, with the same all-masked convention.
template <typename T>
Matrix<T> row_softmax(const Matrix<T>& scores);

/// Uniform init on (-b, b) with b = sqrt(6 / (rows + cols)). Entries are
/// strictly inside the bound. Biases use the zero-filled constructor instead.
template <typename T>
Matrix<T> glorot_init(int rows, int cols, Rng& rng);

/// Uniform entries in [lo, hi); test and benchmark input generator.
template <typename T>
Matrix<T> uniform_init(int rows, int cols, T lo, T hi, Rng& rng);

template <typename T>
Matrix<T> vconcat(const std::vector<const Matrix<T>*>& parts);

/// Copy of column j as a rows x 1 matrix.
template <typename T>
Matrix<T> column(const Matrix<T>& a, int j);

/// Columns a[:, ids[0]], a[:, ids[1]], ... as a new matrix.
template <typename T>
Matrix<T> gather_columns(const Matrix<T>& a, const std::vector<int>& ids);

template <typename T>
T sum(const Matrix<T>& a);

template <typename T>
T max_abs(const Matrix<T>& a);

template <typename T>
T max_abs_diff(const Matrix<T>& a, const Matrix<T>& b);

}  // namespace mtsa
