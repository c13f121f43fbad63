#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace hogt {

class Rng;

// Dense row-major float64 tensor. Most code uses rank 2 (rows x cols);
// rank 1 tensors of length c broadcast over the rows of an r x c operand.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }
  static Tensor filled(std::size_t rows, std::size_t cols, double v) { return Tensor({rows, cols}, v); }
  static Tensor identity(std::size_t n);
  static Tensor scalar(double v) { return Tensor({1}, {v}); }
  static Tensor vector(std::vector<double> v);
  static Tensor from_rows(const std::vector<std::vector<double>>& rows);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  // rank 2: shape[0]; rank 1: 1.
  std::size_t rows() const;
  // rank 2: shape[1]; rank 1: shape[0].
  std::size_t cols() const;

  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.back() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.back() + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  double* row_ptr(std::size_t r) { return data_.data() + r * shape_.back(); }
  const double* row_ptr(std::size_t r) const { return data_.data() + r * shape_.back(); }
  std::vector<double> row(std::size_t r) const;

  Tensor reshape(std::vector<std::size_t> shape) const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_string() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

Tensor randn(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0);

double max_abs_diff(const Tensor& a, const Tensor& b);
double frobenius_norm(const Tensor& a);

// Non-recording kernels shared by the tape and by plain numerical code.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor softmax_rows(const Tensor& a);

}  // namespace hogt
