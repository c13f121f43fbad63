#include "hogt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hogt/error.hpp"
#include "hogt/parallel.hpp"
#include "hogt/rng.hpp"

namespace hogt {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {
  if (shape_.empty()) throw Error(ErrorKind::DimensionError, "tensor rank must be >= 1");
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw Error(ErrorKind::DimensionError, "tensor rank must be >= 1");
  if (data_.size() != product(shape_))
    throw Error(ErrorKind::DimensionError, "data length differs from shape product " + shape_string());
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Tensor Tensor::vector(std::vector<double> v) {
  std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorKind::DimensionError, "from_rows needs at least one row");
  std::size_t cols = rows[0].size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(ErrorKind::DimensionError, "ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(data));
}

std::size_t Tensor::rows() const {
  if (shape_.size() == 1) return 1;
  if (shape_.size() == 2) return shape_[0];
  throw Error(ErrorKind::DimensionError, "rows() needs rank 1 or 2, got " + shape_string());
}

std::size_t Tensor::cols() const {
  if (shape_.size() == 1) return shape_[0];
  if (shape_.size() == 2) return shape_[1];
  throw Error(ErrorKind::DimensionError, "cols() needs rank 1 or 2, got " + shape_string());
}

std::vector<double> Tensor::row(std::size_t r) const {
  const double* p = row_ptr(r);
  return std::vector<double>(p, p + cols());
}

Tensor Tensor::reshape(std::vector<std::size_t> shape) const {
  if (product(shape) != data_.size())
    throw Error(ErrorKind::DimensionError, "reshape changes element count");
  return Tensor(std::move(shape), data_);
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

Tensor randn(std::vector<std::size_t> shape, Rng& rng, double scale) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = scale * rng.normal();
  return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::DimensionError, "max_abs_diff shape mismatch " + a.shape_string() +
                                               " vs " + b.shape_string());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double frobenius_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows())
    throw Error(ErrorKind::DimensionError,
                "matmul shape mismatch " + a.shape_string() + " x " + b.shape_string());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out({m, n});
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* o = out.row_ptr(i);
      const double* ai = a.row_ptr(i);
      for (std::size_t p = 0; p < k; ++p) {
        double av = ai[p];
        if (av == 0.0) continue;
        const double* bp = b.row_ptr(p);
        for (std::size_t j = 0; j < n; ++j) o[j] += av * bp[j];
      }
    }
  }, 64);
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw Error(ErrorKind::DimensionError, "transpose needs rank 2");
  Tensor out({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor softmax_rows(const Tensor& a) {
  if (a.cols() == 0) throw Error(ErrorKind::DimensionError, "softmax over an empty axis");
  Tensor out(a.shape());
  const std::size_t c = a.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* x = a.row_ptr(r);
    double* y = out.row_ptr(r);
    double m = *std::max_element(x, x + c);
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      y[j] = std::exp(x[j] - m);
      s += y[j];
    }
    for (std::size_t j = 0; j < c; ++j) y[j] /= s;
  }
  return out;
}

}  // namespace hogt
