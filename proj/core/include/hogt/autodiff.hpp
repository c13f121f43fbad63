#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "hogt/tensor.hpp"

namespace hogt::ad {

class Tape;

// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Tensor& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

// Records primitive operations in execution order; backward() walks them in reverse.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self, const Tensor& out_grad)>;

  Var leaf(Tensor value);      // differentiable input
  Var constant(Tensor value);  // excluded from differentiation

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(std::size_t id) const;
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(output)/d(output) = 1; output must hold a single element.
  void backward(Var output);

  Var record(Tensor value, const std::vector<Var>& parents, Backward backward);
  // Adds g into the gradient of node id (allocating it on first use).
  void accumulate(std::size_t id, const Tensor& g);
  Tensor& grad_buffer(std::size_t id);

  // Smallest |input| seen by any relu on this tape; gradchecks use it to stay off kinks.
  double min_relu_margin() const { return min_relu_margin_; }
  void note_relu_margin(double m) {
    if (m < min_relu_margin_) min_relu_margin_ = m;
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
  double min_relu_margin_ = std::numeric_limits<double>::infinity();
};

Var matmul(Var a, Var b);
Var transpose(Var a);
// Same shape, or b of length cols broadcast over rows.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var add_scalar(Var a, double s);
Var scale(Var a, double s);
Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var a, std::size_t begin, std::size_t end);
Var slice_rows(Var a, std::size_t begin, std::size_t end);
// out[i] = a[index[i]]
Var gather_rows(Var a, const std::vector<std::size_t>& index);
// out[index[i]] += a[i], out has out_rows rows.
Var scatter_add_rows(Var a, const std::vector<std::size_t>& index, std::size_t out_rows);
Var softmax_rows(Var a);
// Softmax of an (E x 1) column within contiguous segments [offsets[s], offsets[s+1]).
Var segment_softmax(Var a, const std::vector<std::size_t>& offsets);
Var relu(Var a);
Var elu(Var a);
Var exp(Var a);
Var sum(Var a);
Var mean(Var a);
// Column sums, shape 1 x cols.
Var sum_rows(Var a);
// Row sums, shape rows x 1.
Var row_sum(Var a);
// Row-wise inner products of same-shape a and b, shape rows x 1.
Var row_dot(Var a, Var b);
// a (r x c) times column s (r x 1) broadcast across columns.
Var mul_col(Var a, Var s);
// a (r x c) divided by column s (r x 1).
Var div_col(Var a, Var s);
// a (r x c) plus column s (r x 1).
Var add_col(Var a, Var s);
// Outer product of two rank-1 (or single-row) operands.
Var outer_product(Var a, Var b);

}  // namespace hogt::ad
