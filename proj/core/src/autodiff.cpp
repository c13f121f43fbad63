#include "hogt/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "hogt/error.hpp"

namespace hogt::ad {

const Tensor& Var::value() const { return tape->value(id); }
const Tensor& Var::grad() const { return tape->grad(id); }

Var Tape::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), true, nullptr});
  return Var{this, nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), false, nullptr});
  return Var{this, nodes_.size() - 1};
}

const Tensor& Tape::grad(std::size_t id) const {
  static const Tensor empty;
  return nodes_[id].grad.size() ? nodes_[id].grad : empty;
}

Var Tape::record(Tensor value, const std::vector<Var>& parents, Backward backward) {
  bool needs = false;
  for (const Var& p : parents) {
    if (p.tape != this) throw Error(ErrorKind::InvalidParameter, "operands recorded on different tapes");
    needs = needs || nodes_[p.id].needs_grad;
  }
  nodes_.push_back(Node{std::move(value), Tensor(), needs, needs ? std::move(backward) : nullptr});
  return Var{this, nodes_.size() - 1};
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& node = nodes_[id];
  if (node.grad.size() == 0) node.grad = Tensor(node.value.shape());
  return node.grad;
}

void Tape::accumulate(std::size_t id, const Tensor& g) {
  if (!nodes_[id].needs_grad) return;
  Tensor& buf = grad_buffer(id);
  if (buf.size() != g.size())
    throw Error(ErrorKind::DimensionError, "gradient shape " + g.shape_string() +
                                               " differs from value shape " + buf.shape_string());
  for (std::size_t i = 0; i < g.size(); ++i) buf[i] += g[i];
}

void Tape::backward(Var output) {
  if (output.tape != this) throw Error(ErrorKind::InvalidParameter, "output is not on this tape");
  if (nodes_[output.id].value.size() != 1)
    throw Error(ErrorKind::DimensionError, "backward needs a scalar output");
  for (auto& node : nodes_) node.grad = Tensor();
  grad_buffer(output.id)[0] = 1.0;
  for (std::size_t id = output.id + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.needs_grad || !node.backward || node.grad.size() == 0) continue;
    node.backward(*this, id, node.grad);
  }
}

// ---------------------------------------------------------------- primitives

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::DimensionError, what);
}

bool broadcasts_row(const Tensor& a, const Tensor& b) {
  return a.rank() == 2 && b.size() == a.cols() && (b.rank() == 1 || (b.rank() == 2 && b.rows() == 1));
}

Tensor column_sums(const Tensor& g) {
  Tensor out({g.cols()});
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) out[c] += g(r, c);
  return out;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tensor out = hogt::matmul(a.value(), b.value());
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape& t, std::size_t, const Tensor& g) {
    if (t.needs_grad(a.id)) t.accumulate(a.id, hogt::matmul(g, hogt::transpose(t.value(b.id))));
    if (t.needs_grad(b.id)) t.accumulate(b.id, hogt::matmul(hogt::transpose(t.value(a.id)), g));
  });
}

Var transpose(Var a) {
  Tensor out = hogt::transpose(a.value());
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t, const Tensor& g) {
    t.accumulate(a.id, hogt::transpose(g));
  });
}

namespace {
Var add_like(Var a, Var b, double sign) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  bool same = av.same_shape(bv);
  if (!same && !broadcasts_row(av, bv))
    throw Error(ErrorKind::DimensionError, "add shape mismatch " + av.shape_string() + " + " + bv.shape_string());
  Tensor out = av;
  if (same) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * bv[i];
  } else {
    const std::size_t c = av.cols();
    for (std::size_t r = 0; r < av.rows(); ++r)
      for (std::size_t j = 0; j < c; ++j) out(r, j) += sign * bv[j];
  }
  return a.tape->record(std::move(out), {a, b}, [a, b, same, sign](Tape& t, std::size_t, const Tensor& g) {
    t.accumulate(a.id, g);
    if (!t.needs_grad(b.id)) return;
    Tensor gb = same ? g : column_sums(g);
    if (sign != 1.0)
      for (auto& v : gb.data()) v *= sign;
    t.accumulate(b.id, gb);
  });
}
}  // namespace

Var add(Var a, Var b) { return add_like(a, b, 1.0); }
Var sub(Var a, Var b) { return add_like(a, b, -1.0); }

Var mul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  bool same = av.same_shape(bv);
  if (!same && !broadcasts_row(av, bv))
    throw Error(ErrorKind::DimensionError, "mul shape mismatch " + av.shape_string() + " * " + bv.shape_string());
  Tensor out = av;
  const std::size_t c = av.cols();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= same ? bv[i] : bv[i % c];
  return a.tape->record(std::move(out), {a, b}, [a, b, same, c](Tape& t, std::size_t, const Tensor& g) {
    const Tensor& av = t.value(a.id);
    const Tensor& bv = t.value(b.id);
    if (t.needs_grad(a.id)) {
      Tensor ga = g;
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= same ? bv[i] : bv[i % c];
      t.accumulate(a.id, ga);
    }
    if (t.needs_grad(b.id)) {
      Tensor gb(bv.shape());
      for (std::size_t i = 0; i < g.size(); ++i) gb[same ? i : i % c] += g[i] * av[i];
      t.accumulate(b.id, gb);
    }
  });
}

Var add_scalar(Var a, double s) {
  Tensor out = a.value();
  for (auto& v : out.data()) v += s;
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t, const Tensor& g) { t.accumulate(a.id, g); });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (auto& v : out.data()) v *= s;
  return a.tape->record(std::move(out), {a}, [a, s](Tape& t, std::size_t, const Tensor& g) {
    Tensor ga = g;
    for (auto& v : ga.data()) v *= s;
    t.accumulate(a.id, ga);
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat of zero tensors");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    require(p.value().rank() == 2 && p.rows() == rows, "concat_cols row mismatch");
    cols += p.cols();
  }
  Tensor out({rows, cols});
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(v.row_ptr(r), v.row_ptr(r) + v.cols(), out.row_ptr(r) + offset);
    offset += v.cols();
  }
  return parts[0].tape->record(std::move(out), parts, [parts](Tape& t, std::size_t, const Tensor& g) {
    std::size_t offset = 0;
    for (const Var& p : parts) {
      const std::size_t c = t.value(p.id).cols();
      if (t.needs_grad(p.id)) {
        Tensor gp({g.rows(), c});
        for (std::size_t r = 0; r < g.rows(); ++r)
          std::copy(g.row_ptr(r) + offset, g.row_ptr(r) + offset + c, gp.row_ptr(r));
        t.accumulate(p.id, gp);
      }
      offset += c;
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat of zero tensors");
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    require(p.value().rank() == 2 && p.cols() == cols, "concat_rows column mismatch");
    rows += p.rows();
  }
  Tensor out({rows, cols});
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const auto& d = p.value().data();
    std::copy(d.begin(), d.end(), out.data().begin() + static_cast<std::ptrdiff_t>(offset * cols));
    offset += p.rows();
  }
  return parts[0].tape->record(std::move(out), parts, [parts, cols](Tape& t, std::size_t, const Tensor& g) {
    std::size_t offset = 0;
    for (const Var& p : parts) {
      const std::size_t r = t.value(p.id).rows();
      if (t.needs_grad(p.id)) {
        Tensor gp({r, cols});
        std::copy(g.data().begin() + static_cast<std::ptrdiff_t>(offset * cols),
                  g.data().begin() + static_cast<std::ptrdiff_t>((offset + r) * cols), gp.data().begin());
        t.accumulate(p.id, gp);
      }
      offset += r;
    }
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  require(av.rank() == 2 && begin <= end && end <= av.cols(), "slice_cols out of range");
  const std::size_t c = end - begin;
  Tensor out({av.rows(), c});
  for (std::size_t r = 0; r < av.rows(); ++r)
    std::copy(av.row_ptr(r) + begin, av.row_ptr(r) + end, out.row_ptr(r));
  return a.tape->record(std::move(out), {a}, [a, begin, c](Tape& t, std::size_t, const Tensor& g) {
    Tensor ga(t.value(a.id).shape());
    for (std::size_t r = 0; r < g.rows(); ++r)
      std::copy(g.row_ptr(r), g.row_ptr(r) + c, ga.row_ptr(r) + begin);
    t.accumulate(a.id, ga);
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  require(av.rank() == 2 && begin <= end && end <= av.rows(), "slice_rows out of range");
  const std::size_t c = av.cols();
  Tensor out({end - begin, c});
  std::copy(av.row_ptr(begin), av.row_ptr(begin) + (end - begin) * c, out.data().begin());
  return a.tape->record(std::move(out), {a}, [a, begin, c](Tape& t, std::size_t, const Tensor& g) {
    Tensor ga(t.value(a.id).shape());
    std::copy(g.data().begin(), g.data().end(), ga.row_ptr(begin));
    (void)c;
    t.accumulate(a.id, ga);
  });
}

Var gather_rows(Var a, const std::vector<std::size_t>& index) {
  const Tensor& av = a.value();
  require(av.rank() == 2, "gather_rows needs rank 2");
  const std::size_t c = av.cols();
  Tensor out({index.size(), c});
  for (std::size_t i = 0; i < index.size(); ++i) {
    require(index[i] < av.rows(), "gather index out of range");
    std::copy(av.row_ptr(index[i]), av.row_ptr(index[i]) + c, out.row_ptr(i));
  }
  return a.tape->record(std::move(out), {a}, [a, index, c](Tape& t, std::size_t, const Tensor& g) {
    Tensor ga(t.value(a.id).shape());
    for (std::size_t i = 0; i < index.size(); ++i) {
      double* dst = ga.row_ptr(index[i]);
      const double* src = g.row_ptr(i);
      for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
    }
    t.accumulate(a.id, ga);
  });
}

Var scatter_add_rows(Var a, const std::vector<std::size_t>& index, std::size_t out_rows) {
  const Tensor& av = a.value();
  require(av.rank() == 2 && av.rows() == index.size(), "scatter_add_rows index/row mismatch");
  const std::size_t c = av.cols();
  Tensor out({out_rows, c});
  for (std::size_t i = 0; i < index.size(); ++i) {
    require(index[i] < out_rows, "scatter index out of range");
    double* dst = out.row_ptr(index[i]);
    const double* src = av.row_ptr(i);
    for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
  }
  return a.tape->record(std::move(out), {a}, [a, index, c](Tape& t, std::size_t, const Tensor& g) {
    Tensor ga(t.value(a.id).shape());
    for (std::size_t i = 0; i < index.size(); ++i)
      std::copy(g.row_ptr(index[i]), g.row_ptr(index[i]) + c, ga.row_ptr(i));
    t.accumulate(a.id, ga);
  });
}

namespace {
// dx = y * (dy - <dy, y>) within [begin, end) of a flat buffer with stride.
void softmax_backward_range(const double* y, const double* dy, double* dx, std::size_t len) {
  double dot = 0.0;
  for (std::size_t j = 0; j < len; ++j) dot += dy[j] * y[j];
  for (std::size_t j = 0; j < len; ++j) dx[j] = y[j] * (dy[j] - dot);
}
}  // namespace

Var softmax_rows(Var a) {
  Tensor out = hogt::softmax_rows(a.value());
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t self, const Tensor& g) {
    const Tensor& y = t.value(self);
    Tensor ga(y.shape());
    const std::size_t c = y.cols();
    for (std::size_t r = 0; r < y.rows(); ++r)
      softmax_backward_range(y.row_ptr(r), g.row_ptr(r), ga.row_ptr(r), c);
    t.accumulate(a.id, ga);
  });
}

Var segment_softmax(Var a, const std::vector<std::size_t>& offsets) {
  const Tensor& av = a.value();
  require(av.cols() == 1 || av.rank() == 1, "segment_softmax needs a column");
  require(!offsets.empty() && offsets.back() == av.size(), "segment offsets do not cover the input");
  Tensor out(av.shape());
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    std::size_t b = offsets[s], e = offsets[s + 1];
    if (b == e) continue;
    double m = av[b];
    for (std::size_t i = b; i < e; ++i) m = std::max(m, av[i]);
    double total = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      out[i] = std::exp(av[i] - m);
      total += out[i];
    }
    for (std::size_t i = b; i < e; ++i) out[i] /= total;
  }
  return a.tape->record(std::move(out), {a}, [a, offsets](Tape& t, std::size_t self, const Tensor& g) {
    const Tensor& y = t.value(self);
    Tensor ga(y.shape());
    for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
      std::size_t b = offsets[s], e = offsets[s + 1];
      softmax_backward_range(y.data().data() + b, g.data().data() + b, ga.data().data() + b, e - b);
    }
    t.accumulate(a.id, ga);
  });
}

Var relu(Var a) {
  Tensor out = a.value();
  double margin = std::numeric_limits<double>::infinity();
  for (auto& v : out.data()) {
    margin = std::min(margin, std::abs(v));
    if (v < 0.0) v = 0.0;
  }
  a.tape->note_relu_margin(margin);
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t, const Tensor& g) {
    const Tensor& x = t.value(a.id);
    Tensor ga = g;
    for (std::size_t i = 0; i < ga.size(); ++i)
      if (x[i] <= 0.0) ga[i] = 0.0;
    t.accumulate(a.id, ga);
  });
}

Var elu(Var a) {
  Tensor out = a.value();
  for (auto& v : out.data())
    if (v <= 0.0) v = std::expm1(v);
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t, const Tensor& g) {
    const Tensor& x = t.value(a.id);
    Tensor ga = g;
    for (std::size_t i = 0; i < ga.size(); ++i)
      if (x[i] <= 0.0) ga[i] *= std::exp(x[i]);
    t.accumulate(a.id, ga);
  });
}

Var exp(Var a) {
  Tensor out = a.value();
  for (auto& v : out.data()) v = std::exp(v);
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t self, const Tensor& g) {
    const Tensor& y = t.value(self);
    Tensor ga = g;
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= y[i];
    t.accumulate(a.id, ga);
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.tape->record(Tensor::scalar(s), {a}, [a](Tape& t, std::size_t, const Tensor& g) {
    t.accumulate(a.id, Tensor(t.value(a.id).shape(), g[0]));
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  require(n > 0, "mean of an empty tensor");
  return scale(sum(a), 1.0 / n);
}

Var sum_rows(Var a) {
  const Tensor& av = a.value();
  require(av.rank() == 2, "sum_rows needs rank 2");
  Tensor out({1, av.cols()});
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out[c] += av(r, c);
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t, const Tensor& g) {
    Tensor ga(t.value(a.id).shape());
    for (std::size_t r = 0; r < ga.rows(); ++r)
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) = g[c];
    t.accumulate(a.id, ga);
  });
}

Var row_sum(Var a) {
  const Tensor& av = a.value();
  require(av.rank() == 2, "row_sum needs rank 2");
  Tensor out({av.rows(), 1});
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out[r] += av(r, c);
  return a.tape->record(std::move(out), {a}, [a](Tape& t, std::size_t, const Tensor& g) {
    Tensor ga(t.value(a.id).shape());
    for (std::size_t r = 0; r < ga.rows(); ++r)
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) = g[r];
    t.accumulate(a.id, ga);
  });
}

Var row_dot(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.rank() == 2 && av.same_shape(bv), "row_dot shape mismatch");
  Tensor out({av.rows(), 1});
  const std::size_t c = av.cols();
  for (std::size_t r = 0; r < av.rows(); ++r) {
    const double* x = av.row_ptr(r);
    const double* y = bv.row_ptr(r);
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += x[j] * y[j];
    out[r] = s;
  }
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape& t, std::size_t, const Tensor& g) {
    const Tensor& av = t.value(a.id);
    const Tensor& bv = t.value(b.id);
    const std::size_t c = av.cols();
    if (t.needs_grad(a.id)) {
      Tensor ga(av.shape());
      for (std::size_t r = 0; r < av.rows(); ++r)
        for (std::size_t j = 0; j < c; ++j) ga(r, j) = g[r] * bv(r, j);
      t.accumulate(a.id, ga);
    }
    if (t.needs_grad(b.id)) {
      Tensor gb(bv.shape());
      for (std::size_t r = 0; r < bv.rows(); ++r)
        for (std::size_t j = 0; j < c; ++j) gb(r, j) = g[r] * av(r, j);
      t.accumulate(b.id, gb);
    }
  });
}

namespace {
void require_column(const Tensor& a, const Tensor& s, const char* op) {
  if (a.rank() != 2 || s.size() != a.rows())
    throw Error(ErrorKind::DimensionError,
                std::string(op) + " shape mismatch " + a.shape_string() + " vs " + s.shape_string());
}
}  // namespace

Var mul_col(Var a, Var s) {
  require_column(a.value(), s.value(), "mul_col");
  Tensor out = a.value();
  const std::size_t c = out.cols();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t j = 0; j < c; ++j) out(r, j) *= s.value()[r];
  return a.tape->record(std::move(out), {a, s}, [a, s](Tape& t, std::size_t, const Tensor& g) {
    const Tensor& av = t.value(a.id);
    const Tensor& sv = t.value(s.id);
    const std::size_t c = av.cols();
    if (t.needs_grad(a.id)) {
      Tensor ga = g;
      for (std::size_t r = 0; r < ga.rows(); ++r)
        for (std::size_t j = 0; j < c; ++j) ga(r, j) *= sv[r];
      t.accumulate(a.id, ga);
    }
    if (t.needs_grad(s.id)) {
      Tensor gs(sv.shape());
      for (std::size_t r = 0; r < av.rows(); ++r)
        for (std::size_t j = 0; j < c; ++j) gs[r] += g(r, j) * av(r, j);
      t.accumulate(s.id, gs);
    }
  });
}

Var div_col(Var a, Var s) {
  require_column(a.value(), s.value(), "div_col");
  Tensor out = a.value();
  const std::size_t c = out.cols();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t j = 0; j < c; ++j) out(r, j) /= s.value()[r];
  return a.tape->record(std::move(out), {a, s}, [a, s](Tape& t, std::size_t, const Tensor& g) {
    const Tensor& av = t.value(a.id);
    const Tensor& sv = t.value(s.id);
    const std::size_t c = av.cols();
    if (t.needs_grad(a.id)) {
      Tensor ga = g;
      for (std::size_t r = 0; r < ga.rows(); ++r)
        for (std::size_t j = 0; j < c; ++j) ga(r, j) /= sv[r];
      t.accumulate(a.id, ga);
    }
    if (t.needs_grad(s.id)) {
      Tensor gs(sv.shape());
      for (std::size_t r = 0; r < av.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += g(r, j) * av(r, j);
        gs[r] = -acc / (sv[r] * sv[r]);
      }
      t.accumulate(s.id, gs);
    }
  });
}

Var add_col(Var a, Var s) {
  require_column(a.value(), s.value(), "add_col");
  Tensor out = a.value();
  const std::size_t c = out.cols();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t j = 0; j < c; ++j) out(r, j) += s.value()[r];
  return a.tape->record(std::move(out), {a, s}, [a, s](Tape& t, std::size_t, const Tensor& g) {
    t.accumulate(a.id, g);
    if (t.needs_grad(s.id)) {
      Tensor gs(t.value(s.id).shape());
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t j = 0; j < g.cols(); ++j) gs[r] += g(r, j);
      t.accumulate(s.id, gs);
    }
  });
}

Var outer_product(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.rows() == 1 && bv.rows() == 1, "outer_product needs rank-1 or single-row operands");
  const std::size_t m = av.size(), n = bv.size();
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = av[i] * bv[j];
  return a.tape->record(std::move(out), {a, b}, [a, b, m, n](Tape& t, std::size_t, const Tensor& g) {
    const Tensor& av = t.value(a.id);
    const Tensor& bv = t.value(b.id);
    if (t.needs_grad(a.id)) {
      Tensor ga(av.shape());
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) ga[i] += g(i, j) * bv[j];
      t.accumulate(a.id, ga);
    }
    if (t.needs_grad(b.id)) {
      Tensor gb(bv.shape());
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) gb[j] += g(i, j) * av[i];
      t.accumulate(b.id, gb);
    }
  });
}

}  // namespace hogt::ad
