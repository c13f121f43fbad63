#include "hogt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hogt/error.hpp"

namespace hogt {

namespace {
double off_diagonal_norm(const Tensor& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}
}  // namespace

EigenDecomposition sym_eig(const Tensor& m, double tol) {
  if (m.rank() != 2 || m.rows() != m.cols())
    throw Error(ErrorKind::DimensionError, "sym_eig needs a square matrix, got " + m.shape_string());
  const std::size_t n = m.rows();
  if (n > kMaxEigenSize) throw Error(ErrorKind::ResourceGuard, "sym_eig limited to size 512");

  Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Tensor v = Tensor::identity(n);

  // Scale the stopping threshold so it is meaningful for large-norm inputs.
  double scale = std::max(1.0, frobenius_norm(a));
  int sweep = 0;
  while (off_diagonal_norm(a) >= tol * scale) {
    if (++sweep > kMaxJacobiSweeps)
      throw Error(ErrorKind::ConvergenceFailure, "Jacobi did not converge within the sweep budget");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double app = a(p, p), aqq = a(q, q);
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Tensor({n, n});
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

std::vector<double> sym_eigvals(const Tensor& m, double tol) { return sym_eig(m, tol).values; }

}  // namespace hogt
