#include "hogt/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hogt/error.hpp"

namespace hogt {

PartitionExtraction extract_partition(const Tensor& x, double tol, std::size_t col_begin, std::size_t col_end) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "partition tolerance must be positive");
  const std::size_t rows = x.rows();
  col_end = std::min(col_end, x.cols());
  if (col_begin > col_end) throw Error(ErrorKind::InvalidParameter, "empty column range");

  std::vector<std::size_t> group(rows, 0);
  std::size_t groups = rows ? 1 : 0;
  std::vector<std::size_t> order(rows);
  for (std::size_t c = col_begin; c < col_end; ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (group[a] != group[b]) return group[a] < group[b];
      return x(a, c) < x(b, c);
    });
    std::vector<std::size_t> next(rows);
    std::size_t id = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      std::size_t r = order[i];
      if (i > 0) {
        std::size_t p = order[i - 1];
        if (group[p] != group[r] || x(r, c) - x(p, c) > tol) ++id;
      }
      next[r] = id;
    }
    group = std::move(next);
    groups = rows ? id + 1 : 0;
  }

  PartitionExtraction out;
  out.coloring.colors.assign(rows, 0);
  std::vector<std::size_t> remap(groups, rows), representative;
  for (std::size_t r = 0; r < rows; ++r) {
    if (remap[group[r]] == rows) {
      remap[group[r]] = representative.size();
      representative.push_back(r);
    }
    out.coloring.colors[r] = static_cast<ColorId>(remap[group[r]]);
  }

  auto chebyshev = [&](std::size_t a, std::size_t b) {
    double m = 0.0;
    for (std::size_t c = col_begin; c < col_end; ++c) m = std::max(m, std::abs(x(a, c) - x(b, c)));
    return m;
  };
  for (std::size_t a = 0; a < representative.size(); ++a)
    for (std::size_t b = a + 1; b < representative.size(); ++b)
      out.min_gap = std::min(out.min_gap, chebyshev(representative[a], representative[b]));
  for (std::size_t r = 0; r < rows; ++r)
    out.max_spread = std::max(out.max_spread, chebyshev(r, representative[out.coloring.colors[r]]));
  return out;
}

PartitionExtraction extract_partition(const TupleFeatures& x, double tol) { return extract_partition(x.x, tol); }

}  // namespace hogt
