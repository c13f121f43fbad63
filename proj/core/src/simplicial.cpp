#include "hogt/simplicial.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "hogt/error.hpp"
#include "hogt/linalg.hpp"
#include "json.hpp"

namespace hogt {

SimplicialComplex::SimplicialComplex(std::size_t num_vertices, std::size_t max_dim,
                                     std::vector<std::vector<Simplex>> simplices)
    : num_vertices_(num_vertices), max_dim_(max_dim), simplices_(std::move(simplices)) {
  if (simplices_.size() > max_dim_ + 1) throw Error(ErrorKind::InvalidParameter, "simplices above max_dim");
  simplices_.resize(max_dim_ + 1);
  index_.resize(max_dim_ + 1);
  for (std::size_t k = 0; k <= max_dim_; ++k) {
    auto& list = simplices_[k];
    for (const auto& s : list) {
      if (s.size() != k + 1) throw Error(ErrorKind::InvalidParameter, "simplex has the wrong vertex count");
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= num_vertices_) throw Error(ErrorKind::InvalidParameter, "simplex vertex out of range");
        if (i && s[i - 1] >= s[i]) throw Error(ErrorKind::InvalidParameter, "simplex vertices must increase");
      }
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (std::size_t i = 0; i < list.size(); ++i) index_[k].emplace(list[i], i);
  }
  for (std::size_t k = 1; k <= max_dim_; ++k)
    for (const auto& s : simplices_[k])
      for (std::size_t j = 0; j <= k; ++j) {
        Simplex face = s;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(j));
        if (!index_[k - 1].count(face)) throw Error(ErrorKind::SubcomplexError, "complex is not closed under faces");
      }
}

std::size_t SimplicialComplex::count(std::size_t k) const { return k <= max_dim_ ? simplices_[k].size() : 0; }

std::size_t SimplicialComplex::total() const {
  std::size_t t = 0;
  for (const auto& s : simplices_) t += s.size();
  return t;
}

std::size_t SimplicialComplex::offset(std::size_t k) const {
  std::size_t t = 0;
  for (std::size_t j = 0; j < k && j <= max_dim_; ++j) t += simplices_[j].size();
  return t;
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const {
  if (s.empty() || s.size() > max_dim_ + 1) return std::nullopt;
  const auto& idx = index_[s.size() - 1];
  auto it = idx.find(s);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> SimplicialComplex::token_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(total());
  for (std::size_t k = 0; k <= max_dim_; ++k) dims.insert(dims.end(), simplices_[k].size(), k);
  return dims;
}

SimplicialComplex clique_complex(const Graph& g, std::size_t max_dim, std::size_t budget) {
  const std::size_t n = g.n();
  std::vector<std::vector<Simplex>> simplices(max_dim + 1);
  std::vector<std::vector<std::size_t>> higher(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t u = v + 1; u < n; ++u)
      if (g.adjacent(v, u)) higher[v].push_back(u);

  std::size_t emitted = 0;
  Simplex current;
  std::function<void(const std::vector<std::size_t>&)> extend = [&](const std::vector<std::size_t>& candidates) {
    if (++emitted > budget) throw Error(ErrorKind::ResourceGuard, "clique complex exceeds the simplex budget");
    simplices[current.size() - 1].push_back(current);
    if (current.size() == max_dim + 1) return;
    for (std::size_t u : candidates) {
      std::vector<std::size_t> next;
      for (std::size_t w : candidates)
        if (w > u && g.adjacent(u, w)) next.push_back(w);
      current.push_back(u);
      extend(next);
      current.pop_back();
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    current = {v};
    extend(higher[v]);
  }
  return SimplicialComplex(n, max_dim, std::move(simplices));
}

bool is_subcomplex(const SimplicialComplex& small, const SimplicialComplex& large) {
  for (std::size_t k = 0; k <= small.max_dim(); ++k)
    for (const auto& s : small.simplices(k))
      if (!large.contains(s)) return false;
  return true;
}

std::string complex_to_json(const SimplicialComplex& c) {
  nlohmann::json j;
  j["K"] = c.max_dim();
  j["simplices"] = nlohmann::json::array();
  for (std::size_t k = 0; k <= c.max_dim(); ++k) j["simplices"].push_back(c.simplices(k));
  return j.dump();
}

bool IntMatrix::is_zero() const {
  return std::all_of(data.begin(), data.end(), [](std::int64_t v) { return v == 0; });
}

Tensor IntMatrix::to_tensor() const {
  Tensor t({rows, cols});
  for (std::size_t i = 0; i < data.size(); ++i) t[i] = static_cast<double>(data[i]);
  return t;
}

IntMatrix int_matmul(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw Error(ErrorKind::SizeMismatch, "integer matmul inner dimensions differ");
  IntMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      std::int64_t v = a(i, k);
      if (!v) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += v * b(k, j);
    }
  return out;
}

IntMatrix int_transpose(const IntMatrix& a) {
  IntMatrix out(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  return out;
}

std::vector<IntMatrix> boundary_matrices(const SimplicialComplex& c) {
  const std::size_t K = c.max_dim();
  std::vector<IntMatrix> b;
  b.emplace_back(0, c.count(0));
  for (std::size_t k = 1; k <= K; ++k) {
    IntMatrix m(c.count(k - 1), c.count(k));
    const auto& list = c.simplices(k);
    for (std::size_t col = 0; col < list.size(); ++col)
      for (std::size_t j = 0; j <= k; ++j) {
        Simplex face = list[col];
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(j));
        m(*c.index_of(face), col) = (j % 2 == 0) ? 1 : -1;
      }
    b.push_back(std::move(m));
  }
  b.emplace_back(c.count(K), 0);
  return b;
}

HodgeLaplacians hodge(const SimplicialComplex& c) {
  const std::size_t K = c.max_dim();
  auto b = boundary_matrices(c);
  HodgeLaplacians h;
  const std::size_t m = c.total();
  h.block = Tensor({m, m});
  h.augmented = Tensor({m, m});
  for (std::size_t k = 0; k <= K + 1; ++k) h.offsets.push_back(c.offset(k));
  for (std::size_t k = 0; k <= K; ++k) {
    IntMatrix down = int_matmul(int_transpose(b[k]), b[k]);
    IntMatrix up = int_matmul(b[k + 1], int_transpose(b[k + 1]));
    IntMatrix lk(c.count(k), c.count(k));
    for (std::size_t i = 0; i < lk.data.size(); ++i) lk.data[i] = down.data[i] + up.data[i];
    h.per_dim.push_back(lk.to_tensor());
    const std::size_t o = h.offsets[k];
    for (std::size_t i = 0; i < lk.rows; ++i)
      for (std::size_t j = 0; j < lk.cols; ++j) {
        h.block(o + i, o + j) = static_cast<double>(lk(i, j));
        h.augmented(o + i, o + j) = static_cast<double>(lk(i, j));
      }
    if (k >= 1) {
      const std::size_t lo = h.offsets[k - 1];
      for (std::size_t i = 0; i < b[k].rows; ++i)
        for (std::size_t j = 0; j < b[k].cols; ++j) {
          double v = static_cast<double>(b[k](i, j));
          h.augmented(lo + i, o + j) = v;
          h.augmented(o + j, lo + i) = v;
        }
    }
  }
  return h;
}

SimplexRelabeling relabel_complex(const SimplicialComplex& c, const Permutation& p) {
  if (p.map.size() != c.num_vertices() || !p.is_valid())
    throw Error(ErrorKind::InvalidParameter, "permutation does not match the complex");
  std::vector<std::vector<Simplex>> mapped(c.max_dim() + 1);
  std::vector<int> signs;
  for (std::size_t k = 0; k <= c.max_dim(); ++k)
    for (const auto& s : c.simplices(k)) {
      Simplex t;
      for (std::size_t v : s) t.push_back(p.map[v]);
      int inversions = 0;
      for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = a + 1; b < t.size(); ++b)
          if (t[a] > t[b]) ++inversions;
      std::sort(t.begin(), t.end());
      mapped[k].push_back(t);
      signs.push_back(inversions % 2 ? -1 : 1);
    }
  SimplexRelabeling r;
  r.sign = std::move(signs);
  std::vector<std::vector<Simplex>> images = mapped;
  r.image = SimplicialComplex(c.num_vertices(), c.max_dim(), std::move(images));
  for (std::size_t k = 0; k <= c.max_dim(); ++k)
    for (const auto& t : mapped[k]) r.dest.push_back(r.image.offset(k) + *r.image.index_of(t));
  return r;
}

Tensor mpsn_reference(const SimplicialComplex& c, const Tensor& x, const std::vector<Tensor>& w) {
  const std::size_t K = c.max_dim();
  if (x.rows() != c.total()) throw Error(ErrorKind::SizeMismatch, "feature rows differ from the token count");
  if (w.size() != K + 1) throw Error(ErrorKind::SizeMismatch, "need one weight matrix per dimension");
  const std::size_t d_out = w[0].cols();
  // Y_j = X_j W_j stacked dimension-major, then one product with the augmented Laplacian.
  Tensor y({c.total(), d_out});
  for (std::size_t k = 0; k <= K; ++k) {
    if (w[k].rows() != x.cols() || w[k].cols() != d_out)
      throw Error(ErrorKind::SizeMismatch, "mpsn weight shapes are inconsistent");
    const std::size_t o = c.offset(k);
    for (std::size_t i = 0; i < c.count(k); ++i)
      for (std::size_t a = 0; a < x.cols(); ++a) {
        double v = x(o + i, a);
        for (std::size_t b = 0; b < d_out; ++b) y(o + i, b) += v * w[k](a, b);
      }
  }
  return matmul(hodge(c).augmented, y);
}

SpectralReport spectral_monotonicity_check(const SimplicialComplex& small, const SimplicialComplex& large,
                                           const Tensor& x_large, const Tensor& q, double tol) {
  if (!is_subcomplex(small, large)) throw Error(ErrorKind::SubcomplexError, "first complex is not a subcomplex");
  if (x_large.rows() != large.total() || q.rows() != x_large.cols())
    throw Error(ErrorKind::SizeMismatch, "spectral check shapes are inconsistent");
  const std::size_t m2 = large.total(), m1 = small.total();

  Tensor xq = matmul(x_large, q);
  for (auto& v : xq.data()) v = std::max(v, 0.0);
  auto attention = [&](const Tensor& feats, const Tensor& lap) {
    Tensor a = matmul(feats, transpose(feats));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += lap[i];
    return a;
  };

  // Restrict to the subcomplex tokens, in its own order.
  Tensor xq_small({m1, xq.cols()});
  for (std::size_t k = 0; k <= small.max_dim(); ++k)
    for (std::size_t i = 0; i < small.count(k); ++i) {
      std::size_t src = large.offset(k) + *large.index_of(small.simplices(k)[i]);
      for (std::size_t c = 0; c < xq.cols(); ++c) xq_small(small.offset(k) + i, c) = xq(src, c);
    }

  SpectralReport r;
  r.tol = tol;
  r.large = sym_eigvals(attention(xq, hodge(large).block));
  std::vector<double> s = m1 ? sym_eigvals(attention(xq_small, hodge(small).block)) : std::vector<double>{};
  r.small.assign(m2 - m1, 0.0);
  r.small.insert(r.small.end(), s.begin(), s.end());
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m2; ++j) r.max_violation = std::max(r.max_violation, r.small[j] - r.large[j]);
  if (m2 == 0) r.max_violation = 0.0;
  r.passed = r.max_violation <= tol;
  return r;
}

}  // namespace hogt
