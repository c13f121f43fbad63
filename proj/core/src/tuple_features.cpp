#include "hogt/tuple_features.hpp"

#include <algorithm>

#include "hogt/error.hpp"
#include "hogt/rng.hpp"

namespace hogt {

void TupleFeatures::validate() const {
  std::size_t expected = 1;
  for (std::size_t j = 0; j < k; ++j) expected *= n;
  if (x.rank() != 2 || x.rows() != expected)
    throw Error(ErrorKind::SizeMismatch, "tuple feature rows " + x.shape_string() + " differ from n^k = " +
                                             std::to_string(expected));
}

TupleFeatures init_tuple_features(const Graph& g, std::size_t k, std::size_t d, std::uint64_t embed_seed,
                                  std::size_t budget) {
  auto sigs = isomorphism_type_signatures(g, k, budget);
  TupleFeatures out;
  out.n = g.n();
  out.k = k;
  out.provenance = FeatureProvenance::IsomorphismType;
  out.x = Tensor({sigs.size(), d});
  std::map<std::string, std::vector<double>> cache;
  for (std::size_t t = 0; t < sigs.size(); ++t) {
    auto it = cache.find(sigs[t]);
    if (it == cache.end()) {
      Rng rng(splitmix64_mix(embed_seed ^ fnv1a64(sigs[t])));
      std::vector<double> row(d);
      for (auto& v : row) v = rng.normal();
      it = cache.emplace(sigs[t], std::move(row)).first;
    }
    std::copy(it->second.begin(), it->second.end(), out.x.row_ptr(t));
  }
  return out;
}

std::vector<std::size_t> tuple_permutation(const TupleSpace& ts, const Permutation& p) {
  if (p.size() != ts.n()) throw Error(ErrorKind::SizeMismatch, "permutation size differs from n");
  std::vector<std::size_t> dest(ts.size());
  for (std::size_t t = 0; t < ts.size(); ++t) {
    std::size_t f = 0;
    for (std::size_t j = 0; j < ts.k(); ++j) f += p.map[ts.entry(t, j)] * ts.stride(j);
    dest[t] = f;
  }
  return dest;
}

Tensor permute_rows(const Tensor& x, const std::vector<std::size_t>& dest) {
  if (dest.size() != x.rows()) throw Error(ErrorKind::SizeMismatch, "row permutation size mismatch");
  Tensor out(x.shape());
  const std::size_t c = x.cols();
  for (std::size_t i = 0; i < dest.size(); ++i)
    std::copy(x.row_ptr(i), x.row_ptr(i) + c, out.row_ptr(dest[i]));
  return out;
}

}  // namespace hogt
