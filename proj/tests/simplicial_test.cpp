#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "hogt/error.hpp"
#include "hogt/generators.hpp"
#include "hogt/linalg.hpp"
#include "hogt/simplicial.hpp"
#include "hogt/simplicial_attention.hpp"
#include "hogt/substructures.hpp"
#include "variant_cases.hpp"
#include "json.hpp"

using namespace hogt;
using namespace hogt::testing;

namespace {

std::vector<Graph> random_graphs(std::size_t count, std::uint64_t seed, std::size_t max_n = 8) {
  std::vector<Graph> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rng r(seed + i);
    std::size_t n = 3 + r.uniform_int(max_n - 2);
    out.push_back(erdos_renyi(n, 0.3 + 0.5 * r.uniform(), seed * 7919 + i));
  }
  return out;
}

Graph triangle() { return make_complete(3); }

// Oracle: signed incidence pairs (face, simplex) -> (-1)^j built from the
// simplex lists alone, and the Laplacians assembled entry by entry from it.
struct IncidenceOracle {
  const SimplicialComplex& c;
  std::map<std::pair<Simplex, Simplex>, int> sign;  // (face, simplex)
  std::map<Simplex, std::vector<Simplex>> faces, cofaces;

  explicit IncidenceOracle(const SimplicialComplex& cx) : c(cx) {
    for (std::size_t k = 1; k <= c.max_dim(); ++k)
      for (const auto& s : c.simplices(k))
        for (std::size_t j = 0; j < s.size(); ++j) {
          Simplex f = s;
          f.erase(f.begin() + static_cast<long>(j));
          sign[{f, s}] = j % 2 ? -1 : 1;
          faces[s].push_back(f);
          cofaces[f].push_back(s);
        }
  }

  int laplacian(const Simplex& a, const Simplex& b) const {
    int v = 0;
    auto fa = faces.find(a), fb = faces.find(b);
    if (fa != faces.end() && fb != faces.end())
      for (const auto& f : fa->second)
        if (std::count(fb->second.begin(), fb->second.end(), f)) v += sign.at({f, a}) * sign.at({f, b});
    auto ca = cofaces.find(a), cb = cofaces.find(b);
    if (ca != cofaces.end() && cb != cofaces.end())
      for (const auto& s : ca->second)
        if (std::count(cb->second.begin(), cb->second.end(), s)) v += sign.at({a, s}) * sign.at({b, s});
    return v;
  }

  // out[s] = sum_faces sign XW[f] + sum_t L[s,t] XW[t] + sum_cofaces sign XW[cf]
  Tensor mpsn(const Tensor& x, const std::vector<Tensor>& w) const {
    std::vector<Tensor> xw;
    for (std::size_t k = 0; k <= c.max_dim(); ++k) {
      Tensor rows({std::max<std::size_t>(c.count(k), 1), x.cols()});
      for (std::size_t i = 0; i < c.count(k); ++i)
        for (std::size_t col = 0; col < x.cols(); ++col) rows(i, col) = x(c.offset(k) + i, col);
      xw.push_back(matmul(rows, w[k]));
    }
    const std::size_t d = w[0].cols();
    Tensor out({c.total(), d});
    for (std::size_t k = 0; k <= c.max_dim(); ++k)
      for (std::size_t i = 0; i < c.count(k); ++i) {
        const Simplex& s = c.simplices(k)[i];
        double* o = out.row_ptr(c.offset(k) + i);
        if (k > 0)
          for (const auto& f : faces.at(s)) {
            std::size_t fi = *c.index_of(f);
            for (std::size_t col = 0; col < d; ++col) o[col] += sign.at({f, s}) * xw[k - 1](fi, col);
          }
        for (std::size_t j = 0; j < c.count(k); ++j) {
          int l = laplacian(s, c.simplices(k)[j]);
          for (std::size_t col = 0; col < d; ++col) o[col] += l * xw[k](j, col);
        }
        auto cf = cofaces.find(s);
        if (cf != cofaces.end() && k < c.max_dim())
          for (const auto& t : cf->second) {
            std::size_t ti = *c.index_of(t);
            for (std::size_t col = 0; col < d; ++col) o[col] += sign.at({s, t}) * xw[k + 1](ti, col);
          }
      }
    return out;
  }
};

std::vector<Tensor> random_weights(const SimplicialComplex& c, std::size_t d_in, std::size_t d_out,
                                   std::uint64_t seed) {
  std::vector<Tensor> w;
  for (std::size_t k = 0; k <= c.max_dim(); ++k) w.push_back(random_rows(d_in, d_out, seed + k));
  return w;
}

Graph delete_random_edge(const Graph& g, std::uint64_t seed) {
  Graph h = g;
  auto edges = g.edges();
  if (edges.empty()) return h;
  Rng r(seed);
  auto e = edges[r.uniform_int(edges.size())];
  h.remove_edge(e.first, e.second);
  return h;
}

}  // namespace

// ---------------------------------------------------------------- complexes

TEST(CliqueComplex, TriangleCounts) {
  auto c = clique_complex(triangle(), 2);
  EXPECT_EQ(c.count(0), 3u);
  EXPECT_EQ(c.count(1), 3u);
  EXPECT_EQ(c.count(2), 1u);
  EXPECT_EQ(c.total(), 7u);
  EXPECT_EQ(c.offset(2), 6u);
  EXPECT_EQ(c.token_dims(), (std::vector<std::size_t>{0, 0, 0, 1, 1, 1, 2}));
}

TEST(CliqueComplex, RookAndShrikhandeTetrahedra) {
  auto rook = clique_complex(make_rook_4x4(), 3), shri = clique_complex(make_shrikhande(), 3);
  EXPECT_EQ(rook.count(3), 8u);
  EXPECT_EQ(shri.count(3), 0u);
  EXPECT_EQ(rook.count(2), shri.count(2));
  EXPECT_EQ(rook.count(1), 48u);
}

TEST(CliqueComplex, SquareHasNoTriangles) { EXPECT_EQ(clique_complex(make_cycle(4), 2).count(2), 0u); }

TEST(CliqueComplex, CountsMatchCliqueOracle) {
  for (const Graph& g : random_graphs(30, 3, 9)) {
    auto c = clique_complex(g, 3);
    EXPECT_EQ(c.count(1), g.edge_count());
    EXPECT_EQ(c.count(2), count_substructures(g).triangles);
    EXPECT_EQ(c.count(3), count_cliques(g, 4));
  }
}

TEST(CliqueComplex, SortedAndClosed) {
  auto c = clique_complex(erdos_renyi(8, 0.7, 2), 3);
  for (std::size_t k = 0; k <= 3; ++k) {
    EXPECT_TRUE(std::is_sorted(c.simplices(k).begin(), c.simplices(k).end()));
    for (std::size_t i = 0; i < c.count(k); ++i) EXPECT_EQ(c.index_of(c.simplices(k)[i]), i);
  }
}

TEST(CliqueComplex, BudgetGuard) {
  try {
    clique_complex(make_complete(8), 3, 50);
    FAIL() << "expected a budget error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceGuard);
  }
}

TEST(SimplicialComplexType, RejectsMissingFaces) {
  try {
    SimplicialComplex(3, 1, {{{0}, {1}}, {{0, 2}}});
    FAIL() << "expected a closure error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SubcomplexError);
  }
  EXPECT_THROW(SimplicialComplex(3, 1, {{{0}, {1}, {2}}, {{1, 0}}}), Error);
}

TEST(SimplicialComplexType, SubcomplexRelation) {
  Graph g = erdos_renyi(7, 0.6, 4);
  auto big = clique_complex(g, 3);
  auto small = clique_complex(delete_random_edge(g, 1), 3);
  EXPECT_TRUE(is_subcomplex(small, big));
  EXPECT_FALSE(is_subcomplex(big, small));
}

TEST(SimplicialComplexType, JsonDump) {
  auto j = nlohmann::json::parse(complex_to_json(clique_complex(triangle(), 2)));
  EXPECT_EQ(j["K"], 2);
  EXPECT_EQ(j["simplices"][2][0], nlohmann::json::array({0, 1, 2}));
  EXPECT_EQ(j["simplices"][1].size(), 3u);
}

// ---------------------------------------------------------------- boundaries and Laplacians

TEST(Boundary, SingleEdge) {
  Graph g(2);
  g.add_edge(0, 1);
  auto b = boundary_matrices(clique_complex(g, 1));
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].rows, 0u);
  EXPECT_EQ(b[0].cols, 2u);
  EXPECT_EQ(b[1](0, 0), -1);
  EXPECT_EQ(b[1](1, 0), 1);
  EXPECT_EQ(b[2].rows, 1u);
  EXPECT_EQ(b[2].cols, 0u);
}

TEST(Boundary, TriangleIncidence) {
  auto b = boundary_matrices(clique_complex(triangle(), 2));
  // Edges in order {0,1}, {0,2}, {1,2}.
  std::vector<std::int64_t> b1 = {-1, -1, 0, 1, 0, -1, 0, 1, 1};
  EXPECT_EQ(b[1].data, b1);
  // Triangle {0,1,2}: +{1,2} -{0,2} +{0,1}.
  EXPECT_EQ(b[2].data, (std::vector<std::int64_t>{1, -1, 1}));
  auto prod = int_matmul(b[1], b[2]);
  EXPECT_EQ(prod.rows, 3u);
  EXPECT_EQ(prod.cols, 1u);
  EXPECT_TRUE(prod.is_zero());
}

TEST(Boundary, BoundaryOfBoundaryVanishes) {
  std::vector<Graph> graphs = random_graphs(20, 9);
  graphs.push_back(make_rook_4x4());
  graphs.push_back(make_complete(6));
  for (const Graph& g : graphs) {
    auto c = clique_complex(g, 3);
    auto b = boundary_matrices(c);
    for (std::size_t k = 1; k + 1 < b.size(); ++k) EXPECT_TRUE(int_matmul(b[k], b[k + 1]).is_zero());
    for (std::size_t k = 1; k < b.size() - 1; ++k)
      for (std::size_t col = 0; col < b[k].cols; ++col) {
        int nonzero = 0;
        for (std::size_t r = 0; r < b[k].rows; ++r) nonzero += b[k](r, col) != 0;
        EXPECT_EQ(nonzero, static_cast<int>(k + 1));
      }
  }
}

TEST(Hodge, GraphLaplacianExactly) {
  for (const Graph& g : random_graphs(20, 14)) {
    auto l = hodge(clique_complex(g, 2));
    for (std::size_t u = 0; u < g.n(); ++u)
      for (std::size_t v = 0; v < g.n(); ++v) {
        double expected = u == v ? static_cast<double>(g.degree(u)) : (g.adjacent(u, v) ? -1.0 : 0.0);
        EXPECT_EQ(l.per_dim[0](u, v), expected);
      }
  }
}

TEST(Hodge, TriangleEdgeSpectrum) {
  auto l = hodge(clique_complex(triangle(), 2));
  auto e = sym_eigvals(l.per_dim[1]);
  ASSERT_EQ(e.size(), 3u);
  for (double v : e) EXPECT_NEAR(v, 3.0, 1e-12);
}

TEST(Hodge, MatchesIncidenceOracle) {
  for (const Graph& g : random_graphs(15, 21)) {
    auto c = clique_complex(g, 3);
    IncidenceOracle oracle(c);
    auto l = hodge(c);
    for (std::size_t k = 0; k <= 3; ++k)
      for (std::size_t i = 0; i < c.count(k); ++i)
        for (std::size_t j = 0; j < c.count(k); ++j)
          EXPECT_EQ(l.per_dim[k](i, j), oracle.laplacian(c.simplices(k)[i], c.simplices(k)[j]));
  }
}

TEST(Hodge, SymmetricPositiveSemidefinite) {
  for (const Graph& g : random_graphs(20, 30)) {
    auto c = clique_complex(g, 3);
    auto l = hodge(c);
    for (const Tensor* t : {&l.block, &l.augmented}) EXPECT_EQ(max_abs_diff(*t, transpose(*t)), 0.0);
    for (const auto& lk : l.per_dim) {
      if (!lk.size()) continue;
      EXPECT_EQ(max_abs_diff(lk, transpose(lk)), 0.0);
      EXPECT_GE(sym_eigvals(lk).front(), -1e-9);
    }
  }
}

TEST(Hodge, AugmentedLayout) {
  auto c = clique_complex(triangle(), 2);
  auto l = hodge(c);
  auto b = boundary_matrices(c);
  EXPECT_EQ(l.offsets, (std::vector<std::size_t>{0, 3, 6, 7}));
  for (std::size_t v = 0; v < 3; ++v)
    for (std::size_t e = 0; e < 3; ++e) {
      EXPECT_EQ(l.augmented(v, 3 + e), b[1](v, e));
      EXPECT_EQ(l.augmented(3 + e, v), b[1](v, e));
      EXPECT_EQ(l.block(v, 3 + e), 0.0);
    }
}

TEST(Hodge, RelabelingConjugatesAugmentedLaplacian) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = erdos_renyi(7, 0.6, seed);
    auto c = clique_complex(g, 3);
    Permutation p = random_permutation(7, seed + 50);
    auto r = relabel_complex(c, p);
    auto direct = clique_complex(apply_permutation(g, p), 3);
    for (std::size_t k = 0; k <= 3; ++k) EXPECT_EQ(r.image.simplices(k), direct.simplices(k));
    auto la = hodge(c).augmented, lb = hodge(r.image).augmented;
    for (std::size_t i = 0; i < c.total(); ++i)
      for (std::size_t j = 0; j < c.total(); ++j)
        EXPECT_EQ(lb(r.dest[i], r.dest[j]), r.sign[i] * r.sign[j] * la(i, j));
  }
}

// ---------------------------------------------------------------- message passing reference

TEST(Mpsn, MatchesIncidenceOracle) {
  for (const Graph& g : random_graphs(10, 40)) {
    auto c = clique_complex(g, 3);
    Tensor x = random_rows(c.total(), 3, 1);
    auto w = random_weights(c, 3, 2, 5);
    EXPECT_LT(max_abs_diff(mpsn_reference(c, x, w), IncidenceOracle(c).mpsn(x, w)), 1e-12);
  }
}

TEST(Mpsn, PathWithoutNeighbouringDimensions) {
  auto c = clique_complex(make_path(5), 1);
  Tensor x = random_rows(c.total(), 3, 2);
  auto w = random_weights(c, 3, 3, 7);
  auto zeroed = w;
  zeroed[1] = Tensor(w[1].shape(), 0.0);
  Tensor out = mpsn_reference(c, x, zeroed);
  auto l = hodge(c).per_dim[0];
  Tensor x0({5, 3});
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t col = 0; col < 3; ++col) x0(i, col) = x(i, col);
  Tensor expected = matmul(l, matmul(x0, w[0]));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t col = 0; col < 3; ++col) EXPECT_NEAR(out(i, col), expected(i, col), 1e-12);
}

TEST(Mpsn, TriangleConstantRowsByHand) {
  auto c = clique_complex(triangle(), 2);
  Tensor x({7, 2}, 1.0);
  std::vector<Tensor> w(3, Tensor::identity(2));
  Tensor out = mpsn_reference(c, x, w);
  // Vertices: L_0 rows sum to 0 and the B_1 row sums are -2, 0, 2.
  // Edges: L_1 = 3I, B_1 columns sum to 0, the triangle's boundary signs are +1, -1, +1.
  std::vector<double> expected = {-2, 0, 2, 4, 2, 4};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(out(i, 0), expected[i]);
  EXPECT_LT(max_abs_diff(out, IncidenceOracle(c).mpsn(x, w)), 1e-12);
  // The triangle: B_2 column sums to 1, L_2 = B_2^T B_2 = 3.
  EXPECT_EQ(out(6, 0), 1.0 + 3.0);
}

TEST(Mpsn, Linear) {
  auto c = clique_complex(erdos_renyi(6, 0.7, 2), 3);
  Tensor x = random_rows(c.total(), 3, 3);
  auto w = random_weights(c, 3, 3, 4);
  Tensor scaled = x;
  for (auto& v : scaled.data()) v *= -2.5;
  Tensor a = mpsn_reference(c, scaled, w), b = mpsn_reference(c, x, w);
  for (auto& v : b.data()) v *= -2.5;
  EXPECT_LT(max_abs_diff(a, b), 1e-12);
}

TEST(Mpsn, RecoveredByReweightedLayer) {
  std::vector<Graph> graphs = {triangle(), make_path(4)};
  for (const Graph& g : random_graphs(20, 60)) graphs.push_back(g);
  for (const Graph& g : graphs) {
    auto c = clique_complex(g, 3);
    Tensor x = random_rows(c.total(), 4, g.n());
    auto r = verify_mpsn_recovery(c, x, random_weights(c, 4, 3, g.n() + 1));
    EXPECT_TRUE(r.passed) << r.max_abs_diff;
    EXPECT_LT(r.max_abs_diff, 1e-8);
  }
}

// ---------------------------------------------------------------- spectral monotonicity

TEST(Spectral, IdenticalComplexesAgree) {
  auto c = clique_complex(erdos_renyi(6, 0.6, 1), 3);
  auto r = spectral_monotonicity_check(c, c, random_rows(c.total(), 4, 2), random_rows(4, 3, 3));
  EXPECT_TRUE(r.passed);
  for (std::size_t j = 0; j < r.large.size(); ++j) EXPECT_NEAR(r.small[j], r.large[j], 1e-9);
}

TEST(Spectral, AddingTheTriangle) {
  auto full = clique_complex(triangle(), 2);
  auto hollow = clique_complex(triangle(), 1);
  auto r = spectral_monotonicity_check(hollow, full, random_rows(full.total(), 4, 2), random_rows(4, 3, 3));
  EXPECT_TRUE(r.passed) << r.max_violation;
  EXPECT_EQ(r.small.size(), 7u);
  EXPECT_EQ(r.small[0], 0.0);
}

TEST(Spectral, EdgeDeletionSweep) {
  std::size_t checked = 0;
  for (const Graph& g : random_graphs(20, 80)) {
    auto large = clique_complex(g, 3);
    auto small = clique_complex(delete_random_edge(g, g.n()), 3);
    auto r = spectral_monotonicity_check(small, large, random_rows(large.total(), 4, checked),
                                         random_rows(4, 4, checked + 1));
    EXPECT_TRUE(r.passed) << r.max_violation;
    ++checked;
  }
  EXPECT_EQ(checked, 20u);
}

TEST(Spectral, RejectsNonSubcomplex) {
  Graph g = erdos_renyi(6, 0.6, 1);
  auto large = clique_complex(g, 3), small = clique_complex(delete_random_edge(g, 2), 3);
  EXPECT_THROW(spectral_monotonicity_check(large, small, random_rows(small.total(), 4, 1), random_rows(4, 2, 2)),
               Error);
}

// ---------------------------------------------------------------- simplicial attention

TEST(SimplexNeighbours, TriangleKeySets) {
  auto c = clique_complex(triangle(), 2);
  auto p = simplex_neighbor_pattern(c);
  // Token 6 is the triangle: three boundary edges only.
  auto tri = p.keys_of(6);
  EXPECT_EQ(std::set<std::size_t>(tri.begin(), tri.end()), (std::set<std::size_t>{3, 4, 5}));
  EXPECT_EQ(tri.size(), 3u);
  // Token 3 is the edge {0,1}: 2 faces, 1 coface, 2 lower and 2 upper neighbours.
  auto edge = p.keys_of(3);
  ASSERT_EQ(edge.size(), 7u);
  std::map<std::size_t, std::multiset<std::size_t>> by_relation;
  for (std::size_t e = p.offsets[3]; e < p.offsets[4]; ++e) by_relation[p.relation[e]].insert(p.key[e]);
  EXPECT_EQ(by_relation[static_cast<std::size_t>(SimplexRelation::Boundary)], (std::multiset<std::size_t>{0, 1}));
  EXPECT_EQ(by_relation[static_cast<std::size_t>(SimplexRelation::Coboundary)], (std::multiset<std::size_t>{6}));
  EXPECT_EQ(by_relation[static_cast<std::size_t>(SimplexRelation::Lower)], (std::multiset<std::size_t>{4, 5}));
  EXPECT_EQ(by_relation[static_cast<std::size_t>(SimplexRelation::Upper)], (std::multiset<std::size_t>{4, 5}));
}

TEST(SimplexNeighbours, MatchesLaplacianSupport) {
  // Off-diagonal support of each L_k and the boundary blocks equals the key sets.
  for (const Graph& g : random_graphs(10, 90)) {
    auto c = clique_complex(g, 3);
    auto p = simplex_neighbor_pattern(c);
    auto b = boundary_matrices(c);
    auto dims = c.token_dims();
    for (std::size_t t = 0; t < c.total(); ++t) {
      std::set<std::size_t> faces, cofaces;
      for (std::size_t e = p.offsets[t]; e < p.offsets[t + 1]; ++e) {
        if (p.relation[e] == static_cast<std::size_t>(SimplexRelation::Boundary)) faces.insert(p.key[e]);
        if (p.relation[e] == static_cast<std::size_t>(SimplexRelation::Coboundary)) cofaces.insert(p.key[e]);
      }
      std::size_t k = dims[t], i = t - c.offset(k);
      std::set<std::size_t> want_faces, want_cofaces;
      if (k > 0)
        for (std::size_t r = 0; r < b[k].rows; ++r)
          if (b[k](r, i)) want_faces.insert(c.offset(k - 1) + r);
      if (k < c.max_dim())
        for (std::size_t col = 0; col < b[k + 1].cols; ++col)
          if (b[k + 1](i, col)) want_cofaces.insert(c.offset(k + 1) + col);
      EXPECT_EQ(faces, want_faces);
      EXPECT_EQ(cofaces, want_cofaces);
    }
  }
}

TEST(SimplexNeighbours, CoboundaryAboveTopDimension) {
  // K = 1 on a triangle: edges become upper adjacent through the unstored 2-simplex.
  auto c = clique_complex(triangle(), 1);
  auto plain = simplex_neighbor_pattern(c, false);
  auto extended = simplex_neighbor_pattern(c, true);
  auto upper_count = [](const KeyPattern& p, std::size_t q) {
    std::size_t n = 0;
    for (std::size_t e = p.offsets[q]; e < p.offsets[q + 1]; ++e)
      n += p.relation[e] == static_cast<std::size_t>(SimplexRelation::Upper);
    return n;
  };
  EXPECT_EQ(upper_count(plain, 3), 0u);
  EXPECT_EQ(upper_count(extended, 3), 2u);
  // A square has no such cliques.
  auto sq = clique_complex(make_cycle(4), 1);
  EXPECT_EQ(simplex_neighbor_pattern(sq, true).key.size(), simplex_neighbor_pattern(sq, false).key.size());
}

TEST(SimplicialDense, ZeroBiasKeepsDimensionsUniform) {
  auto c = clique_complex(erdos_renyi(6, 0.7, 3), 3);
  SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::DenseBias, 4);
  auto w = init_simplicial_weights(c, cfg, 2);
  w.relation_scale = Tensor({kSimplexRelationCount}, 0.0);
  auto out = forward_simplicial_dense(c, constant_simplex_features(c, 4, 5), w, cfg);
  for (std::size_t k = 0; k <= 3; ++k)
    for (std::size_t i = 1; i < c.count(k); ++i)
      for (std::size_t col = 0; col < 4; ++col)
        EXPECT_NEAR(out.x(c.offset(k) + i, col), out.x(c.offset(k), col), 1e-12);
}

TEST(SimplicialDense, MaskKeepsDimensionsApart) {
  auto c = clique_complex(erdos_renyi(6, 0.7, 3), 2);
  SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::DenseMasked, 4);
  auto w = init_simplicial_weights(c, cfg, 2);
  Tensor x = random_rows(c.total(), 4, 1);
  Tensor y = x;
  for (std::size_t i = c.offset(1); i < c.total(); ++i)
    for (std::size_t col = 0; col < 4; ++col) y(i, col) += 1.0;
  auto a = forward_simplicial_dense(c, SimplexFeatures{x}, w, cfg);
  auto b = forward_simplicial_dense(c, SimplexFeatures{y}, w, cfg);
  for (std::size_t i = 0; i < c.count(0); ++i)
    for (std::size_t col = 0; col < 4; ++col) EXPECT_EQ(a.core(i, col), b.core(i, col));
  EXPECT_GT(max_abs_diff(a.core, b.core), 1e-3);
}

TEST(SimplicialDense, RookAndShrikhandeDiffer) {
  auto rook = clique_complex(make_rook_4x4(), 3), shri = clique_complex(make_shrikhande(), 3);
  SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::DenseBias, 4);
  auto wr = init_simplicial_weights(rook, cfg, 7), ws = init_simplicial_weights(shri, cfg, 7);
  auto a = forward_simplicial_dense(rook, constant_simplex_features(rook, 4, 1), wr, cfg);
  auto b = forward_simplicial_dense(shri, constant_simplex_features(shri, 4, 1), ws, cfg);
  EXPECT_GT(max_abs_diff(pool(a.x), pool(b.x)), 1e-3);
}

TEST(SimplexNgbh, RookAndShrikhandePartitionsDiffer) {
  auto rook = clique_complex(make_rook_4x4(), 3), shri = clique_complex(make_shrikhande(), 3);
  SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::Neighbour, 4);
  auto w = init_simplicial_weights(rook, cfg, 3);
  w.q = Tensor(w.q.shape(), 0.0);
  w.k = Tensor(w.k.shape(), 0.0);
  auto a = forward_simplex_ngbh(rook, constant_simplex_features(rook, 4, 1), w, cfg);
  auto b = forward_simplex_ngbh(shri, constant_simplex_features(shri, 4, 1), w, cfg);
  EXPECT_GT(max_abs_diff(pool(a.x), pool(b.x)), 1e-3);
}

TEST(VirtualSimplex, CoreIdenticalAcrossTokens) {
  auto c = clique_complex(erdos_renyi(6, 0.7, 5), 3);
  SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::Virtual, 4);
  auto w = init_simplicial_weights(c, cfg, 1);
  auto out = forward_virtual_simplex(c, random_simplex_features(c, 4, 2), w, cfg);
  ASSERT_TRUE(out.virtual_x.has_value());
  for (std::size_t t = 1; t < c.total(); ++t)
    for (std::size_t col = 0; col < 4; ++col) EXPECT_EQ(out.core(t, col), out.core(0, col));
}

TEST(VirtualSimplex, UniformUpdateIsTokenMean) {
  auto c = clique_complex(erdos_renyi(6, 0.7, 5), 3);
  SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::Virtual, 4);
  auto w = init_simplicial_weights(c, cfg, 1);
  auto& u = w.virtual_layer.virtual_update[0];
  u.q = Tensor(u.q.shape(), 0.0);
  u.k = Tensor(u.k.shape(), 0.0);
  auto x = random_simplex_features(c, 4, 2);
  auto out = forward_virtual_simplex(c, x, w, cfg);
  Tensor vals = matmul(x.x, u.v);
  for (std::size_t col = 0; col < 4; ++col) {
    double mean = 0;
    for (std::size_t t = 0; t < c.total(); ++t) mean += vals(t, col) + u.bv[col];
    mean /= static_cast<double>(c.total());
    EXPECT_NEAR((*out.virtual_x)(0, col), w.virtual_layer.virtual_x(0, col) + mean, 1e-12);
  }
}

TEST(SimplicialAttention, RelabelingPermutesOutputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = erdos_renyi(6, 0.7, seed);
    auto c = clique_complex(g, 3);
    auto r = relabel_complex(c, random_permutation(6, seed + 3));
    SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::Neighbour, 4);
    auto w = init_simplicial_weights(c, cfg, seed);
    Tensor x = random_rows(c.total(), 4, seed + 9);
    Tensor moved = permute_rows(x, r.dest);
    auto a = forward_simplex_ngbh(c, SimplexFeatures{x}, w, cfg);
    auto b = forward_simplex_ngbh(r.image, SimplexFeatures{moved}, w, cfg);
    EXPECT_LT(max_abs_diff(permute_rows(a.x, r.dest), b.x), 1e-9);
    auto va = forward_virtual_simplex(c, SimplexFeatures{x}, w, cfg);
    auto vb = forward_virtual_simplex(r.image, SimplexFeatures{moved}, w, cfg);
    EXPECT_LT(max_abs_diff(permute_rows(va.x, r.dest), vb.x), 1e-9);
    EXPECT_LT(max_abs_diff(*va.virtual_x, *vb.virtual_x), 1e-9);
  }
}

TEST(SimplicialAttention, RejectsWrongFeatureRows) {
  auto c = clique_complex(triangle(), 2);
  SimplicialLayerConfig cfg = simplicial_config(SimplicialKind::DenseBias, 4);
  auto w = init_simplicial_weights(c, cfg, 1);
  EXPECT_THROW(forward_simplicial_dense(c, SimplexFeatures{random_rows(6, 4, 1)}, w, cfg), Error);
  EXPECT_THROW(forward_simplex_ngbh(c, SimplexFeatures{random_rows(7, 3, 1)}, w, cfg), Error);
}

class SimplicialGradient : public ::testing::TestWithParam<std::pair<std::string, SimplicialKind>> {};

TEST_P(SimplicialGradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto r = simplicial_gradcheck(GetParam().second, seed);
    EXPECT_LT(r.report.max_rel_err, 1e-4) << "analytic " << r.report.analytic_at_worst << " numeric "
                                          << r.report.numeric_at_worst;
  }
}

INSTANTIATE_TEST_SUITE_P(Simplicial, SimplicialGradient, ::testing::ValuesIn(simplicial_kinds()),
                         [](const auto& info) { return info.param.first; });
