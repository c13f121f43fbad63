// Property checks shared by the unit tests, the acceptance suite and the CLI
// harness: relabeling equivariance and finite-difference gradients for every
// attention variant and simplicial layer.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hogt/attention.hpp"
#include "hogt/gradcheck.hpp"
#include "hogt/graph.hpp"
#include "hogt/simplicial_attention.hpp"

namespace hogt::checks {

struct VariantCase {
  std::string name;
  LayerConfig cfg;
};

// k = 2, two heads (one for virtual tuples), all widths d, ffn 2d, edge width 3.
LayerConfig small_config(AttentionVariant variant, std::size_t d);

// Variants whose output depends on the graph (and so must commute with relabeling).
std::vector<VariantCase> structural_cases(std::size_t d = 4);
// structural_cases plus dense and both kernelized variants.
std::vector<VariantCase> all_cases(std::size_t d = 4);

Tensor random_rows(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0);

struct CaseInputs {
  Graph g;
  Tensor x;       // tuple rows, or node rows for cross attention
  Tensor tuples;  // cross only
  Tensor edges;   // cross only
};

CaseInputs make_inputs(const VariantCase& c, std::size_t n, std::uint64_t seed);

struct CaseOutputs {
  Tensor x, virtual_x, tuples, edges;
};

CaseOutputs run_case(const VariantCase& c, const CaseInputs& in, const LayerWeights& w);

// Largest deviation between relabel-then-run and run-then-relabel.
double equivariance_error(const VariantCase& c, std::size_t n, std::uint64_t seed);

// Which input the finite differences perturb.
enum class GradInput { Primary, CrossTuples };

// Scalar readout sum(out * R) over every output of the layer.
ad::Var weighted_readout(ad::Tape& tape, const TapeLayerOutput& out, std::uint64_t seed);

struct VariantGradcheck {
  FiniteDiffReport report;
  double relu_margin = 0.0;
  std::uint64_t seed_used = 0;
};

// Gradcheck on a random n-node instance; draws fresh inputs while some relu
// pre-activation sits within `min_margin` of its kink.
VariantGradcheck variant_gradcheck(const VariantCase& c, std::size_t n, std::uint64_t seed,
                                   GradInput which = GradInput::Primary, double min_margin = 1e-3);

enum class SimplicialKind { DenseBias, DenseReweight, DenseMasked, Neighbour, Virtual };

std::vector<std::pair<std::string, SimplicialKind>> simplicial_kinds();
SimplicialLayerConfig simplicial_config(SimplicialKind kind, std::size_t d);
SimplicialTapeOutput simplicial_on_tape(SimplicialKind kind, ad::Tape& tape, ad::Var x,
                                        const SimplicialComplex& c, const SimplicialWeights& w,
                                        const SimplicialLayerConfig& cfg);

// Gradcheck of a simplicial layer on the clique complex of a random 4-node graph.
VariantGradcheck simplicial_gradcheck(SimplicialKind kind, std::uint64_t seed, double min_margin = 1e-3);

}  // namespace hogt::checks
