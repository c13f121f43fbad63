#pragma once

#include <cstdint>
#include <string>

#include "hogt/attention.hpp"

namespace hogt {

// Layer spec file:
// {"k": 2, "variant": "ngbh", "heads": 2,
//  "dims": {"d_in": 8, "d_k": 8, "d_out": 8, "ffn_hidden": 16, "d_edge": 4},
//  "kernel": null | {"type": "linear"} | {"type": "performer", "m": 256, "seed": 1},
//  "seed": 7, "ngbh_plus_mode": "bias", "virtual_tuples": 1,
//  "activation": "softmax", "relu_threshold": 0.0, "cross_mode": "dense"}
// Everything except "variant" is optional.
struct LayerSpec {
  LayerConfig cfg;
  std::uint64_t seed = 0;
};

LayerSpec parse_layer_spec(const std::string& text);
LayerSpec read_layer_spec_file(const std::string& path);
std::string layer_spec_to_json(const LayerSpec& spec);

}  // namespace hogt
