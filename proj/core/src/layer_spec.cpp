#include "hogt/layer_spec.hpp"

#include <fstream>
#include <sstream>

#include "hogt/error.hpp"
#include "json.hpp"

namespace hogt {

using nlohmann::json;

namespace {

template <typename T>
T pick(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return j[key].get<T>();
}

std::string activation_name(ScoreActivation a) {
  switch (a) {
    case ScoreActivation::Softmax: return "softmax";
    case ScoreActivation::Relu: return "relu";
    case ScoreActivation::ReluThreshold: return "relu_threshold";
  }
  return "softmax";
}

ScoreActivation parse_activation(const std::string& s) {
  if (s == "softmax") return ScoreActivation::Softmax;
  if (s == "relu") return ScoreActivation::Relu;
  if (s == "relu_threshold") return ScoreActivation::ReluThreshold;
  throw Error(ErrorKind::ParseError, "unknown activation '" + s + "'");
}

}  // namespace

LayerSpec parse_layer_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("layer spec: ") + e.what());
  }
  if (!j.is_object() || !j.contains("variant")) throw Error(ErrorKind::ParseError, "layer spec needs a variant");
  LayerSpec spec;
  LayerConfig& cfg = spec.cfg;
  try {
    cfg.variant = parse_attention_variant(j["variant"].get<std::string>());
    cfg.k = pick<std::size_t>(j, "k", cfg.k);
    cfg.heads = pick<std::size_t>(j, "heads", cfg.heads);
    if (j.contains("dims")) {
      const json& d = j["dims"];
      cfg.d_in = pick<std::size_t>(d, "d_in", cfg.d_in);
      cfg.d_k = pick<std::size_t>(d, "d_k", cfg.d_k);
      cfg.d_out = pick<std::size_t>(d, "d_out", cfg.d_out);
      cfg.ffn_hidden = pick<std::size_t>(d, "ffn_hidden", cfg.ffn_hidden);
      cfg.d_edge = pick<std::size_t>(d, "d_edge", cfg.d_edge);
    }
    if (j.contains("kernel") && !j["kernel"].is_null()) {
      const json& kj = j["kernel"];
      std::string type = kj.at("type").get<std::string>();
      if (type == "linear") {
        cfg.kernel.type = KernelType::Linear;
      } else if (type == "performer") {
        cfg.kernel.type = KernelType::Performer;
        cfg.kernel.features = pick<std::size_t>(kj, "m", cfg.kernel.features);
        cfg.kernel.seed = pick<std::uint64_t>(kj, "seed", cfg.kernel.seed);
      } else {
        throw Error(ErrorKind::ParseError, "unknown kernel type '" + type + "'");
      }
    }
    spec.seed = pick<std::uint64_t>(j, "seed", 0);
    std::string mode = pick<std::string>(j, "ngbh_plus_mode", "bias");
    if (mode == "bias")
      cfg.ngbh_plus_mode = NgbhPlusMode::Bias;
    else if (mode == "reweight")
      cfg.ngbh_plus_mode = NgbhPlusMode::Reweight;
    else
      throw Error(ErrorKind::ParseError, "unknown ngbh_plus_mode '" + mode + "'");
    cfg.virtual_tuple_count = pick<std::size_t>(j, "virtual_tuples", cfg.virtual_tuple_count);
    cfg.activation = parse_activation(pick<std::string>(j, "activation", "softmax"));
    cfg.relu_threshold = pick<double>(j, "relu_threshold", 0.0);
    std::string cross = pick<std::string>(j, "cross_mode", "dense");
    if (cross != "dense" && cross != "sparse") throw Error(ErrorKind::ParseError, "unknown cross_mode '" + cross + "'");
    cfg.cross_mode = cross == "dense" ? CrossMode::Dense : CrossMode::Sparse;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("layer spec: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ParseError, e.what());
  }
  cfg.validate();
  return spec;
}

LayerSpec read_layer_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open layer spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_layer_spec(ss.str());
}

std::string layer_spec_to_json(const LayerSpec& spec) {
  const LayerConfig& cfg = spec.cfg;
  json j;
  j["k"] = cfg.k;
  j["variant"] = to_string(cfg.variant);
  j["heads"] = cfg.heads;
  j["dims"] = {{"d_in", cfg.d_in}, {"d_k", cfg.d_k}, {"d_out", cfg.d_out}, {"ffn_hidden", cfg.ffn_hidden},
               {"d_edge", cfg.d_edge}};
  if (cfg.kernel.type == KernelType::None)
    j["kernel"] = nullptr;
  else if (cfg.kernel.type == KernelType::Linear)
    j["kernel"] = {{"type", "linear"}};
  else
    j["kernel"] = {{"type", "performer"}, {"m", cfg.kernel.features}, {"seed", cfg.kernel.seed}};
  j["seed"] = spec.seed;
  j["ngbh_plus_mode"] = cfg.ngbh_plus_mode == NgbhPlusMode::Bias ? "bias" : "reweight";
  j["virtual_tuples"] = cfg.virtual_tuple_count;
  j["activation"] = activation_name(cfg.activation);
  j["relu_threshold"] = cfg.relu_threshold;
  j["cross_mode"] = cfg.cross_mode == CrossMode::Dense ? "dense" : "sparse";
  return j.dump(2);
}

}  // namespace hogt
