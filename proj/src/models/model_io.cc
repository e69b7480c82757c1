#include "eduml/model_io.h"

#include <json.hpp>

#include "eduml/csv.h"
#include "eduml/error.h"

namespace eduml {
namespace {

using nlohmann::json;

json header(const char* type) {
  return {{"format", "eduml-model"}, {"version", kModelFormatVersion}, {"type", type}};
}

json node_to_json(const TreeNode& n) {
  json j = {{"feature", n.feature},     {"threshold", n.threshold},
            {"default_left", n.default_left}, {"left", n.left},
            {"right", n.right},         {"value", n.value},
            {"gini", n.gini},           {"gain", n.gain},
            {"n_samples", n.n_samples}, {"n_fail", n.n_fail},
            {"n_pass", n.n_pass}};
  return j;
}

TreeNode node_from_json(const json& j) {
  TreeNode n;
  n.feature = j.at("feature").get<int32_t>();
  n.threshold = j.at("threshold").get<double>();
  n.default_left = j.at("default_left").get<bool>();
  n.left = j.at("left").get<int32_t>();
  n.right = j.at("right").get<int32_t>();
  n.value = j.at("value").get<double>();
  n.gini = j.at("gini").get<double>();
  n.gain = j.at("gain").get<double>();
  n.n_samples = j.at("n_samples").get<double>();
  n.n_fail = j.at("n_fail").get<double>();
  n.n_pass = j.at("n_pass").get<double>();
  return n;
}

void validate_tree(const Tree& tree) {
  const auto size = static_cast<int32_t>(tree.nodes.size());
  if (size == 0) throw Error(ErrorCode::kSchemaError, "model tree has no nodes");
  for (int32_t i = 0; i < size; ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf()) continue;
    if (n.left <= i || n.right <= i || n.left >= size || n.right >= size) {
      throw Error(ErrorCode::kSchemaError, "model tree has invalid child links");
    }
  }
}

}  // namespace

std::string model_to_json(const TreeEnsemble& model) {
  json j = header("tree_ensemble");
  j["mode"] = ensemble_mode_name(model.mode);
  j["base_score"] = model.base_score;
  j["learning_rate"] = model.learning_rate;
  j["tree_seeds"] = model.tree_seeds;
  j["feature_names"] = model.feature_names;
  json trees = json::array();
  for (const Tree& t : model.trees) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) nodes.push_back(node_to_json(n));
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump(1) + "\n";
}

std::string model_to_json(const LinearModel& model) {
  json j = header("linear");
  j["intercept"] = model.intercept;
  j["coefficients"] = model.coefficients;
  j["feature_names"] = model.feature_names;
  j["lambda"] = model.lambda;
  j["iterations"] = model.iterations;
  j["gradient_norm"] = model.gradient_norm;
  j["tolerance"] = model.tolerance;
  return j.dump(1) + "\n";
}

AnyModel model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "eduml-model") {
      throw Error(ErrorCode::kSchemaError, "not an eduml model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::kSchemaError,
                  "unsupported model format version " + std::to_string(version));
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "linear") {
      LinearModel m;
      m.intercept = j.at("intercept").get<double>();
      m.coefficients = j.at("coefficients").get<std::vector<double>>();
      m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
      m.lambda = j.at("lambda").get<double>();
      m.iterations = j.at("iterations").get<int>();
      m.gradient_norm = j.at("gradient_norm").get<double>();
      m.tolerance = j.at("tolerance").get<double>();
      if (m.coefficients.size() != m.feature_names.size()) {
        throw Error(ErrorCode::kSchemaError, "coefficient count does not match features");
      }
      return m;
    }
    if (type != "tree_ensemble") {
      throw Error(ErrorCode::kSchemaError, "unknown model type '" + type + "'");
    }
    TreeEnsemble m;
    m.mode = parse_ensemble_mode(j.at("mode").get<std::string>());
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.tree_seeds = j.at("tree_seeds").get<std::vector<uint64_t>>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const json& nodes : j.at("trees")) {
      Tree t;
      for (const json& n : nodes) t.nodes.push_back(node_from_json(n));
      validate_tree(t);
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("invalid model file: ") + e.what());
  }
}

void save_model(const std::string& path, const AnyModel& model) {
  write_text_file(path, std::visit([](const auto& m) { return model_to_json(m); }, model));
}

AnyModel load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

}  // namespace eduml
