#ifndef EDUML_MODEL_IO_H_
#define EDUML_MODEL_IO_H_

#include <string>
#include <variant>

#include "eduml/logistic.h"
#include "eduml/tree.h"

namespace eduml {

// Model files are JSON objects:
//   {"format": "eduml-model", "version": 1, "type": "tree_ensemble" | "linear", ...}
// Doubles are written with round-trip precision, so load(save(m)) == m.
inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<TreeEnsemble, LinearModel>;

std::string model_to_json(const TreeEnsemble& model);
std::string model_to_json(const LinearModel& model);
AnyModel model_from_json(const std::string& text);

void save_model(const std::string& path, const AnyModel& model);
AnyModel load_model(const std::string& path);

}  // namespace eduml

#endif  // EDUML_MODEL_IO_H_
