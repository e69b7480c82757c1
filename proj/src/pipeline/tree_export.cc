#include "eduml/tree_export.h"

#include <cmath>
#include <functional>

#include "eduml/error.h"
#include "eduml/importance.h"
#include "eduml/table.h"

namespace eduml {
namespace {

const Tree& single_tree(const TreeEnsemble& model) {
  if (model.mode != EnsembleMode::kSingle || model.trees.size() != 1) {
    throw Error(ErrorCode::kNotASingleTree,
                std::string("cannot export a ") + ensemble_mode_name(model.mode) +
                    " ensemble of " + std::to_string(model.trees.size()) + " trees");
  }
  if (model.trees[0].nodes.empty()) throw Error(ErrorCode::kNotASingleTree, "empty tree");
  return model.trees[0];
}

size_t descendants(const Tree& tree, int32_t id) {
  const TreeNode& n = tree.nodes[id];
  if (n.is_leaf()) return 0;
  return 2 + descendants(tree, n.left) + descendants(tree, n.right);
}

std::string feature_name(const TreeEnsemble& model, int32_t feature) {
  if (feature >= 0 && static_cast<size_t>(feature) < model.feature_names.size()) {
    return model.feature_names[feature];
  }
  return "x" + std::to_string(feature);
}

std::string describe(const TreeEnsemble& model, const TreeNode& n, size_t elided) {
  std::string s;
  if (n.is_leaf()) {
    s = "leaf";
  } else {
    s = feature_name(model, n.feature) + " < " + format_number(n.threshold) +
        " (missing: " + (n.default_left ? "left" : "right") + ")";
  }
  s += " | samples=" + format_number(n.n_samples);
  s += " | gini=" + format_fixed(n.gini, 3);
  s += std::string(" | class=") + (n.n_pass > n.n_fail ? "pass" : "fail");
  if (elided > 0) s += " | " + std::to_string(elided) + " nodes below not shown";
  return s;
}

// Visits shown nodes in preorder: (id, depth, elided descendant count).
void walk(const Tree& tree, int display_depth,
          const std::function<void(int32_t, int, size_t)>& visit) {
  std::function<void(int32_t, int)> rec = [&](int32_t id, int depth) {
    const TreeNode& n = tree.nodes[id];
    if (!n.is_leaf() && depth >= display_depth) {
      visit(id, depth, descendants(tree, id));
      return;
    }
    visit(id, depth, 0);
    if (!n.is_leaf()) {
      rec(n.left, depth + 1);
      rec(n.right, depth + 1);
    }
  };
  rec(0, 0);
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string export_tree_text(const TreeEnsemble& model, int display_depth) {
  const Tree& tree = single_tree(model);
  std::string out;
  walk(tree, display_depth, [&](int32_t id, int depth, size_t elided) {
    out += std::string(2 * static_cast<size_t>(depth), ' ');
    out += "[" + std::to_string(id) + "] " + describe(model, tree.nodes[id], elided) + "\n";
  });
  return out;
}

std::string export_tree_dot(const TreeEnsemble& model, int display_depth) {
  const Tree& tree = single_tree(model);
  std::string out = "digraph tree {\n  node [shape=box];\n";
  std::vector<uint8_t> shown(tree.nodes.size(), 0);
  walk(tree, display_depth, [&](int32_t id, int, size_t elided) {
    shown[id] = 1;
    std::string label = dot_escape(describe(model, tree.nodes[id], elided));
    for (size_t pos; (pos = label.find(" | ")) != std::string::npos;) label.replace(pos, 3, "\\n");
    out += "  n" + std::to_string(id) + " [label=\"" + label + "\"];\n";
  });
  for (size_t id = 0; id < tree.nodes.size(); ++id) {
    const TreeNode& n = tree.nodes[id];
    if (!shown[id] || n.is_leaf() || !shown[n.left]) continue;
    out += "  n" + std::to_string(id) + " -> n" + std::to_string(n.left) + " [label=\"yes\"];\n";
    out += "  n" + std::to_string(id) + " -> n" + std::to_string(n.right) + " [label=\"no\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace eduml
