#ifndef EDUML_TREE_EXPORT_H_
#define EDUML_TREE_EXPORT_H_

#include <string>

#include "eduml/tree.h"

namespace eduml {

// Indented text, one line per shown node:
//   [0] Quintile < 3.5 (missing: left) | samples=5000 | gini=0.480 | class=pass
//     [1] leaf | samples=1200 | gini=0.000 | class=fail
// Internal nodes at display depth are printed with a count of the elided
// descendants. Throws NotASingleTree.
std::string export_tree_text(const TreeEnsemble& model, int display_depth);

// Graphviz description of the same nodes.
std::string export_tree_dot(const TreeEnsemble& model, int display_depth);

}  // namespace eduml

#endif  // EDUML_TREE_EXPORT_H_
