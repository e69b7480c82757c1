#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "eduml/error.h"
#include "eduml/rng.h"
#include "eduml/shap.h"

namespace eduml {
namespace {

constexpr int kMaxPathFeatures = 64;
// Leaves with at most this many distinct path features get a lookup table
// over every possible membership mask of the explained row.
constexpr int kTableBits = 10;

// weight(a, b) = (a-1)! b! / (a+b)!, the Shapley weight of a feature that
// must join a coalition already holding the other a-1 required features
// while b forbidden features stay out.
const std::vector<std::vector<double>>& shapley_weights() {
  static const auto table = [] {
    std::vector<std::vector<double>> w(kMaxPathFeatures + 1,
                                       std::vector<double>(kMaxPathFeatures + 1, 0.0));
    for (int a = 1; a <= kMaxPathFeatures; ++a) {
      w[a][0] = 1.0 / a;
      for (int b = 1; b <= kMaxPathFeatures; ++b) w[a][b] = w[a][b - 1] * b / (a + b);
    }
    return w;
  }();
  return table;
}

uint64_t full_mask(size_t d) {
  return d >= 64 ? ~uint64_t{0} : (uint64_t{1} << d) - 1;
}

void check_width(const TreeEnsemble& model, size_t width, const char* what) {
  if (width != model.feature_names.size()) {
    throw Error(ErrorCode::kFeatureMismatch,
                std::string(what) + " has " + std::to_string(width) +
                    " features, model expects " +
                    std::to_string(model.feature_names.size()));
  }
}

}  // namespace

struct TreeShapExplainer::Leaf {
  std::vector<int32_t> features;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<uint8_t> missing_ok;
  double value = 0.0;  // leaf output * scale / background size
  std::vector<std::pair<uint64_t, double>> masks;
  std::vector<double> table;

  uint64_t mask_of(std::span<const double> row) const {
    uint64_t m = 0;
    for (size_t k = 0; k < features.size(); ++k) {
      const double v = row[features[k]];
      const bool ok = std::isnan(v) ? missing_ok[k] != 0 : (v >= lo[k] && v < hi[k]);
      if (ok) m |= uint64_t{1} << k;
    }
    return m;
  }

  void accumulate(uint64_t mx, double* phi) const {
    const auto& w = shapley_weights();
    const uint64_t full = full_mask(features.size());
    const uint64_t absent = ~mx & full;
    const int b = std::popcount(absent);
    for (const auto& [mz, count] : masks) {
      if (((mx | mz) & full) != full) continue;
      const uint64_t required = mx & ~mz & full;
      const int a = std::popcount(required);
      if (a + b == 0) continue;
      const double c = value * count;
      if (a > 0) {
        const double gain = c * w[a][b];
        for (uint64_t bits = required; bits; bits &= bits - 1) phi[std::countr_zero(bits)] += gain;
      }
      if (b > 0) {
        const double loss = c * w[b][a];
        for (uint64_t bits = absent; bits; bits &= bits - 1) phi[std::countr_zero(bits)] -= loss;
      }
    }
  }
};

TreeShapExplainer::~TreeShapExplainer() = default;
TreeShapExplainer::TreeShapExplainer(TreeShapExplainer&&) noexcept = default;
TreeShapExplainer& TreeShapExplainer::operator=(TreeShapExplainer&&) noexcept = default;

TreeShapExplainer::TreeShapExplainer(const TreeEnsemble& model,
                                     const LabeledDataset& background)
    : n_features_(model.feature_names.size()),
      scale_(model.tree_scale()),
      feature_names_(model.feature_names),
      background_rows_(background.n_rows) {
  if (background.n_rows == 0) throw Error(ErrorCode::kEmptyBackground, "no background rows");
  check_width(model, background.n_features, "background");
  if (background.feature_names != model.feature_names) {
    throw Error(ErrorCode::kFeatureMismatch, "background feature names differ from the model");
  }

  double sum = 0.0;
  for (size_t r = 0; r < background.n_rows; ++r) sum += model.margin(background.row(r));
  base_value_ = sum / static_cast<double>(background.n_rows);
  const double per_row = scale_ / static_cast<double>(background.n_rows);

  struct Frame {
    int32_t node;
    Leaf path;
  };
  for (const Tree& tree : model.trees) {
    std::vector<Frame> stack;
    stack.push_back({0, Leaf{}});
    while (!stack.empty()) {
      Frame frame = std::move(stack.back());
      stack.pop_back();
      const TreeNode& node = tree.nodes[frame.node];
      if (node.is_leaf()) {
        Leaf leaf = std::move(frame.path);
        if (leaf.features.empty() || node.value == 0.0) continue;
        leaf.value = node.value * per_row;
        std::map<uint64_t, double> hist;
        for (size_t r = 0; r < background.n_rows; ++r) hist[leaf.mask_of(background.row(r))] += 1.0;
        leaf.masks.assign(hist.begin(), hist.end());
        const size_t d = leaf.features.size();
        if (d <= kTableBits) {
          leaf.table.assign((size_t{1} << d) * d, 0.0);
          for (uint64_t mx = 0; mx < (uint64_t{1} << d); ++mx) {
            leaf.accumulate(mx, leaf.table.data() + mx * d);
          }
        }
        leaves_.push_back(std::move(leaf));
        continue;
      }
      for (int side = 1; side >= 0; --side) {
        const bool left = side == 0;
        Leaf path = side == 0 ? std::move(frame.path) : frame.path;
        auto it = std::find(path.features.begin(), path.features.end(), node.feature);
        size_t k = static_cast<size_t>(it - path.features.begin());
        if (it == path.features.end()) {
          if (path.features.size() >= static_cast<size_t>(kMaxPathFeatures)) {
            throw Error(ErrorCode::kInvalidParameter,
                        "tree path uses more than 64 distinct features");
          }
          path.features.push_back(node.feature);
          path.lo.push_back(-std::numeric_limits<double>::infinity());
          path.hi.push_back(std::numeric_limits<double>::infinity());
          path.missing_ok.push_back(1);
        }
        if (left) {
          path.hi[k] = std::min(path.hi[k], node.threshold);
        } else {
          path.lo[k] = std::max(path.lo[k], node.threshold);
        }
        if (node.default_left != left) path.missing_ok[k] = 0;
        stack.push_back({left ? node.left : node.right, std::move(path)});
      }
    }
  }
}

RowAttribution TreeShapExplainer::explain(std::span<const double> row) const {
  if (row.size() != n_features_) {
    throw Error(ErrorCode::kFeatureMismatch,
                "row has " + std::to_string(row.size()) + " features, model expects " +
                    std::to_string(n_features_));
  }
  RowAttribution out;
  out.base_value = base_value_;
  out.values.assign(n_features_, 0.0);
  std::vector<double> local(kMaxPathFeatures);
  for (const Leaf& leaf : leaves_) {
    const size_t d = leaf.features.size();
    const uint64_t mx = leaf.mask_of(row);
    const double* phi;
    if (!leaf.table.empty()) {
      phi = leaf.table.data() + mx * d;
    } else {
      std::fill(local.begin(), local.begin() + d, 0.0);
      leaf.accumulate(mx, local.data());
      phi = local.data();
    }
    for (size_t k = 0; k < d; ++k) out.values[leaf.features[k]] += phi[k];
  }
  return out;
}

AttributionMatrix TreeShapExplainer::explain_all(const LabeledDataset& rows) const {
  if (rows.feature_names != feature_names_) {
    throw Error(ErrorCode::kFeatureMismatch, "explained rows' feature names differ from the model");
  }
  AttributionMatrix out;
  out.base_value = base_value_;
  out.n_rows = rows.n_rows;
  out.n_features = n_features_;
  out.feature_names = feature_names_;
  out.background = std::to_string(background_rows_) + " background rows";
  out.values.reserve(rows.n_rows * n_features_);
  for (size_t r = 0; r < rows.n_rows; ++r) {
    const RowAttribution a = explain(rows.row(r));
    out.values.insert(out.values.end(), a.values.begin(), a.values.end());
  }
  return out;
}

RowAttribution tree_shap(const TreeEnsemble& model, std::span<const double> row,
                         const LabeledDataset& background) {
  return TreeShapExplainer(model, background).explain(row);
}

LabeledDataset select_background(const LabeledDataset& data, size_t cap, uint64_t seed) {
  if (data.n_rows <= cap) return data;
  std::vector<size_t> order(data.n_rows);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  for (size_t i = 0; i < cap; ++i) {
    const size_t j = i + static_cast<size_t>(rng.uniform_index(data.n_rows - i));
    std::swap(order[i], order[j]);
  }
  order.resize(cap);
  std::sort(order.begin(), order.end());
  return data.subset(order);
}

}  // namespace eduml
