#include "tree_builder.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eduml/rng.h"
#include "eduml/trainers.h"

namespace eduml::internal {
namespace {

// s0/s1 are fail/pass weights (Gini) or gradient/hessian sums (Newton).
struct Stats {
  double s0 = 0.0;
  double s1 = 0.0;
  double w = 0.0;

  Stats& operator+=(const Stats& o) {
    s0 += o.s0;
    s1 += o.s1;
    w += o.w;
    return *this;
  }
  Stats operator+(const Stats& o) const { return {s0 + o.s0, s1 + o.s1, w + o.w}; }
  Stats operator-(const Stats& o) const { return {s0 - o.s0, s1 - o.s1, w - o.w}; }
};

struct Candidate {
  bool valid = false;
  double gain = -std::numeric_limits<double>::infinity();
  int32_t feature = -1;
  double threshold = 0.0;
  bool default_left = true;
};

struct ScanState {
  Stats left;
  double last = 0.0;
  bool seen = false;
};

class Grower {
 public:
  Grower(const LabeledDataset& data, const Presorted& presorted,
         std::span<const double> weights, std::span<const double> grad,
         std::span<const double> hess, const GrowConfig& config)
      : data_(data),
        presorted_(presorted),
        weights_(weights),
        grad_(grad),
        hess_(hess),
        config_(config) {}

  Tree grow() {
    const size_t n = data_.n_rows;
    row_stats_.resize(n);
    slot_of_row_.assign(n, -1);
    Stats root;
    double root_fail = 0.0;
    double root_pass = 0.0;
    for (size_t r = 0; r < n; ++r) {
      const double w = weights_[r];
      if (w <= 0.0) continue;
      row_stats_[r] = stats_for(r, w);
      root += row_stats_[r];
      (data_.labels[r] == kFail ? root_fail : root_pass) += w;
      slot_of_row_[r] = 0;
    }

    TreeNode root_node;
    root_node.n_samples = root_fail + root_pass;
    root_node.n_fail = root_fail;
    root_node.n_pass = root_pass;
    tree_.nodes.push_back(root_node);
    node_stats_.push_back(root);

    std::vector<int32_t> active = {0};
    for (int depth = 0; depth < config_.max_depth && !active.empty(); ++depth) {
      active = split_level(active);
    }
    finalize();
    return std::move(tree_);
  }

 private:
  Stats stats_for(size_t r, double w) const {
    if (config_.criterion == SplitCriterion::kGini) {
      const bool fail = data_.labels[r] == kFail;
      return {fail ? w : 0.0, fail ? 0.0 : w, w};
    }
    return {w * grad_[r], w * hess_[r], w};
  }

  double impurity_score(const Stats& s) const {
    // Gini: weighted impurity w * gini; Newton: structure score G^2/(H+lambda).
    if (config_.criterion == SplitCriterion::kGini) {
      if (s.w <= 0.0) return 0.0;
      return s.w - (s.s0 * s.s0 + s.s1 * s.s1) / s.w;
    }
    return s.s0 * s.s0 / (s.s1 + config_.lambda);
  }

  double split_gain(const Stats& parent, const Stats& l, const Stats& r) const {
    if (config_.criterion == SplitCriterion::kGini) {
      return (impurity_score(parent) - impurity_score(l) - impurity_score(r)) / parent.w;
    }
    return 0.5 * (impurity_score(l) + impurity_score(r) - impurity_score(parent)) -
           config_.gamma;
  }

  bool child_ok(const Stats& s) const {
    if (s.w <= 0.0) return false;
    if (config_.criterion == SplitCriterion::kGini) return s.w >= config_.min_child;
    return s.s1 >= config_.min_child;
  }

  void consider(Candidate& best, const Stats& parent, const Stats& l, const Stats& r,
                int32_t feature, double threshold, bool default_left) const {
    if (!child_ok(l) || !child_ok(r)) return;
    const double gain = split_gain(parent, l, r);
    if (gain > best.gain) {
      best = {true, gain, feature, threshold, default_left};
    }
  }

  std::vector<uint8_t> allowed_features(const std::vector<int32_t>& active) const {
    const size_t f = data_.n_features;
    std::vector<uint8_t> allowed(active.size() * f, 1);
    const int m = config_.features_per_node;
    if (m <= 0 || static_cast<size_t>(m) >= f) return allowed;
    std::vector<uint32_t> order(f);
    for (size_t s = 0; s < active.size(); ++s) {
      Rng rng(derive_seed(config_.seed, "node-features", static_cast<uint64_t>(active[s])));
      std::iota(order.begin(), order.end(), 0u);
      // Partial Fisher-Yates: the first m entries are the sample.
      for (int i = 0; i < m; ++i) {
        const size_t j = i + static_cast<size_t>(rng.uniform_index(f - i));
        std::swap(order[i], order[j]);
      }
      std::fill(allowed.begin() + s * f, allowed.begin() + (s + 1) * f, 0);
      for (int i = 0; i < m; ++i) allowed[s * f + order[i]] = 1;
    }
    return allowed;
  }

  std::vector<int32_t> split_level(const std::vector<int32_t>& active) {
    const size_t n_slots = active.size();
    const size_t n_features = data_.n_features;
    const std::vector<uint8_t> allowed = allowed_features(active);
    std::vector<Candidate> best(n_slots);
    std::vector<ScanState> scan(n_slots);
    std::vector<Stats> missing(n_slots);

    for (size_t f = 0; f < n_features; ++f) {
      std::fill(missing.begin(), missing.end(), Stats{});
      for (uint32_t r : presorted_.missing[f]) {
        const int32_t s = slot_of_row_[r];
        if (s >= 0) missing[s] += row_stats_[r];
      }
      std::fill(scan.begin(), scan.end(), ScanState{});
      const auto& values = presorted_.values[f];
      const auto& rows = presorted_.rows[f];
      for (size_t k = 0; k < values.size(); ++k) {
        const uint32_t r = rows[k];
        const int32_t s = slot_of_row_[r];
        if (s < 0 || !allowed[s * n_features + f]) continue;
        ScanState& st = scan[s];
        const double v = values[k];
        if (st.seen && v != st.last) {
          double threshold = 0.5 * (st.last + v);
          if (!(threshold > st.last)) threshold = v;
          evaluate(best[s], node_stats_[active[s]], missing[s], st.left,
                   static_cast<int32_t>(f), threshold);
        }
        st.left += row_stats_[r];
        st.last = v;
        st.seen = true;
      }
    }

    // Materialize accepted splits.
    std::vector<int32_t> next;
    std::vector<int32_t> child_slot(n_slots * 2, -1);
    for (size_t s = 0; s < n_slots; ++s) {
      const Candidate& c = best[s];
      if (!c.valid || !accept(c.gain)) continue;
      const int32_t id = active[s];
      const int32_t left = static_cast<int32_t>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      tree_.nodes.emplace_back();
      node_stats_.emplace_back();
      node_stats_.emplace_back();
      TreeNode& node = tree_.nodes[id];
      node.feature = c.feature;
      node.threshold = c.threshold;
      node.default_left = c.default_left;
      node.left = left;
      node.right = left + 1;
      node.gain = c.gain;
      child_slot[2 * s] = static_cast<int32_t>(next.size());
      next.push_back(left);
      child_slot[2 * s + 1] = static_cast<int32_t>(next.size());
      next.push_back(left + 1);
    }

    // Route rows to children and accumulate child totals.
    for (size_t r = 0; r < data_.n_rows; ++r) {
      const int32_t s = slot_of_row_[r];
      if (s < 0) continue;
      const TreeNode& node = tree_.nodes[active[s]];
      if (node.is_leaf()) {
        slot_of_row_[r] = -1;
        continue;
      }
      const double v = data_.at(r, node.feature);
      const bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
      const int32_t child = go_left ? node.left : node.right;
      slot_of_row_[r] = child_slot[2 * s + (go_left ? 0 : 1)];
      node_stats_[child] += row_stats_[r];
      TreeNode& cn = tree_.nodes[child];
      const double w = weights_[r];
      cn.n_samples += w;
      (data_.labels[r] == kFail ? cn.n_fail : cn.n_pass) += w;
    }
    return next;
  }

  void evaluate(Candidate& best, const Stats& total, const Stats& miss,
                const Stats& left_nm, int32_t feature, double threshold) const {
    const Stats right_nm = total - miss - left_nm;
    if (miss.w > 0.0) {
      consider(best, total, left_nm + miss, right_nm, feature, threshold, true);
      consider(best, total, left_nm, right_nm + miss, feature, threshold, false);
    } else {
      // No missing rows here: unseen missing values follow the larger child.
      consider(best, total, left_nm, right_nm, feature, threshold,
               left_nm.w >= right_nm.w);
    }
  }

  bool accept(double gain) const {
    if (config_.criterion == SplitCriterion::kGini) {
      return gain > 0.0 && gain >= config_.min_gain;
    }
    return gain > config_.min_gain;
  }

  void finalize() {
    for (size_t i = 0; i < tree_.nodes.size(); ++i) {
      TreeNode& node = tree_.nodes[i];
      node.gini = node.n_samples > 0 ? gini_impurity(node.n_fail, node.n_pass) : 0.0;
      if (config_.criterion == SplitCriterion::kGini) {
        node.value = node.n_pass > node.n_fail ? 1.0 : 0.0;
      } else {
        const Stats& s = node_stats_[i];
        node.value = -s.s0 / (s.s1 + config_.lambda);
      }
    }
  }

  const LabeledDataset& data_;
  const Presorted& presorted_;
  std::span<const double> weights_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  const GrowConfig& config_;

  Tree tree_;
  std::vector<Stats> node_stats_;
  std::vector<Stats> row_stats_;
  std::vector<int32_t> slot_of_row_;
};

}  // namespace

Presorted Presorted::build(const LabeledDataset& data) {
  Presorted p;
  const size_t f = data.n_features;
  p.values.resize(f);
  p.rows.resize(f);
  p.missing.resize(f);
  std::vector<uint32_t> order;
  for (size_t j = 0; j < f; ++j) {
    order.clear();
    for (size_t r = 0; r < data.n_rows; ++r) {
      if (data.is_missing(r, j)) {
        p.missing[j].push_back(static_cast<uint32_t>(r));
      } else {
        order.push_back(static_cast<uint32_t>(r));
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      return data.at(a, j) < data.at(b, j);
    });
    p.rows[j] = order;
    p.values[j].reserve(order.size());
    for (uint32_t r : order) p.values[j].push_back(data.at(r, j));
  }
  return p;
}

Tree grow_tree(const LabeledDataset& data, const Presorted& presorted,
               std::span<const double> weights, std::span<const double> grad,
               std::span<const double> hess, const GrowConfig& config) {
  return Grower(data, presorted, weights, grad, hess, config).grow();
}

}  // namespace eduml::internal
