#include "eduml/logistic.h"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "eduml/error.h"
#include "eduml/tree.h"

namespace eduml {
namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

double LinearModel::margin(std::span<const double> row) const {
  double m = intercept;
  for (size_t j = 0; j < coefficients.size(); ++j) m += coefficients[j] * row[j];
  return m;
}

double LinearModel::predict_proba(std::span<const double> row) const {
  return sigmoid(margin(row));
}

LogisticObjective logistic_objective(const LabeledDataset& data, double lambda,
                                     std::span<const double> params) {
  const size_t p = data.n_features;
  if (params.size() != p + 1) {
    throw Error(ErrorCode::kFeatureMismatch, "parameter vector has the wrong length");
  }
  LogisticObjective out;
  out.gradient.assign(p + 1, 0.0);
  for (size_t r = 0; r < data.n_rows; ++r) {
    const auto x = data.row(r);
    double m = params[0];
    for (size_t j = 0; j < p; ++j) m += params[j + 1] * x[j];
    const double y = data.labels[r] == kPass ? 1.0 : 0.0;
    out.value += softplus(m) - y * m;
    const double resid = sigmoid(m) - y;
    out.gradient[0] += resid;
    for (size_t j = 0; j < p; ++j) out.gradient[j + 1] += resid * x[j];
  }
  for (size_t j = 0; j < p; ++j) {
    out.value += 0.5 * lambda * params[j + 1] * params[j + 1];
    out.gradient[j + 1] += lambda * params[j + 1];
  }
  return out;
}

LinearModel fit_logreg(const LabeledDataset& data, const TrainParams& params) {
  params.validate();
  data.require_both_classes();
  if (data.has_missing()) {
    throw Error(ErrorCode::kFeatureMismatch,
                "logistic regression needs linear-mode (imputed) features");
  }
  const size_t n = data.n_rows;
  const size_t p = data.n_features;
  const double lambda = params.linear.lambda;
  const double tol = params.linear.tolerance;

  // With a positive penalty, a constant feature's optimum is exactly zero
  // (the intercept absorbs it), so it is left out of the solve.
  std::vector<size_t> active;
  for (size_t j = 0; j < p; ++j) {
    bool constant = true;
    for (size_t r = 1; r < n && constant; ++r) constant = data.at(r, j) == data.at(0, j);
    if (!(constant && lambda > 0.0)) active.push_back(j);
  }
  const Eigen::Index d = static_cast<Eigen::Index>(active.size()) + 1;

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (size_t r = 0; r < n; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    x(ri, 0) = 1.0;
    for (size_t k = 0; k < active.size(); ++k) {
      x(ri, static_cast<Eigen::Index>(k) + 1) = data.at(r, active[k]);
    }
    y(ri) = data.labels[r] == kPass ? 1.0 : 0.0;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d, lambda);
  penalty(0) = 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd m = x * theta;
    double v = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) v += softplus(m(i)) - y(i) * m(i);
    return v + 0.5 * (penalty.array() * theta.array().square()).sum();
  };

  auto gradient = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* weights) {
    const Eigen::VectorXd m = x * theta;
    Eigen::VectorXd resid(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double p_i = sigmoid(m(i));
      resid(i) = p_i - y(i);
      if (weights != nullptr) (*weights)(i) = p_i * (1.0 - p_i);
    }
    return Eigen::VectorXd(x.transpose() * resid + (penalty.array() * theta.array()).matrix());
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  double f = objective(theta);
  double grad_norm = 0.0;
  int iter = 0;
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (;; ++iter) {
    const Eigen::VectorXd grad = gradient(theta, &w);
    grad_norm = grad.norm();
    if (grad_norm <= tol || iter >= params.linear.max_iterations) break;

    Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
    hess.diagonal() += penalty;
    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    if (!step.allFinite()) {
      hess.diagonal().array() += 1e-10;
      step = hess.ldlt().solve(-grad);
    }
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Eigen::VectorXd candidate = theta + t * step;
      const double fc = objective(candidate);
      // Near the optimum the objective stops resolving progress; the
      // gradient norm still does.
      const bool flat = fc <= f + 1e-12 * std::abs(f) &&
                        gradient(candidate, nullptr).norm() < grad_norm;
      if (fc < f || flat) {
        moved = candidate != theta;
        theta = candidate;
        f = fc;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(grad_norm <= tol)) {
    throw Error(ErrorCode::kNonConvergence,
                "logistic regression stopped after " + std::to_string(iter) +
                    " iterations with gradient norm " + fmt(grad_norm));
  }

  LinearModel model;
  model.intercept = theta(0);
  model.coefficients.assign(p, 0.0);
  for (size_t k = 0; k < active.size(); ++k) {
    model.coefficients[active[k]] = theta(static_cast<Eigen::Index>(k) + 1);
  }
  model.feature_names = data.feature_names;
  model.lambda = lambda;
  model.iterations = iter;
  model.gradient_norm = grad_norm;
  model.tolerance = tol;
  return model;
}

}  // namespace eduml
