#ifndef EDUML_TESTS_ORACLES_LOGREG_GRID_H_
#define EDUML_TESTS_ORACLES_LOGREG_GRID_H_

#include <cmath>
#include <functional>
#include <vector>

namespace eduml::oracle {

// Golden-section minimum of a convex function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-10) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct Fit1d {
  double intercept = 0.0;
  double slope = 0.0;
};

// Penalized one-feature logistic fit by nested scalar minimization:
//   sum log(1 + exp(b0 + b1 x)) - y (b0 + b1 x) + lambda/2 b1^2, y = 1 for pass.
inline Fit1d logreg_1d(const std::vector<double>& x, const std::vector<int>& y_pass,
                       double lambda) {
  auto loss = [&](double b0, double b1) {
    double s = 0.5 * lambda * b1 * b1;
    for (size_t i = 0; i < x.size(); ++i) {
      const double m = b0 + b1 * x[i];
      s += std::log1p(std::exp(m)) - y_pass[i] * m;
    }
    return s;
  };
  auto best_b0 = [&](double b1) {
    return golden_min([&](double b0) { return loss(b0, b1); }, -20, 20);
  };
  const double b1 = golden_min([&](double s) { return loss(best_b0(s), s); }, -20, 20);
  return {best_b0(b1), b1};
}

}  // namespace eduml::oracle

#endif  // EDUML_TESTS_ORACLES_LOGREG_GRID_H_
