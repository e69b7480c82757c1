#include "eduml/special_functions.h"

#include <cmath>
#include <limits>

#include "eduml/error.h"

namespace eduml {
namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 10000;

// Series for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

void require_df(double df) {
  if (!(df >= 1.0) || !std::isfinite(df)) {
    throw Error(ErrorCode::kInvalidParameter, "degrees of freedom must be >= 1");
  }
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::kInvalidParameter, "log_gamma needs x > 0");
  // Lanczos g = 7, n = 9.
  static const double kCoef[9] = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    return std::log(M_PI / std::abs(std::sin(M_PI * x))) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double sum = kCoef[0];
  for (int i = 1; i < 9; ++i) sum += kCoef[i] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw Error(ErrorCode::kInvalidParameter, "gamma_p domain");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw Error(ErrorCode::kInvalidParameter, "gamma_q domain");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double beta_inc(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
    throw Error(ErrorCode::kInvalidParameter, "beta_inc domain");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double normal_sf(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidParameter, "x must be finite");
  // Q(x) = erfc(x / sqrt 2) / 2 = Gamma_Q(1/2, x^2/2) / 2 for x >= 0.
  const double upper = 0.5 * gamma_q(0.5, 0.5 * x * x);
  return x >= 0.0 ? upper : 1.0 - upper;
}

double chi_square_sf(double x, double df) {
  require_df(df);
  if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidParameter, "x must be finite");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

double f_sf(double x, double df1, double df2) {
  require_df(df1);
  require_df(df2);
  if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidParameter, "x must be finite");
  if (x <= 0.0) return 1.0;
  // P(F > x) = I_{d2/(d2 + d1 x)}(d2/2, d1/2).
  return beta_inc(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * x));
}

double tail_probability(const TailSpec& dist, double x) {
  switch (dist.dist) {
    case Distribution::kNormal: return normal_sf(x);
    case Distribution::kChiSquare: return chi_square_sf(x, dist.df1);
    case Distribution::kF: return f_sf(x, dist.df1, dist.df2);
  }
  throw Error(ErrorCode::kInvalidParameter, "unknown distribution");
}

}  // namespace eduml
