#ifndef EDUML_SPECIAL_FUNCTIONS_H_
#define EDUML_SPECIAL_FUNCTIONS_H_

namespace eduml {

// Lanczos approximation, x > 0.
double log_gamma(double x);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

enum class Distribution { kNormal, kChiSquare, kF };

struct TailSpec {
  Distribution dist = Distribution::kNormal;
  double df1 = 1.0;
  double df2 = 1.0;
};

// P(X > x). Throws InvalidParameter for df < 1 or non-finite x.
double tail_probability(const TailSpec& dist, double x);

double normal_sf(double x);
double chi_square_sf(double x, double df);
double f_sf(double x, double df1, double df2);

}  // namespace eduml

#endif  // EDUML_SPECIAL_FUNCTIONS_H_
