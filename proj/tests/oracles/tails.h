#ifndef EDUML_TESTS_ORACLES_TAILS_H_
#define EDUML_TESTS_ORACLES_TAILS_H_

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

namespace eduml::oracle {

inline double chi_square_sf(double x, double df) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

inline double f_sf(double x, double d1, double d2) {
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), x));
}

inline double normal_sf(double x) {
  return boost::math::cdf(boost::math::complement(boost::math::normal(), x));
}

}  // namespace eduml::oracle

#endif  // EDUML_TESTS_ORACLES_TAILS_H_
