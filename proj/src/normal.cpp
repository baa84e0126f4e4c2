#include "robmse/normal.hpp"

#include <boost/math/distributions/normal.hpp>

namespace robmse {

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> kStd(0.0, 1.0);
  return boost::math::quantile(kStd, p);
}

}  // namespace robmse
