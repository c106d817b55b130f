#include "phishguard/num/special.hpp"

#include <cmath>

#include "phishguard/errors.hpp"

namespace phishguard::num {

double digamma(double x) {
  require(x > 0.0, Errc::Precondition, "digamma domain is x > 0");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  /* ln x - 1/(2x) - sum B_2n / (2n x^2n) */
  double series = inv2 * (1.0 / 12.0
                - inv2 * (1.0 / 120.0
                - inv2 * (1.0 / 252.0
                - inv2 * (1.0 / 240.0
                - inv2 * (1.0 / 132.0
                - inv2 * (691.0 / 32760.0
                - inv2 * (1.0 / 12.0)))))));
  result += std::log(x) - 0.5 * inv - series;
  return result;
}

}  // namespace phishguard::num
