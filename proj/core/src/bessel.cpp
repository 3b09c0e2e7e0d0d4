#include <cmath>

#include "faota/channel.hpp"

namespace faota {

// Abramowitz & Stegun 9.4.1 (|x| <= 3, |err| < 5e-8) and 9.4.3 (x > 3, modulus
// error < 1.6e-8, phase error < 7e-8).
double bessel_j0(double x) {
  const double ax = std::fabs(x);
  if (ax <= 3.0) {
    const double y = (ax / 3.0) * (ax / 3.0);
    return 1.0 +
           y * (-2.2499997 +
                y * (1.2656208 +
                     y * (-0.3163866 + y * (0.0444479 + y * (-0.0039444 + y * 0.0002100)))));
  }
  const double z = 3.0 / ax;
  const double f0 =
      0.79788456 +
      z * (-0.00000077 +
           z * (-0.00552740 +
                z * (-0.00009512 + z * (0.00137237 + z * (-0.00072805 + z * 0.00014476)))));
  const double theta0 =
      ax - 0.78539816 +
      z * (-0.04166397 +
           z * (-0.00003954 +
                z * (0.00262573 + z * (-0.00054125 + z * (-0.00029333 + z * 0.00013558)))));
  return f0 * std::cos(theta0) / std::sqrt(ax);
}

}  // namespace faota
