#include <cmath>
#include <limits>

#include "hics/hisolve.hpp"

namespace hics {

const char* to_string(GuaranteeAlgorithm a) { return a == GuaranteeAlgorithm::hiiht ? "hiiht" : "hihtp"; }

GuaranteeConstants guarantee_constants(double delta_3s_2sigma, double delta_2s_2sigma, GuaranteeAlgorithm algorithm) {
  if (!(delta_3s_2sigma >= 0.0) || !(delta_2s_2sigma >= 0.0)) {
    throw ParameterError("guarantee_constants: RIP constants must be >= 0");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  GuaranteeConstants g;
  g.algorithm = algorithm;
  const double d3 = delta_3s_2sigma;
  const double d2 = delta_2s_2sigma;
  double amplification = 0.0;
  if (algorithm == GuaranteeAlgorithm::hiiht) {
    g.rho = std::sqrt(3.0) * d3;
    g.delta_threshold = std::sqrt(2.0) - 1.0;
    amplification = 2.18;
  } else {
    const double den = 1.0 - d2 * d2;
    g.rho = den > 0.0 ? std::sqrt(2.0 * d3 / den) : inf;
    g.rho_squared_reading = den > 0.0 ? std::sqrt(2.0 * d3 * d3 / den) : inf;
    g.delta_threshold = 1.0 / std::sqrt(3.0);
    amplification = 5.15;
  }
  g.applicable = d3 < 1.0 && d2 < 1.0 && g.rho < 1.0;
  g.tau = g.applicable ? amplification / (1.0 - g.rho) : inf;
  return g;
}

}  // namespace hics
