#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "adiascat/error.hpp"
#include "adiascat/network.hpp"

namespace adiascat::rank_one {

double principal_value(const RankOneCoupling& c, double E) {
  // PV int rho(k)/(E-k) dk = int (rho(k) - rho(E))/(E-k) dk over a window
  // symmetric about E; the subtracted term integrates to zero there. The
  // window reaches 14 kappa past the origin, where rho < 1e-85.
  const double rho_e = c.spectral_density(E);
  const double half = std::abs(E) + 14.0 * c.kappa;
  auto integrand = [&](double k) {
    const double d = E - k;
    if (d == 0.0) return 0.0;
    return (c.spectral_density(k) - rho_e) / d;
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double left = Rule::integrate(integrand, E - half, E, 15, 1e-13);
  const double right = Rule::integrate(integrand, E, E + half, 15, 1e-13);
  return left + right;
}

cplx resolvent(const RankOneCoupling& c, double E) {
  return {principal_value(c, E), -std::numbers::pi * c.spectral_density(E)};
}

cplx denominator(const RankOneCoupling& c, double lambda, double E) {
  const cplx d = 1.0 - lambda * resolvent(c, E);
  if (std::abs(d) < 1e-12) {
    std::ostringstream msg;
    msg << "1 - lambda g(E) vanishes at E = " << E << " (resonance-singular coupling)";
    throw ValidationError("lambda", msg.str());
  }
  return d;
}

bool has_pole(const RankOneCoupling& c, double lambda, double e_lo, double e_hi, double tol) {
  const int samples = 400;
  for (int i = 0; i <= samples; ++i) {
    const double E = e_lo + (e_hi - e_lo) * i / samples;
    if (std::abs(1.0 - lambda * resolvent(c, E)) < tol) return true;
  }
  return false;
}

}  // namespace adiascat::rank_one
