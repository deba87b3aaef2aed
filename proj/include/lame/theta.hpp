#ifndef LAME_THETA_HPP
#define LAME_THETA_HPP

#include "lame/elliptic.hpp"

namespace lame {

/// Evaluation context for the Jacobi Theta/Eta/Zeta functions.  Series are
/// truncated adaptively: summation stops once terms fall below tol times the
/// running sum, capped at max_terms.
struct ThetaContext {
    Modulus mod;
    EllipticConstants ec;
    int max_terms = 200;
    double tol = 1e-16;
};

ThetaContext make_theta_context(const Modulus& mod);

/// Theta (period 2K) and Eta (period 4K) at one argument.
struct ThetaPair {
    cplx theta;
    cplx eta;
};

ThetaPair theta_pair(cplx z, const ThetaContext& ctx);

/// Z(z) = Theta'(z)/Theta(z); odd, period 2K.  Derivative is taken termwise
/// in the nome series.  Throws pole_error near the zeros of Theta.
cplx zeta_Z(cplx z, const ThetaContext& ctx);

/// d/dz of Z; on the real axis Z'(x) = dn^2(x) - E/K.
cplx zeta_Z_prime(cplx z, const ThetaContext& ctx);

/// Real parts that vanish identically on the band trajectories:
///   r_iy     = Re Z(iy)
///   r_K_iy   = Re Z(K+iy)
///   r_mirror = Re [ Z(-x+iy) + Z(x+iy) ]
struct RealityResiduals {
    double r_iy;
    double r_K_iy;
    double r_mirror;
};

RealityResiduals reality_checks(double y, double x, const ThetaContext& ctx);

/// Z(K+iy) by the direct theta ratio and by the closed identity through the
/// complementary-modulus functions: i*(dnb(y)*snb(y)/cnb(y) - Zbar(y)
/// - pi*y/(2*K*Kbar) - kappa^2*snb(y)/(cnb(y)*dnb(y))).
struct KLineZeta {
    cplx direct;
    cplx via_identity;
};

KLineZeta zeta_on_K_line(double y, const ThetaContext& ctx);

} // namespace lame

#endif
