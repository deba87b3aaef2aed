#ifndef LAME_ELLIPTIC_HPP
#define LAME_ELLIPTIC_HPP

#include <array>
#include <complex>

#include "lame/errors.hpp"

namespace lame {

using cplx = std::complex<double>;

/// Elliptic modulus kappa together with the complementary modulus and the
/// parameter m = kappa^2.  kappa^2 + kappa_bar^2 = 1 holds by construction.
struct Modulus {
    double kappa = 0.0;
    double kappa_bar = 1.0;
    double m = 0.0;

    static Modulus from_m(double m);      // m = kappa^2 in [0,1]
    static Modulus from_kappa(double kappa);
    Modulus complementary() const { return from_kappa(kappa_bar); }
};

/// Complete integrals K, E at kappa and at the complementary modulus, plus
/// the nome q = exp(-pi*Kbar/K).  `singular` is set for kappa = 1, where K
/// diverges; K holds +inf in that case and q is 1.
struct EllipticConstants {
    double K = 0.0;
    double Kbar = 0.0;
    double E = 0.0;
    double Ebar = 0.0;
    double q = 0.0;
    bool singular = false;
};

struct JacobiTriple {
    cplx sn, cn, dn;
};

/// Real-argument sn, cn, dn (AGM / descending Landen).
struct JacobiReal {
    double sn, cn, dn;
};

EllipticConstants compute_constants(const Modulus& mod);

/// Complete elliptic integrals of the first / second kind at parameter m.
double agm_K(double m);
double agm_E(double m);

JacobiReal jacobi_real(double u, const Modulus& mod);

/// Precomputed descending-Landen data for repeated real-argument evaluation
/// at one modulus (hot loops: ODE right-hand sides, grid sweeps).
struct LandenPlan {
    enum class Mode { trig, hyperbolic, general };
    Mode mode = Mode::trig;
    double m = 0.0;
    double K4 = 0.0;          // real period 4K (general mode)
    int levels = 0;
    std::array<double, 16> mu{};
    double scale = 1.0;       // prod (1 + mu_i)
    double m_tail = 0.0;      // residual parameter after the descent
};

LandenPlan make_landen_plan(double m);
JacobiReal jacobi_real(double u, const LandenPlan& plan);

/// sn, cn, dn at complex argument via the addition theorem on z = x + iy.
/// Throws pole_error within `pole_tol` of a lattice pole 2mK + (2n+1)i*Kbar.
JacobiTriple jacobi_eval(cplx z, const Modulus& mod, double pole_tol = 1e-8);

/// Inverse of cn on [0, K]: returns x with cn(x) = c; cn is strictly
/// decreasing there so x is unique.
double invert_cn(double c, const Modulus& mod);

/// Nearest pole of the Jacobi triple to z (lattice 2mK + (2n+1)i*Kbar).
cplx nearest_jacobi_pole(cplx z, const Modulus& mod);

} // namespace lame

#endif
