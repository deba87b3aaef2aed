#ifndef LAME_WEIERSTRASS_HPP
#define LAME_WEIERSTRASS_HPP

#include <array>

#include "lame/theta.hpp"

namespace lame {

/// Lattice data with real half-period omega1 and pure-imaginary omega2.
/// Roots follow kappa^2 = (e2-e3)/(e1-e3) with e1+e2+e3 = 0 and the
/// normalization e1-e3 = (K/omega1)^2.
struct WeierstrassData {
    double e1, e2, e3;
    double g2, g3;
    double omega1;
    cplx omega2;
    double eta1;   // zeta(omega1)
    cplx eta2;     // zeta(omega2), purely imaginary
    double s;      // sqrt(e1 - e3)
    Modulus mod;   // modulus backing the sn reduction
};

WeierstrassData from_modulus(const Modulus& mod, double omega1);

/// P(u) = e3 + (e1-e3) ns^2(u sqrt(e1-e3)) and its u-derivative.
cplx weier_p(cplx u, const WeierstrassData& wd);
cplx weier_p_prime(cplx u, const WeierstrassData& wd);

/// zeta(u) = (eta1/omega1) u + s [ Z(su) + cn dn / sn (su) ]; the Jacobi Z
/// series is the computational primitive.
cplx weier_zeta(cplx u, const WeierstrassData& wd, const ThetaContext& ctx);

/// Spectral data at energy E: the product polynomial
///   X = 18 P^2 - 6 E P + 2 E^2 - (9/2) g2,
/// its root pair P(t_{1,2}) = E/6 +- sqrt(3 g2 - E^2)/(2 sqrt 3), the
/// squared Wronskian and the five edges (+- sqrt(3 g2), -3 e_j).
struct SpectralFunctions {
    std::array<double, 3> x_coeffs;  // {18, -6E, 2E^2 - 4.5 g2}
    cplx wp_t1, wp_t2;
    double q_squared;
    std::array<double, 5> edges;
    bool complex_branch;             // 3 g2 - E^2 < 0 (continuum side)
};

SpectralFunctions spectral_functions(double E, const WeierstrassData& wd);

/// Crystal momentum k = sum_r [ zeta(t_r) - (eta2/omega2) t_r ] with t_r the
/// preimages of P(t_r); branch fixed by P'(t1) + P'(t2) = 0 and the reality
/// of k, result folded into the reduced zone [0, pi/(2|omega2|)].
struct WeierstrassMomentum {
    double k;                 // reduced-zone value
    double im_residual;       // |Im k| before folding
    cplx t1, t2;
    bool ambiguous_branch;    // degenerate P'(t_r): both branches admissible
};

WeierstrassMomentum momentum_weierstrass(double E, const WeierstrassData& wd);

/// Widths and gaps compared between the closed Jacobi edges at `mod` and the
/// Weierstrass chain evaluated on the complementary-modulus lattice (the
/// imaginary rotation of the Weierstrass-form potential swaps the modulus;
/// at kappa^2 = 1/2 the two constructions coincide).  Also carries the
/// five-edge affine match eps = a E + b.
struct ConsistencyReport {
    std::array<double, 4> jacobi;  // width1, gap1, width2, gap2
    std::array<double, 4> weier;
    double affine_slope;
    double affine_intercept;
    double max_affine_residual;
    double max_difference;
};

ConsistencyReport consistency_check(const Modulus& mod);

} // namespace lame

#endif
