#ifndef LAME_BANDS_HPP
#define LAME_BANDS_HPP

#include <array>
#include <vector>

#include "lame/theta.hpp"

namespace lame {

/// The five n=2 band-edge energies.  eps[0] <= ... <= eps[4];
/// eps1+eps5 = 4(kappa^2+1) and eps5-eps1 = 4 sqrt(kappa^4-kappa^2+1).
struct BandEdges {
    std::array<double, 5> eps;

    double width1() const { return eps[1] - eps[0]; }
    double gap1() const { return eps[2] - eps[1]; }
    double width2() const { return eps[3] - eps[2]; }
    double gap2() const { return eps[4] - eps[3]; }
};

/// Complex trajectory parameters (alpha1, alpha2) with the band tag and the
/// real coordinates that parametrize the band's segment:
///   band 1: (y1, y2) with alpha_j = K + i y_j
///   band 2: (y1, y2) with alpha1 = K + i y1, alpha2 = i y2
///   band 3: (x, y)   with alpha1 = -x + i y, alpha2 = x + i y
struct AlphaPair {
    cplx alpha1, alpha2;
    int band = 0;
    std::array<double, 2> coords{};
};

struct BandPoint {
    double k = 0.0;
    double eps = 0.0;
    AlphaPair pair;
    double constraint_residual = 0.0;  // |Eq-4 expression|
    double reality_residual = 0.0;     // |Re (Z(a1)+Z(a2))|
};

struct Dispersion {
    int band = 0;
    std::vector<BandPoint> samples;  // ordered by k; eps(k) = eps(-k), only k >= 0 emitted
};

BandEdges band_edges(const Modulus& mod);

/// Locations of the band-1 bottom (c0) and band-3 bottom (x0):
///   kbar^2 cnbar^2(c0) = 1 - sqrt(k^4 - k^2 + 1)
///   dn^2(x0) + cn^2(x0) dn^2(x0)/sn^2(x0) = 1 + sqrt(k^4 - k^2 + 1)
struct EdgeParameters {
    double c0;
    double x0;
};

EdgeParameters edge_parameters(const Modulus& mod);

/// Energy from the two-parameter constraint system and the residual of the
/// remaining constraint:
///   eps = sum_j sn^-2(a_j) - [ sum_j cn(a_j)dn(a_j)/sn(a_j) ]^2
///   residual = | sum_j sncndn(a_j) / (sn^2 a_1 - sn^2 a_2) |
/// Conjugate-symmetric pairs make both numerator and denominator vanish; the
/// on-trajectory limit is zero and is reported as the bare numerator then.
struct EnergyResidual {
    double eps;
    double residual;
};

EnergyResidual hh_energy_and_residual(const AlphaPair& pair, const Modulus& mod);

/// Crystal momentum k = -i (Z(a1)+Z(a2)) + pi/K, unwrapped to the band's
/// extended zone: band 1 |k| <= pi/2K, band 2 in [pi/2K, pi/K], band 3 above.
/// Throws if |Re(Z(a1)+Z(a2))| exceeds 1e-9 (point off the band locus).
struct MomentumResult {
    double k;
    double reality_residual;
};

MomentumResult momentum_from_alphas(const AlphaPair& pair, const ThetaContext& ctx);

/// Trajectory samples; t in [0,1] runs from band bottom to band top (band 3:
/// t -> 1 approaches the pole at i*Kbar, energy and momentum diverge there).
BandPoint band1_point(double t, const Modulus& mod);
BandPoint band2_point(double t, const Modulus& mod);
BandPoint band3_point(double t, const Modulus& mod);

/// Hermite-Halphen Bloch wavefunction
///   psi(x) = prod_j [ H(x+a_j)/Theta(x) ] exp(-x Z(a_j)),
/// satisfying psi(x+2K) = exp(-i 2K k) psi(x) on valid trajectory points.
cplx bloch_psi(double x, const AlphaPair& pair, const ThetaContext& ctx);

/// Closed segment-energy forms in the trajectory coordinates (the band-3
/// segment energy coincides with the reduced constraint energy itself).
double band1_energy(double y1, double y2, const Modulus& mod);
double band2_energy(double y1, double y2, const Modulus& mod);

/// Ordered (k, eps) samples across one band; uniform in the trajectory
/// parameter, endpoints emitted from the closed forms.  Band 3 is capped at
/// k_max (ignored for bands 1 and 2).
Dispersion dispersion(const Modulus& mod, int band, int n_samples, double k_max);

/// Monotone reinterpolation of a dispersion onto uniformly spaced k.
Dispersion resample_uniform_k(const Dispersion& disp, int n_samples, const Modulus& mod);

} // namespace lame

#endif
