#ifndef LAME_SECH_LATTICE_HPP
#define LAME_SECH_LATTICE_HPP

#include "lame/elliptic.hpp"

namespace lame {

/// Residuals of the lattice-of-wells identity
///   kappa^2 sn^2 x = Ebar/Kbar - (pi/2Kbar)^2 sum_l sech^2[pi(x-2Kl)/2Kbar]
/// over an x grid on [0, 2K], truncated to |l| <= L, together with the
/// Zeta-derivative route kappa^2 sn^2 x = 1 - E/K - Z'(x) evaluated through
/// the Fourier series of Z.
struct DecompositionReport {
    double m = 0.0;
    int truncation_L = 0;
    int grid_points = 0;
    double sup_diff = 0.0;      // sech-lattice identity
    double zprime_sup = 0.0;    // Zeta-derivative route
    int fourier_N = 0;          // terms taken in the Z' Fourier sum
};

/// Partial sum over |l| <= L plus the constant term Ebar/Kbar.
double potential_sech_sum(double x, int L, const Modulus& mod);

DecompositionReport verify_decomposition(const Modulus& mod, int L = 25,
                                         int grid_points = 400);

} // namespace lame

#endif
