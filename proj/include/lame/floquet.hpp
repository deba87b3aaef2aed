#ifndef LAME_FLOQUET_HPP
#define LAME_FLOQUET_HPP

#include <utility>
#include <vector>

#include "lame/elliptic.hpp"

namespace lame {

/// Transfer matrix of -psi'' + n(n+1) kappa^2 sn^2(x) psi = eps psi over one
/// period 2K.  Columns are the solutions launched from (1,0) and (0,1);
/// det = 1 by Wronskian conservation.
struct Monodromy {
    double m11, m12, m21, m22;
    double eps;
    int n;

    double discriminant() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }
};

/// Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) with
/// local tolerance `tol`.  The default leaves headroom under the 1e-10
/// determinant budget even where gap-interior solutions grow fast.
Monodromy integrate_monodromy(double eps, const Modulus& mod, int n, double tol = 1e-13);

/// Allowed-band intervals inside [eps_lo, eps_hi]: the closure of
/// { eps : |Delta(eps)| <= 2 }, edges refined by bisection to 1e-8.
std::vector<std::pair<double, double>> scan_bands(double eps_lo, double eps_hi,
                                                  int resolution, const Modulus& mod,
                                                  int n);

/// Crystal momentum from cos(2Kk) = Delta/2 with the extended-zone branch
/// taken from the band index (1-based; band n+1 is the continuum band and
/// its winding is resolved by the integrated Pruefer phase).
double k_of_epsilon(double eps, int band, const Modulus& mod, int n);

} // namespace lame

#endif
