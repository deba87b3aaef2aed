#include "lame/sech_lattice.hpp"

#include <algorithm>
#include <cmath>

namespace lame {

namespace {
constexpr double PI = 3.14159265358979323846;

double sech2(double x) {
    if (std::abs(x) > 350.0) return 0.0;
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}
} // namespace

double potential_sech_sum(double x, int L, const Modulus& mod) {
    if (L < 0) throw domain_error("potential_sech_sum: L must be >= 0");
    const EllipticConstants ec = compute_constants(mod);
    if (ec.singular) throw domain_error("potential_sech_sum: kappa = 1 is aperiodic");
    if (mod.m == 0.0) return 0.0;  // Kbar infinite, every well infinitely wide and flat
    const double w = PI / (2.0 * ec.Kbar);
    double sum = 0.0;
    for (int l = -L; l <= L; ++l) sum += sech2(w * (x - 2.0 * ec.K * l));
    return ec.Ebar / ec.Kbar - w * w * sum;
}

DecompositionReport verify_decomposition(const Modulus& mod, int L, int grid_points) {
    if (grid_points < 2) throw domain_error("verify_decomposition: need >= 2 grid points");
    const EllipticConstants ec = compute_constants(mod);
    if (ec.singular) throw domain_error("verify_decomposition: kappa = 1 is aperiodic");

    DecompositionReport rep;
    rep.m = mod.m;
    rep.truncation_L = L;
    rep.grid_points = grid_points;

    const LandenPlan plan = make_landen_plan(mod.m);
    const double ratio = PI * ec.Kbar / ec.K;

    for (int i = 0; i < grid_points; ++i) {
        const double x = 2.0 * ec.K * i / (grid_points - 1);
        const double s = jacobi_real(x, plan).sn;
        const double lhs = mod.m * s * s;
        rep.sup_diff = std::max(rep.sup_diff, std::abs(lhs - potential_sech_sum(x, L, mod)));

        // Z'(x) = (pi/K)^2 sum n cos(n pi x/K)/sinh(n pi Kbar/K)
        double zp = 0.0;
        int n = 1;
        for (; n <= 2000; ++n) {
            const double term = n * std::cos(n * PI * x / ec.K) / std::sinh(n * ratio);
            zp += term;
            if (n * ratio > 45.0) break;  // terms below 1e-19
        }
        rep.fourier_N = std::max(rep.fourier_N, n);
        zp *= (PI / ec.K) * (PI / ec.K);
        rep.zprime_sup = std::max(rep.zprime_sup, std::abs(lhs - (1.0 - ec.E / ec.K - zp)));
    }
    return rep;
}

} // namespace lame
