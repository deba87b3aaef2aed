#include "lame/floquet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace lame {

namespace {

constexpr double PI = 3.14159265358979323846;

using State = std::array<double, 5>;  // psi1, psi1', psi2, psi2', pruefer angle

struct LameOde {
    LandenPlan plan;
    double strength;  // n(n+1) kappa^2
    double eps;

    State operator()(double x, const State& y) const {
        const double s = jacobi_real(x, plan).sn;
        const double v = strength * s * s - eps;
        const double st = std::sin(y[4]), ct = std::cos(y[4]);
        return {y[1], v * y[0], y[3], v * y[2], ct * ct - v * st * st};
    }
};

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

State axpy(const State& y, double h, const State& k) {
    State r;
    for (int i = 0; i < 5; ++i) r[i] = y[i] + h * k[i];
    return r;
}

// Integrates from 0 to x_end; returns final state.  Local error controlled
// against tol (absolute and relative mixed).
State integrate(const LameOde& ode, double x_end, double tol, long max_steps = 2000000) {
    State y{1.0, 0.0, 0.0, 1.0, PI / 2};
    double x = 0.0;
    double h = std::min(1e-2, x_end / 10.0);
    long steps = 0;
    State k1 = ode(x, y);
    while (x < x_end) {
        if (++steps > max_steps) {
            std::ostringstream os;
            os << "integrate_monodromy: step budget exceeded at eps = " << ode.eps;
            throw numerical_error(os.str());
        }
        h = std::min(h, x_end - x);
        const State k2 = ode(x + C2 * h, axpy(y, h * A21, k1));
        State t;
        for (int i = 0; i < 5; ++i) t[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        const State k3 = ode(x + C3 * h, t);
        for (int i = 0; i < 5; ++i) t[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        const State k4 = ode(x + C4 * h, t);
        for (int i = 0; i < 5; ++i)
            t[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        const State k5 = ode(x + C5 * h, t);
        for (int i = 0; i < 5; ++i)
            t[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        const State k6 = ode(x + h, t);
        State y5;
        for (int i = 0; i < 5; ++i)
            y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        const State k7 = ode(x + h, y5);

        double err = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                  E6 * k6[i] + E7 * k7[i]);
            const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
            err = std::max(err, std::abs(e) / sc);
        }
        if (err <= 1.0) {
            x += h;
            y = y5;
            k1 = k7;  // FSAL
        }
        const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
    }
    return y;
}

Monodromy monodromy_with_state(double eps, const Modulus& mod, int n, double tol,
                               double* pruefer_span) {
    if (!std::isfinite(eps)) throw domain_error("integrate_monodromy: eps not finite");
    if (n < 1) throw domain_error("integrate_monodromy: n must be >= 1");
    LameOde ode{make_landen_plan(mod.m), double(n) * (n + 1) * mod.m, eps};
    const double period = 2.0 * agm_K(mod.m);
    const State y = integrate(ode, period, tol);
    if (pruefer_span) *pruefer_span = y[4] - PI / 2;
    return Monodromy{y[0], y[2], y[1], y[3], eps, n};
}

} // namespace

Monodromy integrate_monodromy(double eps, const Modulus& mod, int n, double tol) {
    return monodromy_with_state(eps, mod, n, tol, nullptr);
}

std::vector<std::pair<double, double>> scan_bands(double eps_lo, double eps_hi,
                                                  int resolution, const Modulus& mod,
                                                  int n) {
    if (!(eps_lo < eps_hi)) throw domain_error("scan_bands: eps_lo must be < eps_hi");
    if (resolution < 2) throw domain_error("scan_bands: resolution must be >= 2");

    const auto gap_fn = [&](double e) {
        return std::abs(integrate_monodromy(e, mod, n).discriminant()) - 2.0;
    };

    std::vector<double> grid(resolution + 1), g(resolution + 1);
    for (int i = 0; i <= resolution; ++i) {
        grid[i] = eps_lo + (eps_hi - eps_lo) * i / resolution;
        g[i] = gap_fn(grid[i]);
    }

    // refine a crossing of |Delta| = 2 between a and b (g(a), g(b) opposite signs)
    const auto refine = [&](double a, double ga, double b) {
        while (b - a > 1e-9) {
            const double mid = 0.5 * (a + b);
            const double gm = gap_fn(mid);
            if ((gm > 0.0) == (ga > 0.0)) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        return 0.5 * (a + b);
    };

    std::vector<std::pair<double, double>> bands;
    bool inside = g[0] <= 0.0;
    double start = eps_lo;
    for (int i = 1; i <= resolution; ++i) {
        const bool now = g[i] <= 0.0;
        if (now == inside) continue;
        const double edge = refine(grid[i - 1], g[i - 1], grid[i]);
        if (inside) {
            bands.emplace_back(start, edge);
        } else {
            start = edge;
        }
        inside = now;
    }
    if (inside) bands.emplace_back(start, eps_hi);

    // coarse-resolution diagnostic: a non-degenerate n-gap potential scanned
    // past its last edge must show n+1 bands
    const bool covers = eps_lo <= 0.0 && eps_hi >= double(n) * (n + 1) + 1.0;
    if (covers && mod.m >= 1e-6 && static_cast<int>(bands.size()) < n + 1) {
        std::ostringstream os;
        os << "scan_bands: found " << bands.size() << " bands, expected " << (n + 1)
           << "; resolution " << resolution << " too coarse for m = " << mod.m;
        throw numerical_error(os.str());
    }
    return bands;
}

double k_of_epsilon(double eps, int band, const Modulus& mod, int n) {
    if (band < 1) throw domain_error("k_of_epsilon: band index must be >= 1");
    double span = 0.0;
    const Monodromy M = monodromy_with_state(eps, mod, n, 1e-13, &span);
    const double half = 0.5 * M.discriminant();
    if (std::abs(half) > 1.0 + 5e-10) {
        std::ostringstream os;
        os << "k_of_epsilon: eps = " << eps << " lies in a gap (|Delta|/2 = "
           << std::abs(half) << ")";
        throw domain_error(os.str());
    }
    const double base = std::acos(std::clamp(half, -1.0, 1.0));  // in [0, pi]
    const double twoK = 2.0 * agm_K(mod.m);
    if (band == 1) return base / twoK;
    if (band == 2) return (2.0 * PI - base) / twoK;

    // continuum band: resolve the winding from the Pruefer phase, which tracks
    // 2Kk to within a fraction of pi over one period
    double best = base;
    double dist = std::abs(base - span);
    for (int m2 = 1; m2 <= 64; ++m2) {
        for (const double cand : {2.0 * PI * m2 - base, 2.0 * PI * m2 + base}) {
            const double d = std::abs(cand - span);
            if (d < dist) {
                dist = d;
                best = cand;
            }
        }
    }
    return best / twoK;
}

} // namespace lame
