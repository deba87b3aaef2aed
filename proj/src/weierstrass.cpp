#include "lame/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "lame/bands.hpp"

namespace lame {

namespace {

constexpr double PI = 3.14159265358979323846;

cplx jacobi_sn(cplx z, const Modulus& mod) { return jacobi_eval(z, mod).sn; }

} // namespace

WeierstrassData from_modulus(const Modulus& mod, double omega1) {
    if (!(mod.m > 0.0 && mod.m < 1.0))
        throw domain_error("from_modulus: kappa must lie strictly inside (0,1)");
    if (!(omega1 > 0.0)) throw domain_error("from_modulus: omega1 must be positive");

    const EllipticConstants ec = compute_constants(mod);
    WeierstrassData wd;
    wd.mod = mod;
    wd.omega1 = omega1;
    wd.s = ec.K / omega1;
    const double s2 = wd.s * wd.s;
    const double m = mod.m;
    wd.e1 = s2 * (2.0 - m) / 3.0;
    wd.e2 = s2 * (2.0 * m - 1.0) / 3.0;
    wd.e3 = -s2 * (1.0 + m) / 3.0;
    wd.g2 = -4.0 * (wd.e1 * wd.e2 + wd.e2 * wd.e3 + wd.e3 * wd.e1);
    wd.g3 = 4.0 * wd.e1 * wd.e2 * wd.e3;
    wd.omega2 = cplx(0.0, ec.Kbar / wd.s);
    wd.eta1 = omega1 * (s2 * ec.E / ec.K - wd.e1);
    wd.eta2 = wd.eta1 * wd.omega2 / omega1 - cplx(0.0, wd.s * PI / (2.0 * ec.K));
    return wd;
}

namespace {

// local expansion around the half period omega2 (the sn-pole lattice in the
// reduced argument), P''(w2) = 6 e3^2 - g2/2
bool near_omega2(cplx v, const Modulus& mod, cplx* t_out, const WeierstrassData& wd) {
    const cplx vpole = nearest_jacobi_pole(v, mod);
    if (std::abs(v - vpole) >= 1e-6) return false;
    *t_out = (v - vpole) / wd.s;
    return true;
}

} // namespace

cplx weier_p(cplx u, const WeierstrassData& wd) {
    cplx t;
    if (near_omega2(wd.s * u, wd.mod, &t, wd)) {
        const double A = 6.0 * wd.e3 * wd.e3 - 0.5 * wd.g2;
        return wd.e3 + 0.5 * A * t * t * (1.0 + wd.e3 * t * t);
    }
    const cplx sn = jacobi_sn(wd.s * u, wd.mod);
    if (std::abs(sn) < 1e-12)
        throw pole_error("weier_p: lattice pole (sn vanishes)", u);
    return wd.e3 + wd.s * wd.s / (sn * sn);
}

cplx weier_p_prime(cplx u, const WeierstrassData& wd) {
    cplx t;
    if (near_omega2(wd.s * u, wd.mod, &t, wd)) {
        const double A = 6.0 * wd.e3 * wd.e3 - 0.5 * wd.g2;
        return A * t * (1.0 + 2.0 * wd.e3 * t * t);
    }
    const JacobiTriple t3 = jacobi_eval(wd.s * u, wd.mod);
    if (std::abs(t3.sn) < 1e-12)
        throw pole_error("weier_p_prime: lattice pole (sn vanishes)", u);
    return -2.0 * wd.s * wd.s * wd.s * t3.cn * t3.dn / (t3.sn * t3.sn * t3.sn);
}

cplx weier_zeta(cplx u, const WeierstrassData& wd, const ThetaContext& ctx) {
    const cplx v = wd.s * u;

    // The Z and cn dn/sn poles at v = i Kbar (mod lattice) cancel; evaluate a
    // cancellation-free expansion around the half period there:
    //   zeta(w2 + t) = eta2 - e3 t + (g2/12 - e3^2) t^3 + O(t^5)
    const cplx vpole = nearest_jacobi_pole(v, ctx.mod);
    if (std::abs(v - vpole) < 1e-4) {
        const double Kv = ctx.ec.K, Kbv = ctx.ec.Kbar;
        const double mshift = std::round(vpole.real() / (2.0 * Kv));
        const double nodd = std::round(vpole.imag() / Kbv);  // odd integer
        const cplx t = u - vpole / wd.s;
        const cplx local = -wd.e3 * t + (wd.g2 / 12.0 - wd.e3 * wd.e3) * t * t * t;
        return 2.0 * mshift * wd.eta1 + nodd * wd.eta2 + local;
    }

    const JacobiTriple t = jacobi_eval(v, ctx.mod);
    if (std::abs(t.sn) < 1e-12)
        throw pole_error("weier_zeta: lattice pole (sn vanishes)", u);
    return (wd.eta1 / wd.omega1) * u + wd.s * (zeta_Z(v, ctx) + t.cn * t.dn / t.sn);
}

SpectralFunctions spectral_functions(double E, const WeierstrassData& wd) {
    if (!std::isfinite(E)) throw domain_error("spectral_functions: E not finite");
    SpectralFunctions sf;
    sf.x_coeffs = {18.0, -6.0 * E, 2.0 * E * E - 4.5 * wd.g2};
    const double disc = 3.0 * wd.g2 - E * E;
    sf.complex_branch = disc < 0.0;
    const cplx root = sf.complex_branch ? cplx(0.0, std::sqrt(-disc)) : cplx(std::sqrt(disc));
    sf.wp_t1 = E / 6.0 + root / (2.0 * std::sqrt(3.0));
    sf.wp_t2 = E / 6.0 - root / (2.0 * std::sqrt(3.0));
    sf.q_squared = -(E * E - 3.0 * wd.g2) *
                   (16.0 * E * E * E - 36.0 * E * wd.g2 + 108.0 * wd.g3);
    const double sq = std::sqrt(3.0 * wd.g2);
    sf.edges = {-sq, -3.0 * wd.e1, -3.0 * wd.e2, -3.0 * wd.e3, sq};
    return sf;
}

namespace {

// preimage of a P-target in the closed quarter-cell [0,w1] x [0,|w2|]:
// coarse grid, then Newton (linear but contracting near the half-periods
// where P' vanishes)
cplx invert_p(cplx target, const WeierstrassData& wd) {
    const double w1 = wd.omega1, w2 = std::abs(wd.omega2.imag());
    cplx best;
    double best_err = std::numeric_limits<double>::infinity();
    const int N = 40;
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            const cplx t(w1 * i / N, w2 * j / N);
            try {
                const double err = std::abs(weier_p(t, wd) - target);
                if (err < best_err) {
                    best_err = err;
                    best = t;
                }
            } catch (const pole_error&) {
            }
        }
    }
    const double scale = 1.0 + std::abs(target);
    // half-period targets invert exactly
    if (std::abs(target - cplx(wd.e1)) < 1e-12 * scale) return cplx(w1, 0.0);
    if (std::abs(target - cplx(wd.e2)) < 1e-12 * scale) return cplx(w1, w2);
    if (std::abs(target - cplx(wd.e3)) < 1e-12 * scale) return cplx(0.0, w2);

    cplx t = best;
    for (int it = 0; it < 100; ++it) {
        cplx f, fp;
        try {
            f = weier_p(t, wd) - target;
            fp = weier_p_prime(t, wd);
        } catch (const pole_error&) {
            break;
        }
        if (std::abs(f) < 1e-12 * scale) return t;
        if (std::abs(fp) < 1e-10 * scale) {
            // near a half period P' ~ 0: quadratic local model, sign chosen by descent
            const cplx p = f + target;
            const cplx ppp = 6.0 * p * p - 0.5 * wd.g2;
            if (std::abs(ppp) < 1e-12) break;
            const cplx step = std::sqrt(2.0 * f / ppp);
            const auto err = [&](cplx cand) {
                try {
                    return std::abs(weier_p(cand, wd) - target);
                } catch (const pole_error&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            t = err(t - step) <= err(t + step) ? t - step : t + step;
            continue;
        }
        t -= f / fp;
    }
    if (std::abs(weier_p(t, wd) - target) > 1e-9 * scale) {
        std::ostringstream os;
        os << "momentum_weierstrass: P-inversion failed for target (" << target.real()
           << "," << target.imag() << ")";
        throw numerical_error(os.str());
    }
    return t;
}

} // namespace

WeierstrassMomentum momentum_weierstrass(double E, const WeierstrassData& wd) {
    const SpectralFunctions sf = spectral_functions(E, wd);
    const double tol_edge = 1e-9;
    const bool in_band = (E >= sf.edges[0] - tol_edge && E <= sf.edges[1] + tol_edge) ||
                         (E >= sf.edges[2] - tol_edge && E <= sf.edges[3] + tol_edge) ||
                         (E >= sf.edges[4] - tol_edge);
    if (!in_band) {
        std::ostringstream os;
        os << "momentum_weierstrass: E = " << E << " lies in a gap";
        throw domain_error(os.str());
    }

    const ThetaContext ctx = make_theta_context(wd.mod);
    WeierstrassMomentum out;
    cplx t1 = invert_p(sf.wp_t1, wd);
    cplx t2;
    if (std::abs(sf.wp_t1 - sf.wp_t2) < 1e-6 * (1.0 + std::abs(sf.wp_t1))) {
        // degenerate discriminant: the consistent pair is the exact mirror
        t2 = -t1;
        out.ambiguous_branch = true;
    } else {
        t2 = invert_p(sf.wp_t2, wd);
        // 4 tau^3 - g2 tau - g3 takes equal values at the two targets, so the
        // branch with P'(t1) + P'(t2) = 0 always exists; it is the one for
        // which the product solution actually solves the equation
        const cplx p1 = weier_p_prime(t1, wd);
        const cplx p2 = weier_p_prime(t2, wd);
        out.ambiguous_branch = std::min(std::abs(p1), std::abs(p2)) <
                               1e-9 * (1.0 + std::abs(p1) + std::abs(p2));
        if (std::abs(p1 + p2) > std::abs(p1 - p2)) t2 = -t2;
    }

    const cplx r2 = wd.eta2 / wd.omega2;  // real by the Legendre relation
    const cplx k_raw = weier_zeta(t1, wd, ctx) + weier_zeta(t2, wd, ctx) - r2 * (t1 + t2);
    out.t1 = t1;
    out.t2 = t2;
    out.im_residual = std::abs(k_raw.imag());

    if (out.im_residual > 1e-9) {
        std::ostringstream os;
        os << "momentum_weierstrass: no real-k branch found at E = " << E
           << " (Im k = " << k_raw.imag() << ")";
        throw numerical_error(os.str());
    }

    // fold into the reduced zone of the period-2|omega2| potential
    const double L = PI / std::abs(wd.omega2.imag());
    double k = std::fmod(std::abs(k_raw.real()), L);
    if (k > 0.5 * L) k = L - k;
    out.k = k;
    return out;
}

ConsistencyReport consistency_check(const Modulus& mod) {
    if (!(mod.m > 0.0 && mod.m < 1.0))
        throw domain_error("consistency_check: kappa must lie strictly inside (0,1)");

    const BandEdges be = band_edges(mod);
    ConsistencyReport rep;
    rep.jacobi = {be.width1(), be.gap1(), be.width2(), be.gap2()};

    // lattice at the complementary modulus, normalized to e1 - e3 = 1
    const Modulus comp = mod.complementary();
    const WeierstrassData wd = from_modulus(comp, compute_constants(comp).K);
    const double sq = std::sqrt(3.0 * wd.g2);
    rep.weier = {sq - 3.0 * wd.e1, 3.0 * (wd.e1 - wd.e2), 3.0 * (wd.e2 - wd.e3),
                 sq + 3.0 * wd.e3};

    // five-edge affine match eps = a E + b (least squares over the pairs)
    const SpectralFunctions sf = spectral_functions(0.0, wd);
    double sxx = 0.0, sx = 0.0, sy = 0.0, sxy = 0.0;
    for (int i = 0; i < 5; ++i) {
        sx += sf.edges[i];
        sy += be.eps[i];
        sxx += sf.edges[i] * sf.edges[i];
        sxy += sf.edges[i] * be.eps[i];
    }
    const double det = 5.0 * sxx - sx * sx;
    rep.affine_slope = (5.0 * sxy - sx * sy) / det;
    rep.affine_intercept = (sy * sxx - sx * sxy) / det;
    rep.max_affine_residual = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double fit = rep.affine_slope * sf.edges[i] + rep.affine_intercept;
        rep.max_affine_residual = std::max(rep.max_affine_residual, std::abs(fit - be.eps[i]));
    }
    rep.max_difference = 0.0;
    for (int i = 0; i < 4; ++i)
        rep.max_difference = std::max(rep.max_difference, std::abs(rep.jacobi[i] - rep.weier[i]));
    return rep;
}

} // namespace lame
