#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lame/bands.hpp"
#include "lame/floquet.hpp"
#include "lame/weierstrass.hpp"

using namespace lame;

namespace {

constexpr double PI = 3.14159265358979323846;

// Accelerated double-lattice sum for P: the series terms are expanded to
// O(u^6/w^8) and the even full-lattice moments re-enter through g2 and g3,
//   P(u) = u^-2 + g2 u^2/20 + g3 u^4/28 + sum' [ (u-w)^-2 - w^-2 - sum_{j=1..5} (j+1) u^j w^-(j+2) ]
cplx p_lattice_sum(cplx u, const WeierstrassData& wd, int N = 18) {
    cplx acc = 1.0 / (u * u) + wd.g2 * u * u / 20.0 + wd.g3 * u * u * u * u / 28.0;
    for (int a = -N; a <= N; ++a) {
        for (int b = -N; b <= N; ++b) {
            if (a == 0 && b == 0) continue;
            const cplx w = 2.0 * a * wd.omega1 + 2.0 * b * wd.omega2;
            const cplx iw = 1.0 / w;
            cplx corr = 0.0, up = u * iw * iw;
            for (int j = 1; j <= 5; ++j) {
                corr += double(j + 1) * up * iw;   // (j+1) u^j / w^(j+2)... accumulated below
                up *= u * iw;
            }
            acc += 1.0 / ((u - w) * (u - w)) - iw * iw - corr;
        }
    }
    return acc;
}

} // namespace

TEST_CASE("root data from the modulus") {
    const auto mod = Modulus::from_m(0.5);
    const double K = compute_constants(mod).K;
    const auto wd = from_modulus(mod, K);
    CHECK(std::abs(wd.e1 - 0.5) < 1e-15);
    CHECK(std::abs(wd.e2 - 0.0) < 1e-15);
    CHECK(std::abs(wd.e3 + 0.5) < 1e-15);
    CHECK(std::abs(wd.g2 - 1.0) < 1e-14);
    CHECK(std::abs(wd.g3) < 1e-15);

    for (double m : {0.2, 0.5, 0.8}) {
        const auto md = Modulus::from_m(m);
        const auto w = from_modulus(md, compute_constants(md).K);  // e1 - e3 = 1
        CHECK(std::abs(w.e1 - (2.0 - m) / 3.0) < 1e-14);
        CHECK(std::abs(w.e1 + w.e2 + w.e3) < 1e-13);
        CHECK(std::abs((w.e2 - w.e3) / (w.e1 - w.e3) - m) < 1e-14);
        CHECK(std::abs(w.g2 + 4.0 * (w.e1 * w.e2 + w.e2 * w.e3 + w.e3 * w.e1)) < 1e-13);
        CHECK(std::abs(w.g3 - 4.0 * w.e1 * w.e2 * w.e3) < 1e-13);
    }
}

TEST_CASE("Legendre relation and the zeta quasi-periodicity route to eta2") {
    for (double m : {0.2, 0.5, 0.8}) {
        const auto mod = Modulus::from_m(m);
        const auto wd = from_modulus(mod, compute_constants(mod).K);
        const cplx legendre = wd.eta1 * wd.omega2 - wd.eta2 * wd.omega1;
        CHECK(std::abs(legendre - cplx(0.0, PI / 2.0)) < 1e-12);

        // eta2 = [zeta(u0 + 2 omega2) - zeta(u0)]/2 evaluated through the series
        const auto ctx = make_theta_context(mod);
        const cplx u0(0.37 * wd.omega1, 0.0);
        const cplx eta2_num =
            0.5 * (weier_zeta(u0 + 2.0 * wd.omega2, wd, ctx) - weier_zeta(u0, wd, ctx));
        CHECK(std::abs(eta2_num - wd.eta2) < 1e-12);
    }
}

TEST_CASE("P against the accelerated lattice-sum oracle") {
    const auto mod = Modulus::from_m(0.5);
    const auto wd = from_modulus(mod, compute_constants(mod).K);
    CHECK(std::abs(weier_p(cplx(0.7, 0.0), wd) - p_lattice_sum(cplx(0.7, 0.0), wd)) < 1e-10);

    std::mt19937 rng(424242u);
    for (double m : {0.3, 0.6}) {
        const auto md = Modulus::from_m(m);
        const auto w = from_modulus(md, compute_constants(md).K);
        std::uniform_real_distribution<double> ux(0.15, 0.85);
        for (int i = 0; i < 25; ++i) {
            const cplx u(ux(rng) * w.omega1, ux(rng) * w.omega2.imag());
            CHECK(std::abs(weier_p(u, w) - p_lattice_sum(u, w)) < 1e-8);
        }
    }
}

TEST_CASE("zeta derivative is -P") {
    const auto mod = Modulus::from_m(0.5);
    const auto wd = from_modulus(mod, compute_constants(mod).K);
    const auto ctx = make_theta_context(mod);
    const double h = 1e-5;
    for (const cplx u : {cplx(0.6, 0.2), cplx(0.3, 0.8), cplx(1.1, 0.4)}) {
        const cplx fd = (weier_zeta(u + h, wd, ctx) - weier_zeta(u - h, wd, ctx)) / (2.0 * h);
        CHECK(std::abs(fd + weier_p(u, wd)) < 1e-8);
    }
}

TEST_CASE("spectral functions: edges, Wronskian zeros and degenerate root") {
    const auto mod = Modulus::from_m(0.5);
    const auto wd = from_modulus(mod, compute_constants(mod).K);
    const auto sf0 = spectral_functions(1.0, wd);
    CHECK(sf0.edges[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
    CHECK(sf0.edges[1] == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK(sf0.edges[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(sf0.edges[3] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(sf0.edges[4] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    for (const double E : sf0.edges) {
        CHECK(std::abs(spectral_functions(E, wd).q_squared) < 1e-12);
    }

    // degenerate discriminant: both P(t_r) collapse to E/6 (the collapse rate
    // is a square root, so roundoff in E^2 - 3 g2 is amplified to ~1e-8)
    const auto sfd = spectral_functions(std::sqrt(3.0 * wd.g2), wd);
    CHECK(std::abs(sfd.wp_t1 - sfd.wp_t2) < 1e-7);
    CHECK(std::abs(sfd.wp_t1 - std::sqrt(3.0 * wd.g2) / 6.0) < 1e-7);

    // continuum side flags the complex-conjugate branch
    CHECK(spectral_functions(2.5, wd).complex_branch);
    CHECK_FALSE(spectral_functions(0.75, wd).complex_branch);
}

TEST_CASE("Q^2 is negative strictly inside the allowed bands") {
    for (double m : {0.25, 0.5, 0.75}) {
        const auto mod = Modulus::from_m(m);
        const auto wd = from_modulus(mod, compute_constants(mod).K);
        const auto sf = spectral_functions(0.0, wd);
        const auto inside = [&](double lo, double hi) {
            for (int i = 1; i < 12; ++i) {
                const double E = lo + (hi - lo) * i / 12.0;
                CHECK(spectral_functions(E, wd).q_squared < 0.0);
            }
        };
        inside(sf.edges[0], sf.edges[1]);
        inside(sf.edges[2], sf.edges[3]);
        inside(sf.edges[4], sf.edges[4] + 3.0);
        // gap interiors are positive
        CHECK(spectral_functions(0.5 * (sf.edges[1] + sf.edges[2]), wd).q_squared > 0.0);
        CHECK(spectral_functions(0.5 * (sf.edges[3] + sf.edges[4]), wd).q_squared > 0.0);
    }
}

TEST_CASE("Wronskian constant verified by substitution into the product identity") {
    // Q^2 = -4 (6P + E) X^2 + 2 X X'' - (X')^2 must be u-independent and equal
    // the closed form; evaluated through P, P', P'' at scattered points
    std::mt19937 rng(9001u);
    for (double m : {0.3, 0.5, 0.7}) {
        const auto mod = Modulus::from_m(m);
        const auto wd = from_modulus(mod, compute_constants(mod).K);
        std::uniform_real_distribution<double> ur(0.2, 0.8);
        for (double E : {-1.0, 0.4, 1.3, 2.8}) {
            const double expected = spectral_functions(E, wd).q_squared;
            for (int i = 0; i < 8; ++i) {
                const cplx u(ur(rng) * wd.omega1, ur(rng) * wd.omega2.imag());
                const cplx p = weier_p(u, wd);
                const cplx pp = weier_p_prime(u, wd);
                const cplx ppp = 6.0 * p * p - 0.5 * wd.g2;
                const cplx X = 18.0 * p * p - 6.0 * E * p + 2.0 * E * E - 4.5 * wd.g2;
                const cplx Xp = (36.0 * p - 6.0 * E) * pp;
                const cplx Xpp = (36.0 * p - 6.0 * E) * ppp + 36.0 * pp * pp;
                const cplx q2 = -4.0 * (6.0 * p + E) * X * X + 2.0 * X * Xpp - Xp * Xp;
                CHECK(std::abs(q2 - expected) < 1e-8 * (1.0 + std::abs(expected)));
            }
        }
    }
}

TEST_CASE("momentum: edges land on zone boundaries") {
    const auto mod = Modulus::from_m(0.5);
    const auto wd = from_modulus(mod, compute_constants(mod).K);
    const auto sf = spectral_functions(0.0, wd);
    const double L = PI / std::abs(wd.omega2.imag());

    // reduced-zone boundary images: band edges must fold to 0 or L/2
    for (const double E : sf.edges) {
        const auto wm = momentum_weierstrass(E, wd);
        const double d0 = std::min(wm.k, std::abs(wm.k - 0.5 * L));
        CHECK(d0 < 1e-6);
    }
    CHECK_THROWS_AS(momentum_weierstrass(0.5 * (sf.edges[1] + sf.edges[2]), wd), domain_error);
}

TEST_CASE("momentum agrees with the Jacobi trajectory route at m = 1/2") {
    const auto mod = Modulus::from_m(0.5);
    const auto comp = mod.complementary();
    const auto wd = from_modulus(comp, compute_constants(comp).K);
    const auto ctxK = compute_constants(mod);
    const double L = PI / ctxK.K;  // reciprocal vector of the 2K-periodic problem

    const auto fold = [&](double k) {
        double r = std::fmod(std::abs(k), L);
        if (r > 0.5 * L) r = L - r;
        return r;
    };

    // map eps = E + 6 e1 onto the Jacobi energy and compare reduced momenta
    for (int band : {1, 2}) {
        for (double t : {0.25, 0.5, 0.75}) {
            const BandPoint bp = band == 1 ? band1_point(t, mod) : band2_point(t, mod);
            const double E = bp.eps - 6.0 * wd.e1;
            const auto wm = momentum_weierstrass(E, wd);
            CHECK(std::abs(fold(wm.k) - fold(bp.k)) < 1e-6);
        }
    }
}

TEST_CASE("consistency report: widths and gaps for all moduli") {
    {
        const auto rep = consistency_check(Modulus::from_m(0.5));
        CHECK(std::abs(rep.jacobi[0] - (std::sqrt(3.0) - 1.5)) < 1e-12);
        CHECK(std::abs(rep.weier[0] - (std::sqrt(3.0) - 1.5)) < 1e-12);
        CHECK(std::abs(rep.jacobi[1] - 1.5) < 1e-12);
        CHECK(std::abs(rep.weier[1] - 1.5) < 1e-12);
        CHECK(rep.max_difference < 1e-10);
        CHECK(rep.max_affine_residual < 1e-10);
    }
    {
        const auto rep = consistency_check(Modulus::from_m(0.3));
        CHECK(rep.max_difference < 1e-10);
    }
    for (int i = 1; i <= 20; ++i) {
        const auto rep = consistency_check(Modulus::from_m(i / 21.0));
        CHECK(rep.max_difference < 1e-10);
        CHECK(rep.max_affine_residual < 1e-10);
    }
}
