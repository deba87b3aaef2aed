#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lame/bands.hpp"
#include "lame/floquet.hpp"

using namespace lame;

namespace {
constexpr double PI = 3.14159265358979323846;

// literal constraint-system energy, kept as an independent route against the
// reduced form used by the library
double eps_literal(const AlphaPair& p, const Modulus& mod) {
    const auto t1 = jacobi_eval(p.alpha1, mod);
    const auto t2 = jacobi_eval(p.alpha2, mod);
    const cplx br = t1.cn * t1.dn / t1.sn + t2.cn * t2.dn / t2.sn;
    return (1.0 / (t1.sn * t1.sn) + 1.0 / (t2.sn * t2.sn) - br * br).real();
}

} // namespace

TEST_CASE("band edges: closed forms at m = 1/2, 0, 1") {
    const auto be = band_edges(Modulus::from_m(0.5));
    CHECK(std::abs(be.eps[0] - (3.0 - std::sqrt(3.0))) < 1e-12);
    CHECK(std::abs(be.eps[1] - 1.5) < 1e-12);
    CHECK(std::abs(be.eps[2] - 3.0) < 1e-12);
    CHECK(std::abs(be.eps[3] - 4.5) < 1e-12);
    CHECK(std::abs(be.eps[4] - (3.0 + std::sqrt(3.0))) < 1e-12);

    const auto b0 = band_edges(Modulus::from_m(0.0));
    CHECK(b0.eps == std::array<double, 5>{0.0, 1.0, 1.0, 4.0, 4.0});
    const auto b1 = band_edges(Modulus::from_m(1.0));
    CHECK(b1.eps == std::array<double, 5>{2.0, 2.0, 5.0, 5.0, 6.0});
}

TEST_CASE("band edges: ordering and algebraic sum/difference relations") {
    for (int i = 0; i <= 40; ++i) {
        const double m = i / 40.0;
        const auto be = band_edges(Modulus::from_m(m));
        for (int j = 0; j < 4; ++j) CHECK(be.eps[j] <= be.eps[j + 1] + 1e-15);
        CHECK(std::abs(be.eps[0] + be.eps[4] - 4.0 * (m + 1.0)) < 1e-13);
        CHECK(std::abs(be.eps[4] - be.eps[0] - 4.0 * std::sqrt(m * m - m + 1.0)) < 1e-13);
    }
}

TEST_CASE("edge parameters: defining equations and limits") {
    const auto mod = Modulus::from_m(0.5);
    const auto ep = edge_parameters(mod);
    const auto comp = mod.complementary();
    const double cnb = jacobi_real(ep.c0, comp).cn;
    CHECK(std::abs(cnb * cnb - (2.0 - std::sqrt(3.0))) < 1e-12);

    // both defining equations hold to 1e-12
    const double r = std::sqrt(0.75);
    CHECK(std::abs(0.5 * cnb * cnb - (1.0 - r)) < 1e-12);
    const auto jx = jacobi_real(ep.x0, mod);
    const double lhs = jx.dn * jx.dn + jx.cn * jx.cn * jx.dn * jx.dn / (jx.sn * jx.sn);
    CHECK(std::abs(lhs - (1.0 + r)) < 1e-12);

    // x0 reproduces the top edge through the energy route
    AlphaPair p;
    p.alpha1 = cplx(-ep.x0, 0.0);
    p.alpha2 = cplx(ep.x0, 0.0);
    p.band = 3;
    CHECK(std::abs(hh_energy_and_residual(p, mod).eps - band_edges(mod).eps[4]) < 1e-10);

    // near kappa -> 1 the x0 equation reduces to sech^2(x0) = 2/3
    const auto ep1 = edge_parameters(Modulus::from_m(1.0 - 1e-6));
    CHECK(std::abs(ep1.x0 - std::acosh(std::sqrt(1.5))) < 1e-3);

    CHECK_THROWS_AS(edge_parameters(Modulus::from_m(0.0)), domain_error);
}

TEST_CASE("constraint energy at the printed special pairs") {
    const auto mod = Modulus::from_m(0.5);
    const auto ec = compute_constants(mod);
    AlphaPair p;
    p.band = 1;
    p.alpha1 = cplx(ec.K, -ec.Kbar);
    p.alpha2 = cplx(ec.K, 2.0 * ec.Kbar);
    const auto er = hh_energy_and_residual(p, mod);
    CHECK(std::abs(er.eps - 1.5) < 1e-12);      // kappa^2 + 1
    CHECK(er.residual < 1e-12);
    CHECK(std::abs(eps_literal(p, mod) - er.eps) < 1e-11);
}

TEST_CASE("conjugate-symmetric pairs cancel the constraint by parity") {
    const auto mod = Modulus::from_m(0.5);
    const auto ec = compute_constants(mod);
    for (double c : {0.3, 0.8, 1.4}) {
        AlphaPair p;
        p.band = 1;
        p.alpha1 = cplx(ec.K, -c);
        p.alpha2 = cplx(ec.K, c);
        CHECK(hh_energy_and_residual(p, mod).residual < 1e-13);
    }
}

TEST_CASE("momentum at the printed special pairs") {
    const auto mod = Modulus::from_m(0.5);
    const auto ctx = make_theta_context(mod);
    const auto ep = edge_parameters(mod);
    const double K = ctx.ec.K, Kb = ctx.ec.Kbar;

    AlphaPair bottom1{cplx(K, -ep.c0), cplx(K, ep.c0), 1, {-ep.c0, ep.c0}};
    CHECK(std::abs(momentum_from_alphas(bottom1, ctx).k - 0.0) < 1e-12);

    AlphaPair top1{cplx(K, -Kb), cplx(K, 2.0 * Kb), 1, {-Kb, 2.0 * Kb}};
    CHECK(std::abs(momentum_from_alphas(top1, ctx).k - PI / (2.0 * K)) < 1e-12);

    AlphaPair bottom3{cplx(-ep.x0, 0.0), cplx(ep.x0, 0.0), 3, {ep.x0, 0.0}};
    CHECK(std::abs(momentum_from_alphas(bottom3, ctx).k - PI / K) < 1e-12);

    // off-locus pair: reality violated
    AlphaPair bad{cplx(0.3, 0.2), cplx(0.9, 0.4), 1, {}};
    CHECK_THROWS_AS(momentum_from_alphas(bad, ctx), domain_error);
}

TEST_CASE("band 1 trajectory: endpoints, interior residuals and closed-form energy") {
    const auto mod = Modulus::from_m(0.5);
    const double K = compute_constants(mod).K;
    const auto be = band_edges(mod);

    const auto b0 = band1_point(0.0, mod);
    CHECK(b0.k == 0.0);
    CHECK(std::abs(b0.eps - be.eps[0]) < 1e-14);
    const auto b1 = band1_point(1.0, mod);
    CHECK(std::abs(b1.k - PI / (2.0 * K)) < 1e-14);
    CHECK(std::abs(b1.eps - be.eps[1]) < 1e-14);

    for (double t : {0.15, 0.5, 0.85}) {
        const auto bp = band1_point(t, mod);
        CHECK(bp.constraint_residual < 1e-10);
        CHECK(bp.reality_residual < 1e-10);
        CHECK(bp.k >= 0.0);
        CHECK(bp.k <= PI / (2.0 * K) + 1e-12);
        CHECK(bp.eps > be.eps[0]);
        CHECK(bp.eps < be.eps[1]);
        CHECK(std::abs(eps_literal(bp.pair, mod) - bp.eps) < 1e-10);
    }
}

TEST_CASE("band 2 trajectory: endpoints and interior") {
    const auto mod = Modulus::from_m(0.5);
    const double K = compute_constants(mod).K;
    const auto be = band_edges(mod);

    const auto b0 = band2_point(0.0, mod);
    CHECK(std::abs(b0.k - PI / (2.0 * K)) < 1e-14);
    CHECK(std::abs(b0.eps - be.eps[2]) < 1e-14);
    const auto b1 = band2_point(1.0, mod);
    CHECK(std::abs(b1.k - PI / K) < 1e-14);
    CHECK(std::abs(b1.eps - be.eps[3]) < 1e-14);

    for (double t : {0.2, 0.5, 0.8}) {
        const auto bp = band2_point(t, mod);
        CHECK(bp.constraint_residual < 1e-10);
        CHECK(bp.reality_residual < 1e-10);
        CHECK(bp.k >= PI / (2.0 * K) - 1e-12);
        CHECK(bp.k <= PI / K + 1e-12);
        CHECK(std::abs(eps_literal(bp.pair, mod) - bp.eps) < 1e-10);
    }
}

TEST_CASE("band 3 trajectory: bottom, interior, pole approach") {
    const auto mod = Modulus::from_m(0.5);
    const double K = compute_constants(mod).K;
    const auto be = band_edges(mod);

    const auto b0 = band3_point(0.0, mod);
    CHECK(std::abs(b0.k - PI / K) < 1e-14);
    CHECK(std::abs(b0.eps - be.eps[4]) < 1e-14);

    double prev_k = b0.k, prev_eps = b0.eps;
    for (double t : {0.2, 0.5, 0.8}) {
        const auto bp = band3_point(t, mod);
        CHECK(bp.constraint_residual < 1e-10);
        CHECK(bp.reality_residual < 1e-10);
        CHECK(bp.k > prev_k);
        CHECK(bp.eps > prev_eps);
        prev_k = bp.k;
        prev_eps = bp.eps;
        CHECK(std::abs(eps_literal(bp.pair, mod) - bp.eps) < 1e-9);
    }
    CHECK_THROWS_AS(band3_point(1.0 - 1e-12, mod), pole_error);
}

TEST_CASE("closed segment-energy forms match the constraint energy") {
    // reduced band-1/band-2 expressions in the trajectory coordinates
    for (double m : {0.2, 0.5, 0.8}) {
        const auto mod = Modulus::from_m(m);
        const auto comp = mod.complementary();
        const double kb2 = 1.0 - m;
        for (double t : {0.25, 0.6, 0.9}) {
            const auto p1 = band1_point(t, mod);
            const auto a = jacobi_real(p1.pair.coords[0], comp);
            const auto b = jacobi_real(p1.pair.coords[1], comp);
            const double e18 = 2.0 * m + kb2 * a.cn * a.cn / (a.dn * a.dn) +
                               kb2 * b.cn * b.cn / (b.dn * b.dn) -
                               2.0 * kb2 * kb2 * a.sn * a.sn * a.cn * a.cn /
                                   std::pow(a.dn, 4) * b.dn * b.dn;
            CHECK(std::abs(p1.eps - e18) < 1e-10);

            const auto p2 = band2_point(t, mod);
            const auto c = jacobi_real(p2.pair.coords[0], comp);
            const auto d = jacobi_real(p2.pair.coords[1], comp);
            const double e25 = 2.0 * m + kb2 * c.cn * c.cn / (c.dn * c.dn) +
                               d.dn * d.dn / (d.cn * d.cn) +
                               2.0 * c.dn * c.dn * d.dn * d.dn / std::pow(d.cn, 4);
            CHECK(std::abs(p2.eps - e25) < 1e-10);
        }
    }
}

TEST_CASE("oracle equivalence at interior trajectory points") {
    for (double m : {0.5, 0.8}) {
        const auto mod = Modulus::from_m(m);
        const double twoK = 2.0 * agm_K(m);
        for (int band = 1; band <= 3; ++band) {
            for (double t : {0.3, 0.7}) {
                const auto bp = band == 1   ? band1_point(t, mod)
                                : band == 2 ? band2_point(t, mod)
                                            : band3_point(t, mod);
                const double half = 0.5 * integrate_monodromy(bp.eps, mod, 2).discriminant();
                CHECK(std::abs(half - std::cos(twoK * bp.k)) < 1e-6);
            }
        }
    }
}

TEST_CASE("Bloch wavefunction: quasi-periodicity and edge parity") {
    const auto mod = Modulus::from_m(0.5);
    const auto ctx = make_theta_context(mod);
    const double twoK = 2.0 * ctx.ec.K;

    const auto check_bloch = [&](const BandPoint& bp, double tol) {
        for (double x : {0.17, 0.8, 1.9, 2.6}) {
            const cplx lhs = bloch_psi(x + twoK, bp.pair, ctx);
            const cplx rhs = std::exp(cplx(0.0, -twoK * bp.k)) * bloch_psi(x, bp.pair, ctx);
            CHECK(std::abs(lhs - rhs) < tol * std::abs(rhs));
        }
    };

    const auto bottom = band1_point(0.0, mod);
    check_bloch(bottom, 1e-9);  // periodic edge: exp factor is +1
    for (double x : {0.3, 1.1}) {
        CHECK(std::abs(bloch_psi(x + twoK, bottom.pair, ctx) - bloch_psi(x, bottom.pair, ctx)) <
              1e-9 * std::abs(bloch_psi(x, bottom.pair, ctx)));
    }
    const auto top = band1_point(1.0, mod);
    for (double x : {0.3, 1.1}) {
        CHECK(std::abs(bloch_psi(x + twoK, top.pair, ctx) + bloch_psi(x, top.pair, ctx)) <
              1e-9 * std::abs(bloch_psi(x, top.pair, ctx)));
    }
    check_bloch(band2_point(0.45, mod), 1e-9);
    check_bloch(band3_point(0.35, mod), 1e-9);
}

TEST_CASE("Bloch wavefunction solves the differential equation") {
    const auto mod = Modulus::from_m(0.5);
    const auto ctx = make_theta_context(mod);
    const auto bp = band2_point(0.5, mod);
    const double h = 1e-3;
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double x = 0.1 + (2.0 * ctx.ec.K - 0.2) * i / 60.0;
        const cplx pm2 = bloch_psi(x - 2 * h, bp.pair, ctx);
        const cplx pm1 = bloch_psi(x - h, bp.pair, ctx);
        const cplx p0 = bloch_psi(x, bp.pair, ctx);
        const cplx pp1 = bloch_psi(x + h, bp.pair, ctx);
        const cplx pp2 = bloch_psi(x + 2 * h, bp.pair, ctx);
        const cplx d2 = (-pm2 + 16.0 * pm1 - 30.0 * p0 + 16.0 * pp1 - pp2) / (12.0 * h * h);
        const double sn = jacobi_real(x, mod).sn;
        const cplx resid = d2 + (bp.eps - 6.0 * mod.m * sn * sn) * p0;
        worst = std::max(worst, std::abs(resid));
        scale = std::max(scale, std::abs(p0));
    }
    CHECK(worst / scale < 1e-6);
}

TEST_CASE("bloch_psi rejects off-trajectory pairs") {
    const auto mod = Modulus::from_m(0.5);
    const auto ctx = make_theta_context(mod);
    AlphaPair bad{cplx(0.4, 0.3), cplx(1.2, 0.5), 1, {}};
    CHECK_THROWS_AS(bloch_psi(0.5, bad, ctx), domain_error);
}

TEST_CASE("dispersion: endpoint table, zones and flattening") {
    const auto mod = Modulus::from_m(0.5);
    const double K = agm_K(0.5);
    const auto d2 = dispersion(mod, 1, 2, 0.0);
    REQUIRE(d2.samples.size() == 2);
    CHECK(d2.samples[0].k == 0.0);
    CHECK(std::abs(d2.samples[0].eps - (3.0 - std::sqrt(3.0))) < 1e-12);
    CHECK(std::abs(d2.samples[1].k - PI / (2.0 * K)) < 1e-14);
    CHECK(std::abs(d2.samples[1].eps - 1.5) < 1e-12);

    // near-free second band is wide
    const auto near_free = band_edges(Modulus::from_m(0.01));
    CHECK(std::abs(near_free.width2() - 2.97) < 1e-12);

    const auto wide = dispersion(Modulus::from_m(0.5), 1, 16, 0.0);
    const auto flat = dispersion(Modulus::from_m(0.99), 1, 16, 0.0);
    const auto spread = [](const Dispersion& d) {
        return d.samples.back().eps - d.samples.front().eps;
    };
    CHECK(spread(flat) < spread(wide));

    // band 3 k-cap honoured
    const double k_max = 4.0 * PI / K;
    const auto d3 = dispersion(mod, 3, 9, k_max);
    CHECK(d3.samples.back().k <= k_max + 1e-9);
    CHECK(d3.samples.back().k > 0.98 * k_max);
    for (const auto& s : d3.samples) CHECK(s.k >= PI / K - 1e-12);

    CHECK_THROWS_AS(dispersion(mod, 1, 1, 0.0), domain_error);
    CHECK_THROWS_AS(dispersion(mod, 3, 4, 0.1), domain_error);
}

TEST_CASE("uniform-k resampling preserves the trajectory") {
    const auto mod = Modulus::from_m(0.5);
    const auto d = dispersion(mod, 2, 9, 0.0);
    const auto u = resample_uniform_k(d, 7, mod);
    REQUIRE(u.samples.size() == 7);
    const double dk = u.samples[1].k - u.samples[0].k;
    for (size_t i = 1; i < u.samples.size(); ++i) {
        CHECK(std::abs(u.samples[i].k - u.samples[i - 1].k - dk) < 1e-6);
        CHECK(u.samples[i].constraint_residual < 1e-10);
    }
}
