#include "lame/theta.hpp"

#include <cmath>
#include <sstream>

namespace lame {

namespace {

constexpr double PI = 3.14159265358979323846;

// theta_4 and its first two v-derivatives as one pass:
//   theta4(v) = 1 + 2 sum (-1)^n q^{n^2} cos(2nv)
// Terms grow until n ~ |Im v| K/(pi Kbar) before the Gaussian decay wins, so
// convergence is tested only past that ridge.
struct Theta4Eval {
    cplx f, fp, fpp;
};

Theta4Eval theta4_all(cplx v, const ThetaContext& ctx) {
    if (!(ctx.ec.q > 0.0) || ctx.ec.q >= 1.0) {
        if (ctx.ec.q == 0.0) return {cplx(1.0), cplx(0.0), cplx(0.0)};
        throw numerical_error("theta series: nome q >= 1, series diverges");
    }
    const double a = PI * ctx.ec.Kbar / ctx.ec.K;     // q = e^{-a}
    const int ridge = static_cast<int>(std::ceil(std::abs(v.imag()) / a)) + 2;
    cplx f(1.0), fp(0.0), fpp(0.0);
    double sign = -1.0;
    for (int n = 1; n <= ctx.max_terms; ++n) {
        const double qn = std::exp(-a * n * n);
        const cplx c = std::cos(2.0 * n * v), s = std::sin(2.0 * n * v);
        const cplx term = 2.0 * sign * qn * c;
        f += term;
        fp += -4.0 * sign * qn * n * s;
        fpp += -8.0 * sign * qn * n * n * c;
        sign = -sign;
        if (n >= ridge && std::abs(term) < ctx.tol * (std::abs(f) + 1.0)) {
            return {f, fp, fpp};
        }
    }
    throw numerical_error("theta series: truncation cap reached without convergence");
}

cplx theta1_eval(cplx v, const ThetaContext& ctx) {
    if (ctx.ec.q >= 1.0)
        throw numerical_error("theta series: nome q >= 1, series diverges");
    if (ctx.ec.q == 0.0) return std::sin(v);
    const double a = PI * ctx.ec.Kbar / ctx.ec.K;
    const int ridge = static_cast<int>(std::ceil(std::abs(v.imag()) / a)) + 2;
    cplx f(0.0);
    double sign = 1.0;
    for (int n = 0; n <= ctx.max_terms; ++n) {
        const double h = n + 0.5;
        const double qn = std::exp(-a * h * h);
        const cplx term = 2.0 * sign * qn * std::sin((2.0 * n + 1.0) * v);
        f += term;
        sign = -sign;
        if (n >= ridge && std::abs(term) < ctx.tol * (std::abs(f) + 1.0)) return f;
    }
    throw numerical_error("theta series: truncation cap reached without convergence");
}

void check_zeta_pole(cplx z, const ThetaContext& ctx, double tol = 1e-8) {
    // Z and the Theta zeros share the sn/cn/dn pole lattice
    const cplx pole = nearest_jacobi_pole(z, ctx.mod);
    if (std::isfinite(pole.real()) && std::isfinite(pole.imag()) &&
        std::abs(z - pole) < tol) {
        std::ostringstream os;
        os << "zeta_Z: argument within " << tol << " of Theta zero at ("
           << pole.real() << "," << pole.imag() << ")";
        throw pole_error(os.str(), pole);
    }
}

} // namespace

ThetaContext make_theta_context(const Modulus& mod) {
    ThetaContext ctx;
    ctx.mod = mod;
    ctx.ec = compute_constants(mod);
    if (ctx.ec.singular)
        throw domain_error("make_theta_context: kappa = 1 has no convergent nome series");
    return ctx;
}

ThetaPair theta_pair(cplx z, const ThetaContext& ctx) {
    const cplx v = PI * z / (2.0 * ctx.ec.K);
    return {theta4_all(v, ctx).f, theta1_eval(v, ctx)};
}

cplx zeta_Z(cplx z, const ThetaContext& ctx) {
    check_zeta_pole(z, ctx);
    const double scale = PI / (2.0 * ctx.ec.K);
    const Theta4Eval t = theta4_all(scale * z, ctx);
    return scale * t.fp / t.f;
}

cplx zeta_Z_prime(cplx z, const ThetaContext& ctx) {
    check_zeta_pole(z, ctx);
    const double scale = PI / (2.0 * ctx.ec.K);
    const Theta4Eval t = theta4_all(scale * z, ctx);
    return scale * scale * (t.fpp * t.f - t.fp * t.fp) / (t.f * t.f);
}

RealityResiduals reality_checks(double y, double x, const ThetaContext& ctx) {
    const cplx i(0.0, 1.0);
    RealityResiduals r;
    r.r_iy = zeta_Z(i * y, ctx).real();
    r.r_K_iy = zeta_Z(ctx.ec.K + i * y, ctx).real();
    r.r_mirror = (zeta_Z(cplx(-x, y), ctx) + zeta_Z(cplx(x, y), ctx)).real();
    return r;
}

KLineZeta zeta_on_K_line(double y, const ThetaContext& ctx) {
    const cplx i(0.0, 1.0);
    KLineZeta out;
    out.direct = zeta_Z(ctx.ec.K + i * y, ctx);

    const Modulus comp = ctx.mod.complementary();
    const JacobiReal jb = jacobi_real(y, comp);
    if (std::abs(jb.cn * jb.dn) < 1e-10) {
        const cplx loc(ctx.ec.K, y >= 0.0 ? ctx.ec.Kbar : -ctx.ec.Kbar);
        throw pole_error("zeta_on_K_line: identity path singular, cnb*dnb near zero", loc);
    }
    const ThetaContext cctx = make_theta_context(comp);
    const double zbar = zeta_Z(cplx(y, 0.0), cctx).real();
    const double val = jb.dn * jb.sn / jb.cn - zbar -
                       PI * y / (2.0 * ctx.ec.K * ctx.ec.Kbar) -
                       ctx.mod.m * jb.sn / (jb.cn * jb.dn);
    out.via_identity = i * val;
    return out;
}

} // namespace lame
