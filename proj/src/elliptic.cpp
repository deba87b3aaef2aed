#include "lame/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace lame {

namespace {

constexpr double PI = 3.14159265358979323846;
constexpr double EPS = std::numeric_limits<double>::epsilon();

// Thresholds below which the trigonometric / hyperbolic limits are used
// directly (first-order corrections keep full double accuracy there).
constexpr double M_SMALL = 1e-12;
constexpr double M_LARGE = 1.0 - 1e-12;

} // namespace

Modulus Modulus::from_m(double m) {
    if (!(m >= 0.0 && m <= 1.0)) {
        std::ostringstream os;
        os << "modulus parameter out of range: m = " << m << " not in [0,1]";
        throw domain_error(os.str());
    }
    Modulus mod;
    mod.m = m;
    mod.kappa = std::sqrt(m);
    mod.kappa_bar = std::sqrt(1.0 - m);
    return mod;
}

Modulus Modulus::from_kappa(double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) {
        std::ostringstream os;
        os << "modulus out of range: kappa = " << kappa << " not in [0,1]";
        throw domain_error(os.str());
    }
    Modulus mod;
    mod.kappa = kappa;
    mod.m = kappa * kappa;
    mod.kappa_bar = std::sqrt(std::max(0.0, 1.0 - mod.m));
    return mod;
}

double agm_K(double m) {
    if (m < 0.0 || m > 1.0) throw domain_error("agm_K: m outside [0,1]");
    if (m == 1.0) return std::numeric_limits<double>::infinity();
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    for (int i = 0; i < 64 && std::abs(a - b) > 4.0 * EPS * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return PI / (2.0 * a);
}

double agm_E(double m) {
    if (m < 0.0 || m > 1.0) throw domain_error("agm_E: m outside [0,1]");
    if (m == 0.0) return PI / 2.0;
    if (m == 1.0) return 1.0;
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double c2_sum = 0.5 * m;    // 2^{-1} c_0^2 with c_0 = kappa
    double pow2 = 1.0;
    for (int i = 0; i < 64 && std::abs(a - b) > 4.0 * EPS * a; ++i) {
        const double c = 0.5 * (a - b);
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        c2_sum += pow2 * c * c;
        pow2 *= 2.0;
    }
    return (PI / (2.0 * a)) * (1.0 - c2_sum);
}

EllipticConstants compute_constants(const Modulus& mod) {
    EllipticConstants ec;
    ec.K = agm_K(mod.m);
    ec.Kbar = agm_K(1.0 - mod.m);
    ec.E = agm_E(mod.m);
    ec.Ebar = agm_E(1.0 - mod.m);
    if (mod.m == 1.0) {
        ec.singular = true;   // K diverges; callers must handle explicitly
        ec.q = 1.0;
        return ec;
    }
    ec.q = std::exp(-PI * ec.Kbar / ec.K);
    return ec;
}

namespace {

// Trig limit with first-order correction, valid for m <= M_SMALL.
JacobiReal jacobi_small_m(double u, double m) {
    const double s = std::sin(u), c = std::cos(u);
    const double corr = 0.25 * m * (u - s * c);
    return {s - corr * c, c + corr * s, 1.0 - 0.5 * m * s * s};
}

// Hyperbolic limit with first-order correction, valid for m >= M_LARGE.
JacobiReal jacobi_large_m(double u, double m) {
    const double m1 = 1.0 - m;
    const double ch = std::cosh(u), th = std::tanh(u);
    const double sech = 1.0 / ch;
    const double w = 0.25 * m1 * (std::sinh(u) * ch - u);
    return {th + w * sech * sech,
            sech - th * sech * w,
            sech + th * sech * w};
}

} // namespace

LandenPlan make_landen_plan(double m) {
    if (m < 0.0 || m > 1.0) throw domain_error("make_landen_plan: m outside [0,1]");
    LandenPlan plan;
    plan.m = m;
    if (m <= M_SMALL) {
        plan.mode = LandenPlan::Mode::trig;
        plan.m_tail = m;
        return plan;
    }
    if (m >= M_LARGE) {
        plan.mode = LandenPlan::Mode::hyperbolic;
        return plan;
    }
    plan.mode = LandenPlan::Mode::general;
    plan.K4 = 4.0 * agm_K(m);
    // descend mu = (1-k')/(1+k') until the residual parameter is negligible
    double k2 = m;
    while (k2 > M_SMALL && plan.levels < 16) {
        const double kp = std::sqrt(1.0 - k2);
        const double mun = (1.0 - kp) / (1.0 + kp);
        plan.mu[plan.levels++] = mun;
        plan.scale *= 1.0 + mun;
        k2 = mun * mun;
    }
    plan.m_tail = k2;
    return plan;
}

// Exact transformation algebra per level:
//   sn(u,k) = (1+mu) s / (1 + mu s^2)
//   cn(u,k) = c d / (1 + mu s^2)
//   dn(u,k) = (1 - mu s^2) / (1 + mu s^2)
// with s,c,d the triple at (u/(1+mu), mu).
JacobiReal jacobi_real(double u, const LandenPlan& plan) {
    if (plan.mode == LandenPlan::Mode::trig) return jacobi_small_m(u, plan.m_tail);
    if (plan.mode == LandenPlan::Mode::hyperbolic) return jacobi_large_m(u, plan.m);
    u -= plan.K4 * std::floor(u / plan.K4);
    JacobiReal j = jacobi_small_m(u / plan.scale, plan.m_tail);
    for (int i = plan.levels - 1; i >= 0; --i) {
        const double t = plan.mu[i] * j.sn * j.sn;
        const double den = 1.0 / (1.0 + t);
        j = {(1.0 + plan.mu[i]) * j.sn * den, j.cn * j.dn * den, (1.0 - t) * den};
    }
    return j;
}

JacobiReal jacobi_real(double u, const Modulus& mod) {
    if (!std::isfinite(u)) throw domain_error("jacobi_real: non-finite argument");
    return jacobi_real(u, make_landen_plan(mod.m));
}

cplx nearest_jacobi_pole(cplx z, const Modulus& mod) {
    // poles of the triple sit at 2mK + (2n+1) i Kbar
    const double K = agm_K(mod.m);
    const double Kbar = agm_K(1.0 - mod.m);
    double px = 0.0, py = 0.0;
    if (std::isfinite(K)) px = 2.0 * K * std::round(z.real() / (2.0 * K));
    if (std::isfinite(Kbar)) {
        const double n = std::round((z.imag() / Kbar - 1.0) / 2.0);
        py = (2.0 * n + 1.0) * Kbar;
    } else {
        py = z.imag() >= 0.0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    }
    return {px, py};
}

JacobiTriple jacobi_eval(cplx z, const Modulus& mod, double pole_tol) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw domain_error("jacobi_eval: non-finite argument");

    const cplx pole = nearest_jacobi_pole(z, mod);
    if (std::isfinite(pole.real()) && std::isfinite(pole.imag()) &&
        std::abs(z - pole) < pole_tol) {
        std::ostringstream os;
        os << "jacobi_eval: argument within " << pole_tol
           << " of lattice pole (" << pole.real() << "," << pole.imag() << ")";
        throw pole_error(os.str(), pole);
    }

    if (z.imag() == 0.0) {
        const JacobiReal j = jacobi_real(z.real(), mod);
        return {j.sn, j.cn, j.dn};
    }

    const Modulus comp = mod.complementary();
    const JacobiReal jx = jacobi_real(z.real(), mod);
    const JacobiReal jy = jacobi_real(z.imag(), comp);
    const double s = jx.sn, c = jx.cn, d = jx.dn;
    const double sb = jy.sn, cb = jy.cn, db = jy.dn;
    const double den = cb * cb + mod.m * s * s * sb * sb;
    if (den == 0.0)
        throw pole_error("jacobi_eval: exact lattice pole", pole);
    const cplx i(0.0, 1.0);
    JacobiTriple t;
    t.sn = (s * db + i * (c * d * sb * cb)) / den;
    t.cn = (c * cb - i * (s * d * sb * db)) / den;
    t.dn = (d * cb * db - i * (mod.m * s * c * sb)) / den;
    return t;
}

double invert_cn(double c, const Modulus& mod) {
    if (!(c >= 0.0 && c <= 1.0)) {
        std::ostringstream os;
        os << "invert_cn: value " << c << " outside [0,1]";
        throw domain_error(os.str());
    }
    const double K = agm_K(mod.m);
    if (c == 1.0) return 0.0;
    if (c == 0.0) return K;
    double lo = 0.0, hi = K;  // cn decreases from 1 to 0 on [0,K]
    for (int it = 0; it < 200 && hi - lo > EPS * K; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (jacobi_real(mid, mod).cn > c)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace lame
