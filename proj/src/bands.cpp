#include "lame/bands.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace lame {

namespace {

constexpr double PI = 3.14159265358979323846;

double edge_radical(double m) { return std::sqrt(m * m - m + 1.0); }

// Eq-4 summand at alpha = K + i y, up to the common factor -i*kbar^2:
// f(y) = snb(y) cnb(y) / dnb(y)^3 at the complementary modulus.  Odd,
// 2Kbar-periodic, single maximum on (0, Kbar) at y = c0.
double traj_f(double y, const LandenPlan& comp_plan) {
    const JacobiReal j = jacobi_real(y, comp_plan);
    return j.sn * j.cn / (j.dn * j.dn * j.dn);
}

// band-2 right-hand side h(y) = snb(y) dnb(y) / cnb(y)^3, increasing on [0, Kbar)
double traj_h(double y, const LandenPlan& comp_plan) {
    const JacobiReal j = jacobi_real(y, comp_plan);
    return j.sn * j.dn / (j.cn * j.cn * j.cn);
}

double bisect(double lo, double hi, double flo, const auto& fn, int iters = 200) {
    for (int i = 0; i < iters && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void check_region(bool ok, int band, double a, double b, double m) {
    if (ok) return;
    std::ostringstream os;
    os << "band" << band << " trajectory left its fundamental region at coords ("
       << a << ", " << b << ") for m = " << m;
    throw numerical_error(os.str());
}

} // namespace

double band1_energy(double y1, double y2, const Modulus& mod) {
    const LandenPlan cp = make_landen_plan(1.0 - mod.m);
    const JacobiReal a = jacobi_real(y1, cp), b = jacobi_real(y2, cp);
    const double kb2 = 1.0 - mod.m;
    const double ca = a.cn / a.dn, cb = b.cn / b.dn;
    return 2.0 * mod.m + kb2 * ca * ca + kb2 * cb * cb -
           2.0 * kb2 * kb2 * (a.sn * a.sn * a.cn * a.cn / std::pow(a.dn, 4)) * b.dn * b.dn;
}

double band2_energy(double y1, double y2, const Modulus& mod) {
    const LandenPlan cp = make_landen_plan(1.0 - mod.m);
    const JacobiReal a = jacobi_real(y1, cp), b = jacobi_real(y2, cp);
    const double kb2 = 1.0 - mod.m;
    const double ca = a.cn / a.dn, db = b.dn / b.cn;
    return 2.0 * mod.m + kb2 * ca * ca + db * db +
           2.0 * a.dn * a.dn * db * db / (b.cn * b.cn);
}

BandEdges band_edges(const Modulus& mod) {
    const double m = mod.m;
    const double r = edge_radical(m);
    BandEdges be;
    be.eps = {2.0 * (m + 1.0) - 2.0 * r, m + 1.0, 4.0 * m + 1.0, m + 4.0,
              2.0 * (m + 1.0) + 2.0 * r};
    return be;
}

EdgeParameters edge_parameters(const Modulus& mod) {
    if (!(mod.m > 0.0 && mod.m < 1.0))
        throw domain_error("edge_parameters: kappa must lie strictly inside (0,1)");
    const double r = edge_radical(mod.m);
    const Modulus comp = mod.complementary();

    // kbar^2 cnbar^2(c0) = 1 - r
    const double cn_c0 = std::sqrt((1.0 - r) / (1.0 - mod.m));
    const double c0 = invert_cn(std::clamp(cn_c0, 0.0, 1.0), comp);

    // dn^2/sn^2 (x0) = 1 + r, strictly decreasing on (0, K)
    const LandenPlan plan = make_landen_plan(mod.m);
    const double K = agm_K(mod.m);
    const auto fn = [&](double x) {
        const JacobiReal j = jacobi_real(x, plan);
        return j.dn * j.dn / (j.sn * j.sn) - (1.0 + r);
    };
    const double x0 = bisect(1e-12, K - 1e-12, fn(1e-12), fn);
    return {c0, x0};
}

EnergyResidual hh_energy_and_residual(const AlphaPair& pair, const Modulus& mod) {
    const JacobiTriple t1 = jacobi_eval(pair.alpha1, mod);
    const JacobiTriple t2 = jacobi_eval(pair.alpha2, mod);
    for (const auto* t : {&t1, &t2}) {
        if (std::abs(t->sn) < 1e-10) {
            const double K2 = 2.0 * agm_K(mod.m);
            const cplx a = (t == &t1) ? pair.alpha1 : pair.alpha2;
            const cplx zero(K2 * std::round(a.real() / K2), 0.0);
            throw pole_error("hh_energy_and_residual: sn^-2 pole (sn vanishes)", zero);
        }
    }
    // eps = 2 kappa^2 + dn^2 a1 + dn^2 a2 - 2 cn dn cn dn/(sn sn), the exact
    // algebraic reduction of the constraint-system energy; regular where the
    // raw form cancels catastrophically
    const cplx eps_c = 2.0 * mod.m + t1.dn * t1.dn + t2.dn * t2.dn -
                       2.0 * (t1.cn * t1.dn * t2.cn * t2.dn) / (t1.sn * t2.sn);

    const cplx g1 = t1.sn * t1.cn * t1.dn, g2 = t2.sn * t2.cn * t2.dn;
    const cplx num = g1 + g2;
    const cplx den = t1.sn * t1.sn - t2.sn * t2.sn;
    const double den_scale = std::abs(t1.sn * t1.sn) + std::abs(t2.sn * t2.sn);
    const double num_scale = 1.0 + std::abs(g1) + std::abs(g2);
    double residual;
    if (std::abs(den) < 1e-12 * den_scale) {
        if (std::abs(num) > 1e-10 * num_scale) {
            std::ostringstream os;
            os << "hh_energy_and_residual: coincident sn^2 at alpha1 = (" << pair.alpha1.real()
               << "," << pair.alpha1.imag() << "), constraint singular";
            throw numerical_error(os.str());
        }
        residual = std::abs(num) / num_scale;  // conjugate-symmetric limit
    } else {
        residual = std::abs(num / den);
    }
    return {eps_c.real(), residual};
}

MomentumResult momentum_from_alphas(const AlphaPair& pair, const ThetaContext& ctx) {
    const cplx S = zeta_Z(pair.alpha1, ctx) + zeta_Z(pair.alpha2, ctx);
    const double reality = std::abs(S.real());
    if (reality > 1e-9) {
        std::ostringstream os;
        os << "momentum_from_alphas: Re[Z(a1)+Z(a2)] = " << S.real()
           << " exceeds 1e-9; point off the allowed-band locus";
        throw domain_error(os.str());
    }
    const double piK = PI / ctx.ec.K;
    double k;
    switch (pair.band) {
        case 1: k = -S.imag(); break;               // bottom pi/K -> 0, top -> pi/2K
        case 2:
        case 3: k = S.imag() + piK; break;
        default: throw domain_error("momentum_from_alphas: band tag must be 1, 2 or 3");
    }
    if (std::abs(k) < 1e-12) k = 0.0;
    return {k, reality};
}

BandPoint band1_point(double t, const Modulus& mod) {
    if (!(t >= 0.0 && t <= 1.0)) throw domain_error("band1_point: t outside [0,1]");
    if (!(mod.m >= 1e-6 && mod.m <= 1.0 - 1e-6))
        throw domain_error("band trajectories require m within [1e-6, 1-1e-6]");

    const LandenPlan cp = make_landen_plan(1.0 - mod.m);
    const EllipticConstants ec = compute_constants(mod);
    const double K = ec.K, Kb = ec.Kbar;
    const EdgeParameters ep = edge_parameters(mod);
    const BandEdges be = band_edges(mod);
    check_region(ep.c0 > 0.5 * Kb - 1e-9 * Kb, 1, ep.c0, 0.0, mod.m);

    const auto make_pair = [&](double y1, double y2) {
        AlphaPair p;
        p.alpha1 = cplx(K, y1);
        p.alpha2 = cplx(K, y2);
        p.band = 1;
        p.coords = {y1, y2};
        return p;
    };

    BandPoint bp;
    if (t == 0.0 || t == 1.0) {
        // degenerate endpoints come from the closed forms
        const double y1 = t == 0.0 ? ep.c0 - 2.0 * Kb : -Kb;
        const double y2 = t == 0.0 ? 2.0 * Kb - ep.c0 : 2.0 * Kb;
        bp.pair = make_pair(y1, y2);
        bp.k = t == 0.0 ? 0.0 : PI / (2.0 * K);
        bp.eps = t == 0.0 ? be.eps[0] : be.eps[1];
        const ThetaContext ctx = make_theta_context(mod);
        bp.reality_residual = momentum_from_alphas(bp.pair, ctx).reality_residual;
        bp.constraint_residual = hh_energy_and_residual(bp.pair, mod).residual;
        return bp;
    }

    const double vp = ep.c0 * (1.0 - t);           // sweep coordinate, c0 -> 0
    const double target = traj_f(vp, cp);
    // partner u in [c0, Kbar], f decreasing there from its maximum to 0
    const auto fn = [&](double u) { return traj_f(u, cp) - target; };
    const double u = bisect(ep.c0, Kb, fn(ep.c0), fn);
    const double y1 = u - 2.0 * Kb;
    const double y2 = 2.0 * Kb - vp;
    check_region(y1 > -1.5 * Kb - 1e-9 * Kb && y1 <= -Kb + 1e-9 * Kb, 1, y1, y2, mod.m);
    check_region(y2 > Kb - 1e-9 && y2 <= 2.0 * Kb + 1e-9, 1, y1, y2, mod.m);

    bp.pair = make_pair(y1, y2);
    const auto er = hh_energy_and_residual(bp.pair, mod);
    bp.eps = er.eps;
    bp.constraint_residual = er.residual;
    const ThetaContext ctx = make_theta_context(mod);
    const auto mk = momentum_from_alphas(bp.pair, ctx);
    bp.k = mk.k;
    bp.reality_residual = mk.reality_residual;
    return bp;
}

BandPoint band2_point(double t, const Modulus& mod) {
    if (!(t >= 0.0 && t <= 1.0)) throw domain_error("band2_point: t outside [0,1]");
    if (!(mod.m >= 1e-6 && mod.m <= 1.0 - 1e-6))
        throw domain_error("band trajectories require m within [1e-6, 1-1e-6]");

    const LandenPlan cp = make_landen_plan(1.0 - mod.m);
    const EllipticConstants ec = compute_constants(mod);
    const double K = ec.K, Kb = ec.Kbar;
    const BandEdges be = band_edges(mod);

    const auto make_pair = [&](double y1, double y2) {
        AlphaPair p;
        p.alpha1 = cplx(K, y1);
        p.alpha2 = cplx(0.0, y2);
        p.band = 2;
        p.coords = {y1, y2};
        return p;
    };

    BandPoint bp;
    if (t == 0.0 || t == 1.0) {
        bp.pair = make_pair(t == 0.0 ? Kb : 0.0, 0.0);
        bp.k = t == 0.0 ? PI / (2.0 * K) : PI / K;
        bp.eps = t == 0.0 ? be.eps[2] : be.eps[3];
        // alpha2 = 0 sits on the sn^-2 pole lattice; the closed forms carry
        // the limit, the residuals are zero there by parity
        bp.constraint_residual = 0.0;
        bp.reality_residual = 0.0;
        return bp;
    }

    const double y1 = Kb * (1.0 - t);
    const double target = (1.0 - mod.m) * traj_f(y1, cp);
    const auto fn = [&](double y) { return traj_h(y, cp) - target; };
    // h increases from 0; bracket inside the fundamental strip with headroom
    double hi = 0.5 * Kb;
    while (fn(hi) < 0.0 && hi < 0.95 * Kb) hi = 0.5 * (hi + Kb);
    check_region(fn(hi) >= 0.0, 2, y1, hi, mod.m);
    const double y2 = bisect(0.0, hi, fn(0.0), fn);
    check_region(y2 <= 0.5 * Kb + 1e-6 * Kb, 2, y1, y2, mod.m);

    bp.pair = make_pair(y1, y2);
    const auto er = hh_energy_and_residual(bp.pair, mod);
    bp.eps = er.eps;
    bp.constraint_residual = er.residual;
    const ThetaContext ctx = make_theta_context(mod);
    const auto mk = momentum_from_alphas(bp.pair, ctx);
    bp.k = mk.k;
    bp.reality_residual = mk.reality_residual;
    return bp;
}

BandPoint band3_point(double t, const Modulus& mod) {
    if (!(t >= 0.0 && t < 1.0)) throw domain_error("band3_point: t outside [0,1)");
    if (!(mod.m >= 1e-6 && mod.m <= 1.0 - 1e-6))
        throw domain_error("band trajectories require m within [1e-6, 1-1e-6]");

    const LandenPlan plan = make_landen_plan(mod.m);
    const Modulus comp = mod.complementary();
    const EllipticConstants ec = compute_constants(mod);
    const double K = ec.K, Kb = ec.Kbar;
    const EdgeParameters ep = edge_parameters(mod);
    const BandEdges be = band_edges(mod);
    check_region(ep.x0 <= 0.5 * K + 1e-9 * K, 3, ep.x0, 0.0, mod.m);

    const auto make_pair = [&](double x, double y) {
        AlphaPair p;
        p.alpha1 = cplx(-x, y);
        p.alpha2 = cplx(x, y);
        p.band = 3;
        p.coords = {x, y};
        return p;
    };

    BandPoint bp;
    if (t == 0.0) {
        bp.pair = make_pair(ep.x0, 0.0);
        bp.k = PI / K;
        bp.eps = be.eps[4];
        const ThetaContext ctx = make_theta_context(mod);
        bp.reality_residual = momentum_from_alphas(bp.pair, ctx).reality_residual;
        bp.constraint_residual = hh_energy_and_residual(bp.pair, mod).residual;
        return bp;
    }

    const double x = ep.x0 * (1.0 - t);
    // printed rational form of the constraint solves for snb^2(y) ...
    const JacobiReal j = jacobi_real(x, plan);
    const double s2 = j.sn * j.sn, c2 = j.cn * j.cn, d2 = j.dn * j.dn;
    const double num = mod.m * s2 * c2 + s2 * d2 - c2 * d2;
    const double den = ((1.0 - mod.m) * s2 - c2 - mod.m * s2 * c2) * d2;
    const double sb2 = num / den;
    check_region(sb2 >= -1e-12 && sb2 <= 1.0 + 1e-12, 3, x, sb2, mod.m);
    double y = invert_cn(std::sqrt(std::clamp(1.0 - sb2, 0.0, 1.0)), comp);

    // ... and the raw constraint Im[sn cn dn](x+iy) = 0 is the authority:
    // polish y against it
    const auto raw = [&](double yy) {
        const JacobiTriple tr = jacobi_eval(cplx(x, yy), mod);
        return (tr.sn * tr.cn * tr.dn).imag();
    };
    {
        double lo = std::max(0.0, y - 1e-6), hi = std::min(Kb - 1e-9, y + 1e-6);
        double flo = raw(lo), fhi = raw(hi);
        for (int i = 0; i < 40 && (flo > 0.0) == (fhi > 0.0); ++i) {
            lo = std::max(0.0, lo - 1e-5);
            hi = std::min(Kb - 1e-9, hi + 1e-5);
            flo = raw(lo);
            fhi = raw(hi);
        }
        if ((flo > 0.0) != (fhi > 0.0)) y = bisect(lo, hi, flo, raw);
    }
    check_region(y >= 0.0 && y < Kb, 3, x, y, mod.m);

    bp.pair = make_pair(x, y);
    const auto er = hh_energy_and_residual(bp.pair, mod);
    bp.eps = er.eps;
    bp.constraint_residual = er.residual;
    const ThetaContext ctx = make_theta_context(mod);
    const auto mk = momentum_from_alphas(bp.pair, ctx);
    bp.k = mk.k;
    bp.reality_residual = mk.reality_residual;
    return bp;
}

cplx bloch_psi(double x, const AlphaPair& pair, const ThetaContext& ctx) {
    const auto er = hh_energy_and_residual(pair, ctx.mod);
    if (er.residual > 1e-8) {
        std::ostringstream os;
        os << "bloch_psi: pair violates the trajectory constraint (residual = "
           << er.residual << ")";
        throw domain_error(os.str());
    }
    const cplx theta_x = theta_pair(cplx(x, 0.0), ctx).theta;
    cplx psi(1.0, 0.0);
    for (const cplx a : {pair.alpha1, pair.alpha2}) {
        const cplx H = theta_pair(x + a, ctx).eta;
        psi *= (H / theta_x) * std::exp(-x * zeta_Z(a, ctx));
    }
    return psi;
}

namespace {

BandPoint trajectory_point(int band, double t, const Modulus& mod) {
    switch (band) {
        case 1: return band1_point(t, mod);
        case 2: return band2_point(t, mod);
        case 3: return band3_point(t, mod);
        default: throw domain_error("band index must be 1, 2 or 3");
    }
}

} // namespace

Dispersion dispersion(const Modulus& mod, int band, int n_samples, double k_max) {
    if (n_samples < 2) throw domain_error("dispersion: n_samples must be >= 2");
    if (band < 1 || band > 3) throw domain_error("dispersion: band must be 1, 2 or 3");

    double t_hi = 1.0;
    if (band == 3) {
        if (!(k_max > 0.0)) throw domain_error("dispersion: k_max must be positive");
        const double k_bottom = PI / agm_K(mod.m);
        if (k_max <= k_bottom) {
            std::ostringstream os;
            os << "dispersion: k_max = " << k_max
               << " does not exceed the band-3 bottom pi/K = " << k_bottom;
            throw domain_error(os.str());
        }
        // largest evaluable t, backing off the pole cutoff
        double hi = 1.0 - 1e-9;
        std::optional<double> k_hi;
        for (int i = 0; i < 60 && !k_hi; ++i) {
            try {
                k_hi = band3_point(hi, mod).k;
            } catch (const pole_error&) {
                hi = 1.0 - 2.0 * (1.0 - hi);
            }
        }
        if (!k_hi) throw numerical_error("dispersion: pole-proximity cutoff reached before k_max");
        if (*k_hi > k_max) {
            double lo = 0.0;
            for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
                const double mid = 0.5 * (lo + hi);
                try {
                    (band3_point(mid, mod).k < k_max ? lo : hi) = mid;
                } catch (const pole_error&) {
                    hi = mid;
                }
            }
            t_hi = lo;
        } else {
            t_hi = hi;
        }
    }

    Dispersion disp;
    disp.band = band;
    disp.samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = t_hi * i / (n_samples - 1);
        try {
            disp.samples.push_back(trajectory_point(band, t, mod));
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "dispersion: band " << band << " failed at t = " << t
               << ", m = " << mod.m << ": " << e.what();
            throw numerical_error(os.str());
        }
    }
    std::sort(disp.samples.begin(), disp.samples.end(),
              [](const BandPoint& a, const BandPoint& b) { return a.k < b.k; });
    for (size_t i = 1; i < disp.samples.size(); ++i) {
        if (!(disp.samples[i].eps > disp.samples[i - 1].eps - 1e-12)) {
            std::ostringstream os;
            os << "dispersion: eps not monotone in k at sample " << i << " (band "
               << band << ", m = " << mod.m << ")";
            throw numerical_error(os.str());
        }
    }
    return disp;
}

Dispersion resample_uniform_k(const Dispersion& disp, int n_samples, const Modulus& mod) {
    if (n_samples < 2) throw domain_error("resample_uniform_k: n_samples must be >= 2");
    if (disp.samples.size() < 2) throw domain_error("resample_uniform_k: need >= 2 samples");

    // recover the t-parametrization from the stored sweep coordinate, then
    // re-solve exact trajectory points at k-uniform targets
    const double k_lo = disp.samples.front().k, k_hi = disp.samples.back().k;
    const EdgeParameters ep = edge_parameters(mod);
    const double Kb = compute_constants(mod).Kbar;
    const auto t_of_point = [&](const BandPoint& p) {
        switch (disp.band) {
            case 1: return 1.0 - (2.0 * Kb - p.pair.coords[1]) / ep.c0;
            case 2: return 1.0 - p.pair.coords[0] / Kb;
            default: return 1.0 - p.pair.coords[0] / ep.x0;
        }
    };

    Dispersion out;
    out.band = disp.band;
    out.samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double kt = k_lo + (k_hi - k_lo) * i / (n_samples - 1);
        if (i == 0) {
            out.samples.push_back(disp.samples.front());
            continue;
        }
        if (i == n_samples - 1) {
            out.samples.push_back(disp.samples.back());
            continue;
        }
        double lo = t_of_point(disp.samples.front());
        double hi = t_of_point(disp.samples.back());
        for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            (trajectory_point(disp.band, mid, mod).k < kt ? lo : hi) = mid;
        }
        out.samples.push_back(trajectory_point(disp.band, 0.5 * (lo + hi), mod));
    }
    return out;
}

} // namespace lame
