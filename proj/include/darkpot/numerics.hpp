// Small numerical kernels: adaptive Gauss-Kronrod quadrature, Brent root
// bracketing/refinement, and golden-section maximization of a unimodal
// bracket.  All are plain function templates over a callable.

#ifndef DARKPOT_NUMERICS_HPP
#define DARKPOT_NUMERICS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace darkpot {

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
inline constexpr double gk_xk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F&& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    const double fc = f(c);
    double resk = gk_wk[7] * fc;
    double resg = gk_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = hl * gk_xk[j];
        const double fsum = f(c - x) + f(c + x);
        resk += gk_wk[j] * fsum;
        if (j % 2 == 1) resg += gk_wg[j / 2] * fsum;
    }
    result = resk * hl;
    err = std::fabs((resk - resg) * hl);
}

} // namespace detail

/// Adaptive bisection quadrature of f over [a, b].
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                          double abs_tol = 1e-300, int max_intervals = 20000) {
    struct Seg {
        double a, b, val, err;
    };
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    std::vector<Seg> segs{{a, b, v0, e0}};
    double total = v0, toterr = e0;
    while (toterr > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (static_cast<int>(segs.size()) >= max_intervals)
            throw std::runtime_error("integrate_adaptive: interval limit reached");
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[worst].err) worst = i;
        Seg s = segs[worst];
        const double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) break; // interval at roundoff limit
        Seg l{s.a, m, 0, 0}, r{m, s.b, 0, 0};
        detail::gk15(f, l.a, l.b, l.val, l.err);
        detail::gk15(f, r.a, r.b, r.val, r.err);
        total += l.val + r.val - s.val;
        toterr += l.err + r.err - s.err;
        segs[worst] = l;
        segs.push_back(r);
    }
    return total;
}

/// Brent root of f on a bracketing interval [a, b] (f(a) f(b) <= 0).
template <class F>
double brent_root(F&& f, double a, double b, double tol, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("brent_root: endpoints do not bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

struct BracketMax {
    double x;
    double value;
};

/// Golden-section maximization on [a, b]; assumes a single interior maximum
/// (or a maximum at an endpoint, which the shrinking bracket also finds).
template <class F>
BracketMax golden_section_max(F&& f, double a, double b, double x_rel_tol = 1e-6,
                              int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    for (int it = 0; it < max_iter && (b - a) > x_rel_tol * scale; ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return (f1 > f2) ? BracketMax{x1, f1} : BracketMax{x2, f2};
}

} // namespace darkpot

#endif
