#pragma once

#include <cmath>
#include <functional>

#include "kerrsim/errors.hpp"

namespace kerrsim {

struct QuadratureOptions {
    double rel_tol = 1e-5;
    double abs_tol = 1e-300;
    int initial_panels = 64;
    int max_depth = 40;
};

namespace detail {

inline double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth,
                    int max_depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || (b - a) < 1e-14 * (std::abs(a) + std::abs(b) + 1.0))
        return left + right + err / 15.0;
    if (depth >= max_depth)
        throw QuadratureNotConverged("adaptive Simpson hit max depth");
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

// Adaptive Simpson on [a, b]. The interval is first split into uniform panels
// so narrow mixture peaks are not stepped over, then each panel is refined to
// a tolerance proportional to a first-pass estimate of the total integral.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt = {}) {
    if (!(b > a)) return 0.0;
    int P = opt.initial_panels;
    double h = (b - a) / P;
    // First pass: coarse Simpson per panel to scale the tolerance.
    double coarse = 0.0;
    for (int i = 0; i < P; ++i) {
        double x0 = a + i * h;
        coarse += detail::simpson(f(x0), f(x0 + 0.5 * h), f(x0 + h), h);
    }
    double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(coarse)) / P;
    double total = 0.0;
    for (int i = 0; i < P; ++i) {
        double x0 = a + i * h, x1 = x0 + h;
        double fa = f(x0), fm = f(0.5 * (x0 + x1)), fb = f(x1);
        double whole = detail::simpson(fa, fm, fb, h);
        total += detail::adapt(f, x0, x1, fa, fm, fb, whole, tol, 0, opt.max_depth);
    }
    if (!std::isfinite(total))
        throw QuadratureNotConverged("integral evaluated to a non-finite value");
    return total;
}

}  // namespace kerrsim
