#include "kerrsim/gaussian_map.hpp"

#include <cmath>
#include <string>

#include "kerrsim/errors.hpp"

namespace kerrsim {

AncillaGaussian prepare_ancilla(double r, double theta) {
    AncillaGaussian a;
    a.r = r;
    a.theta = theta;
    double s2 = std::sin(theta), c2 = std::cos(theta);
    double xi = std::exp(-2.0 * r) * s2 * s2 + std::exp(2.0 * r) * c2 * c2;
    a.u = 1.0 / xi;
    a.v = -std::sin(2.0 * theta) * std::sinh(2.0 * r) / xi;
    return a;
}

ChannelParams channel_params(const AncillaGaussian& anc, double g) {
    ChannelParams p;
    p.g = g;
    p.mu = 4.0 * (anc.u * anc.u + anc.v * anc.v);
    p.gamma = g * g * anc.v / p.mu;
    p.zeta = g * g * anc.u / p.mu;
    // Shear-picture route to the same Kerr strength; the printed Eq. 13/45
    // signs are inconsistent, so the sign here is fixed to match gamma.
    p.chi = -anc.beta() * g * g / p.mu;
    return p;
}

namespace {

double abs_gamma(double r, double theta, double g) {
    return std::abs(channel_params(prepare_ancilla(r, theta), g).gamma);
}

}  // namespace

GammaMax gamma_max(double r, double g) {
    // |gamma(theta)| is unimodal on (0, pi/2); golden-section search.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 1e-6, b = M_PI / 2.0 - 1e-6;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = abs_gamma(r, c, g), fd = abs_gamma(r, d, g);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = abs_gamma(r, c, g);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = abs_gamma(r, d, g);
        }
    }
    GammaMax m;
    m.theta = 0.5 * (a + b);
    m.value = abs_gamma(r, m.theta, g);
    return m;
}

double solve_theta_for_gamma(double gamma_target, double r, double g) {
    const double target = std::abs(gamma_target);
    GammaMax peak = gamma_max(r, g);
    if (target > peak.value)
        throw NoSolution("requested |gamma|=" + std::to_string(target) +
                             " exceeds gamma_max=" + std::to_string(peak.value) +
                             " at r=" + std::to_string(r),
                         peak.value);
    // On [theta_c, pi/2) |gamma| falls from the peak to 0; bracket then bisect.
    double lo = peak.theta, hi = M_PI / 2.0 - 1e-12;
    const int ngrid = 1000;
    double prev = lo;
    for (int i = 1; i <= ngrid; ++i) {
        double th = peak.theta + (hi - peak.theta) * i / ngrid;
        if (abs_gamma(r, th, g) <= target) {
            lo = prev;
            hi = th;
            break;
        }
        prev = th;
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (abs_gamma(r, mid, g) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace kerrsim
