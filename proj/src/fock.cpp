#include "kerrsim/fock.hpp"

#include <cmath>

#include "kerrsim/errors.hpp"
#include "kerrsim/parallel.hpp"

namespace kerrsim {

namespace {

void check_finite(const Eigen::VectorXcd& c, const char* where) {
    if (!c.allFinite())
        throw NonFiniteAmplitude(std::string("non-finite amplitude in ") + where);
}

}  // namespace

void fix_global_phase(FockVector& psi) {
    for (Eigen::Index n = 0; n < psi.amplitudes.size(); ++n) {
        double mag = std::abs(psi.amplitudes(n));
        if (mag > 1e-14) {
            Complex phase = psi.amplitudes(n) / mag;
            psi.amplitudes /= phase;
            psi.amplitudes(n) = Complex(mag, 0.0);
            return;
        }
    }
}

void normalize(FockVector& psi) {
    double n = psi.amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw NonFiniteAmplitude("cannot normalize zero or non-finite vector");
    psi.amplitudes /= n;
    fix_global_phase(psi);
    psi.normalized = true;
}

FockVector coherent_state(Complex alpha, int n_trunc, double tail_tol) {
    if (n_trunc < 0) throw DimensionMismatch("n_trunc must be >= 0");
    const double a2 = std::norm(alpha);
    const double amag = std::abs(alpha);
    const double aphase = (amag > 0.0) ? std::arg(alpha) : 0.0;

    FockVector psi;
    psi.amplitudes.resize(n_trunc + 1);
    for (int n = 0; n <= n_trunc; ++n) {
        double logmag = -0.5 * a2 - 0.5 * std::lgamma(n + 1.0);
        if (n > 0) logmag += n * std::log(amag > 0.0 ? amag : 1.0);
        double mag = (amag == 0.0 && n > 0) ? 0.0 : std::exp(logmag);
        psi.amplitudes(n) = std::polar(mag, aphase * n);
    }
    // Untruncated Poisson weight at the last retained level.
    double tail = std::norm(psi.amplitudes(n_trunc));
    if (tail > tail_tol)
        throw TruncationTooSmall("coherent state tail weight " + std::to_string(tail) +
                                 " exceeds tolerance at n_trunc=" + std::to_string(n_trunc));
    check_finite(psi.amplitudes, "coherent_state");
    normalize(psi);
    return psi;
}

FockVector squeezed_vacuum(double r, int n_trunc, double tail_tol) {
    if (n_trunc < 0) throw DimensionMismatch("n_trunc must be >= 0");
    FockVector psi;
    psi.amplitudes = Eigen::VectorXcd::Zero(n_trunc + 1);
    const double t = std::tanh(r);
    const double log_cosh = std::log(std::cosh(r));
    double last = 0.0;
    for (int k = 0; 2 * k <= n_trunc; ++k) {
        // c_{2k} = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r))
        double logmag = -0.5 * log_cosh + k * std::log(std::abs(t) > 0 ? std::abs(t) : 1.0) +
                        0.5 * std::lgamma(2.0 * k + 1.0) - k * std::log(2.0) -
                        std::lgamma(k + 1.0);
        double mag = (k > 0 && t == 0.0) ? 0.0 : std::exp(logmag);
        double sign = (t > 0.0 && k % 2 == 1) ? -1.0 : 1.0;
        psi.amplitudes(2 * k) = sign * mag;
        last = mag * mag;
    }
    if (last > tail_tol)
        throw TruncationTooSmall("squeezed vacuum tail weight " + std::to_string(last) +
                                 " exceeds tolerance at n_trunc=" + std::to_string(n_trunc));
    check_finite(psi.amplitudes, "squeezed_vacuum");
    normalize(psi);
    return psi;
}

NumberDiagonalResult apply_number_diagonal(const FockVector& psi,
                                           const std::function<Complex(int)>& f) {
    NumberDiagonalResult out;
    out.state.amplitudes.resize(psi.amplitudes.size());
    for (Eigen::Index n = 0; n < psi.amplitudes.size(); ++n)
        out.state.amplitudes(n) = psi.amplitudes(n) * std::exp(f(static_cast<int>(n)));
    check_finite(out.state.amplitudes, "apply_number_diagonal");
    out.norm = out.state.amplitudes.norm();
    normalize(out.state);
    return out;
}

double fidelity(const FockVector& a, const FockVector& b) {
    if (a.amplitudes.size() != b.amplitudes.size())
        throw DimensionMismatch("fidelity: dimension mismatch");
    return std::norm(a.amplitudes.dot(b.amplitudes));
}

double mean_photon_number(const FockVector& psi) {
    double s = 0.0, w = 0.0;
    for (Eigen::Index n = 0; n < psi.amplitudes.size(); ++n) {
        double p = std::norm(psi.amplitudes(n));
        s += p * static_cast<double>(n);
        w += p;
    }
    return s / w;
}

double wigner_point(const FockVector& psi, double q, double p) {
    const Eigen::VectorXcd& c = psi.amplitudes;
    const int N = static_cast<int>(c.size()) - 1;
    const Complex z(q / std::sqrt(2.0), p / std::sqrt(2.0));
    const double x = 4.0 * std::norm(z);          // argument of the Laguerre polynomials
    const double zmag = std::abs(2.0 * z);
    const Complex zphase = (zmag > 0.0) ? (2.0 * z / zmag) : Complex(1.0, 0.0);

    // W = (1/pi) e^{-2|z|^2} sum_{m,n} c_m^* c_n (-1)^n sqrt(n!/m!) (2z)^{m-n} L_n^{m-n}(4|z|^2)
    // evaluated for m >= n with the m < n half folded in via conjugate symmetry.
    double acc = 0.0;
    std::vector<double> lg(N + 1);
    for (int n = 0; n <= N; ++n) lg[n] = std::lgamma(n + 1.0);

    for (int a = 0; a <= N; ++a) {
        // Laguerre recurrence in n at fixed order a:
        // L_0^a = 1, L_1^a = 1 + a - x,
        // (n+1) L_{n+1}^a = (2n + 1 + a - x) L_n^a - (n + a) L_{n-1}^a
        double Lnm1 = 0.0, Ln = 1.0;
        double logza = (a > 0) ? a * std::log(zmag) : 0.0;
        if (a > 0 && zmag == 0.0) continue;
        Complex phase_a = std::pow(zphase, a);
        for (int n = 0; n + a <= N; ++n) {
            int m = n + a;
            Complex cc = std::conj(c(m)) * c(n);
            if (cc != Complex(0.0, 0.0)) {
                double logpref = 0.5 * (lg[n] - lg[m]) + logza - 2.0 * std::norm(z);
                double pref = std::exp(logpref);
                double term = ((n % 2) ? -1.0 : 1.0) * pref * Ln;
                double contrib = (cc * phase_a).real() * term;
                acc += (a == 0) ? contrib : 2.0 * contrib;
            }
            double Lnp1 = ((2.0 * n + 1.0 + a - x) * Ln - (n + a) * Lnm1) / (n + 1.0);
            Lnm1 = Ln;
            Ln = Lnp1;
        }
    }
    double w = acc / M_PI;
    if (!std::isfinite(w)) throw NonFiniteAmplitude("wigner_point produced non-finite value");
    return w;
}

WignerGrid wigner(const FockVector& psi, double q_min, double q_max, double p_min,
                  double p_max, int resolution, int threads) {
    if (resolution < 2) throw DimensionMismatch("wigner: resolution must be >= 2");
    WignerGrid g;
    g.q = Eigen::VectorXd::LinSpaced(resolution, q_min, q_max);
    g.p = Eigen::VectorXd::LinSpaced(resolution, p_min, p_max);
    g.w.resize(resolution, resolution);
    parallel_for(resolution, threads, [&](int i) {
        for (int j = 0; j < resolution; ++j) g.w(i, j) = wigner_point(psi, g.q(i), g.p(j));
    });
    return g;
}

}  // namespace kerrsim
