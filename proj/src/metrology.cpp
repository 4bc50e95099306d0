#include "kerrsim/metrology.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "kerrsim/errors.hpp"
#include "kerrsim/parallel.hpp"

namespace kerrsim {

namespace {

double zeta_at(const ChannelFamily& ch, double g, double delta) {
    auto [u, v] = ch.uv(delta);
    return g * g * u / (4.0 * (u * u + v * v));
}

// P(m) of the channel family at parameter offset delta.
double density_at(const Eigen::VectorXd& pops, double g, const ChannelFamily& ch,
                  double delta, double m) {
    double zeta = zeta_at(ch, g, delta);
    double pref = std::sqrt(2.0 * zeta / (M_PI * g * g));
    double s = 0.0;
    for (Eigen::Index n = 0; n < pops.size(); ++n) {
        if (pops(n) == 0.0) continue;
        double d = g * static_cast<double>(n) - m;
        s += pops(n) * std::exp(-2.0 * zeta * d * d / (g * g));
    }
    return pref * s;
}

std::pair<double, double> derive_window(const Eigen::VectorXd& pops, double g,
                                        double zeta, double k) {
    Eigen::Index lo = 0, hi = pops.size() - 1;
    const double thresh = 1e-16;
    while (lo < hi && pops(lo) < thresh) ++lo;
    while (hi > lo && pops(hi) < thresh) --hi;
    double s = std::sqrt(g * g / (4.0 * zeta));
    return {g * static_cast<double>(lo) - k * s, g * static_cast<double>(hi) + k * s};
}

}  // namespace

double qfi_pure_core(const Eigen::VectorXd& pops, double g, const ChannelFamily& ch,
                     double m) {
    auto [u, v] = ch.uv(0.0);
    const Complex w(u, -v);
    const Complex F = 1.0 / (4.0 * w);
    const Complex dF = -Complex(ch.du, -ch.dv) / (4.0 * w * w);
    const double reF = F.real();

    const Eigen::Index N = pops.size();
    // Conditioned populations in log space to dodge underflow at large |m|.
    Eigen::VectorXd loge(N);
    double emax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < N; ++n) {
        if (pops(n) <= 0.0) {
            loge(n) = -std::numeric_limits<double>::infinity();
            continue;
        }
        double d = g * static_cast<double>(n) - m;
        loge(n) = std::log(pops(n)) - 2.0 * reF * d * d;
        emax = std::max(emax, loge(n));
    }
    if (!std::isfinite(emax)) throw NonFiniteAmplitude("qfi_pure_core: empty populations");

    double norm = 0.0;
    Complex mean(0.0, 0.0);
    double msq = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
        double p = std::exp(loge(n) - emax);
        if (p == 0.0) continue;
        double d = g * static_cast<double>(n) - m;
        Complex B = -dF * (d * d) + Complex(0.0, ch.comp_coeff * m * static_cast<double>(n));
        norm += p;
        mean += p * B;
        msq += p * std::norm(B);
    }
    mean /= norm;
    msq /= norm;
    double fq = 4.0 * (msq - std::norm(mean));
    return std::max(fq, 0.0);
}

QfiPoint generalized_qfi_core(const Eigen::VectorXd& pops, double g,
                              const ChannelFamily& ch, const QfiOptions& opt) {
    const double zeta0 = zeta_at(ch, g, 0.0);
    auto window = opt.m_window ? *opt.m_window : derive_window(pops, g, zeta0, opt.support_k);

    const double h = opt.fd_step;
    auto classical_integrand = [&](double m) {
        double p = density_at(pops, g, ch, 0.0, m);
        if (p < 1e-300) return 0.0;
        double dp = (density_at(pops, g, ch, h, m) - density_at(pops, g, ch, -h, m)) /
                    (2.0 * h);
        return dp * dp / p;
    };
    auto quantum_integrand = [&](double m) {
        double p = density_at(pops, g, ch, 0.0, m);
        if (p < 1e-300) return 0.0;
        return p * qfi_pure_core(pops, g, ch, m);
    };

    QfiPoint out;
    out.f_classical = integrate(classical_integrand, window.first, window.second, opt.quad);
    out.f_quantum_avg = integrate(quantum_integrand, window.first, window.second, opt.quad);
    out.f_total = out.f_classical + out.f_quantum_avg;
    return out;
}

ChannelFamily theta_family(double r, double theta0, double g, const CorrectionMode& corr) {
    if (theta0 < 1e-6) throw ThetaNearSingular("theta0 below 1e-6");
    if (corr.kind == CorrectionMode::Kind::Exact)
        throw ConfigError("Exact correction is not an estimation mode; use None or Linear");

    ChannelFamily ch;
    ch.uv = [r, theta0](double delta) {
        AncillaGaussian a = prepare_ancilla(r, theta0 + delta);
        return std::pair<double, double>(a.u, a.v);
    };
    AncillaGaussian a0 = prepare_ancilla(r, theta0);
    ch.du = -2.0 * a0.u * a0.v;
    ch.dv = -2.0 * std::cos(2.0 * theta0) * std::sinh(2.0 * r) * a0.u - 2.0 * a0.v * a0.v;
    if (corr.kind == CorrectionMode::Kind::Linear) {
        double cot = 1.0 / std::tan(theta0);
        ch.comp_coeff = -0.5 * g * (1.0 + cot * cot);
    }
    return ch;
}

double qfi_pure_conditioned(const FockVector& input, double r, double theta0, double g,
                            double m, const CorrectionMode& corr) {
    Eigen::VectorXd pops = input.amplitudes.cwiseAbs2();
    return qfi_pure_core(pops, g, theta_family(r, theta0, g, corr), m);
}

QfiPoint generalized_qfi(const FockVector& input, double r, double theta0, double g,
                         const CorrectionMode& corr, const QfiOptions& opt) {
    Eigen::VectorXd pops = input.amplitudes.cwiseAbs2();
    return generalized_qfi_core(pops, g, theta_family(r, theta0, g, corr), opt);
}

Baselines baselines(double n_bar) {
    Baselines b;
    b.sql = 4.0 * n_bar;
    b.heisenberg = 8.0 * (n_bar * n_bar + n_bar);
    b.kerr = 4.0 * (4.0 * n_bar * n_bar * n_bar + 6.0 * n_bar * n_bar + n_bar);
    return b;
}

Eigen::VectorXd scaling_exponent(const Eigen::VectorXd& n_bar, const Eigen::VectorXd& f) {
    const Eigen::Index N = n_bar.size();
    if (N != f.size()) throw DimensionMismatch("scaling_exponent: grid size mismatch");
    if (N < 3) throw DimensionMismatch("scaling_exponent: need >= 3 grid points");
    for (Eigen::Index i = 0; i < N; ++i)
        if (!(f(i) > 0.0))
            throw NonPositiveFI("scaling_exponent: F must be positive, got " +
                                std::to_string(f(i)) + " at n_bar=" +
                                std::to_string(n_bar(i)));
    Eigen::VectorXd lx = n_bar.array().log();
    Eigen::VectorXd ly = f.array().log();
    Eigen::VectorXd eta(N);
    eta(0) = (ly(1) - ly(0)) / (lx(1) - lx(0));
    eta(N - 1) = (ly(N - 1) - ly(N - 2)) / (lx(N - 1) - lx(N - 2));
    for (Eigen::Index i = 1; i + 1 < N; ++i)
        eta(i) = (ly(i + 1) - ly(i - 1)) / (lx(i + 1) - lx(i - 1));
    return eta;
}

double cramer_rao(double f_total, double nu) {
    if (!(f_total > 0.0)) throw NonPositiveFI("cramer_rao: F must be positive");
    if (nu < 1.0) throw ConfigError("cramer_rao: nu must be >= 1");
    return 1.0 / std::sqrt(nu * f_total);
}

QfiReport qfi_sweep(const Eigen::VectorXd& n_bar, double r, double theta0, double g,
                    const CorrectionMode& corr, int n_trunc, const QfiOptions& opt,
                    int threads) {
    const int N = static_cast<int>(n_bar.size());
    QfiReport rep;
    rep.n_bar = n_bar;
    rep.f_classical.resize(N);
    rep.f_quantum_avg.resize(N);
    rep.f_total.resize(N);
    rep.meta.r = r;
    rep.meta.theta0 = theta0;
    rep.meta.g = g;
    rep.meta.correction = correction_name(corr);
    rep.meta.n_trunc = n_trunc;

    ChannelFamily ch = theta_family(r, theta0, g, corr);
    double zeta0 = zeta_at(ch, g, 0.0);

    // Report the widest window actually used.
    std::vector<std::pair<double, double>> windows(N);
    parallel_for(N, threads, [&](int i) {
        FockVector in = coherent_state(std::sqrt(n_bar(i)), n_trunc);
        Eigen::VectorXd pops = in.amplitudes.cwiseAbs2();
        QfiOptions o = opt;
        if (!o.m_window) o.m_window = derive_window(pops, g, zeta0, opt.support_k);
        windows[i] = *o.m_window;
        QfiPoint pt = generalized_qfi_core(pops, g, ch, o);
        rep.f_classical(i) = pt.f_classical;
        rep.f_quantum_avg(i) = pt.f_quantum_avg;
        rep.f_total(i) = pt.f_total;
    });
    rep.meta.m_lo = windows[0].first;
    rep.meta.m_hi = windows[0].second;
    for (const auto& wdw : windows) {
        rep.meta.m_lo = std::min(rep.meta.m_lo, wdw.first);
        rep.meta.m_hi = std::max(rep.meta.m_hi, wdw.second);
    }
    rep.eta = scaling_exponent(rep.n_bar, rep.f_total);
    return rep;
}

Eigen::VectorXd log_grid(double lo, double hi, int per_decade) {
    if (!(hi > lo) || !(lo > 0.0)) throw ConfigError("log_grid: need 0 < lo < hi");
    int n = std::max(2, static_cast<int>(std::lround(per_decade * std::log10(hi / lo))) + 1);
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i)
        g(i) = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

std::string correction_name(const CorrectionMode& corr) {
    switch (corr.kind) {
        case CorrectionMode::Kind::None: return "none";
        case CorrectionMode::Kind::Linear: return "linear";
        case CorrectionMode::Kind::Exact: return "exact";
    }
    return "unknown";
}

}  // namespace kerrsim
