#include "kerrsim/bootstrap.hpp"

#include <cmath>

#include "kerrsim/errors.hpp"
#include "kerrsim/parallel.hpp"

namespace kerrsim {

Eigen::Matrix2d cov_rtheta(double r, double theta) {
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
    S(0, 0) = 0.5 * std::exp(-2.0 * r);
    S(1, 1) = 0.5 * std::exp(2.0 * r);
    return R * S * R.transpose();
}

void uv_from_cov(const Eigen::Matrix2d& cov, double& u, double& v) {
    u = 1.0 / (2.0 * cov(1, 1));
    v = cov(0, 1) / cov(1, 1);
}

EffectiveAncilla effective_ancilla_limit(const BootstrapParams& p) {
    EffectiveAncilla e;
    e.u = std::exp(-2.0 * p.r);
    e.v = p.kappa * p.kappa;
    return e;
}

EffectiveAncilla effective_ancilla(const BootstrapParams& p) {
    // Joint covariance of (q1, p1, q2, p2); both modes start pure Gaussian.
    Eigen::Matrix4d V = Eigen::Matrix4d::Zero();
    V.topLeftCorner<2, 2>() = cov_rtheta(p.r_prime, p.theta_prime);
    V.bottomRightCorner<2, 2>() = cov_rtheta(p.r, 0.0);

    // exp(i kappa p1 p2): q1 -> q1 - kappa p2, q2 -> q2 - kappa p1.
    Eigen::Matrix4d S = Eigen::Matrix4d::Identity();
    S(0, 3) = -p.kappa;
    S(2, 1) = -p.kappa;
    V = S * V * S.transpose();

    // Condition on a q1 homodyne: Schur complement against V(0,0).
    Eigen::Vector2d c(V(2, 0), V(3, 0));
    Eigen::Matrix2d post = V.bottomRightCorner<2, 2>() - c * c.transpose() / V(0, 0);

    EffectiveAncilla e;
    uv_from_cov(post, e.u, e.v);
    e.mean_per_outcome = c / V(0, 0);
    return e;
}

double gaussian_fidelity(double u1, double v1, double u2, double v2) {
    // psi_i(p) = (2 u_i / pi)^{1/4} exp(-p^2 (u_i - i v_i));
    // |<psi1|psi2>|^2 = 2 sqrt(u1 u2) / |w1* + w2|, w_i = u_i - i v_i.
    Complex w1(u1, v1), w2(u2, -v2);
    return 2.0 * std::sqrt(u1 * u2) / std::abs(w1 + w2);
}

ChannelFamily kappa_family(const BootstrapParams& p, const CorrectionMode& corr) {
    if (corr.kind == CorrectionMode::Kind::Exact)
        throw ConfigError("Exact correction is not an estimation mode; use None or Linear");
    ChannelFamily ch;
    const double u0 = std::exp(-2.0 * p.r);
    const double k0 = p.kappa;
    ch.uv = [u0, k0](double delta) {
        double k = k0 + delta;
        return std::pair<double, double>(u0, k * k);
    };
    ch.du = 0.0;
    ch.dv = 2.0 * k0;
    if (corr.kind == CorrectionMode::Kind::Linear) {
        // First-order correction at the bias removes the linear-in-n phase;
        // its parameter derivative cancels Im(2 g m dF) n in the generator.
        Complex w(u0, -k0 * k0);
        Complex dF = -Complex(ch.du, -ch.dv) / (4.0 * w * w);
        ch.comp_coeff = -2.0 * p.g * dF.imag();
    }
    return ch;
}

QfiPoint kappa_qfi(const BootstrapParams& p, const FockVector& probe,
                   const CorrectionMode& corr, const QfiOptions& opt) {
    Eigen::VectorXd pops = probe.amplitudes.cwiseAbs2();
    return generalized_qfi_core(pops, p.g, kappa_family(p, corr), opt);
}

QfiReport kappa_sweep(const Eigen::VectorXd& n_bar, const BootstrapParams& p,
                      const CorrectionMode& corr, int n_trunc, const QfiOptions& opt,
                      int threads) {
    const int N = static_cast<int>(n_bar.size());
    QfiReport rep;
    rep.n_bar = n_bar;
    rep.f_classical.resize(N);
    rep.f_quantum_avg.resize(N);
    rep.f_total.resize(N);
    rep.meta.r = p.r;
    rep.meta.theta0 = p.kappa;  // bias point of the estimated parameter
    rep.meta.g = p.g;
    rep.meta.correction = correction_name(corr);
    rep.meta.parameter = "kappa";
    rep.meta.n_trunc = n_trunc;

    ChannelFamily ch = kappa_family(p, corr);
    auto [u0, v0] = ch.uv(0.0);
    double zeta0 = p.g * p.g * u0 / (4.0 * (u0 * u0 + v0 * v0));
    double s = std::sqrt(p.g * p.g / (4.0 * zeta0));

    parallel_for(N, threads, [&](int i) {
        FockVector in = coherent_state(std::sqrt(n_bar(i)), n_trunc);
        Eigen::VectorXd pops = in.amplitudes.cwiseAbs2();
        QfiOptions o = opt;
        if (!o.m_window)
            o.m_window = std::pair<double, double>(-opt.support_k * s,
                                                   p.g * n_trunc + opt.support_k * s);
        QfiPoint pt = generalized_qfi_core(pops, p.g, ch, o);
        rep.f_classical(i) = pt.f_classical;
        rep.f_quantum_avg(i) = pt.f_quantum_avg;
        rep.f_total(i) = pt.f_total;
    });
    rep.meta.m_lo = -opt.support_k * s;
    rep.meta.m_hi = p.g * n_trunc + opt.support_k * s;
    rep.eta = scaling_exponent(rep.n_bar, rep.f_total);
    return rep;
}

}  // namespace kerrsim
