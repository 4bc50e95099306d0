#include "kerrsim/ensemble.hpp"

#include <cmath>

#include "kerrsim/errors.hpp"
#include "kerrsim/gaussian_map.hpp"
#include "kerrsim/protocol.hpp"
#include "kerrsim/rng.hpp"

namespace kerrsim {

SpinOps collective_ops(double j) {
    double twoj = 2.0 * j;
    if (std::abs(twoj - std::round(twoj)) > 1e-9 || j < 0.5)
        throw ConfigError("collective_ops: 2j must be a positive integer");
    SpinOps ops;
    ops.j = j;
    int d = static_cast<int>(std::round(twoj)) + 1;
    Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(d, d);
    ops.jz = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        ops.jz(k, k) = j - k;
        // J+ |j, j-k> = sqrt(k (2j - k + 1)) |j, j-(k-1)>
        if (k >= 1) jp(k - 1, k) = std::sqrt(k * (twoj - k + 1.0));
    }
    Eigen::MatrixXcd jm = jp.adjoint();
    ops.jx = 0.5 * (jp + jm);
    ops.jy = Complex(0.0, -0.5) * (jp - jm);
    return ops;
}

SpinEnsemble css_plus_x(double j) {
    SpinEnsemble e;
    e.j = j;
    int d = static_cast<int>(std::round(2.0 * j)) + 1;
    e.state.resize(d);
    double twoj = 2.0 * j;
    for (int k = 0; k < d; ++k) {
        double logc = 0.5 * (std::lgamma(twoj + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(twoj - k + 1.0)) -
                      j * std::log(2.0);
        e.state(k) = std::exp(logc);
    }
    e.state.normalize();
    return e;
}

Eigen::MatrixXcd frame_rotation(const SpinOps& ops) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops.jy);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::polar(1.0, 0.5 * M_PI * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

WeakMeasurement weak_measure_jz(const SpinEnsemble& ens, double m, double sigma_meas) {
    if (!(sigma_meas > 0.0)) throw ConfigError("weak_measure_jz: sigma_meas must be > 0");
    WeakMeasurement out;
    out.state.j = ens.j;
    out.state.sigma_meas = sigma_meas;
    int d = static_cast<int>(ens.state.size());
    out.state.state.resize(d);
    double s2 = sigma_meas * sigma_meas;
    double pref = std::pow(2.0 * M_PI * s2, -0.25);
    for (int k = 0; k < d; ++k) {
        double mz = ens.j - k;
        out.state.state(k) = ens.state(k) * pref * std::exp(-(mz - m) * (mz - m) / (4.0 * s2));
    }
    out.prob_density = out.state.state.squaredNorm();
    out.state.state /= std::sqrt(out.prob_density);
    return out;
}

double sample_jz_outcome(const SpinEnsemble& ens, double sigma_meas,
                         std::mt19937_64& rng) {
    Eigen::VectorXd w = ens.state.cwiseAbs2();
    std::discrete_distribution<int> comp(w.data(), w.data() + w.size());
    std::normal_distribution<double> noise(0.0, sigma_meas);
    int k = comp(rng);
    return (ens.j - k) + noise(rng);
}

HpImage hp_map(const SpinEnsemble& ens, const Eigen::MatrixXcd& R, int n_trunc) {
    Eigen::VectorXcd rotated = R * ens.state;
    if (n_trunc + 1 > rotated.size())
        throw DimensionMismatch("hp_map: n_trunc exceeds spin dimension");
    HpImage img;
    img.state.amplitudes = rotated.head(n_trunc + 1);
    double kept = img.state.amplitudes.squaredNorm();
    img.leaked = 1.0 - kept;
    if (img.leaked > 1e-3)
        throw HPViolation("hp_map: leaked weight " + std::to_string(img.leaked) +
                              " beyond n_trunc=" + std::to_string(n_trunc),
                          img.leaked);
    normalize(img.state);
    return img;
}

SpinEnsemble hp_embed(const FockVector& phi, const SpinOps& ops,
                      const Eigen::MatrixXcd& R) {
    int d = ops.dim();
    if (phi.amplitudes.size() > d)
        throw DimensionMismatch("hp_embed: Fock state larger than spin space");
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(d);
    y.head(phi.amplitudes.size()) = phi.amplitudes;
    SpinEnsemble e;
    e.j = ops.j;
    e.state = R.adjoint() * y;
    return e;
}

Eigen::MatrixXcd hp_operator_image(const Eigen::MatrixXcd& O, const Eigen::MatrixXcd& R,
                                   int n_trunc) {
    Eigen::MatrixXcd lifted = R * O * R.adjoint();
    return lifted.topLeftCorner(n_trunc + 1, n_trunc + 1);
}

namespace {

int squeezed_trunc(double r, double cap) {
    double lt = 2.0 * std::log(std::tanh(std::abs(r)) + 1e-300);
    int k = static_cast<int>(std::ceil(-34.0 / lt)) + 8;  // |c_{2k}|^2 ~ tanh^{4k}
    int n = 2 * k;
    if (n > cap - 2)
        throw ConfigError("squeezed ancilla truncation exceeds spin dimension");
    return n;
}

}  // namespace

double atomic_protocol_check(double j, double sigma_meas, double g, double theta,
                             Complex alpha, std::uint64_t seed, int n_trunc) {
    double s2j = sigma_meas * sigma_meas / j;
    if (!(s2j > 0.0) || s2j >= 1.0)
        throw ConfigError("atomic_protocol_check: need 0 < sigma_meas^2 < j");
    const double r = -0.5 * std::log(s2j);
    if (n_trunc <= 0) {
        double a2 = std::norm(alpha);
        n_trunc = std::max(24, static_cast<int>(std::ceil(a2 + 10.0 * std::sqrt(a2 + 1.0))));
    }

    // Bosonic reference run.
    AncillaGaussian anc = prepare_ancilla(r, theta);
    FockVector input = coherent_state(alpha, n_trunc);
    OutcomePdf pdf = outcome_pdf(input, anc, g);
    std::mt19937_64 rng = make_rng(seed);
    double m_raw = pdf.sample(rng);

    // Snap to the spin-compatible outcome grid: the channel outcome relates to
    // the standard quadrature by m = sqrt(2) q, and q = -m_z / sqrt(j).
    const double sqj = std::sqrt(j);
    double mz = std::round(-m_raw * sqj / std::sqrt(2.0));
    mz = std::min(j, std::max(-j, mz));
    double m_snap = -std::sqrt(2.0) * mz / sqj;

    FockVector bosonic =
        conditioned_state(input, anc, g, m_snap, CorrectionMode::none()).state;

    // Spin side: embed the squeezed ancilla, rotate by theta in the HP frame,
    // couple through J_Y, read out J_Z projectively at m_z.
    SpinOps ops = collective_ops(j);
    int d = ops.dim();
    FockVector sq = squeezed_vacuum(r, squeezed_trunc(r, d), 1e-6);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops.jy);
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const Eigen::VectorXd lam = es.eigenvalues().real();

    // R^dag (phase(theta) applied in the embedded frame) then into the J_Y
    // eigenbasis: t = e^{-i pi/2 lam} V^dag y with y the phased embedding.
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(d);
    y.head(sq.amplitudes.size()) = sq.amplitudes;
    for (int k = 0; k < d; ++k) y(k) *= std::polar(1.0, theta * (j - k));
    Eigen::VectorXcd t = V.adjoint() * y;
    for (int l = 0; l < d; ++l) t(l) *= std::polar(1.0, -0.5 * M_PI * lam(l));

    int k_meas = static_cast<int>(std::round(j - mz));
    const double c_gate = g / (std::sqrt(2.0) * sqj);

    FockVector spin_out;
    spin_out.amplitudes.resize(n_trunc + 1);
    for (int n = 0; n <= n_trunc; ++n) {
        Complex A(0.0, 0.0);
        for (int l = 0; l < d; ++l)
            A += V(k_meas, l) * std::polar(1.0, -c_gate * n * lam(l)) * t(l);
        spin_out.amplitudes(n) = input.amplitudes(n) * A;
    }
    normalize(spin_out);
    return fidelity(bosonic, spin_out);
}

}  // namespace kerrsim
