#include "kerrsim/protocol.hpp"

#include <cmath>

#include "kerrsim/errors.hpp"

namespace kerrsim {

ConditionedState conditioned_state(const FockVector& input, const AncillaGaussian& anc,
                                   double g, double m, const CorrectionMode& corr) {
    const Eigen::VectorXcd& c = input.amplitudes;
    const int N = static_cast<int>(c.size()) - 1;
    const Complex w(anc.u, -anc.v);
    const Complex F = 1.0 / (4.0 * w);
    const ChannelParams cp = channel_params(anc, g);

    // Extra linear-in-n phase from the correction unitary.
    double corr_phase = 0.0;
    switch (corr.kind) {
        case CorrectionMode::Kind::None:
            break;
        case CorrectionMode::Kind::Exact:
            // cancels Im(2 F g m) n from the expanded exponent
            corr_phase = -g * m * anc.v / (2.0 * (anc.u * anc.u + anc.v * anc.v));
            break;
        case CorrectionMode::Kind::Linear: {
            if (std::abs(std::sin(corr.theta0)) < 1e-9)
                throw ThetaNearSingular("linear correction undefined near theta0 = 0");
            double cot = 1.0 / std::tan(corr.theta0);
            double dtheta = anc.theta - corr.theta0;
            corr_phase = 0.5 * g * m * (cot - (1.0 + cot * cot) * dtheta);
            break;
        }
    }

    Eigen::VectorXcd a(N + 1);
    for (int n = 0; n <= N; ++n) {
        double d = g * n - m;
        Complex expo = -F * d * d + Complex(0.0, corr_phase * n);
        a(n) = c(n) * std::exp(expo);
    }
    if (!a.allFinite()) throw NonFiniteAmplitude("conditioned_state amplitudes not finite");

    double nrm2 = a.squaredNorm();
    double pref = std::sqrt(2.0 * cp.zeta / (M_PI * g * g));

    ConditionedState out;
    out.prob_density = pref * nrm2;
    out.state.amplitudes = std::move(a);
    normalize(out.state);
    return out;
}

double OutcomePdf::operator()(double m) const {
    const double var = variance();
    const double pref = 1.0 / std::sqrt(2.0 * M_PI * var);
    double p = 0.0;
    for (Eigen::Index n = 0; n < weights.size(); ++n) {
        double d = m - g * static_cast<double>(n);
        p += weights(n) * std::exp(-d * d / (2.0 * var));
    }
    return pref * p;
}

double OutcomePdf::mean() const {
    double s = 0.0;
    for (Eigen::Index n = 0; n < weights.size(); ++n)
        s += weights(n) * g * static_cast<double>(n);
    return s;
}

double OutcomePdf::second_moment() const {
    const double var = variance();
    double s = 0.0;
    for (Eigen::Index n = 0; n < weights.size(); ++n) {
        double c = g * static_cast<double>(n);
        s += weights(n) * (var + c * c);
    }
    return s;
}

std::pair<double, double> OutcomePdf::support(double k) const {
    const double s = std::sqrt(variance());
    Eigen::Index lo = 0, hi = weights.size() - 1;
    const double thresh = 1e-16;
    while (lo < hi && weights(lo) < thresh) ++lo;
    while (hi > lo && weights(hi) < thresh) --hi;
    return {g * static_cast<double>(lo) - k * s, g * static_cast<double>(hi) + k * s};
}

double OutcomePdf::sample(std::mt19937_64& rng) const {
    std::discrete_distribution<int> comp(weights.data(), weights.data() + weights.size());
    std::normal_distribution<double> noise(0.0, std::sqrt(variance()));
    int n = comp(rng);
    return g * n + noise(rng);
}

OutcomePdf outcome_pdf(const FockVector& input, const AncillaGaussian& anc, double g) {
    OutcomePdf pdf;
    pdf.g = g;
    pdf.zeta = channel_params(anc, g).zeta;
    pdf.weights = input.amplitudes.cwiseAbs2();
    double tot = pdf.weights.sum();
    pdf.weights /= tot;
    return pdf;
}

}  // namespace kerrsim
