#pragma once

#include <random>
#include <utility>

#include "kerrsim/fock.hpp"
#include "kerrsim/gaussian_map.hpp"

namespace kerrsim {

// Phase correction applied after the homodyne outcome is known.
//   None:   leave the m-dependent rotation in place
//   Linear: exp[i (g m / 2)(cot(theta0) - (1 + cot^2(theta0)) dtheta) n], the
//           first-order-in-dtheta correction an experimenter biased at theta0
//           would apply; dtheta = theta_true - theta0
//   Exact:  removes the linear-in-n phase of the channel exactly
struct CorrectionMode {
    enum class Kind { None, Linear, Exact };
    Kind kind = Kind::Exact;
    double theta0 = 0.0;  // only meaningful for Linear

    static CorrectionMode none() { return {Kind::None, 0.0}; }
    static CorrectionMode linear(double theta0) { return {Kind::Linear, theta0}; }
    static CorrectionMode exact() { return {Kind::Exact, 0.0}; }
};

struct ConditionedState {
    FockVector state;      // normalized post-measurement probe state
    double prob_density;   // P(m), independent of the correction mode
};

// Probe state conditioned on homodyne outcome m, with the chosen correction.
ConditionedState conditioned_state(const FockVector& input, const AncillaGaussian& anc,
                                   double g, double m, const CorrectionMode& corr);

// Exact outcome density: a Gaussian mixture with one component per occupied
// Fock level, P(m) = sum_n |c_n|^2 N(m; g n, g^2 / (4 zeta)).
struct OutcomePdf {
    Eigen::VectorXd weights;   // |c_n|^2
    double g = 0.0;
    double zeta = 0.0;

    double variance() const { return g * g / (4.0 * zeta); }
    double operator()(double m) const;
    double mean() const;
    double second_moment() const;
    // [g n_lo - k s, g n_hi + k s] covering all but a negligible tail.
    std::pair<double, double> support(double k = 8.0) const;
    double sample(std::mt19937_64& rng) const;
};

OutcomePdf outcome_pdf(const FockVector& input, const AncillaGaussian& anc, double g);

}  // namespace kerrsim
