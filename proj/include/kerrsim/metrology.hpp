#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "kerrsim/protocol.hpp"
#include "kerrsim/quadrature.hpp"

namespace kerrsim {

// One-parameter family of Gaussian channels seen by the probe, differentiated
// at the working point. Covers both theta estimation and the bootstrap's
// displacement (kappa) estimation.
//   uv(delta):   Siegel point at parameter offset delta from the working point
//   du, dv:      analytic derivatives at delta = 0
//   comp_coeff:  real coefficient kc such that the applied correction phase
//                contributes i * kc * m * n to the generator derivative
struct ChannelFamily {
    std::function<std::pair<double, double>(double)> uv;
    double du = 0.0;
    double dv = 0.0;
    double comp_coeff = 0.0;
};

struct QfiOptions {
    QuadratureOptions quad;
    double support_k = 8.0;
    std::optional<std::pair<double, double>> m_window;  // overrides derived support
    double fd_step = 1e-6;  // central-difference step for dP/dtheta
};

struct QfiPoint {
    double f_classical = 0.0;
    double f_quantum_avg = 0.0;
    double f_total = 0.0;
};

// Core engine on populations |c_n|^2 of the input state.
double qfi_pure_core(const Eigen::VectorXd& pops, double g, const ChannelFamily& ch,
                     double m);
QfiPoint generalized_qfi_core(const Eigen::VectorXd& pops, double g,
                              const ChannelFamily& ch, const QfiOptions& opt = {});

// Theta-estimation channel family at working point theta0 for the given
// correction mode (None or Linear(theta0) only).
ChannelFamily theta_family(double r, double theta0, double g, const CorrectionMode& corr);

// Per-outcome pure-state QFI for estimating dtheta at dtheta = 0.
double qfi_pure_conditioned(const FockVector& input, double r, double theta0, double g,
                            double m, const CorrectionMode& corr);

// Outcome-averaged generalized QFI: classical FI of P(m) plus the P-weighted
// average of the per-outcome quantum term.
QfiPoint generalized_qfi(const FockVector& input, double r, double theta0, double g,
                         const CorrectionMode& corr, const QfiOptions& opt = {});

struct Baselines {
    double sql = 0.0;         // 4 nbar
    double heisenberg = 0.0;  // 8 (nbar^2 + nbar), squeezed vacuum
    double kerr = 0.0;        // 4 (4 nbar^3 + 6 nbar^2 + nbar)
};

Baselines baselines(double n_bar);

// Local log-log slope eta = d ln F / d ln n_bar, central differences with
// one-sided ends. Requires a positive F on a grid of >= 3 points.
Eigen::VectorXd scaling_exponent(const Eigen::VectorXd& n_bar, const Eigen::VectorXd& f);

double cramer_rao(double f_total, double nu);

struct QfiReport {
    Eigen::VectorXd n_bar;
    Eigen::VectorXd f_classical;
    Eigen::VectorXd f_quantum_avg;
    Eigen::VectorXd f_total;
    Eigen::VectorXd eta;
    struct Meta {
        double r = 0.0;
        double theta0 = 0.0;
        double g = 0.0;
        std::string correction;
        std::string parameter = "theta";
        int n_trunc = 0;
        double m_lo = 0.0;
        double m_hi = 0.0;
    } meta;
};

// Sweep over a log-spaced n_bar grid with coherent input |alpha|, alpha =
// sqrt(n_bar). Points run in parallel; output order is fixed by the grid.
QfiReport qfi_sweep(const Eigen::VectorXd& n_bar, double r, double theta0, double g,
                    const CorrectionMode& corr, int n_trunc, const QfiOptions& opt = {},
                    int threads = 1);

// Log-spaced grid helper, `per_decade` points per decade (>= 2 total points).
Eigen::VectorXd log_grid(double lo, double hi, int per_decade = 12);

std::string correction_name(const CorrectionMode& corr);

}  // namespace kerrsim
