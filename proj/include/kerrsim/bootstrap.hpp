#pragma once

#include <Eigen/Dense>

#include "kerrsim/metrology.hpp"

namespace kerrsim {

// Two-stage displacement-sensing circuit: a squeezed ancilla A1 is coupled to
// A2 through exp(i kappa p1 p2) and measured in position, leaving A2 as the
// effective ancilla for the standard engine with kappa the unknown.
struct BootstrapParams {
    double kappa = 0.0;
    double r_prime = 6.0;          // A1 squeezing
    double theta_prime = M_PI / 4.0;
    double r = 0.0;                // A2 squeezing
    double g = 1.0;                // stage-2 coupling
};

struct EffectiveAncilla {
    double u = 0.0;
    double v = 0.0;
    // Posterior mean of (q2, p2) per unit measured q1 offset; the protocol
    // corrects this displacement before stage 2.
    Eigen::Vector2d mean_per_outcome = Eigen::Vector2d::Zero();
};

// Covariance matrix (vacuum = I/2) of the rotated squeezed state R(theta)S(r)|0>.
Eigen::Matrix2d cov_rtheta(double r, double theta);

// Siegel point of a pure Gaussian state from its covariance matrix.
void uv_from_cov(const Eigen::Matrix2d& cov, double& u, double& v);

// Large-r' analytic limit: momentum shear of strength kappa^2 on S(r)|0>.
EffectiveAncilla effective_ancilla_limit(const BootstrapParams& p);

// Finite-r' path: exact two-mode Gaussian conditioning through the gate and
// the A1 position measurement.
EffectiveAncilla effective_ancilla(const BootstrapParams& p);

// Overlap fidelity of two pure Gaussian states given as Siegel points (zero
// means).
double gaussian_fidelity(double u1, double v1, double u2, double v2);

// Channel family for estimating kappa at bias point p.kappa.
ChannelFamily kappa_family(const BootstrapParams& p, const CorrectionMode& corr);

QfiPoint kappa_qfi(const BootstrapParams& p, const FockVector& probe,
                   const CorrectionMode& corr, const QfiOptions& opt = {});

QfiReport kappa_sweep(const Eigen::VectorXd& n_bar, const BootstrapParams& p,
                      const CorrectionMode& corr, int n_trunc,
                      const QfiOptions& opt = {}, int threads = 1);

}  // namespace kerrsim
