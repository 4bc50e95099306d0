#pragma once

namespace kerrsim {

// Pure single-mode Gaussian ancilla S(r) then R(theta), tracked as the Siegel
// upper-half-plane point z = v + iu. The position wavefunction is
// psi(p-rep): <p|psi> proportional to exp(-p^2 (u - i v)); equivalently the
// (sigma, beta) shear picture with sigma^2 = 1/(2u), beta = -v.
struct AncillaGaussian {
    double r = 0.0;
    double theta = 0.0;
    double u = 0.0;
    double v = 0.0;

    double sigma2() const { return 1.0 / (2.0 * u); }
    double beta() const { return -v; }
};

AncillaGaussian prepare_ancilla(double r, double theta);

// Effective channel constants for coupling strength g:
//   gamma: Kerr phase per n^2 (deterministic part of the conditioned map)
//   zeta:  non-unitary decay strength per (n - m/g)^2, always > 0
//   chi:   gamma expressed through the shear picture, chi = beta g^2 / mu
//   mu:    4 (u^2 + v^2)
struct ChannelParams {
    double g = 0.0;
    double mu = 0.0;
    double gamma = 0.0;
    double zeta = 0.0;
    double chi = 0.0;
};

ChannelParams channel_params(const AncillaGaussian& anc, double g);

// Largest attainable |gamma| over theta in (0, pi/2) at fixed (r, g), and the
// angle where it is reached.
struct GammaMax {
    double value = 0.0;   // max |gamma|
    double theta = 0.0;
};

GammaMax gamma_max(double r, double g);

// Solves |gamma(r, theta, g)| = |gamma_target| on the branch theta in
// [theta_c, pi/2) where |gamma| decreases monotonically and zeta is smallest.
// Throws NoSolution (carrying gamma_max) when the target is out of reach.
double solve_theta_for_gamma(double gamma_target, double r, double g);

}  // namespace kerrsim
