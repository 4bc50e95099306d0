#pragma once

#include <Eigen/Dense>
#include <random>

#include "kerrsim/fock.hpp"

namespace kerrsim {

// Collective spin-j operators on the (2j+1)-dimensional space, basis ordered
// by k = 0..2j with m_z = j - k (so k doubles as the Fock index under HP).
struct SpinOps {
    double j = 0.0;
    Eigen::MatrixXcd jx, jy, jz;
    int dim() const { return static_cast<int>(2 * j + 1.5); }
};

SpinOps collective_ops(double j);

struct SpinEnsemble {
    double j = 0.0;
    Eigen::VectorXcd state;
    double sigma_meas = 0.0;
};

// Spin coherent state along +X.
SpinEnsemble css_plus_x(double j);

// Frame rotation R with <R^dag J_Z R> = j on the +X coherent state; under HP,
// R^dag J_Z R maps to j - n.
Eigen::MatrixXcd frame_rotation(const SpinOps& ops);

struct WeakMeasurement {
    SpinEnsemble state;
    double prob_density = 0.0;
};

// Gaussian Kraus K_m = (2 pi sigma^2)^{-1/4} exp(-(J_Z - m)^2 / (4 sigma^2)).
WeakMeasurement weak_measure_jz(const SpinEnsemble& ens, double m, double sigma_meas);

// Draws an outcome from the exact density of the Kraus family above.
double sample_jz_outcome(const SpinEnsemble& ens, double sigma_meas,
                         std::mt19937_64& rng);

struct HpImage {
    FockVector state;
    double leaked = 0.0;  // weight beyond n_trunc in the rotated frame
};

// Holstein-Primakoff map: amplitudes of R|psi> at k = 0..n_trunc become Fock
// amplitudes. Throws HPViolation if the leaked weight exceeds 1e-3.
HpImage hp_map(const SpinEnsemble& ens, const Eigen::MatrixXcd& R, int n_trunc);

// Inverse embedding R^dag E |phi>.
SpinEnsemble hp_embed(const FockVector& phi, const SpinOps& ops,
                      const Eigen::MatrixXcd& R);

// Fock-space image of the lab operator O on embedded states: the top-left
// block of R O R^dag.
Eigen::MatrixXcd hp_operator_image(const Eigen::MatrixXcd& O, const Eigen::MatrixXcd& R,
                                   int n_trunc);

// Runs Stage II-III on the spin side (frame rotation by theta, J_Y-generated
// coupling, projective J_Z readout) against the bosonic protocol at matched
// parameters and the same snapped outcome; returns the state fidelity.
// sigma_meas fixes the matched squeezing through e^{-2r} = sigma_meas^2 / j.
double atomic_protocol_check(double j, double sigma_meas, double g, double theta,
                             Complex alpha, std::uint64_t seed, int n_trunc = 0);

}  // namespace kerrsim
