#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace kerrsim {

using Complex = std::complex<double>;

// State vector in the truncated number basis {|0>, ..., |n_trunc>}.
struct FockVector {
    Eigen::VectorXcd amplitudes;
    bool normalized = false;

    int n_trunc() const { return static_cast<int>(amplitudes.size()) - 1; }
    double norm() const { return amplitudes.norm(); }
};

// Fixes the global phase so the first amplitude with |c_n| > 1e-14 is real
// and positive. Makes state comparisons and CSV output reproducible.
void fix_global_phase(FockVector& psi);

// Normalizes in place and fixes the global phase.
void normalize(FockVector& psi);

// |alpha> with Poisson weights, renormalized on the truncated space.
// Throws TruncationTooSmall if the discarded weight at n_trunc exceeds tail_tol.
FockVector coherent_state(Complex alpha, int n_trunc, double tail_tol = 1e-10);

// Squeezed vacuum S(r)|0>, squeezed in q for r > 0.
FockVector squeezed_vacuum(double r, int n_trunc, double tail_tol = 1e-10);

struct NumberDiagonalResult {
    FockVector state;   // renormalized output
    double norm;        // norm of exp(f(n)) c_n before renormalization
};

// Applies the number-diagonal operator exp(f(n)) amplitude-wise.
NumberDiagonalResult apply_number_diagonal(const FockVector& psi,
                                           const std::function<Complex(int)>& f);

// |<a|b>|^2 for normalized inputs of equal dimension.
double fidelity(const FockVector& a, const FockVector& b);

double mean_photon_number(const FockVector& psi);

struct WignerGrid {
    Eigen::VectorXd q;
    Eigen::VectorXd p;
    Eigen::MatrixXd w;  // w(i, j) = W(q(i), p(j))
};

// Wigner function with q = (a + a^dag)/sqrt(2); vacuum peaks at 1/pi and
// integral over dq dp is 1.
double wigner_point(const FockVector& psi, double q, double p);

WignerGrid wigner(const FockVector& psi, double q_min, double q_max, double p_min,
                  double p_max, int resolution, int threads = 1);

}  // namespace kerrsim
