#pragma once

#include <cstdint>
#include <vector>

#include "kerrsim/protocol.hpp"

namespace kerrsim {

struct PrepTarget {
    enum class Kind { Cat, Compass };
    Kind kind = Kind::Cat;
    Complex alpha;

    // |gamma| to dial in: pi/2 for cat, pi/4 for compass.
    double gamma_magnitude() const;
};

// e^{-i gamma n^2} |alpha>, built in Fock space.
FockVector target_state(const PrepTarget& target, double gamma, int n_trunc);

struct PrepRun {
    FockVector state;
    double m = 0.0;
    double f_m = 0.0;        // fidelity to the target
    double theta_star = 0.0;
    double gamma = 0.0;      // signed gamma(theta_star) actually realized
    double zeta = 0.0;
};

// One shot of the protocol at theta* = solve_theta_for_gamma(...), exact
// correction, fidelity against e^{-i gamma(theta*) n^2}|alpha>.
PrepRun prepare_once(Complex alpha, double r, double g, PrepTarget::Kind kind,
                     std::uint64_t seed, int n_trunc = 0);

struct PrepReport {
    std::vector<double> m;
    std::vector<double> f;
    double f_avg = 0.0;
    double f_se = 0.0;           // Monte-Carlo standard error of f_avg
    double zeta = 0.0;
    double asymptote = 0.0;      // 1 - zeta |alpha|^2
    double theta_star = 0.0;
    double gamma = 0.0;
    double m_mean_closed = 0.0;  // g |alpha|^2
    double m2_closed = 0.0;      // g^2 (1/(4 zeta) + |alpha|^2 (1 + |alpha|^2))
    double m_mean_sample = 0.0;
    double m2_sample = 0.0;
    std::uint64_t seed = 0;
    int n_trunc = 0;
};

PrepReport average_fidelity(Complex alpha, double r, double g, PrepTarget::Kind kind,
                            int n_runs, std::uint64_t seed, int n_trunc = 0,
                            int threads = 1);

// Truncation from the coherent occupancy when the caller does not pin one.
int default_n_trunc(Complex alpha);

}  // namespace kerrsim
