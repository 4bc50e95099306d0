#include <doctest.h>

#include <cmath>
#include <random>

#include "kerrsim/errors.hpp"
#include "kerrsim/metrology.hpp"

using namespace kerrsim;

namespace {

// Finite-difference QFI oracle built from full conditioned states at
// theta0 +- h, phase-gauge invariant covariance form.
double fd_qfi(const FockVector& input, double r, double theta0, double g, double m,
              const CorrectionMode& corr, double h = 1e-5) {
    auto state_at = [&](double th) {
        CorrectionMode c = corr;
        return conditioned_state(input, prepare_ancilla(r, th), g, m, c).state.amplitudes;
    };
    Eigen::VectorXcd p0 = state_at(theta0);
    Eigen::VectorXcd dp = (state_at(theta0 + h) - state_at(theta0 - h)) / (2.0 * h);
    Complex overlap = p0.dot(dp);  // <psi|dpsi>
    return 4.0 * (dp.squaredNorm() - std::norm(overlap));
}

}  // namespace

TEST_CASE("baselines closed forms") {
    for (double n : {0.0, 1.0, 2.0, 4.0, 10.0}) {
        Baselines b = baselines(n);
        CHECK(b.sql == 4.0 * n);
        CHECK(b.heisenberg == 8.0 * (n * n + n));
        CHECK(b.kerr == 4.0 * (4.0 * n * n * n + 6.0 * n * n + n));
    }
    Baselines b1 = baselines(1.0);
    CHECK(b1.sql == 4.0);
    CHECK(b1.heisenberg == 16.0);
    CHECK(b1.kerr == 44.0);
    CHECK(baselines(4.0).kerr == 1424.0);
}

TEST_CASE("per-outcome QFI vanishes for zero-variance conditioned states") {
    FockVector vac = coherent_state(0.0, 20);
    CHECK(qfi_pure_conditioned(vac, 2.0, 0.5, 1.0, 1.3, CorrectionMode::none()) ==
          doctest::Approx(0.0).epsilon(1e-10));
    // far-out m collapses |alpha=1.5> to its lowest occupied level
    FockVector a = coherent_state(1.5, 40);
    double q = qfi_pure_conditioned(a, 2.0, 0.5, 1.0, -400.0, CorrectionMode::none());
    double scale = qfi_pure_conditioned(a, 2.0, 0.5, 1.0, 2.0, CorrectionMode::none());
    CHECK(q < 1e-6 * scale);
}

TEST_CASE("analytic per-outcome QFI matches finite-difference oracle") {
    FockVector in = coherent_state(1.5, 40);
    double analytic = qfi_pure_conditioned(in, 2.0, 0.5, 1.0, 3.0, CorrectionMode::none());
    double oracle = fd_qfi(in, 2.0, 0.5, 1.0, 3.0, CorrectionMode::none());
    CHECK(analytic == doctest::Approx(oracle).epsilon(1e-4));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ur(0.5, 3.0), uth(0.2, 1.3), ug(0.5, 1.4),
        ua(0.5, 2.5), um(-2.0, 8.0);
    for (int rep = 0; rep < 20; ++rep) {
        double r = ur(rng), th = uth(rng), g = ug(rng), alpha = ua(rng), m = um(rng);
        CorrectionMode corr =
            (rep % 2) ? CorrectionMode::linear(th) : CorrectionMode::none();
        FockVector input = coherent_state(alpha, 50);
        double a = qfi_pure_conditioned(input, r, th, g, m, corr);
        double o = fd_qfi(input, r, th, g, m, corr);
        CHECK(a == doctest::Approx(o).epsilon(1e-4));
    }
}

TEST_CASE("estimation modes reject invalid settings") {
    FockVector in = coherent_state(1.0, 20);
    CHECK_THROWS_AS(qfi_pure_conditioned(in, 2.0, 1e-8, 1.0, 0.0, CorrectionMode::none()),
                    ThetaNearSingular);
    CHECK_THROWS_AS(qfi_pure_conditioned(in, 2.0, 0.5, 1.0, 0.0, CorrectionMode::exact()),
                    ConfigError);
}

TEST_CASE("vacuum input carries no quantum term") {
    FockVector vac = coherent_state(0.0, 10);
    QfiPoint pt = generalized_qfi(vac, 2.0, 0.5, 1.0, CorrectionMode::none());
    CHECK(pt.f_quantum_avg == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(pt.f_total == doctest::Approx(pt.f_classical).epsilon(1e-12));
    CHECK(pt.f_classical >= 0.0);
}

TEST_CASE("classical term is negligible at the paper operating point") {
    FockVector in = coherent_state(std::sqrt(10.0), 60);
    QfiPoint pt = generalized_qfi(in, 4.0, 0.1, 1.0, CorrectionMode::linear(0.1));
    CHECK(pt.f_classical / pt.f_quantum_avg < 0.05);
}

TEST_CASE("corrected protocol beats the squeezed baseline at r=6") {
    double nbar = 15.0;
    FockVector in = coherent_state(std::sqrt(nbar), 64);
    QfiPoint pt = generalized_qfi(in, 6.0, 0.1, 1.0, CorrectionMode::linear(0.1));
    CHECK(pt.f_total > baselines(nbar).heisenberg);
}

TEST_CASE("scaling exponent") {
    Eigen::VectorXd n = log_grid(1.0, 100.0, 6);
    Eigen::VectorXd f(n.size());
    for (Eigen::Index i = 0; i < n.size(); ++i) f(i) = 3.7 * n(i) * n(i);
    Eigen::VectorXd eta = scaling_exponent(n, f);
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        CHECK(eta(i) == doctest::Approx(2.0).epsilon(1e-10));

    Eigen::VectorXd fk(n.size());
    for (Eigen::Index i = 0; i < n.size(); ++i) fk(i) = baselines(n(i)).kerr;
    Eigen::VectorXd etak = scaling_exponent(n, fk);
    CHECK(etak(etak.size() - 1) == doctest::Approx(3.0).epsilon(0.05 / 3.0));

    Eigen::VectorXd bad = f;
    bad(2) = 0.0;
    CHECK_THROWS_AS(scaling_exponent(n, bad), NonPositiveFI);
    CHECK_THROWS_AS(scaling_exponent(n.head(2), f.head(2)), DimensionMismatch);
}

TEST_CASE("cramer rao helper") {
    CHECK(cramer_rao(4.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cramer_rao(400.0, 1.0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(cramer_rao(1e4, 100.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK_THROWS_AS(cramer_rao(0.0, 1.0), NonPositiveFI);
}

TEST_CASE("sweep: monotone in n_bar and linear correction dominates uncorrected") {
    Eigen::VectorXd grid(3);
    grid << 10.0, 20.0, 40.0;
    QfiReport lin =
        qfi_sweep(grid, 4.0, 0.1, 1.0, CorrectionMode::linear(0.1), 120, {}, 3);
    QfiReport none = qfi_sweep(grid, 4.0, 0.1, 1.0, CorrectionMode::none(), 120, {}, 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(lin.f_total(i) >= none.f_total(i));
        CHECK(lin.f_classical(i) >= 0.0);
        CHECK(lin.f_quantum_avg(i) >= 0.0);
        if (i) CHECK(lin.f_total(i) > lin.f_total(i - 1));
        if (i) CHECK(none.f_total(i) > none.f_total(i - 1));
    }
    CHECK(lin.meta.correction == "linear");
    CHECK(lin.eta.size() == 3);
}

TEST_CASE("truncation robustness at the largest reported n_bar") {
    FockVector a = coherent_state(std::sqrt(10.0), 60);
    FockVector b = coherent_state(std::sqrt(10.0), 120);
    QfiPoint p60 = generalized_qfi(a, 4.0, 0.1, 1.0, CorrectionMode::linear(0.1));
    QfiPoint p120 = generalized_qfi(b, 4.0, 0.1, 1.0, CorrectionMode::linear(0.1));
    CHECK(std::abs(p120.f_total - p60.f_total) / p120.f_total < 0.005);
}

TEST_CASE("log grid shape") {
    Eigen::VectorXd g = log_grid(1.0, 10.0, 12);
    CHECK(g.size() == 13);
    CHECK(g(0) == doctest::Approx(1.0));
    CHECK(g(12) == doctest::Approx(10.0));
    CHECK_THROWS_AS(log_grid(5.0, 1.0), ConfigError);
}
