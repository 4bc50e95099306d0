// Acceptance suite: one pass/fail line per criterion, exit 1 if any fail.
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kerrsim/bootstrap.hpp"
#include "kerrsim/ensemble.hpp"
#include "kerrsim/errors.hpp"
#include "kerrsim/metrology.hpp"
#include "kerrsim/quadrature.hpp"
#include "kerrsim/rng.hpp"
#include "kerrsim/stateprep.hpp"

using namespace kerrsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail = "") {
    std::cout << "criterion " << id << " [" << name << "]: " << (pass ? "PASS" : "FAIL");
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

void run(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    try {
        auto [ok, detail] = f();
        report(id, name, ok, detail);
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

// ---- criterion 2 helper ----
double threshold_r(double gamma_target) {
    double lo = 0.1, hi = 5.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (gamma_max(mid, 1.0).value >= gamma_target ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- criterion 8 helper: finite-difference QFI oracle ----
double fd_qfi(const FockVector& input, double r, double theta0, double g, double m,
              const CorrectionMode& corr, double h = 1e-5) {
    auto state_at = [&](double th) {
        return conditioned_state(input, prepare_ancilla(r, th), g, m, corr).state.amplitudes;
    };
    Eigen::VectorXcd p0 = state_at(theta0);
    Eigen::VectorXcd dp = (state_at(theta0 + h) - state_at(theta0 - h)) / (2.0 * h);
    return 4.0 * (dp.squaredNorm() - std::norm(p0.dot(dp)));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    run(1, "baseline closed forms", [] {
        for (double n : {0.0, 1.0, 2.0, 4.0, 10.0}) {
            Baselines b = baselines(n);
            if (b.sql != 4.0 * n) return std::pair{false, std::string("sql")};
            if (b.heisenberg != 8.0 * (n * n + n)) return std::pair{false, std::string("heis")};
            if (b.kerr != 4.0 * (4.0 * n * n * n + 6.0 * n * n + n))
                return std::pair{false, std::string("kerr")};
        }
        return std::pair{true, std::string()};
    });

    run(2, "squeezing thresholds", [] {
        double r_cat = threshold_r(M_PI / 2.0);
        double r_cmp = threshold_r(M_PI / 4.0);
        std::ostringstream d;
        d << "r(pi/2)=" << r_cat << " r(pi/4)=" << r_cmp;
        bool ok = std::abs(r_cat - 1.27) <= 0.013 && std::abs(r_cmp - 0.93) <= 0.011;
        return std::pair{ok, d.str()};
    });

    run(3, "compass average fidelity and slope", [] {
        // evaluated on the compass target (gamma = pi/4); the cat target sits
        // visibly below its asymptote over this r range (see unit tests)
        std::vector<double> rs = {3.0, 3.5, 4.0, 4.5, 5.0};
        std::ostringstream d;
        bool ok = true;
        for (double alpha : {2.0, 3.0, 4.0}) {
            std::vector<double> logs;
            for (size_t i = 0; i < rs.size(); ++i) {
                PrepReport rep = average_fidelity(alpha, rs[i], 1.0,
                                                  PrepTarget::Kind::Compass, 200,
                                                  9000 + static_cast<int>(10 * alpha + i),
                                                  0, 4);
                double infid = 1.0 - rep.f_avg;
                double dev = std::abs(infid - (1.0 - rep.asymptote));
                if (dev > 3.0 * rep.f_se) {
                    ok = false;
                    d << " dev@a=" << alpha << ",r=" << rs[i] << "=" << dev / rep.f_se
                      << "se";
                }
                logs.push_back(std::log(infid));
            }
            double rb = 0.0, lb = 0.0;
            for (size_t i = 0; i < rs.size(); ++i) rb += rs[i], lb += logs[i];
            rb /= rs.size();
            lb /= logs.size();
            double num = 0.0, den = 0.0;
            for (size_t i = 0; i < rs.size(); ++i) {
                num += (rs[i] - rb) * (logs[i] - lb);
                den += (rs[i] - rb) * (rs[i] - rb);
            }
            double slope = num / den;
            d << " slope(a=" << alpha << ")=" << slope;
            if (std::abs(slope + 2.0) > 0.2) ok = false;
        }
        return std::pair{ok, d.str()};
    });

    run(4, "channel completeness and moments", [] {
        std::mt19937_64 rng = make_rng(404);
        std::uniform_real_distribution<double> ur(0.5, 4.0), uth(0.15, 1.4), ug(0.4, 1.5),
            ua(0.3, 2.5);
        for (int rep = 0; rep < 10; ++rep) {
            double r = ur(rng), th = uth(rng), g = ug(rng), alpha = ua(rng);
            AncillaGaussian anc = prepare_ancilla(r, th);
            FockVector in = coherent_state(alpha, 60);
            OutcomePdf pdf = outcome_pdf(in, anc, g);
            auto [lo, hi] = pdf.support(9.0);
            double total = integrate([&](double m) { return pdf(m); }, lo, hi);
            if (std::abs(total - 1.0) > 1e-6)
                return std::pair{false, "integral " + std::to_string(total)};

            const int N = 10000;
            double s1 = 0.0, s2 = 0.0, s4 = 0.0;
            for (int i = 0; i < N; ++i) {
                double m = pdf.sample(rng);
                s1 += m;
                s2 += m * m;
                s4 += m * m * m * m;
            }
            s1 /= N;
            s2 /= N;
            s4 /= N;
            double mean_c = g * alpha * alpha;
            double m2_c = g * g * (1.0 / (4.0 * channel_params(anc, g).zeta) +
                                   alpha * alpha * (1.0 + alpha * alpha));
            double se1 = std::sqrt((s2 - s1 * s1) / N);
            double se2 = std::sqrt(std::max(s4 - s2 * s2, 0.0) / N);
            if (std::abs(s1 - mean_c) > 4.0 * se1)
                return std::pair{false, std::string("mean off at set ") + std::to_string(rep)};
            if (std::abs(s2 - m2_c) > 4.0 * se2)
                return std::pair{false, std::string("m2 off at set ") + std::to_string(rep)};
        }
        return std::pair{true, std::string()};
    });

    // shared sweep for criteria 5-7
    Eigen::VectorXd grid = log_grid(15.0, 40.0, 12);
    QfiReport lin, none;
    bool sweep_ok = true;
    std::string sweep_err;
    const int n_threads = std::max(2u, std::thread::hardware_concurrency());
    try {
        lin = qfi_sweep(grid, 6.0, 0.1, 1.0, CorrectionMode::linear(0.1), 120, {}, n_threads);
        none = qfi_sweep(grid, 6.0, 0.1, 1.0, CorrectionMode::none(), 120, {}, n_threads);
    } catch (const std::exception& e) {
        sweep_ok = false;
        sweep_err = e.what();
    }

    run(5, "super-Heisenberg scaling with linear correction", [&] {
        if (!sweep_ok) return std::pair{false, sweep_err};
        std::ostringstream d;
        d << "eta in [" << lin.eta.minCoeff() << ", " << lin.eta.maxCoeff() << "]";
        bool ok = true;
        for (int i = 0; i < grid.size(); ++i) {
            if (lin.eta(i) <= 2.0) ok = false;
            if (lin.f_total(i) <= baselines(grid(i)).heisenberg) ok = false;
        }
        return std::pair{ok, d.str()};
    });

    run(6, "uncorrected sweep degrades to shot-noise scaling", [&] {
        if (!sweep_ok) return std::pair{false, sweep_err};
        std::ostringstream d;
        d << "eta max " << none.eta.maxCoeff();
        return std::pair{none.eta.maxCoeff() <= 1.1, d.str()};
    });

    run(7, "classical term negligible", [&] {
        if (!sweep_ok) return std::pair{false, sweep_err};
        double worst = 0.0;
        for (int i = 0; i < grid.size(); ++i)
            worst = std::max(worst, lin.f_classical(i) / lin.f_quantum_avg(i));
        return std::pair{worst < 0.05, "max ratio " + std::to_string(worst)};
    });

    run(8, "QFI finite-difference oracle equivalence", [] {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> ur(0.5, 3.0), uth(0.2, 1.3), ug(0.5, 1.4),
            ua(0.5, 2.5), um(-2.0, 8.0);
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            double r = ur(rng), th = uth(rng), g = ug(rng), alpha = ua(rng), m = um(rng);
            CorrectionMode corr = (rep % 2) ? CorrectionMode::linear(th) : CorrectionMode::none();
            FockVector input = coherent_state(alpha, 50);
            double a = qfi_pure_conditioned(input, r, th, g, m, corr);
            double o = fd_qfi(input, r, th, g, m, corr);
            worst = std::max(worst, std::abs(a - o) / std::abs(o));
        }
        return std::pair{worst < 1e-4, "worst rel err " + std::to_string(worst)};
    });

    run(9, "bootstrap limit and kappa scaling", [] {
        BootstrapParams p;
        p.kappa = 0.5;
        p.r_prime = 6.0;
        p.r = 1.0;  // moderate A2 squeezing for the convergence check
        EffectiveAncilla fin = effective_ancilla(p);
        EffectiveAncilla lim = effective_ancilla_limit(p);
        double f = gaussian_fidelity(fin.u, fin.v, lim.u, lim.v);
        if (f <= 0.99) return std::pair{false, "limit fidelity " + std::to_string(f)};

        p.r = 6.0;
        p.r_prime = 8.0;
        Eigen::VectorXd g2 = log_grid(10.0, 40.0, 12);
        QfiReport rep = kappa_sweep(g2, p, CorrectionMode::linear(0.0), 100, {}, 4);
        std::ostringstream d;
        d << "fid " << f << ", eta tail " << rep.eta(rep.eta.size() - 1);
        return std::pair{rep.eta(rep.eta.size() - 1) > 2.0, d.str()};
    });

    run(10, "ensemble convergence and HP squeezing identity", [] {
        double g = 1.0, theta = 0.6, rr = 1.0;
        auto f = [&](double j) {
            return atomic_protocol_check(j, std::sqrt(j) * std::exp(-rr), g, theta, 1.0, 21);
        };
        double f100 = f(100.0), f200 = f(200.0), f400 = f(400.0);
        std::ostringstream d;
        d << "fid(j)=" << f100 << "," << f200 << "," << f400;
        bool ok = f400 > 0.99 && f100 < f200 && f200 < f400;

        // matched squeezing: two passes at sigma^2 = 0.05 j against
        // S(r)|0> with e^{-2r} = sigma^2 / j
        double j = 200.0, sigma2 = 0.05 * 200.0;
        SpinOps ops = collective_ops(j);
        Eigen::MatrixXcd R = frame_rotation(ops);
        SpinEnsemble ens = css_plus_x(j);
        ens = weak_measure_jz(ens, 0.0, std::sqrt(sigma2)).state;
        ens = weak_measure_jz(ens, 0.0, std::sqrt(sigma2)).state;
        HpImage img = hp_map(ens, R, 120);
        double r_match = -0.5 * std::log(sigma2 / j);
        double fsq = fidelity(img.state, squeezed_vacuum(r_match, 120, 1e-3));
        d << " squeeze fid=" << fsq;
        return std::pair{ok && fsq > 0.99, d.str()};
    });

    run(11, "byte-identical CSV determinism", [] {
        fs::path d1 = fs::temp_directory_path() / "kerrsim_acc_det1";
        fs::path d2 = fs::temp_directory_path() / "kerrsim_acc_det2";
        fs::remove_all(d1);
        fs::remove_all(d2);
        fs::create_directories(d1);
        fs::create_directories(d2);
        std::string base = std::string(KERRSIM_CLI_PATH) +
                           " stateprep --kind compass --alpha 2 --r 3.5 --runs 10"
                           " --seed 7 --out ";
        if (WEXITSTATUS(std::system((base + d1.string() + " 2>/dev/null").c_str())) != 0)
            return std::pair{false, std::string("cli run 1 failed")};
        if (WEXITSTATUS(std::system((base + d2.string() + " 2>/dev/null").c_str())) != 0)
            return std::pair{false, std::string("cli run 2 failed")};
        bool same = slurp(d1 / "stateprep_runs.csv") == slurp(d2 / "stateprep_runs.csv");
        if (!same) return std::pair{false, std::string("stateprep CSVs differ")};

        std::string sweep = std::string(KERRSIM_CLI_PATH) +
                            " qfi-sweep --r 3 --theta0 0.2 --n-trunc 40 --nbar-lo 2"
                            " --nbar-hi 8 --per-decade 6 --out ";
        if (WEXITSTATUS(std::system((sweep + d1.string() + " 2>/dev/null").c_str())) != 0)
            return std::pair{false, std::string("sweep run 1 failed")};
        if (WEXITSTATUS(std::system((sweep + d2.string() + " 2>/dev/null").c_str())) != 0)
            return std::pair{false, std::string("sweep run 2 failed")};
        same = slurp(d1 / "qfi_sweep.csv") == slurp(d2 / "qfi_sweep.csv");
        return std::pair{same, same ? std::string() : std::string("sweep CSVs differ")};
    });

    if (g_failures == 0)
        std::cout << "ALL CRITERIA PASSED" << std::endl;
    else
        std::cout << g_failures << " CRITERIA FAILED" << std::endl;
    return g_failures == 0 ? 0 : 1;
}
