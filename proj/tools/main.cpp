#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "kerrsim/bootstrap.hpp"
#include "kerrsim/ensemble.hpp"
#include "kerrsim/errors.hpp"
#include "kerrsim/io.hpp"
#include "kerrsim/metrology.hpp"
#include "kerrsim/rng.hpp"
#include "kerrsim/stateprep.hpp"

namespace {

using nlohmann::json;
using namespace kerrsim;

constexpr const char* kVersion = "kerrsim 1.0.0";

int log_level() {  // 0 quiet, 1 info, 2 debug
    const char* env = std::getenv("KERRSIM_LOG");
    if (!env) return 1;
    std::string v(env);
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[kerrsim] " << msg << "\n";
}

std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not key=value: " + t);
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key in config line " + std::to_string(lineno));
        kv[key] = val;
    }
    return kv;
}

// Flags from the config file are appended unless already present on the
// command line, so explicit flags win.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
    std::string cfg_path;
    for (size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") cfg_path = args[i + 1];
    if (cfg_path.empty()) return args;
    auto kv = load_config(cfg_path);
    std::vector<std::string> out = args;
    for (const auto& [key, val] : kv) {
        if (key == "experiment") {
            if (std::find(args.begin(), args.end(), val) == args.end())
                throw ConfigError("config is for experiment '" + val +
                                  "' but that subcommand was not invoked");
            continue;
        }
        std::string flag = "--" + key;
        if (std::find(args.begin(), args.end(), flag) == args.end()) {
            out.push_back(flag);
            out.push_back(val);
        }
    }
    return out;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw ConfigError("empty numeric list: '" + s + "'");
    return out;
}

struct Common {
    std::string out = ".";
    std::string config;
    std::string preset;
    std::uint64_t seed = 0;
    int threads = 0;
    bool seed_given = false;

    int resolved_threads() const {
        if (threads > 0) return threads;
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 2;
    }
    std::string path(const std::string& name) const {
        return (std::filesystem::path(out) / name).string();
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "flat key=value config file");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--seed", c.seed, "RNG seed")->each([&](const std::string&) {
        c.seed_given = true;
    });
    cmd->add_option("--threads", c.threads, "worker thread cap (0 = hardware)");
    cmd->add_option("--preset", c.preset, "named parameter preset");
}

void require_seed(const Common& c) {
    if (!c.seed_given)
        throw ConfigError("--seed is mandatory for stochastic experiments");
}

void validate_ranges(double r, double g, double theta) {
    if (r < 0.0 || r > 12.0) throw ConfigError("r out of validated range [0, 12]");
    if (!(g > 0.0) || g > 5.0) throw ConfigError("g out of validated range (0, 5]");
    if (!(theta > 0.0) || theta >= M_PI)
        throw ConfigError("theta out of validated range (0, pi): theta0 = " +
                          std::to_string(theta) + " is singular or invalid");
}

json common_meta(const Common& c, const json& params) {
    json j = params;
    j["version"] = kVersion;
    j["threads"] = c.resolved_threads();
    j["preset"] = c.preset;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    j["unix_time"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    return j;
}

CorrectionMode parse_correction(const std::string& name, double theta0) {
    if (name == "none") return CorrectionMode::none();
    if (name == "linear") return CorrectionMode::linear(theta0);
    if (name == "exact") return CorrectionMode::exact();
    throw ConfigError("unknown correction mode: " + name);
}

// ---- subcommand runners ----

int run_baselines(const Common& c, const std::string& nbar_list) {
    std::vector<double> grid = parse_list(nbar_list);
    std::vector<std::vector<double>> rows;
    for (double n : grid) {
        Baselines b = baselines(n);
        rows.push_back({n, b.sql, b.heisenberg, b.kerr});
    }
    std::string path = c.path("baselines.csv");
    write_csv(path, {"n_bar", "sql", "heisenberg", "kerr"}, rows);
    write_sidecar(path, common_meta(c, {{"experiment", "baselines"}, {"n_bar", grid}}));
    info("wrote " + path);
    return 0;
}

int run_design_curves(const Common& c, const std::string& r_list, int points, double g) {
    std::vector<double> rs = parse_list(r_list);
    std::vector<std::vector<double>> rows;
    for (double r : rs) {
        validate_ranges(r, g, M_PI / 4.0);
        for (int i = 1; i < points; ++i) {
            double theta = M_PI * i / points;
            ChannelParams p = channel_params(prepare_ancilla(r, theta), g);
            rows.push_back({r, theta, p.gamma, p.zeta});
        }
    }
    std::string path = c.path("design_curves.csv");
    write_csv(path, {"r", "theta", "gamma", "zeta"}, rows);
    write_sidecar(path, common_meta(c, {{"experiment", "design-curves"},
                                        {"r", rs},
                                        {"g", g},
                                        {"theta_points", points}}));
    info("wrote " + path);
    return 0;
}

struct SweepArgs {
    double r = 4.0, theta0 = 0.1, g = 1.0;
    std::string correction = "linear";
    int n_trunc = 120;
    double nbar_lo = 2.0, nbar_hi = 40.0;
    int per_decade = 12;
    double m_lo = 0.0, m_hi = 0.0;
    bool window_given = false;
};

int run_qfi_sweep(const Common& c, SweepArgs a) {
    struct Panel {
        double g, theta0, r;
        int n_trunc;
        bool fixed_window;
    };
    std::vector<Panel> panels;
    QfiOptions opt;
    if (c.preset == "desk-fig2") {
        for (double g : {0.3, 0.8, 1.4})
            for (double th : {0.01, 0.1, 1.0}) panels.push_back({g, th, 4.0, 80, false});
        a.nbar_lo = 2.0;
        a.nbar_hi = 20.0;
    } else if (c.preset == "paper-fig2") {
        for (double g : {0.3, 0.8, 1.4})
            for (double th : {0.01, 0.1, 1.0}) panels.push_back({g, th, 4.0, 260, true});
        a.nbar_lo = 2.0;
        a.nbar_hi = 60.0;
    } else if (c.preset.empty()) {
        panels.push_back({a.g, a.theta0, a.r, a.n_trunc, a.window_given});
    } else {
        throw ConfigError("unknown preset: " + c.preset);
    }

    Eigen::VectorXd grid = log_grid(a.nbar_lo, a.nbar_hi, a.per_decade);
    for (const Panel& p : panels) {
        validate_ranges(p.r, p.g, p.theta0);
        QfiOptions o = opt;
        if (c.preset == "paper-fig2")
            o.m_window = std::pair<double, double>(-900.0, 900.0);
        else if (p.fixed_window)
            o.m_window = std::pair<double, double>(a.m_lo, a.m_hi);
        CorrectionMode corr = parse_correction(a.correction, p.theta0);
        QfiReport rep = qfi_sweep(grid, p.r, p.theta0, p.g, corr, p.n_trunc, o,
                                  c.resolved_threads());
        auto short_num = [](double x) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", x);
            return std::string(buf);
        };
        std::string name = panels.size() == 1
                               ? "qfi_sweep.csv"
                               : "qfi_g" + short_num(p.g) + "_theta" +
                                     short_num(p.theta0) + ".csv";
        std::string path = c.path(name);
        write_qfi_report(path, rep,
                         common_meta(c, {{"experiment", "qfi-sweep"},
                                         {"nbar_lo", a.nbar_lo},
                                         {"nbar_hi", a.nbar_hi},
                                         {"per_decade", a.per_decade}}));
        info("wrote " + path);
    }
    return 0;
}

struct KappaArgs {
    double kappa0 = 0.5, r_prime = 6.0, theta_prime = M_PI / 4.0, r = 6.0, g = 1.0;
    std::string correction = "linear";
    int n_trunc = 120;
    double nbar_lo = 2.0, nbar_hi = 40.0;
    int per_decade = 12;
};

int run_kappa_sweep(const Common& c, const KappaArgs& a) {
    validate_ranges(a.r, a.g, M_PI / 4.0);
    if (a.r_prime < 0.0 || a.r_prime > 12.0)
        throw ConfigError("r_prime out of validated range [0, 12]");
    BootstrapParams p;
    p.kappa = a.kappa0;
    p.r_prime = a.r_prime;
    p.theta_prime = a.theta_prime;
    p.r = a.r;
    p.g = a.g;
    Eigen::VectorXd grid = log_grid(a.nbar_lo, a.nbar_hi, a.per_decade);
    CorrectionMode corr = parse_correction(a.correction, 0.0);
    QfiReport rep = kappa_sweep(grid, p, corr, a.n_trunc, {}, c.resolved_threads());
    std::string path = c.path("kappa_sweep.csv");
    write_qfi_report(path, rep,
                     common_meta(c, {{"experiment", "kappa-sweep"},
                                     {"kappa0", a.kappa0},
                                     {"r_prime", a.r_prime},
                                     {"theta_prime", a.theta_prime}}));
    info("wrote " + path);
    return 0;
}

struct PrepArgs {
    std::string kind = "cat";
    double alpha_re = 2.0, alpha_im = 0.0;
    double r = 4.0, g = 1.0;
    int runs = 50;
    int n_trunc = 0;
};

PrepTarget::Kind parse_kind(const std::string& kind) {
    if (kind == "cat") return PrepTarget::Kind::Cat;
    if (kind == "compass") return PrepTarget::Kind::Compass;
    throw ConfigError("unknown state kind: " + kind);
}

int run_stateprep(const Common& c, const PrepArgs& a) {
    require_seed(c);
    validate_ranges(a.r, a.g, M_PI / 4.0);
    Complex alpha(a.alpha_re, a.alpha_im);
    PrepReport rep = average_fidelity(alpha, a.r, a.g, parse_kind(a.kind), a.runs, c.seed,
                                      a.n_trunc, c.resolved_threads());
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < rep.m.size(); ++i)
        rows.push_back({static_cast<double>(i), rep.m[i], rep.f[i]});
    std::string path = c.path("stateprep_runs.csv");
    write_csv(path, {"run", "m", "fidelity"}, rows);

    json rj = common_meta(c, {{"experiment", "stateprep"},
                              {"kind", a.kind},
                              {"alpha_re", a.alpha_re},
                              {"alpha_im", a.alpha_im},
                              {"r", a.r},
                              {"g", a.g},
                              {"runs", a.runs},
                              {"seed", rep.seed},
                              {"n_trunc", rep.n_trunc}});
    rj["f_avg"] = rep.f_avg;
    rj["f_se"] = rep.f_se;
    rj["zeta"] = rep.zeta;
    rj["asymptote"] = rep.asymptote;
    rj["theta_star"] = rep.theta_star;
    rj["gamma"] = rep.gamma;
    rj["m_mean_closed"] = rep.m_mean_closed;
    rj["m2_closed"] = rep.m2_closed;
    rj["m_mean_sample"] = rep.m_mean_sample;
    rj["m2_sample"] = rep.m2_sample;
    write_sidecar(path, rj);
    std::ofstream jf(c.path("stateprep.json"));
    jf << rj.dump(2) << '\n';
    info("wrote " + path);
    return 0;
}

struct WignerArgs {
    std::string state = "coherent";
    double alpha_re = 2.0, alpha_im = 0.0;
    double r = 4.0, g = 1.0;
    double q_min = -8.0, q_max = 8.0, p_min = -8.0, p_max = 8.0;
    int resolution = 201;
    int n_trunc = 0;
};

int run_wigner(const Common& c, const WignerArgs& a) {
    Complex alpha(a.alpha_re, a.alpha_im);
    int n_trunc = a.n_trunc > 0 ? a.n_trunc : default_n_trunc(alpha);
    FockVector psi;
    json extra;
    if (a.state == "coherent") {
        psi = coherent_state(alpha, n_trunc);
    } else if (a.state == "cat" || a.state == "compass") {
        double gamma = (a.state == "cat") ? M_PI / 2.0 : M_PI / 4.0;
        PrepTarget t{parse_kind(a.state), alpha};
        psi = target_state(t, gamma, n_trunc);
    } else if (a.state == "prepared-cat" || a.state == "prepared-compass") {
        require_seed(c);
        validate_ranges(a.r, a.g, M_PI / 4.0);
        auto kind = parse_kind(a.state.substr(9));
        PrepRun run = prepare_once(alpha, a.r, a.g, kind, c.seed, n_trunc);
        psi = run.state;
        extra["m"] = run.m;
        extra["fidelity"] = run.f_m;
        extra["theta_star"] = run.theta_star;
    } else {
        throw ConfigError("unknown state: " + a.state);
    }
    WignerGrid grid =
        wigner(psi, a.q_min, a.q_max, a.p_min, a.p_max, a.resolution, c.resolved_threads());
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<size_t>(a.resolution) * a.resolution);
    for (int i = 0; i < a.resolution; ++i)
        for (int j = 0; j < a.resolution; ++j)
            rows.push_back({grid.q(i), grid.p(j), grid.w(i, j)});
    std::string path = c.path("wigner.csv");
    write_csv(path, {"q", "p", "W"}, rows);
    json meta = common_meta(c, {{"experiment", "wigner"},
                                {"state", a.state},
                                {"alpha_re", a.alpha_re},
                                {"alpha_im", a.alpha_im},
                                {"resolution", a.resolution},
                                {"n_trunc", n_trunc}});
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    write_sidecar(path, meta);
    info("wrote " + path);
    return 0;
}

struct EnsembleArgs {
    std::string j_list = "100,200,400";
    double r = 1.0, g = 1.0, theta = 0.6;
    double alpha_re = 1.0, alpha_im = 0.0;
};

int run_ensemble_check(const Common& c, const EnsembleArgs& a) {
    require_seed(c);
    validate_ranges(a.r, a.g, a.theta);
    std::vector<std::vector<double>> rows;
    for (double j : parse_list(a.j_list)) {
        double sigma = std::sqrt(j) * std::exp(-a.r);
        double fid = atomic_protocol_check(j, sigma, a.g, a.theta,
                                           Complex(a.alpha_re, a.alpha_im), c.seed);
        rows.push_back({j, sigma, fid});
        info("j=" + std::to_string(j) + " fidelity=" + format_double(fid));
    }
    std::string path = c.path("ensemble_check.csv");
    write_csv(path, {"j", "sigma_meas", "fidelity"}, rows);
    write_sidecar(path, common_meta(c, {{"experiment", "ensemble-check"},
                                        {"j", a.j_list},
                                        {"r", a.r},
                                        {"g", a.g},
                                        {"theta", a.theta},
                                        {"alpha_re", a.alpha_re},
                                        {"alpha_im", a.alpha_im},
                                        {"seed", c.seed}}));
    info("wrote " + path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"measurement-induced Kerr protocol simulator"};
    app.require_subcommand(1);

    Common c;
    std::string nbar_list = "1,2,4,10";
    std::string r_list = "0.5,1,1.5,2,3";
    int dc_points = 200;
    double dc_g = 1.0;
    SweepArgs sweep;
    KappaArgs kappa;
    PrepArgs prep;
    WignerArgs wig;
    EnsembleArgs ens;

    CLI::App* b = app.add_subcommand("baselines", "closed-form FI baselines");
    add_common(b, c);
    b->add_option("--nbar", nbar_list, "comma list of n_bar values");

    CLI::App* d = app.add_subcommand("design-curves", "gamma/zeta vs theta curves");
    add_common(d, c);
    d->add_option("--r", r_list, "comma list of squeezing values");
    d->add_option("--theta-points", dc_points, "theta grid size on (0, pi)");
    d->add_option("--g", dc_g, "coupling");

    CLI::App* q = app.add_subcommand("qfi-sweep", "generalized QFI vs n_bar");
    add_common(q, c);
    q->add_option("--r", sweep.r, "ancilla squeezing");
    q->add_option("--theta0", sweep.theta0, "rotation bias");
    q->add_option("--g", sweep.g, "coupling");
    q->add_option("--correction", sweep.correction, "none|linear");
    q->add_option("--n-trunc", sweep.n_trunc, "Fock truncation");
    q->add_option("--nbar-lo", sweep.nbar_lo, "grid start");
    q->add_option("--nbar-hi", sweep.nbar_hi, "grid end");
    q->add_option("--per-decade", sweep.per_decade, "log grid density");
    q->add_option("--m-lo", sweep.m_lo, "fixed outcome window start")
        ->each([&](const std::string&) { sweep.window_given = true; });
    q->add_option("--m-hi", sweep.m_hi, "fixed outcome window end");

    CLI::App* k = app.add_subcommand("kappa-sweep", "bootstrap displacement QFI");
    add_common(k, c);
    k->add_option("--kappa0", kappa.kappa0, "bias displacement");
    k->add_option("--r-prime", kappa.r_prime, "stage-1 squeezing");
    k->add_option("--theta-prime", kappa.theta_prime, "stage-1 rotation");
    k->add_option("--r", kappa.r, "A2 squeezing");
    k->add_option("--g", kappa.g, "stage-2 coupling");
    k->add_option("--correction", kappa.correction, "none|linear");
    k->add_option("--n-trunc", kappa.n_trunc, "Fock truncation");
    k->add_option("--nbar-lo", kappa.nbar_lo, "grid start");
    k->add_option("--nbar-hi", kappa.nbar_hi, "grid end");
    k->add_option("--per-decade", kappa.per_decade, "log grid density");

    CLI::App* s = app.add_subcommand("stateprep", "cat/compass Monte-Carlo fidelity");
    add_common(s, c);
    s->add_option("--kind", prep.kind, "cat|compass");
    s->add_option("--alpha", prep.alpha_re, "coherent amplitude (real part)");
    s->add_option("--alpha-im", prep.alpha_im, "coherent amplitude (imag part)");
    s->add_option("--r", prep.r, "ancilla squeezing");
    s->add_option("--g", prep.g, "coupling");
    s->add_option("--runs", prep.runs, "Monte-Carlo runs");
    s->add_option("--n-trunc", prep.n_trunc, "Fock truncation (0 = auto)");

    CLI::App* w = app.add_subcommand("wigner", "Wigner grid of a chosen state");
    add_common(w, c);
    w->add_option("--state", wig.state, "coherent|cat|compass|prepared-cat|prepared-compass");
    w->add_option("--alpha", wig.alpha_re, "coherent amplitude (real part)");
    w->add_option("--alpha-im", wig.alpha_im, "coherent amplitude (imag part)");
    w->add_option("--r", wig.r, "ancilla squeezing (prepared states)");
    w->add_option("--g", wig.g, "coupling (prepared states)");
    w->add_option("--q-min", wig.q_min, "grid bound");
    w->add_option("--q-max", wig.q_max, "grid bound");
    w->add_option("--p-min", wig.p_min, "grid bound");
    w->add_option("--p-max", wig.p_max, "grid bound");
    w->add_option("--resolution", wig.resolution, "grid points per axis");
    w->add_option("--n-trunc", wig.n_trunc, "Fock truncation (0 = auto)");

    CLI::App* e = app.add_subcommand("ensemble-check", "spin-ensemble convergence");
    add_common(e, c);
    e->add_option("--j", ens.j_list, "comma list of collective spins");
    e->add_option("--r", ens.r, "matched squeezing, sigma_meas = sqrt(j) e^{-r}");
    e->add_option("--g", ens.g, "coupling");
    e->add_option("--theta", ens.theta, "ancilla rotation");
    e->add_option("--alpha", ens.alpha_re, "probe amplitude (real part)");
    e->add_option("--alpha-im", ens.alpha_im, "probe amplitude (imag part)");

    std::vector<std::string> raw(argv + 1, argv + argc);
    try {
        std::vector<std::string> merged = merge_config_args(raw);
        // CLI11 consumes args in reverse order
        std::vector<std::string> rev(merged.rbegin(), merged.rend());
        app.parse(rev);

        if (b->parsed()) return run_baselines(c, nbar_list);
        if (d->parsed()) return run_design_curves(c, r_list, dc_points, dc_g);
        if (q->parsed()) return run_qfi_sweep(c, sweep);
        if (k->parsed()) return run_kappa_sweep(c, kappa);
        if (s->parsed()) return run_stateprep(c, prep);
        if (w->parsed()) return run_wigner(c, wig);
        if (e->parsed()) return run_ensemble_check(c, ens);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);  // --help
        std::cerr << "argument error: " << err.what() << "\n";
        return 2;
    } catch (const ConfigError& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return 2;
    } catch (const ThetaNearSingular& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return 2;
    } catch (const Error& err) {
        std::cerr << "numerical error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
}
