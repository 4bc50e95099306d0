#include "kerrsim/stateprep.hpp"

#include <cmath>

#include "kerrsim/errors.hpp"
#include "kerrsim/gaussian_map.hpp"
#include "kerrsim/parallel.hpp"
#include "kerrsim/rng.hpp"

namespace kerrsim {

double PrepTarget::gamma_magnitude() const {
    return kind == Kind::Cat ? M_PI / 2.0 : M_PI / 4.0;
}

FockVector target_state(const PrepTarget& target, double gamma, int n_trunc) {
    FockVector base = coherent_state(target.alpha, n_trunc);
    return apply_number_diagonal(base, [gamma](int n) {
               return Complex(0.0, -gamma * static_cast<double>(n) * n);
           })
        .state;
}

int default_n_trunc(Complex alpha) {
    double a2 = std::norm(alpha);
    return std::max(32, static_cast<int>(std::ceil(a2 + 12.0 * std::sqrt(a2 + 1.0))));
}

namespace {

struct PrepContext {
    double theta_star;
    AncillaGaussian anc;
    ChannelParams cp;
    FockVector input;
    FockVector target;
    OutcomePdf pdf;
};

PrepContext make_context(Complex alpha, double r, double g, PrepTarget::Kind kind,
                         int n_trunc) {
    PrepTarget t{kind, alpha};
    if (n_trunc <= 0) n_trunc = default_n_trunc(alpha);
    PrepContext ctx;
    ctx.theta_star = solve_theta_for_gamma(t.gamma_magnitude(), r, g);
    ctx.anc = prepare_ancilla(r, ctx.theta_star);
    ctx.cp = channel_params(ctx.anc, g);
    ctx.input = coherent_state(alpha, n_trunc);
    ctx.target = target_state(t, ctx.cp.gamma, n_trunc);
    ctx.pdf = outcome_pdf(ctx.input, ctx.anc, g);
    return ctx;
}

PrepRun run_once(const PrepContext& ctx, double g, std::mt19937_64& rng) {
    PrepRun out;
    out.theta_star = ctx.theta_star;
    out.gamma = ctx.cp.gamma;
    out.zeta = ctx.cp.zeta;
    out.m = ctx.pdf.sample(rng);
    ConditionedState cs =
        conditioned_state(ctx.input, ctx.anc, g, out.m, CorrectionMode::exact());
    out.state = cs.state;
    out.f_m = fidelity(ctx.target, cs.state);
    return out;
}

}  // namespace

PrepRun prepare_once(Complex alpha, double r, double g, PrepTarget::Kind kind,
                     std::uint64_t seed, int n_trunc) {
    PrepContext ctx = make_context(alpha, r, g, kind, n_trunc);
    std::mt19937_64 rng = make_rng(seed);
    return run_once(ctx, g, rng);
}

PrepReport average_fidelity(Complex alpha, double r, double g, PrepTarget::Kind kind,
                            int n_runs, std::uint64_t seed, int n_trunc, int threads) {
    if (n_runs < 1) throw ConfigError("average_fidelity: n_runs must be >= 1");
    if (n_trunc <= 0) n_trunc = default_n_trunc(alpha);
    PrepContext ctx = make_context(alpha, r, g, kind, n_trunc);

    PrepReport rep;
    rep.seed = seed;
    rep.n_trunc = n_trunc;
    rep.zeta = ctx.cp.zeta;
    rep.theta_star = ctx.theta_star;
    rep.gamma = ctx.cp.gamma;
    rep.asymptote = 1.0 - ctx.cp.zeta * std::norm(alpha);
    rep.m.resize(n_runs);
    rep.f.resize(n_runs);

    parallel_for(n_runs, threads, [&](int i) {
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(i));
        PrepRun run = run_once(ctx, g, rng);
        rep.m[i] = run.m;
        rep.f[i] = run.f_m;
    });

    double sum = 0.0, sum2 = 0.0, msum = 0.0, m2sum = 0.0;
    for (int i = 0; i < n_runs; ++i) {
        sum += rep.f[i];
        sum2 += rep.f[i] * rep.f[i];
        msum += rep.m[i];
        m2sum += rep.m[i] * rep.m[i];
    }
    rep.f_avg = sum / n_runs;
    double var = std::max(0.0, sum2 / n_runs - rep.f_avg * rep.f_avg);
    rep.f_se = std::sqrt(var / std::max(1, n_runs - 1));
    rep.m_mean_sample = msum / n_runs;
    rep.m2_sample = m2sum / n_runs;

    double a2 = std::norm(alpha);
    rep.m_mean_closed = g * a2;
    rep.m2_closed = g * g * (1.0 / (4.0 * ctx.cp.zeta) + a2 * (1.0 + a2));
    return rep;
}

}  // namespace kerrsim
