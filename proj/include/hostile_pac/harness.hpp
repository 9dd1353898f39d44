#pragma once

// Config-driven orchestration: single-dataset bound reports, the optimal
// aggregate, Monte Carlo coverage runs and parameter sweeps.

#include "hostile_pac/aggregation.hpp"
#include "hostile_pac/config.hpp"
#include "hostile_pac/datagen.hpp"
#include "hostile_pac/divergence.hpp"
#include "hostile_pac/moments.hpp"
#include "hostile_pac/param_space.hpp"
#include "hostile_pac/risk.hpp"
#include "hostile_pac/rng.hpp"
#include "hostile_pac/true_risk.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace hostile_pac {

using Json = nlohmann::ordered_json;

// JSON has no infinity; non-finite values are written as strings.
inline Json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

template <class T>
Json json_optional(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_floating_point_v<T>)
        return json_number(*v);
    else
        return *v;
}

// Runs f(i) for i in [0, count) on up to `workers` threads. Results must be
// written to per-index slots so the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& f) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size() && x.size() >= 2, "log_log_slope needs at least two points");
    double mx = 0, my = 0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / k;
        my += std::log(y[i]) / k;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

// Everything that is fixed across replications: the prior, the resolved
// moment bound and, when available, the oracle risk R on the atoms.
struct PreparedExperiment {
    ExperimentConfig cfg;
    Prior prior;
    MomentRegime regime;
    BoundConfig bound;
    std::optional<TrueRisk> risk;
    std::optional<ComplexityEstimate> population_complexity;
    Json constants;
};

namespace detail {

inline double resolve_s2(const ExperimentConfig& cfg, const Prior& prior) {
    if (cfg.regime.s2) return *cfg.regime.s2;
    if (is_zero_one(cfg.loss)) return 0.25;
    require(is_squared(cfg.loss), "regime.s2 = auto needs squared or zero_one loss; give s2 explicitly");
    require(std::holds_alternative<generator::IidLinearRegression>(cfg.generator),
            "regime.s2 = auto needs the iid_regression generator");
    if (cfg.regime.s2_source == VarianceSource::Exact)
        return squared_loss_variance_integral(cfg.generator, prior.atoms, prior.weights);
    const AnalyticMoments m = analytic_moments(cfg.generator, 4);
    return kappa_quadratic(m.ey4, prior_moment_tau(prior.atoms, prior.weights), m.ex4);
}

inline double resolve_moment_integral(const ExperimentConfig& cfg, const Prior& prior) {
    if (cfg.regime.moment_integral) return *cfg.regime.moment_integral;
    require(is_squared(cfg.loss), "regime.moment_integral = auto needs squared loss; give it explicitly");
    const double s = cfg.regime.s;
    require(s == 2.0 || s == 3.0, "regime.moment_integral = auto needs s in {2, 3}; give it explicitly");
    const int power = static_cast<int>(s);
    double acc = 0.0;
    for (std::size_t j = 0; j < prior.atoms.size(); ++j)
        if (prior.weights[j] > 0.0)
            acc += prior.weights[j] * std::pow(squared_loss_moment(cfg.generator, prior.atoms[j], power), 2.0 / s);
    return acc;
}

} // namespace detail

inline PreparedExperiment prepare(const ExperimentConfig& cfg_in, bool need_closed_form_risk = false) {
    PreparedExperiment px;
    px.cfg = cfg_in;
    ExperimentConfig& cfg = px.cfg;
    validate(cfg);
    px.prior = build_prior(cfg.prior, stream_seed(cfg.seed, 0, stream::prior));
    detail::require(px.prior.atoms.dimension() == covariate_dimension(cfg.generator),
                    "prior atom dimension does not match the generator's covariate dimension");
    const std::size_t k = px.prior.atoms.size();

    Json c;
    c["regime"] = to_string(cfg.regime.kind);
    double p = cfg.p;
    double q = p / (p - 1.0);
    switch (cfg.regime.kind) {
    case RegimeKind::Variance: {
        const double s2 = detail::resolve_s2(cfg, px.prior);
        px.regime = regime::IidVariance{s2};
        c["s2"] = json_number(s2);
        break;
    }
    case RegimeKind::SubGaussian: {
        double sigma2 = 0.0;
        if (cfg.regime.sigma2)
            sigma2 = *cfg.regime.sigma2;
        else if (is_zero_one(cfg.loss))
            sigma2 = 0.25;
        else
            throw ConfigError("regime.sigma2 = auto needs zero_one loss; give sigma2 explicitly");
        if (cfg.regime.q) {
            q = *cfg.regime.q;
        } else {
            const OptimizedQ oq = optimal_q_finite(k, cfg.delta);
            q = oq.q;
            c["q_clamped"] = oq.clamped;
        }
        p = conjugate_exponent(q);
        px.regime = regime::SubGaussian{sigma2};
        c["sigma2"] = json_number(sigma2);
        break;
    }
    case RegimeKind::MixingBounded: {
        detail::require(std::abs(p - 2.0) <= 1e-12, "mixing regimes require p = 2");
        const MixingBoundSpec env = mixing_spec_for(cfg.generator);
        const double alpha_sum = cfg.regime.alpha_sum.value_or(geometric_alpha_sum(env.c1, env.c2, 1.0));
        px.regime = regime::MixingBounded{alpha_sum};
        c["alpha_sum"] = json_number(alpha_sum);
        break;
    }
    case RegimeKind::MixingUnbounded: {
        detail::require(std::abs(p - 2.0) <= 1e-12, "mixing regimes require p = 2");
        const MixingBoundSpec env = mixing_spec_for(cfg.generator);
        regime::MixingUnbounded m;
        m.r = cfg.regime.r;
        m.s = cfg.regime.s;
        m.davydov_factor = cfg.regime.davydov_factor;
        m.alpha_frac_sum = cfg.regime.alpha_frac_sum.value_or(geometric_alpha_sum(env.c1, env.c2, m.r));
        m.moment_integral = detail::resolve_moment_integral(cfg, px.prior);
        validate(m);
        px.regime = m;
        c["r"] = m.r;
        c["s"] = m.s;
        c["moment_integral"] = json_number(m.moment_integral);
        c["alpha_frac_sum"] = json_number(m.alpha_frac_sum);
        c["davydov_factor"] = m.davydov_factor;
        break;
    }
    }
    MomentBound mb = moment_bound(px.regime, cfg.n, q);
    mb.value *= cfg.regime.inflate;
    px.bound = make_bound_config(p, cfg.delta, mb);

    const MixingBoundSpec env = std::holds_alternative<generator::AR1>(cfg.generator)
                                    ? std::get<generator::AR1>(cfg.generator).mixing.value_or(MixingBoundSpec{NAN, NAN})
                                    : mixing_spec_for(cfg.generator);
    c["c1"] = json_number(env.c1);
    c["c2"] = json_number(env.c2);
    c["inflate"] = cfg.regime.inflate;
    c["moment_bound"] = json_number(px.bound.moment.value);
    c["p"] = px.bound.p;
    c["q"] = px.bound.q;
    c["delta"] = cfg.delta;
    c["n"] = cfg.n;
    c["K"] = k;
    px.constants = std::move(c);

    if (need_closed_form_risk && !has_closed_form_risk(cfg.generator, cfg.loss))
        throw ConfigError("coverage needs a closed-form true risk for this generator/loss combination");
    if (has_closed_form_risk(cfg.generator, cfg.loss) || cfg.oracle.allow_monte_carlo) {
        TrueRiskOptions opts = cfg.oracle;
        opts.seed = stream_seed(cfg.seed, 0, stream::oracle);
        px.risk = true_risk(cfg.generator, px.prior.atoms, cfg.loss, opts);
        if (!cfg.complexity.gamma_grid.empty())
            px.population_complexity = verify_complexity(px.risk->values, px.prior.weights, cfg.complexity.gamma_grid);
    }
    return px;
}

// Random aggregation distributions supported on the prior's support: cycles
// through Dirichlet(1) weights, a Dirac at a random atom, and uniform weights
// on a random subset.
inline std::vector<DiscreteDistribution> make_probes(const DiscreteDistribution& pi, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < pi.size(); ++j)
        if (pi[j] > 0.0) support.push_back(j);
    Rng rng = make_rng(seed);
    std::exponential_distribution<double> expo(1.0);
    std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
    std::vector<DiscreteDistribution> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> mass(pi.size(), 0.0);
        switch (i % 3) {
        case 0:
            for (std::size_t j : support) mass[j] = expo(rng);
            break;
        case 1:
            mass[support[pick(rng)]] = 1.0;
            break;
        default: {
            std::vector<std::size_t> perm = support;
            std::shuffle(perm.begin(), perm.end(), rng);
            const std::size_t m = 1 + pick(rng);
            for (std::size_t t = 0; t < m; ++t) mass[perm[t]] = 1.0;
        }
        }
        out.push_back(DiscreteDistribution::from_masses(std::move(mass)));
    }
    return out;
}

// Empirical complexity for one r_n vector: a configured d is checked against
// the grid, otherwise the smallest certified d is used.
inline std::optional<double> empirical_complexity(const ExperimentConfig& cfg, std::span<const double> rn,
                                                  const DiscreteDistribution& pi) {
    if (cfg.complexity.gamma_grid.empty()) return cfg.complexity.d;
    const ComplexityEstimate est = verify_complexity(rn, pi, cfg.complexity.gamma_grid);
    if (!est.satisfied) return std::nullopt;
    if (cfg.complexity.d) {
        if (*cfg.complexity.d < est.d) return std::nullopt;
        return cfg.complexity.d;
    }
    return est.d;
}

struct BoundRun {
    std::vector<BoundReport> reports;
    // int R drho per report, when the oracle risk is available
    std::vector<std::optional<double>> true_risk_integrals;
    std::optional<double> empirical_d;
    std::optional<double> gamma;
};

inline BoundRun run_bound(const PreparedExperiment& px, const Dataset& data) {
    const auto& pi = px.prior.weights;
    const LossTable table = compute_loss_table(data, px.prior.atoms, px.cfg.loss);
    const std::vector<double> rn = empirical_risk(table);
    const BoundConfig& cfg = px.bound;

    BoundRun run;
    auto add = [&](const DiscreteDistribution& rho, std::string label) -> BoundReport& {
        run.reports.push_back(evaluate_bound(rho, pi, rn, cfg, std::move(label)));
        run.true_risk_integrals.push_back(px.risk ? std::optional<double>(expectation(rho, px.risk->values)) : std::nullopt);
        return run.reports.back();
    };

    const MinimizedObjective opt = minimized_objective_identity(rn, pi, cfg);
    run.empirical_d = empirical_complexity(px.cfg, rn, pi);
    if (!px.cfg.complexity.gamma_grid.empty() && !run.empirical_d)
        throw AssumptionViolation("complexity check failed on the configured gamma grid; the oracle bound does not apply");
    {
        BoundReport& r = add(opt.rho_hat, "rho_hat");
        r.rbar = opt.rbar;
        double rn_min = kInfinity;
        for (std::size_t j = 0; j < rn.size(); ++j)
            if (pi[j] > 0.0) rn_min = std::min(rn_min, rn[j]);
        if (run.empirical_d) r.oracle_empirical = oracle_bound_empirical(rn_min, cfg.moment.value, cfg.delta, cfg.q, *run.empirical_d);
        if (px.risk && px.population_complexity && px.population_complexity->satisfied) {
            double r_min = kInfinity;
            for (std::size_t j = 0; j < rn.size(); ++j)
                if (pi[j] > 0.0) r_min = std::min(r_min, px.risk->values[j]);
            r.oracle_population =
                oracle_bound_population(r_min, cfg.moment.value, cfg.delta, cfg.q, px.population_complexity->d);
        }
    }
    if (run.empirical_d && cfg.moment.value > 0.0) {
        run.gamma = optimal_gamma(*run.empirical_d, cfg.p, cfg.moment.value, cfg.delta);
        add(catoni_pi_gamma(rn, pi, *run.gamma), "pi_gamma");
    }
    add(DiscreteDistribution::dirac(pi.size(), erm_index(rn)), "dirac_erm");
    add(pi, "prior");
    for (std::size_t j = 0; j < pi.size(); ++j)
        if (pi[j] == 0.0) {
            add(DiscreteDistribution::dirac(pi.size(), j), "dirac_prior_null");
            break;
        }
    return run;
}

inline Dataset dataset_for_replication(const ExperimentConfig& cfg, std::size_t rep) {
    return generate(cfg.generator, cfg.n, stream_seed(cfg.seed, rep, stream::data));
}

inline Json to_json(const BoundReport& r, const std::optional<double>& true_risk_integral, const Json& constants) {
    Json j;
    j["record"] = "bound";
    j["label"] = r.label;
    j["rn_integral"] = json_number(r.rn_integral);
    j["margin"] = json_number(r.margin);
    j["upper"] = json_number(r.upper);
    j["lower"] = json_number(r.lower);
    j["divergence_plus_one"] = json_number(r.divergence_plus_one);
    j["rbar"] = json_optional(r.rbar);
    j["oracle_empirical"] = json_optional(r.oracle_empirical);
    j["oracle_population"] = json_optional(r.oracle_population);
    j["true_risk_integral"] = json_optional(true_risk_integral);
    for (const auto& [key, value] : constants.items()) j[key] = value;
    return j;
}

struct ReplicationRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool thm1_hit = false;
    std::size_t distributions_checked = 0;
    double rbar = 0.0;
    double rn_min = 0.0;
    double rho_hat_rn = 0.0;
    double rho_hat_risk = 0.0;
    double rho_hat_margin = 0.0;
    double rho_hat_slack = 0.0;
    double prior_margin = 0.0;
    double erm_risk = 0.0;
    double population_rbar = 0.0;
    bool sandwich_hit = false;
    std::optional<double> empirical_d;
    std::optional<double> oracle_empirical;
    // int R drho_hat below the oracle bound
    std::optional<bool> oracle_empirical_hit;
    // rbar itself below the oracle bound
    std::optional<bool> rbar_within_oracle;
    std::optional<bool> assumption_at_gap;
    std::optional<double> oracle_population;
    std::optional<bool> oracle_population_hit;
    bool oracle_hit = false;
};

struct CoverageReport {
    std::size_t replications = 0;
    double coverage_thm1 = 0.0;
    double coverage_oracle = 0.0;
    double mean_slack = 0.0;
    double median_margin = 0.0;
    double median_margin_prior = 0.0;
    double median_rbar = 0.0;
    // Replications where the joint event held and a complexity d was certified,
    // and how many of those satisfied the empirical oracle inequality.
    std::size_t oracle_empirical_applicable = 0;
    std::size_t oracle_empirical_holds = 0;
    std::vector<ReplicationRecord> records;
    Json constants;
};

inline constexpr double kComparisonSlack = 1e-12;
inline constexpr std::size_t kMinCoverageReplications = 50;

inline ReplicationRecord run_replication(const PreparedExperiment& px, std::size_t rep) {
    const auto& cfg = px.cfg;
    const auto& pi = px.prior.weights;
    const auto& risk = px.risk->values;
    const BoundConfig& bc = px.bound;

    ReplicationRecord rec;
    rec.index = rep;
    rec.seed = stream_seed(cfg.seed, rep, stream::data);
    const Dataset data = generate(cfg.generator, cfg.n, rec.seed);
    const std::vector<double> rn = empirical_risk(compute_loss_table(data, px.prior.atoms, cfg.loss));

    const MinimizedObjective opt = minimized_objective_identity(rn, pi, bc);
    rec.rbar = opt.rbar;
    rec.rn_min = kInfinity;
    double risk_min = kInfinity;
    for (std::size_t j = 0; j < rn.size(); ++j)
        if (pi[j] > 0.0) {
            rec.rn_min = std::min(rec.rn_min, rn[j]);
            risk_min = std::min(risk_min, risk[j]);
        }
    rec.erm_risk = risk[erm_index(rn)];

    auto holds = [&](const DiscreteDistribution& rho, double* slack_out) {
        const BoundReport r = evaluate_bound(rho, pi, rn, bc);
        const double dev = std::abs(expectation(rho, risk) - r.rn_integral);
        if (slack_out) *slack_out = r.margin - dev;
        return dev <= r.margin + kComparisonSlack * std::max(1.0, r.margin);
    };

    const BoundReport rh = evaluate_bound(opt.rho_hat, pi, rn, bc);
    rec.rho_hat_rn = rh.rn_integral;
    rec.rho_hat_margin = rh.margin;
    rec.rho_hat_risk = expectation(opt.rho_hat, risk);
    rec.prior_margin = pac_margin(bc, 1.0);

    bool all = holds(opt.rho_hat, &rec.rho_hat_slack);
    rec.distributions_checked = 1;
    for (const auto& probe : make_probes(pi, cfg.probes, stream_seed(cfg.seed, rep, stream::probes))) {
        all = holds(probe, nullptr) && all;
        ++rec.distributions_checked;
    }
    rec.thm1_hit = all;

    auto le = [](double a, double b) { return a <= b + kComparisonSlack * std::max(1.0, std::abs(b)); };

    // int R d rho_hat <= rbar <= Rbar_n
    rec.population_rbar = solve_population_rbar(risk, pi, bc.q, bc.moment.value, bc.delta);
    rec.sandwich_hit = le(rec.rho_hat_risk, rec.rbar) && le(rec.rbar, rec.population_rbar);
    bool oracle = rec.sandwich_hit;

    rec.empirical_d = empirical_complexity(cfg, rn, pi);
    if (rec.empirical_d) {
        rec.oracle_empirical = oracle_bound_empirical(rec.rn_min, bc.moment.value, bc.delta, bc.q, *rec.empirical_d);
        const double half_gap = 0.5 * (rec.rbar - rec.rn_min);
        rec.assumption_at_gap = half_gap <= 0.0 || sublevel_mass(rn, pi, half_gap) >= std::pow(half_gap, *rec.empirical_d);
        rec.oracle_empirical_hit = le(rec.rho_hat_risk, *rec.oracle_empirical);
        rec.rbar_within_oracle = le(rec.rbar, *rec.oracle_empirical);
        oracle = oracle && *rec.oracle_empirical_hit;
    }
    if (px.population_complexity && px.population_complexity->satisfied) {
        rec.oracle_population = oracle_bound_population(risk_min, bc.moment.value, bc.delta, bc.q, px.population_complexity->d);
        rec.oracle_population_hit = le(rec.rho_hat_risk, *rec.oracle_population);
        oracle = oracle && *rec.oracle_population_hit;
    }
    rec.oracle_hit = oracle;
    return rec;
}

inline CoverageReport run_coverage(const PreparedExperiment& px) {
    detail::require(px.risk && px.risk->closed_form, "coverage needs a closed-form true risk");
    detail::require(px.cfg.replications >= kMinCoverageReplications, "coverage needs at least 50 replications");
    CoverageReport rep;
    rep.replications = px.cfg.replications;
    rep.constants = px.constants;
    rep.records.resize(rep.replications);
    parallel_for(rep.replications, px.cfg.workers, [&](std::size_t i) { rep.records[i] = run_replication(px, i); });

    std::size_t thm1 = 0, oracle = 0;
    double slack = 0.0;
    std::vector<double> margins, prior_margins, rbars;
    for (const auto& r : rep.records) {
        thm1 += r.thm1_hit;
        oracle += r.oracle_hit;
        slack += r.rho_hat_slack;
        margins.push_back(r.rho_hat_margin);
        prior_margins.push_back(r.prior_margin);
        rbars.push_back(r.rbar);
        if (r.thm1_hit && r.oracle_empirical_hit) {
            ++rep.oracle_empirical_applicable;
            rep.oracle_empirical_holds += *r.oracle_empirical_hit;
        }
    }
    const double n = static_cast<double>(rep.replications);
    rep.coverage_thm1 = static_cast<double>(thm1) / n;
    rep.coverage_oracle = static_cast<double>(oracle) / n;
    rep.mean_slack = slack / n;
    rep.median_margin = median(margins);
    rep.median_margin_prior = median(prior_margins);
    rep.median_rbar = median(rbars);
    return rep;
}

inline CoverageReport run_coverage(const ExperimentConfig& cfg) { return run_coverage(prepare(cfg, true)); }

inline Json to_json(const ReplicationRecord& r, const Json& constants) {
    Json j;
    j["record"] = "replication";
    j["replication"] = r.index;
    j["seed"] = r.seed;
    j["thm1_hit"] = r.thm1_hit;
    j["distributions_checked"] = r.distributions_checked;
    j["rbar"] = json_number(r.rbar);
    j["rn_min"] = json_number(r.rn_min);
    j["rho_hat_rn"] = json_number(r.rho_hat_rn);
    j["rho_hat_risk"] = json_number(r.rho_hat_risk);
    j["rho_hat_margin"] = json_number(r.rho_hat_margin);
    j["rho_hat_slack"] = json_number(r.rho_hat_slack);
    j["prior_margin"] = json_number(r.prior_margin);
    j["erm_risk"] = json_number(r.erm_risk);
    j["population_rbar"] = json_number(r.population_rbar);
    j["sandwich_hit"] = r.sandwich_hit;
    j["empirical_d"] = json_optional(r.empirical_d);
    j["oracle_empirical"] = json_optional(r.oracle_empirical);
    j["oracle_empirical_hit"] = json_optional(r.oracle_empirical_hit);
    j["rbar_within_oracle"] = json_optional(r.rbar_within_oracle);
    j["assumption_at_gap"] = json_optional(r.assumption_at_gap);
    j["oracle_population"] = json_optional(r.oracle_population);
    j["oracle_population_hit"] = json_optional(r.oracle_population_hit);
    j["oracle_hit"] = r.oracle_hit;
    for (const auto& [key, value] : constants.items()) j[key] = value;
    return j;
}

inline Json summary_json(const CoverageReport& r) {
    Json j;
    j["record"] = "coverage_summary";
    j["replications"] = r.replications;
    j["coverage_thm1"] = r.coverage_thm1;
    j["coverage_oracle"] = r.coverage_oracle;
    j["mean_slack"] = json_number(r.mean_slack);
    j["median_margin"] = json_number(r.median_margin);
    j["median_margin_prior"] = json_number(r.median_margin_prior);
    j["median_rbar"] = json_number(r.median_rbar);
    j["oracle_empirical_applicable"] = r.oracle_empirical_applicable;
    j["oracle_empirical_holds"] = r.oracle_empirical_holds;
    for (const auto& [key, value] : r.constants.items()) j[key] = value;
    return j;
}

struct SweepRow {
    double value = 0.0;
    CoverageReport report;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
    // Fitted slopes of log(median margin) against log(n), axis = n only. The
    // first uses the prior's margin (fixed divergence); the second uses rho_hat,
    // whose divergence grows as it concentrates with n.
    std::optional<double> log_log_slope;
    std::optional<double> log_log_slope_rho_hat;
};

inline ExperimentConfig with_axis_value(ExperimentConfig cfg, const std::string& axis, double value) {
    if (axis == "n") {
        detail::require(value >= 2.0 && value == std::floor(value), "sweep over n needs integers >= 2");
        cfg.n = static_cast<std::size_t>(value);
    } else if (axis == "delta") {
        cfg.delta = value;
    } else if (axis == "p") {
        cfg.p = value;
    } else {
        throw ConfigError("sweep axis must be n, delta or p");
    }
    validate(cfg);
    return cfg;
}

inline SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& axis, const std::vector<double>& values) {
    detail::require(!values.empty(), "sweep needs at least one value");
    SweepResult out;
    out.axis = axis;
    for (double v : values) out.rows.push_back({v, run_coverage(with_axis_value(cfg, axis, v))});
    if (axis == "n" && values.size() >= 2) {
        std::vector<double> fixed, adaptive;
        for (const auto& r : out.rows) {
            fixed.push_back(r.report.median_margin_prior);
            adaptive.push_back(r.report.median_margin);
        }
        out.log_log_slope = log_log_slope(values, fixed);
        out.log_log_slope_rho_hat = log_log_slope(values, adaptive);
    }
    return out;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& s) {
    os << "axis,value,n,delta,p,q,moment_bound,coverage_thm1,coverage_oracle,mean_slack,median_margin,median_margin_prior,"
          "median_rbar\n";
    os << std::setprecision(12);
    for (const auto& row : s.rows) {
        const auto& c = row.report.constants;
        os << s.axis << ',' << row.value << ',' << c["n"].get<std::size_t>() << ',' << c["delta"].get<double>() << ','
           << c["p"].get<double>() << ',' << c["q"].get<double>() << ',' << c["moment_bound"].dump() << ','
           << row.report.coverage_thm1 << ',' << row.report.coverage_oracle << ',' << row.report.mean_slack << ','
           << row.report.median_margin << ',' << row.report.median_margin_prior << ',' << row.report.median_rbar << '\n';
    }
}

} // namespace hostile_pac
