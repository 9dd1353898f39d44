#include "hostile_pac/harness.hpp"
#include "hostile_pac/selftest.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace hp = hostile_pac;

namespace {

struct Options {
    std::string config;
    std::string out = "-";
    std::vector<std::string> set;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string data;
    std::string export_data;
};

hp::ExperimentConfig load(const Options& o) {
    std::vector<std::string> overrides = o.set;
    if (o.seed) overrides.push_back("experiment.seed=" + std::to_string(*o.seed));
    if (o.workers) overrides.push_back("experiment.workers=" + std::to_string(*o.workers));
    if (o.config.empty()) return hp::parse_config_text("", overrides);
    return hp::load_config(o.config, overrides);
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Sink {
public:
    explicit Sink(const std::string& out) : path_(out) {
        if (out != "-") {
            file_ = std::make_unique<std::ofstream>(out);
            if (!*file_) throw hp::ConfigError("cannot open output '" + out + "'");
        }
    }
    std::ostream& records() { return file_ ? *file_ : std::cout; }
    void record(const hp::Json& j) { records() << j.dump() << '\n'; }

    void summary(hp::Json j) {
        j["generated_at"] = utc_timestamp();
        if (file_) {
            std::ofstream s(path_ + ".summary.json");
            s << j.dump(2) << '\n';
        } else {
            std::cout << j.dump() << '\n';
        }
    }
    void csv(const hp::SweepResult& r) {
        if (file_) {
            std::ofstream s(path_ + ".csv");
            hp::write_sweep_csv(s, r);
        } else {
            hp::write_sweep_csv(std::cout, r);
        }
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
};

hp::Json base_summary(const char* command, const hp::PreparedExperiment& px) {
    hp::Json j;
    j["record"] = "summary";
    j["command"] = command;
    j["seed"] = px.cfg.seed;
    for (const auto& [key, value] : px.constants.items()) j[key] = value;
    return j;
}

hp::Dataset dataset_for(const Options& o, const hp::PreparedExperiment& px) {
    hp::Dataset data = o.data.empty() ? hp::dataset_for_replication(px.cfg, 0) : hp::load_dataset(o.data);
    if (!o.export_data.empty()) hp::save_dataset(o.export_data, data);
    return data;
}

int cmd_bound(const Options& o) {
    const hp::PreparedExperiment px = hp::prepare(load(o));
    const hp::Dataset data = dataset_for(o, px);
    const hp::BoundRun run = hp::run_bound(px, data);
    Sink sink(o.out);
    for (std::size_t i = 0; i < run.reports.size(); ++i) sink.record(hp::to_json(run.reports[i], run.true_risk_integrals[i], px.constants));
    hp::Json s = base_summary("bound", px);
    s["samples"] = data.size();
    s["empirical_d"] = hp::json_optional(run.empirical_d);
    s["gamma"] = hp::json_optional(run.gamma);
    s["risk_closed_form"] = px.risk ? hp::Json(px.risk->closed_form) : hp::Json(nullptr);
    sink.summary(std::move(s));
    return 0;
}

int cmd_aggregate(const Options& o) {
    const hp::PreparedExperiment px = hp::prepare(load(o));
    const hp::Dataset data = dataset_for(o, px);
    const auto& pi = px.prior.weights;
    const std::vector<double> rn = hp::empirical_risk(hp::compute_loss_table(data, px.prior.atoms, px.cfg.loss));
    const hp::MinimizedObjective opt = hp::minimized_objective_identity(rn, pi, px.bound);
    Sink sink(o.out);
    for (std::size_t j = 0; j < pi.size(); ++j) {
        hp::Json r;
        r["record"] = "aggregate_weight";
        r["atom"] = j;
        const auto theta = px.prior.atoms[j];
        r["theta"] = std::vector<double>(theta.begin(), theta.end());
        r["prior_weight"] = pi[j];
        r["weight"] = opt.rho_hat[j];
        r["rn"] = hp::json_number(rn[j]);
        for (const auto& [key, value] : px.constants.items()) r[key] = value;
        sink.record(r);
    }
    hp::BoundReport rep = hp::evaluate_bound(opt.rho_hat, pi, rn, px.bound, "rho_hat");
    rep.rbar = opt.rbar;
    std::optional<double> risk_integral;
    if (px.risk) risk_integral = hp::expectation(opt.rho_hat, px.risk->values);
    sink.record(hp::to_json(rep, risk_integral, px.constants));
    hp::Json s = base_summary("aggregate", px);
    s["samples"] = data.size();
    s["rbar"] = hp::json_number(opt.rbar);
    s["objective"] = hp::json_number(opt.objective);
    sink.summary(std::move(s));
    return 0;
}

int cmd_coverage(const Options& o) {
    const hp::PreparedExperiment px = hp::prepare(load(o), true);
    const hp::CoverageReport rep = hp::run_coverage(px);
    Sink sink(o.out);
    for (const auto& r : rep.records) sink.record(hp::to_json(r, px.constants));
    hp::Json s = hp::summary_json(rep);
    s["command"] = "coverage";
    s["seed"] = px.cfg.seed;
    sink.summary(std::move(s));
    return 0;
}

int cmd_sweep(const Options& o) {
    const hp::ExperimentConfig cfg = load(o);
    const hp::SweepResult res = hp::run_sweep(cfg, cfg.sweep.axis, cfg.sweep.values);
    Sink sink(o.out);
    for (const auto& row : res.rows) {
        hp::Json j = hp::summary_json(row.report);
        j["record"] = "sweep_row";
        j["axis"] = res.axis;
        j["value"] = row.value;
        sink.record(j);
    }
    sink.csv(res);
    hp::Json s;
    s["record"] = "summary";
    s["command"] = "sweep";
    s["seed"] = cfg.seed;
    s["axis"] = res.axis;
    s["values"] = cfg.sweep.values;
    s["log_log_slope"] = hp::json_optional(res.log_log_slope);
    s["log_log_slope_rho_hat"] = hp::json_optional(res.log_log_slope_rho_hat);
    sink.summary(std::move(s));
    return 0;
}

int cmd_selftest() {
    int failed = 0;
    for (const auto& c : hp::run_selftest()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value << " expected=" << c.expected << '\n';
        failed += !c.passed;
    }
    std::cout << (failed == 0 ? "selftest: all passed\n" : "selftest: " + std::to_string(failed) + " failed\n");
    return failed == 0 ? 0 : 2;
}

void add_common(CLI::App* sub, Options& o, bool data_options) {
    sub->add_option("--config", o.config, "INI experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "root seed (overrides experiment.seed)");
    sub->add_option("--out", o.out, "JSON-lines output path; '-' for stdout");
    sub->add_option("--set", o.set, "override a config key, section.key=value")->take_all();
    sub->add_option("--workers", o.workers, "worker threads (overrides experiment.workers)");
    if (data_options) {
        sub->add_option("--data", o.data, "CSV dataset (y,x1,...,xk) instead of generating one")->check(CLI::ExistingFile);
        sub->add_option("--export-data", o.export_data, "write the dataset used to this CSV path");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"f-divergence PAC-Bayes bounds for heavy-tailed and dependent data"};
    app.require_subcommand(1);
    Options o;
    auto* bound = app.add_subcommand("bound", "bounds for rho_hat, pi_gamma, Dirac-ERM and the prior on one dataset");
    auto* aggregate = app.add_subcommand("aggregate", "weights of the optimal aggregation distribution");
    auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage of the bound over replications");
    auto* sweep = app.add_subcommand("sweep", "coverage summaries across n, delta or p");
    auto* selftest = app.add_subcommand("selftest", "closed-form example suite");
    add_common(bound, o, true);
    add_common(aggregate, o, true);
    add_common(coverage, o, false);
    add_common(sweep, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*bound) return cmd_bound(o);
        if (*aggregate) return cmd_aggregate(o);
        if (*coverage) return cmd_coverage(o);
        if (*sweep) return cmd_sweep(o);
        if (*selftest) return cmd_selftest();
    } catch (const hp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const hp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const hp::AssumptionViolation& e) {
        std::cerr << "assumption violated: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
