#pragma once

// Experiment configuration: an INI file with sections
//   [experiment] [generator] [prior] [regime] [complexity] [oracle] [sweep]
// See README.md for the full key list. Values that accept "auto" are derived
// analytically from the generator and prior.

#include "hostile_pac/aggregation.hpp"
#include "hostile_pac/datagen.hpp"
#include "hostile_pac/error.hpp"
#include "hostile_pac/moments.hpp"
#include "hostile_pac/param_space.hpp"
#include "hostile_pac/risk.hpp"
#include "hostile_pac/true_risk.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace hostile_pac {

enum class RegimeKind { Variance, SubGaussian, MixingBounded, MixingUnbounded };

enum class VarianceSource { Kappa, Exact };

struct RegimeSettings {
    RegimeKind kind = RegimeKind::Variance;
    std::optional<double> s2;
    VarianceSource s2_source = VarianceSource::Kappa;
    std::optional<double> sigma2;
    std::optional<double> alpha_sum;
    double r = 3.0;
    double s = 3.0;
    std::optional<double> moment_integral;
    std::optional<double> alpha_frac_sum;
    double davydov_factor = 8.0;
    // sub-Gaussian only; unset means q = 2 log(2K / delta)
    std::optional<double> q;
    // multiplies the moment bound (>= 1 keeps every guarantee valid)
    double inflate = 1.0;
};

struct ComplexitySettings {
    std::vector<double> gamma_grid;
    std::optional<double> d;
};

struct SweepSettings {
    std::string axis = "n";
    std::vector<double> values;
};

struct ExperimentConfig {
    GeneratorSpec generator = generator::IidLinearRegression{{1.0}, covariate_law::Gaussian{}, noise_law::Gaussian{}};
    PriorSpec prior = prior_spec::IidSample{};
    LossKind loss = loss_kind::Squared{};
    double p = 2.0;
    double delta = 0.1;
    RegimeSettings regime;
    std::size_t n = 200;
    std::size_t replications = 100;
    std::uint64_t seed = 1;
    ComplexitySettings complexity;
    std::size_t probes = 0;
    std::size_t workers = 1;
    TrueRiskOptions oracle;
    SweepSettings sweep;
};

inline const char* to_string(RegimeKind k) {
    switch (k) {
    case RegimeKind::Variance: return "variance";
    case RegimeKind::SubGaussian: return "subgaussian";
    case RegimeKind::MixingBounded: return "mixing_bounded";
    case RegimeKind::MixingUnbounded: return "mixing_unbounded";
    }
    return "?";
}

namespace detail {

inline std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline double parse_real(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + raw + "'");
    }
}

inline std::uint64_t parse_count(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + raw + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': integer out of range");
    }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& raw, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string cell;
    while (std::getline(ss, cell, sep))
        if (!trim(cell).empty()) out.push_back(parse_real(key, cell));
    return out;
}

inline const std::set<std::string> kKnownKeys{
    "complexity.d", "complexity.gamma_grid", "complexity.gamma_hi", "complexity.gamma_lo", "complexity.gamma_points",
    "experiment.delta", "experiment.loss", "experiment.n", "experiment.p", "experiment.probes", "experiment.replications",
    "experiment.seed", "experiment.workers", "experiment.zero_one_threshold",
    "generator.a", "generator.flip", "generator.kind", "generator.mixing_c1", "generator.mixing_c2", "generator.noise",
    "generator.noise_dof", "generator.noise_scale", "generator.noise_variance", "generator.theta_star", "generator.x_law",
    "generator.x_scale",
    "oracle.batches", "oracle.draws", "oracle.monte_carlo",
    "prior.atoms", "prior.base", "prior.count", "prior.dimension", "prior.kind", "prior.lower", "prior.points", "prior.scale",
    "prior.seed", "prior.upper", "prior.weights",
    "regime.alpha_frac_sum", "regime.alpha_sum", "regime.davydov_factor", "regime.inflate", "regime.kind",
    "regime.moment_integral", "regime.q", "regime.r", "regime.s", "regime.s2", "regime.sigma2",
    "sweep.axis", "sweep.values"};

// Reads typed values out of a property tree.
class ConfigReader {
public:
    explicit ConfigReader(const boost::property_tree::ptree& tree) : tree_(tree) {}

    std::optional<std::string> raw(const std::string& path) {
        if (auto v = tree_.get_optional<std::string>(path)) return trim(*v);
        return std::nullopt;
    }

    std::string text(const std::string& path, const std::string& fallback) {
        return lower(raw(path).value_or(fallback));
    }

    double real(const std::string& path, double fallback) {
        auto v = raw(path);
        return v ? parse_real(path, *v) : fallback;
    }

    std::optional<double> real_or_auto(const std::string& path) {
        auto v = raw(path);
        if (!v || lower(*v) == "auto") return std::nullopt;
        return parse_real(path, *v);
    }

    std::uint64_t count(const std::string& path, std::uint64_t fallback) {
        auto v = raw(path);
        return v ? parse_count(path, *v) : fallback;
    }

    std::vector<double> list(const std::string& path, std::vector<double> fallback = {}) {
        auto v = raw(path);
        return v ? parse_list(path, *v) : fallback;
    }

    // Keys outside the schema are rejected; keys that the chosen kinds do not
    // read are accepted so overrides can switch kinds freely.
    void reject_unknown() const {
        for (const auto& [section, body] : tree_) {
            if (body.empty()) throw ConfigError("config: key '" + section + "' must live inside a [section]");
            for (const auto& [key, value] : body) {
                const std::string path = section + "." + key;
                if (!kKnownKeys.count(path)) throw ConfigError("config: unknown key '" + path + "'");
            }
        }
    }

private:
    const boost::property_tree::ptree& tree_;
};

inline NoiseLaw read_noise(ConfigReader& r) {
    const std::string kind = r.text("generator.noise", "gaussian");
    if (kind == "gaussian") return noise_law::Gaussian{r.real("generator.noise_variance", 1.0)};
    if (kind == "student_t")
        return noise_law::StudentT{r.real("generator.noise_dof", 5.0), r.real("generator.noise_scale", 1.0)};
    throw ConfigError("generator.noise must be gaussian or student_t");
}

inline CovariateLaw read_covariates(ConfigReader& r) {
    const std::string kind = r.text("generator.x_law", "gaussian");
    const double scale = r.real("generator.x_scale", 1.0);
    if (kind == "gaussian") return covariate_law::Gaussian{scale};
    if (kind == "uniform_box") return covariate_law::UniformBox{scale};
    throw ConfigError("generator.x_law must be gaussian or uniform_box");
}

inline GeneratorSpec read_generator(ConfigReader& r) {
    const std::string kind = r.text("generator.kind", "iid_regression");
    if (kind == "iid_regression")
        return generator::IidLinearRegression{r.list("generator.theta_star", {1.0}), read_covariates(r), read_noise(r)};
    if (kind == "ar1") {
        generator::AR1 g{r.real("generator.a", 0.5), read_noise(r), std::nullopt};
        auto c1 = r.raw("generator.mixing_c1");
        auto c2 = r.raw("generator.mixing_c2");
        if (c1.has_value() != c2.has_value())
            throw ConfigError("generator.mixing_c1 and generator.mixing_c2 must be given together");
        if (c1) g.mixing = MixingBoundSpec{parse_real("generator.mixing_c1", *c1), parse_real("generator.mixing_c2", *c2)};
        return g;
    }
    if (kind == "classification")
        return generator::BoundedClassification{r.list("generator.theta_star", {1.0}), read_covariates(r),
                                                r.real("generator.flip", 0.0)};
    throw ConfigError("generator.kind must be iid_regression, ar1 or classification");
}

inline std::vector<std::vector<double>> parse_atoms(const std::string& raw) {
    std::vector<std::vector<double>> atoms;
    std::stringstream ss(raw);
    std::string cell;
    while (std::getline(ss, cell, ';'))
        if (!trim(cell).empty()) atoms.push_back(parse_list("prior.atoms", cell));
    return atoms;
}

inline PriorSpec read_prior(ConfigReader& r) {
    const std::string kind = r.text("prior.kind", "iid_sample");
    if (kind == "grid") {
        prior_spec::UniformGrid g;
        g.lower = r.list("prior.lower");
        g.upper = r.list("prior.upper");
        g.points_per_axis = r.count("prior.points", 2);
        return g;
    }
    if (kind == "iid_sample") {
        prior_spec::IidSample s;
        const std::string base = r.text("prior.base", "gaussian");
        if (base == "gaussian")
            s.law = prior_spec::SampleLaw::Gaussian;
        else if (base == "uniform_box")
            s.law = prior_spec::SampleLaw::UniformBox;
        else
            throw ConfigError("prior.base must be gaussian or uniform_box");
        s.scale = r.real("prior.scale", 1.0);
        s.dimension = r.count("prior.dimension", 0);
        s.count = r.count("prior.count", 100);
        if (auto seed = r.raw("prior.seed")) s.seed = parse_count("prior.seed", *seed);
        return s;
    }
    if (kind == "explicit") {
        prior_spec::Explicit e;
        e.atoms = parse_atoms(r.raw("prior.atoms").value_or(""));
        e.weights = r.list("prior.weights");
        if (e.weights.empty() && !e.atoms.empty())
            e.weights.assign(e.atoms.size(), 1.0 / static_cast<double>(e.atoms.size()));
        return e;
    }
    throw ConfigError("prior.kind must be grid, iid_sample or explicit");
}

inline LossKind read_loss(ConfigReader& r) {
    const std::string kind = r.text("experiment.loss", "squared");
    if (kind == "squared") return loss_kind::Squared{};
    if (kind == "absolute") return loss_kind::Absolute{};
    if (kind == "zero_one") return loss_kind::ZeroOne{r.real("experiment.zero_one_threshold", 0.0)};
    throw ConfigError("experiment.loss must be squared, absolute or zero_one");
}

inline RegimeSettings read_regime(ConfigReader& r) {
    RegimeSettings s;
    const std::string kind = r.text("regime.kind", "variance");
    if (kind == "variance")
        s.kind = RegimeKind::Variance;
    else if (kind == "subgaussian")
        s.kind = RegimeKind::SubGaussian;
    else if (kind == "mixing_bounded")
        s.kind = RegimeKind::MixingBounded;
    else if (kind == "mixing_unbounded")
        s.kind = RegimeKind::MixingUnbounded;
    else
        throw ConfigError("regime.kind must be variance, subgaussian, mixing_bounded or mixing_unbounded");

    if (auto v = r.raw("regime.s2")) {
        const std::string t = lower(*v);
        if (t == "auto" || t == "kappa")
            s.s2_source = VarianceSource::Kappa;
        else if (t == "exact")
            s.s2_source = VarianceSource::Exact;
        else
            s.s2 = parse_real("regime.s2", *v);
    }
    s.sigma2 = r.real_or_auto("regime.sigma2");
    s.alpha_sum = r.real_or_auto("regime.alpha_sum");
    s.r = r.real("regime.r", 3.0);
    s.s = r.real("regime.s", 3.0);
    s.moment_integral = r.real_or_auto("regime.moment_integral");
    s.alpha_frac_sum = r.real_or_auto("regime.alpha_frac_sum");
    s.davydov_factor = r.real("regime.davydov_factor", 8.0);
    s.q = r.real_or_auto("regime.q");
    s.inflate = r.real("regime.inflate", 1.0);
    return s;
}

inline ComplexitySettings read_complexity(ConfigReader& r) {
    ComplexitySettings c;
    c.d = r.real_or_auto("complexity.d");
    if (auto grid = r.raw("complexity.gamma_grid")) {
        c.gamma_grid = parse_list("complexity.gamma_grid", *grid);
    } else {
        const auto lo = r.raw("complexity.gamma_lo");
        const auto hi = r.raw("complexity.gamma_hi");
        const std::size_t points = r.count("complexity.gamma_points", 20);
        if (lo.has_value() != hi.has_value()) throw ConfigError("complexity.gamma_lo and gamma_hi must be given together");
        if (lo) {
            const double a = parse_real("complexity.gamma_lo", *lo);
            const double b = parse_real("complexity.gamma_hi", *hi);
            require(points >= 1, "complexity.gamma_points must be >= 1");
            for (std::size_t i = 0; i < points; ++i)
                c.gamma_grid.push_back(points == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
        }
    }
    return c;
}

} // namespace detail

// Cross-field checks; throws ConfigError on inconsistency.
inline void validate(const ExperimentConfig& cfg) {
    validate(cfg.generator);
    detail::require(cfg.p > 1.0, "experiment.p must be > 1");
    detail::require(cfg.delta > 0.0 && cfg.delta < 1.0, "experiment.delta must be in (0, 1)");
    detail::require(cfg.n >= 2, "experiment.n must be >= 2");
    detail::require(cfg.workers >= 1, "experiment.workers must be >= 1");
    detail::require(cfg.regime.inflate > 0.0, "regime.inflate must be > 0");
    const bool ar1 = std::holds_alternative<generator::AR1>(cfg.generator);
    const bool classification = std::holds_alternative<generator::BoundedClassification>(cfg.generator);
    switch (cfg.regime.kind) {
    case RegimeKind::Variance:
    case RegimeKind::SubGaussian:
        detail::require(!ar1, std::string(to_string(cfg.regime.kind)) + " regime assumes independent data; use a mixing regime for ar1");
        break;
    case RegimeKind::MixingBounded:
        detail::require(ar1, "mixing_bounded regime requires the ar1 generator");
        detail::require(is_zero_one(cfg.loss), "mixing_bounded regime requires losses in [0, 1] (zero_one loss)");
        break;
    case RegimeKind::MixingUnbounded:
        detail::require(ar1, "mixing_unbounded regime requires the ar1 generator");
        break;
    }
    if (classification) detail::require(is_zero_one(cfg.loss), "classification generator requires zero_one loss");
    for (double g : cfg.complexity.gamma_grid)
        detail::require(g > 0.0 && g < 1.0, "complexity gamma grid must lie in (0, 1)");
    if (cfg.complexity.d) detail::require(*cfg.complexity.d > 0.0, "complexity.d must be > 0");
}

// Parses INI text. `overrides` are "section.key=value" strings applied on top.
inline ExperimentConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {}) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || ov.find('.') > eq)
            throw ConfigError("override '" + ov + "' must look like section.key=value");
        tree.put(detail::trim(ov.substr(0, eq)), detail::trim(ov.substr(eq + 1)));
    }

    detail::ConfigReader r(tree);
    ExperimentConfig cfg;
    cfg.n = r.count("experiment.n", 200);
    cfg.replications = r.count("experiment.replications", 100);
    cfg.seed = r.count("experiment.seed", 1);
    cfg.p = r.real("experiment.p", 2.0);
    cfg.delta = r.real("experiment.delta", 0.1);
    cfg.probes = r.count("experiment.probes", 0);
    cfg.workers = r.count("experiment.workers", 1);
    cfg.loss = detail::read_loss(r);
    cfg.generator = detail::read_generator(r);
    cfg.prior = detail::read_prior(r);
    if (auto* s = std::get_if<prior_spec::IidSample>(&cfg.prior); s && s->dimension == 0)
        s->dimension = covariate_dimension(cfg.generator);
    cfg.regime = detail::read_regime(r);
    cfg.complexity = detail::read_complexity(r);
    cfg.oracle.allow_monte_carlo = r.text("oracle.monte_carlo", "true") == "true";
    cfg.oracle.mc_draws = r.count("oracle.draws", 1'000'000);
    cfg.oracle.mc_batches = r.count("oracle.batches", 100);
    cfg.sweep.axis = r.text("sweep.axis", "n");
    cfg.sweep.values = r.list("sweep.values");
    cfg.oracle.seed = stream_seed(cfg.seed, 0, stream::oracle);
    r.reject_unknown();
    validate(cfg);
    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {}) {
    std::istringstream in(text);
    return parse_config(in, overrides);
}

inline ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in, overrides);
}

} // namespace hostile_pac
