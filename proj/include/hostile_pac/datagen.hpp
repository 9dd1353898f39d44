#pragma once

// Synthetic "hostile" data generators with closed-form moments and risks.
//
// Moment bookkeeping: every generator's residual W = y - <theta, x> is a sum
// of independent, symmetric pieces plus possibly a constant shift, so its raw
// moments up to order 6 are obtained exactly by binomial convolution of the
// pieces' moment sequences. AR(1) stationary moments come from cumulants,
// kappa_m(Y) = kappa_m(eps) / (1 - a^m).

#include "hostile_pac/error.hpp"
#include "hostile_pac/param_space.hpp"
#include "hostile_pac/risk.hpp"
#include "hostile_pac/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <variant>
#include <vector>

namespace hostile_pac {

namespace noise_law {
struct Gaussian {
    double variance = 1.0;
};
// scale * T_dof
struct StudentT {
    double dof = 5.0;
    double scale = 1.0;
};
} // namespace noise_law

using NoiseLaw = std::variant<noise_law::Gaussian, noise_law::StudentT>;

namespace covariate_law {
// i.i.d. N(0, scale^2) coordinates
struct Gaussian {
    double scale = 1.0;
};
// i.i.d. uniform coordinates on [-half_width, half_width]
struct UniformBox {
    double half_width = 1.0;
};
} // namespace covariate_law

using CovariateLaw = std::variant<covariate_law::Gaussian, covariate_law::UniformBox>;

// Geometric envelope alpha_j <= c1 exp(-c2 |j|). Supplied, never estimated.
struct MixingBoundSpec {
    double c1 = 0.0;
    double c2 = 1.0;
};

namespace generator {
// y = <theta_star, x> + eps
struct IidLinearRegression {
    std::vector<double> theta_star;
    CovariateLaw x_law = covariate_law::Gaussian{};
    NoiseLaw noise = noise_law::Gaussian{};
};
// y_i = a y_{i-1} + eps_i, regression pairs x_i = (1, y_{i-1})
struct AR1 {
    double a = 0.5;
    NoiseLaw noise = noise_law::Gaussian{};
    std::optional<MixingBoundSpec> mixing;
};
// label = sign(<theta_star, x>) in {-1, +1}, flipped with probability `flip`
struct BoundedClassification {
    std::vector<double> theta_star;
    CovariateLaw x_law = covariate_law::Gaussian{};
    double flip = 0.0;
};
} // namespace generator

using GeneratorSpec = std::variant<generator::IidLinearRegression, generator::AR1, generator::BoundedClassification>;

inline constexpr std::size_t kStudentTBurnIn = 1000;

namespace detail {

inline void validate_noise(const NoiseLaw& noise) {
    std::visit(
        [](const auto& nl) {
            using N = std::decay_t<decltype(nl)>;
            if constexpr (std::is_same_v<N, noise_law::Gaussian>) {
                require(std::isfinite(nl.variance) && nl.variance >= 0.0, "gaussian noise variance must be >= 0");
            } else {
                require(std::isfinite(nl.dof) && nl.dof > 2.0, "student-t noise needs dof > 2");
                require(std::isfinite(nl.scale) && nl.scale > 0.0, "student-t scale must be > 0");
            }
        },
        noise);
}

inline void validate_covariates(const CovariateLaw& law) {
    std::visit(
        [](const auto& l) {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, covariate_law::Gaussian>)
                require(std::isfinite(l.scale) && l.scale > 0.0, "gaussian covariate scale must be > 0");
            else
                require(std::isfinite(l.half_width) && l.half_width > 0.0, "uniform box half width must be > 0");
        },
        law);
}

inline void validate_theta(const std::vector<double>& t) {
    require(!t.empty(), "theta_star must be nonempty");
    for (double v : t) require(std::isfinite(v), "theta_star must be finite");
}

} // namespace detail

inline void validate(const GeneratorSpec& spec) {
    std::visit(
        [](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, generator::IidLinearRegression>) {
                detail::validate_theta(g.theta_star);
                detail::validate_covariates(g.x_law);
                detail::validate_noise(g.noise);
            } else if constexpr (std::is_same_v<G, generator::AR1>) {
                detail::require(std::isfinite(g.a) && std::abs(g.a) < 1.0, "AR(1) coefficient must satisfy |a| < 1");
                detail::validate_noise(g.noise);
                if (g.mixing) {
                    detail::require(std::isfinite(g.mixing->c1) && g.mixing->c1 >= 0.0, "mixing c1 must be >= 0");
                    detail::require(std::isfinite(g.mixing->c2) && g.mixing->c2 > 0.0, "mixing c2 must be > 0");
                }
            } else {
                detail::validate_theta(g.theta_star);
                detail::validate_covariates(g.x_law);
                detail::require(g.flip >= 0.0 && g.flip < 0.5, "label flip probability must be in [0, 0.5)");
            }
        },
        spec);
}

// Dimension of the covariate vector x produced by the generator.
inline std::size_t covariate_dimension(const GeneratorSpec& spec) {
    return std::visit(
        [](const auto& g) -> std::size_t {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, generator::AR1>)
                return 2;
            else
                return g.theta_star.size();
        },
        spec);
}

// Raw moments E[V^k], k = 0..6. Entries beyond `order` are NaN (nonexistent).
struct MomentSequence {
    std::array<double, 7> m{};
    int order = 6;

    double operator[](int k) const { return m[static_cast<std::size_t>(k)]; }

    static MomentSequence constant(double c) {
        MomentSequence s;
        double p = 1.0;
        for (int k = 0; k <= 6; ++k, p *= c) s.m[static_cast<std::size_t>(k)] = p;
        return s;
    }

    MomentSequence scaled(double c) const {
        MomentSequence s = *this;
        double p = 1.0;
        for (int k = 0; k <= 6; ++k, p *= c) s.m[static_cast<std::size_t>(k)] = k <= order ? m[static_cast<std::size_t>(k)] * p : NAN;
        return s;
    }

    // Moments of the sum of two independent variables.
    friend MomentSequence operator+(const MomentSequence& a, const MomentSequence& b) {
        static constexpr std::array<std::array<double, 7>, 7> binom = {{{1, 0, 0, 0, 0, 0, 0},
                                                                       {1, 1, 0, 0, 0, 0, 0},
                                                                       {1, 2, 1, 0, 0, 0, 0},
                                                                       {1, 3, 3, 1, 0, 0, 0},
                                                                       {1, 4, 6, 4, 1, 0, 0},
                                                                       {1, 5, 10, 10, 5, 1, 0},
                                                                       {1, 6, 15, 20, 15, 6, 1}}};
        MomentSequence s;
        s.order = std::min(a.order, b.order);
        for (int k = 0; k <= 6; ++k) {
            if (k > s.order) {
                s.m[static_cast<std::size_t>(k)] = NAN;
                continue;
            }
            double acc = 0.0;
            for (int j = 0; j <= k; ++j) acc += binom[k][j] * a[j] * b[k - j];
            s.m[static_cast<std::size_t>(k)] = acc;
        }
        return s;
    }
};

namespace detail {

inline MomentSequence symmetric_from_even(double m2, double m4, double m6, int order) {
    MomentSequence s;
    s.order = order;
    s.m = {1.0, 0.0, m2, 0.0, order >= 4 ? m4 : NAN, order >= 5 ? 0.0 : NAN, order >= 6 ? m6 : NAN};
    return s;
}

inline MomentSequence noise_moments(const NoiseLaw& noise) {
    return std::visit(
        [](const auto& nl) -> MomentSequence {
            using N = std::decay_t<decltype(nl)>;
            if constexpr (std::is_same_v<N, noise_law::Gaussian>) {
                const double v = nl.variance;
                return symmetric_from_even(v, 3.0 * v * v, 15.0 * v * v * v, 6);
            } else {
                const double nu = nl.dof;
                const double s2 = nl.scale * nl.scale;
                // moments of order k exist iff dof > k
                const int order = nu > 6.0 ? 6 : nu > 5.0 ? 5 : nu > 4.0 ? 4 : nu > 3.0 ? 3 : 2;
                const double m2 = s2 * nu / (nu - 2.0);
                const double m4 = order >= 4 ? 3.0 * s2 * s2 * nu * nu / ((nu - 2.0) * (nu - 4.0)) : NAN;
                const double m6 = order >= 6 ? 15.0 * s2 * s2 * s2 * nu * nu * nu / ((nu - 2.0) * (nu - 4.0) * (nu - 6.0)) : NAN;
                return symmetric_from_even(m2, m4, m6, order);
            }
        },
        noise);
}

inline MomentSequence coordinate_moments(const CovariateLaw& law) {
    return std::visit(
        [](const auto& l) -> MomentSequence {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, covariate_law::Gaussian>) {
                const double v = l.scale * l.scale;
                return symmetric_from_even(v, 3.0 * v * v, 15.0 * v * v * v, 6);
            } else {
                const double b2 = l.half_width * l.half_width;
                return symmetric_from_even(b2 / 3.0, b2 * b2 / 5.0, b2 * b2 * b2 / 7.0, 6);
            }
        },
        law);
}

// Moments of <w, x> for x with i.i.d. coordinates drawn from `law`.
inline MomentSequence projection_moments(const CovariateLaw& law, std::span<const double> w) {
    const MomentSequence coord = coordinate_moments(law);
    MomentSequence acc = MomentSequence::constant(0.0);
    for (double c : w) acc = acc + coord.scaled(c);
    return acc;
}

// Stationary moments of an AR(1) driven by `noise`.
inline MomentSequence ar1_stationary_moments(double a, const NoiseLaw& noise) {
    const MomentSequence e = noise_moments(noise);
    const double k2 = e[2];
    const double k4 = e.order >= 4 ? e[4] - 3.0 * k2 * k2 : NAN;
    const double k6 = e.order >= 6 ? e[6] - 15.0 * e[4] * k2 + 30.0 * k2 * k2 * k2 : NAN;
    const double y2 = k2 / (1.0 - a * a);
    const double y4c = k4 / (1.0 - std::pow(a, 4));
    const double y6c = k6 / (1.0 - std::pow(a, 6));
    const double m4 = y4c + 3.0 * y2 * y2;
    const double m6 = y6c + 15.0 * y4c * y2 + 15.0 * y2 * y2 * y2;
    return symmetric_from_even(y2, m4, m6, e.order);
}

inline double noise_variance(const NoiseLaw& noise) { return noise_moments(noise)[2]; }

inline void require_order(const MomentSequence& s, int order, const char* what) {
    if (s.order < order)
        throw AssumptionViolation(std::string(what) + ": moment of order " + std::to_string(order) +
                                  " does not exist for this noise law");
}

} // namespace detail

// Raw noise moment E[eps^order]; throws when it does not exist (t with dof <= order).
inline double noise_moment(const NoiseLaw& noise, int order) {
    detail::require(order >= 0 && order <= 6, "noise moment order must be in [0, 6]");
    const MomentSequence s = detail::noise_moments(noise);
    detail::require_order(s, order, "noise_moment");
    return s[order];
}

struct AnalyticMoments {
    double ey2 = 0.0;
    double ey4 = 0.0;
    std::optional<double> ey6;
    double ex4 = 0.0;
    // Noise variance; for classification, the Bernoulli flip variance flip(1 - flip).
    double var_eps = 0.0;
};

// Closed-form moments up to `order` (4 or 6). Throws AssumptionViolation when a
// requested moment does not exist for the noise law.
inline AnalyticMoments analytic_moments(const GeneratorSpec& spec, int order = 4) {
    validate(spec);
    detail::require(order == 4 || order == 6, "analytic_moments: order must be 4 or 6");
    return std::visit(
        [&](const auto& g) -> AnalyticMoments {
            using G = std::decay_t<decltype(g)>;
            AnalyticMoments out;
            if constexpr (std::is_same_v<G, generator::IidLinearRegression>) {
                const MomentSequence y = detail::projection_moments(g.x_law, g.theta_star) + detail::noise_moments(g.noise);
                detail::require_order(y, order, "analytic_moments");
                const MomentSequence c = detail::coordinate_moments(g.x_law);
                const double k = static_cast<double>(g.theta_star.size());
                out.ey2 = y[2];
                out.ey4 = y[4];
                if (order >= 6) out.ey6 = y[6];
                out.ex4 = k * c[4] + k * (k - 1.0) * c[2] * c[2];
                out.var_eps = detail::noise_variance(g.noise);
            } else if constexpr (std::is_same_v<G, generator::AR1>) {
                const MomentSequence y = detail::ar1_stationary_moments(g.a, g.noise);
                detail::require_order(y, order, "analytic_moments");
                out.ey2 = y[2];
                out.ey4 = y[4];
                if (order >= 6) out.ey6 = y[6];
                // ||(1, y)||^4 = (1 + y^2)^2
                out.ex4 = 1.0 + 2.0 * y[2] + y[4];
                out.var_eps = detail::noise_variance(g.noise);
            } else {
                const MomentSequence c = detail::coordinate_moments(g.x_law);
                const double k = static_cast<double>(g.theta_star.size());
                out.ey2 = 1.0;
                out.ey4 = 1.0;
                if (order >= 6) out.ey6 = 1.0;
                out.ex4 = k * c[4] + k * (k - 1.0) * c[2] * c[2];
                out.var_eps = g.flip * (1.0 - g.flip);
            }
            return out;
        },
        spec);
}

// Raw moments of the residual W = y - <theta, x> for a regression generator.
inline MomentSequence residual_moments(const GeneratorSpec& spec, std::span<const double> theta) {
    return std::visit(
        [&](const auto& g) -> MomentSequence {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, generator::IidLinearRegression>) {
                detail::require(theta.size() == g.theta_star.size(), "residual moments: theta dimension mismatch");
                std::vector<double> diff(theta.size());
                for (std::size_t c = 0; c < theta.size(); ++c) diff[c] = g.theta_star[c] - theta[c];
                return detail::projection_moments(g.x_law, diff) + detail::noise_moments(g.noise);
            } else if constexpr (std::is_same_v<G, generator::AR1>) {
                detail::require(theta.size() == 2, "AR(1) atoms must be (intercept, slope)");
                const MomentSequence lag = detail::ar1_stationary_moments(g.a, g.noise).scaled(g.a - theta[1]);
                return lag + detail::noise_moments(g.noise) + MomentSequence::constant(-theta[0]);
            } else {
                throw ConfigError("residual moments are defined for regression generators only");
            }
        },
        spec);
}

// E[loss^power] for the squared loss, i.e. E[W^(2 power)], integer power in {1, 2, 3}.
inline double squared_loss_moment(const GeneratorSpec& spec, std::span<const double> theta, int power) {
    detail::require(power >= 1 && power <= 3, "squared_loss_moment: power must be 1, 2 or 3");
    const MomentSequence w = residual_moments(spec, theta);
    detail::require_order(w, 2 * power, "squared_loss_moment");
    return w[2 * power];
}

// Exact prior-averaged loss variance, sum_j pi_j Var[l_1(theta_j)], squared loss.
inline double squared_loss_variance_integral(const GeneratorSpec& spec, const AtomSet& atoms, const DiscreteDistribution& pi) {
    detail::require(atoms.size() == pi.size(), "variance integral: atom/weight mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const double m2 = squared_loss_moment(spec, atoms[j], 1);
        const double m4 = squared_loss_moment(spec, atoms[j], 2);
        acc += pi[j] * (m4 - m2 * m2);
    }
    return acc;
}

namespace detail {

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// E|N(mu, v)|
inline double folded_normal_mean(double mu, double v) {
    if (v <= 0.0) return std::abs(mu);
    const double sd = std::sqrt(v);
    return sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-mu * mu / (2.0 * v)) + mu * (1.0 - 2.0 * standard_normal_cdf(-mu / sd));
}

inline bool gaussian_noise(const NoiseLaw& n) { return std::holds_alternative<noise_law::Gaussian>(n); }
inline bool gaussian_covariates(const CovariateLaw& l) { return std::holds_alternative<covariate_law::Gaussian>(l); }

} // namespace detail

// Whether true_risk_closed_form covers (spec, loss).
inline bool has_closed_form_risk(const GeneratorSpec& spec, const LossKind& loss) {
    return std::visit(
        [&](const auto& g) -> bool {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, generator::BoundedClassification>) {
                const auto* z = std::get_if<loss_kind::ZeroOne>(&loss);
                return z && z->threshold == 0.0 && detail::gaussian_covariates(g.x_law);
            } else if constexpr (std::is_same_v<G, generator::IidLinearRegression>) {
                if (is_squared(loss)) return true;
                return std::holds_alternative<loss_kind::Absolute>(loss) && detail::gaussian_noise(g.noise) &&
                       detail::gaussian_covariates(g.x_law);
            } else {
                if (is_squared(loss)) return true;
                return std::holds_alternative<loss_kind::Absolute>(loss) && detail::gaussian_noise(g.noise);
            }
        },
        spec);
}

// R(theta_j) in closed form. Squared loss for both regression generators
// (i.i.d.: (theta - theta*)' Sigma (theta - theta*) + Var(eps); AR(1):
// theta_0^2 + (a - theta_1)^2 Var(y) + Var(eps)), absolute loss when the
// residual is Gaussian, and 0-1 loss for classification with isotropic
// Gaussian covariates at threshold 0 (flip + (1 - 2 flip) angle / pi).
inline std::vector<double> true_risk_closed_form(const GeneratorSpec& spec, const AtomSet& atoms,
                                                 const LossKind& loss = loss_kind::Squared{}) {
    validate(spec);
    if (!has_closed_form_risk(spec, loss)) throw ConfigError("no closed-form risk for this generator/loss combination");
    detail::require(atoms.dimension() == covariate_dimension(spec), "true risk: atom dimension mismatch");
    std::vector<double> r(atoms.size());
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const auto theta = atoms[j];
        if (const auto* c = std::get_if<generator::BoundedClassification>(&spec)) {
            double dot = 0.0, nt = 0.0, ns = 0.0;
            for (std::size_t i = 0; i < theta.size(); ++i) {
                dot += theta[i] * c->theta_star[i];
                nt += theta[i] * theta[i];
                ns += c->theta_star[i] * c->theta_star[i];
            }
            double disagreement = 0.5;
            if (nt > 0.0 && ns > 0.0) {
                const double cosv = std::clamp(dot / std::sqrt(nt * ns), -1.0, 1.0);
                disagreement = std::acos(cosv) / std::numbers::pi;
            }
            r[j] = c->flip + (1.0 - 2.0 * c->flip) * disagreement;
        } else {
            const MomentSequence w = residual_moments(spec, theta);
            if (is_squared(loss))
                r[j] = w[2];
            else
                r[j] = detail::folded_normal_mean(w[1], w[2] - w[1] * w[1]);
        }
    }
    return r;
}

// The configured mixing envelope. Independent generators have alpha = 0 (c1 = 0).
inline MixingBoundSpec mixing_spec_for(const GeneratorSpec& spec) {
    if (const auto* ar = std::get_if<generator::AR1>(&spec)) {
        if (!ar->mixing) throw ConfigError("AR(1) generator has no configured mixing envelope (c1, c2)");
        return *ar->mixing;
    }
    return MixingBoundSpec{0.0, 1.0};
}

namespace detail {

struct NoiseSampler {
    explicit NoiseSampler(const NoiseLaw& law) : law_(law) {
        if (const auto* g = std::get_if<noise_law::Gaussian>(&law))
            gauss_ = std::normal_distribution<double>(0.0, g->variance > 0.0 ? std::sqrt(g->variance) : 1.0);
        else
            t_ = std::student_t_distribution<double>(std::get<noise_law::StudentT>(law).dof);
    }

    double operator()(Rng& rng) {
        if (const auto* t = std::get_if<noise_law::StudentT>(&law_)) return t->scale * t_(rng);
        if (std::get<noise_law::Gaussian>(law_).variance == 0.0) return 0.0;
        return gauss_(rng);
    }

    NoiseLaw law_;
    std::normal_distribution<double> gauss_;
    std::student_t_distribution<double> t_;
};

struct CovariateSampler {
    explicit CovariateSampler(const CovariateLaw& law) {
        if (const auto* g = std::get_if<covariate_law::Gaussian>(&law)) {
            gaussian_ = true;
            gauss_ = std::normal_distribution<double>(0.0, g->scale);
        } else {
            const double b = std::get<covariate_law::UniformBox>(law).half_width;
            box_ = std::uniform_real_distribution<double>(-b, b);
        }
    }

    double operator()(Rng& rng) { return gaussian_ ? gauss_(rng) : box_(rng); }

    bool gaussian_ = false;
    std::normal_distribution<double> gauss_;
    std::uniform_real_distribution<double> box_;
};

} // namespace detail

// n observations; bit-reproducible for fixed (spec, n, seed).
inline Dataset generate(const GeneratorSpec& spec, std::size_t n, std::uint64_t seed) {
    validate(spec);
    Rng rng = make_rng(seed);
    return std::visit(
        [&](const auto& g) -> Dataset {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, generator::AR1>) {
                detail::require(n >= 2, "AR(1) generation needs n >= 2");
                detail::NoiseSampler eps(g.noise);
                double y_prev = 0.0;
                if (const auto* gn = std::get_if<noise_law::Gaussian>(&g.noise)) {
                    const double vy = gn->variance / (1.0 - g.a * g.a);
                    if (vy > 0.0) y_prev = std::normal_distribution<double>(0.0, std::sqrt(vy))(rng);
                } else {
                    for (std::size_t b = 0; b < kStudentTBurnIn; ++b) y_prev = g.a * y_prev + eps(rng);
                }
                Dataset data(2);
                data.reserve(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double y = g.a * y_prev + eps(rng);
                    const double x[2] = {1.0, y_prev};
                    data.push_back(x, y);
                    y_prev = y;
                }
                return data;
            } else {
                detail::require(n >= 1, "generation needs n >= 1");
                detail::CovariateSampler xs(g.x_law);
                const std::size_t k = g.theta_star.size();
                Dataset data(k);
                data.reserve(n);
                std::vector<double> x(k);
                if constexpr (std::is_same_v<G, generator::IidLinearRegression>) {
                    detail::NoiseSampler eps(g.noise);
                    for (std::size_t i = 0; i < n; ++i) {
                        for (double& v : x) v = xs(rng);
                        data.push_back(x, linear_prediction(g.theta_star, x) + eps(rng));
                    }
                } else {
                    std::bernoulli_distribution flip(g.flip);
                    for (std::size_t i = 0; i < n; ++i) {
                        for (double& v : x) v = xs(rng);
                        double label = linear_prediction(g.theta_star, x) >= 0.0 ? 1.0 : -1.0;
                        if (flip(rng)) label = -label;
                        data.push_back(x, label);
                    }
                }
                return data;
            }
        },
        spec);
}

} // namespace hostile_pac
