#pragma once

// Parameter atoms, discrete distributions over them, and prior construction.
// Every integral over the parameter space is an exact finite sum over atoms.

#include "hostile_pac/error.hpp"
#include "hostile_pac/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hostile_pac {

inline constexpr double kWeightTolerance = 1e-12;
inline constexpr double kRenormalizeTolerance = 1e-9;

// Ordered, fixed set of parameter vectors sharing one dimension. Indices are
// stable for the lifetime of the set.
class AtomSet {
public:
    AtomSet() = default;

    explicit AtomSet(std::vector<std::vector<double>> atoms) {
        detail::require(!atoms.empty(), "atom set must be nonempty");
        dim_ = atoms.front().size();
        detail::require(dim_ > 0, "atoms must have dimension >= 1");
        coords_.reserve(atoms.size() * dim_);
        for (const auto& a : atoms) {
            detail::require(a.size() == dim_, "all atoms must share one dimension");
            for (double c : a) {
                detail::require(std::isfinite(c), "atom coordinates must be finite");
                coords_.push_back(c);
            }
        }
    }

    AtomSet(std::initializer_list<std::vector<double>> atoms) : AtomSet(std::vector<std::vector<double>>(atoms)) {}

    std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    std::size_t dimension() const noexcept { return dim_; }

    std::span<const double> operator[](std::size_t j) const {
        return {coords_.data() + j * dim_, dim_};
    }

    std::vector<std::vector<double>> to_vectors() const {
        std::vector<std::vector<double>> out;
        out.reserve(size());
        for (std::size_t j = 0; j < size(); ++j) out.emplace_back((*this)[j].begin(), (*this)[j].end());
        return out;
    }

private:
    std::vector<double> coords_;
    std::size_t dim_ = 0;
};

// Probability weights aligned with an AtomSet. Weights are nonnegative and sum
// to one within kWeightTolerance; inputs off by at most kRenormalizeTolerance
// are renormalized, anything else is rejected.
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;

    explicit DiscreteDistribution(std::vector<double> weights) : w_(std::move(weights)) {
        detail::require(!w_.empty(), "distribution must have at least one weight");
        double total = 0.0;
        for (double x : w_) {
            detail::require(std::isfinite(x) && x >= 0.0, "weights must be finite and nonnegative");
            total += x;
        }
        detail::require(std::abs(total - 1.0) <= kRenormalizeTolerance,
                        "weights must sum to one (got " + std::to_string(total) + ")");
        if (total != 1.0)
            for (double& x : w_) x /= total;
    }

    static DiscreteDistribution uniform(std::size_t k) {
        detail::require(k > 0, "uniform distribution needs k >= 1");
        return DiscreteDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
    }

    static DiscreteDistribution dirac(std::size_t k, std::size_t index) {
        detail::require(index < k, "dirac index out of range");
        std::vector<double> w(k, 0.0);
        w[index] = 1.0;
        return DiscreteDistribution(std::move(w));
    }

    // Normalizes arbitrary nonnegative masses; total mass must be positive.
    static DiscreteDistribution from_masses(std::vector<double> masses) {
        double total = 0.0;
        for (double x : masses) {
            detail::require(std::isfinite(x) && x >= 0.0, "masses must be finite and nonnegative");
            total += x;
        }
        if (!(total > 0.0)) throw NumericalError("cannot normalize zero total mass");
        for (double& x : masses) x /= total;
        return DiscreteDistribution(std::move(masses));
    }

    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t j) const { return w_[j]; }
    std::span<const double> weights() const noexcept { return w_; }

private:
    std::vector<double> w_;
};

struct Prior {
    AtomSet atoms;
    DiscreteDistribution weights;
};

namespace prior_spec {

// Regular grid over a box; atoms enumerated in row-major coordinate order
// (last coordinate varies fastest).
struct UniformGrid {
    std::vector<double> lower;
    std::vector<double> upper;
    std::size_t points_per_axis = 2;
};

enum class SampleLaw { Gaussian, UniformBox };

// K i.i.d. draws kept in draw order. Gaussian: isotropic with standard
// deviation `scale`; UniformBox: uniform on [-scale, scale]^dimension.
struct IidSample {
    SampleLaw law = SampleLaw::Gaussian;
    double scale = 1.0;
    std::size_t dimension = 1;
    std::size_t count = 2;
    std::optional<std::uint64_t> seed;
};

struct Explicit {
    std::vector<std::vector<double>> atoms;
    std::vector<double> weights;
};

} // namespace prior_spec

using PriorSpec = std::variant<prior_spec::UniformGrid, prior_spec::IidSample, prior_spec::Explicit>;

namespace detail {

inline Prior build(const prior_spec::UniformGrid& g, std::uint64_t) {
    require(!g.lower.empty() && g.lower.size() == g.upper.size(), "grid bounds must be nonempty and of equal length");
    require(g.points_per_axis >= 1, "grid needs at least one point per axis");
    const std::size_t k = g.lower.size();
    for (std::size_t c = 0; c < k; ++c) {
        require(std::isfinite(g.lower[c]) && std::isfinite(g.upper[c]), "grid bounds must be finite");
        require(g.lower[c] <= g.upper[c], "grid lower bound exceeds upper bound");
    }
    std::size_t total = 1;
    for (std::size_t c = 0; c < k; ++c) total *= g.points_per_axis;
    require(total >= 2, "grid prior must produce at least two atoms");

    auto axis_value = [&](std::size_t c, std::size_t i) {
        if (g.points_per_axis == 1) return 0.5 * (g.lower[c] + g.upper[c]);
        const double t = static_cast<double>(i) / static_cast<double>(g.points_per_axis - 1);
        return g.lower[c] + t * (g.upper[c] - g.lower[c]);
    };

    std::vector<std::vector<double>> atoms;
    atoms.reserve(total);
    std::vector<std::size_t> idx(k, 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> a(k);
        for (std::size_t c = 0; c < k; ++c) a[c] = axis_value(c, idx[c]);
        atoms.push_back(std::move(a));
        for (std::size_t c = k; c-- > 0;) {
            if (++idx[c] < g.points_per_axis) break;
            idx[c] = 0;
        }
    }
    return {AtomSet(std::move(atoms)), DiscreteDistribution::uniform(total)};
}

inline Prior build(const prior_spec::IidSample& s, std::uint64_t seed) {
    require(s.count >= 2, "sampled prior must have at least two atoms");
    require(s.dimension >= 1, "sampled prior dimension must be >= 1");
    require(std::isfinite(s.scale) && s.scale > 0.0, "sampled prior scale must be positive and finite");
    Rng rng = make_rng(s.seed.value_or(seed));
    std::normal_distribution<double> gauss(0.0, s.scale);
    std::uniform_real_distribution<double> box(-s.scale, s.scale);
    std::vector<std::vector<double>> atoms(s.count, std::vector<double>(s.dimension));
    for (auto& a : atoms)
        for (double& c : a) c = s.law == prior_spec::SampleLaw::Gaussian ? gauss(rng) : box(rng);
    return {AtomSet(std::move(atoms)), DiscreteDistribution::uniform(s.count)};
}

inline Prior build(const prior_spec::Explicit& e, std::uint64_t) {
    require(e.atoms.size() == e.weights.size(), "explicit prior: atom and weight counts differ");
    return {AtomSet(e.atoms), DiscreteDistribution(e.weights)};
}

} // namespace detail

// Deterministic in (spec, seed). An IidSample carrying its own seed ignores
// the argument.
inline Prior build_prior(const PriorSpec& spec, std::uint64_t seed) {
    return std::visit([&](const auto& s) { return detail::build(s, seed); }, spec);
}

inline double expectation(const DiscreteDistribution& dist, std::span<const double> values) {
    detail::require(dist.size() == values.size(), "expectation: length mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (dist[j] > 0.0) acc += dist[j] * values[j];
    return acc;
}

// sum_j pi_j ||theta_j||^order
inline double prior_norm_moment(const AtomSet& atoms, const DiscreteDistribution& pi, double order) {
    detail::require(atoms.size() == pi.size(), "prior moment: atom/weight size mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        double sq = 0.0;
        for (double c : atoms[j]) sq += c * c;
        acc += pi[j] * std::pow(sq, 0.5 * order);
    }
    return acc;
}

// tau = integral of ||theta||^4 against the prior.
inline double prior_moment_tau(const AtomSet& atoms, const DiscreteDistribution& pi) {
    return prior_norm_moment(atoms, pi, 4.0);
}

} // namespace hostile_pac
