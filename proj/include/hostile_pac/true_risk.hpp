#pragma once

#include "hostile_pac/datagen.hpp"
#include "hostile_pac/risk.hpp"
#include "hostile_pac/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace hostile_pac {

struct TrueRiskOptions {
    bool allow_monte_carlo = true;
    std::size_t mc_draws = 1'000'000;
    std::size_t mc_batches = 100;
    // Root seed for the oracle; streams are tagged so they never coincide with
    // training-data streams derived from the same root.
    std::uint64_t seed = 0;
};

struct TrueRisk {
    std::vector<double> values;
    // Zero for closed forms; batch-means standard error for Monte Carlo.
    std::vector<double> std_error;
    bool closed_form = true;
};

// Monte Carlo estimate of R over one long generated sample (valid for both
// independent and stationary dependent generators); batch means give the
// standard error.
inline TrueRisk monte_carlo_risk(const GeneratorSpec& gen, const AtomSet& atoms, const LossKind& loss,
                                 std::size_t draws, std::size_t batches, std::uint64_t seed) {
    detail::require(batches >= 2 && draws >= batches, "monte carlo risk: need draws >= batches >= 2");
    const std::size_t per_batch = draws / batches;
    const std::size_t k = atoms.size();
    const Dataset data = generate(gen, per_batch * batches, stream_seed(seed, 0, stream::oracle));
    detail::require(data.dimension() == atoms.dimension(), "monte carlo risk: atom dimension mismatch");

    std::vector<double> sum(k, 0.0), sum_sq(k, 0.0), batch(k);
    for (std::size_t b = 0; b < batches; ++b) {
        std::fill(batch.begin(), batch.end(), 0.0);
        for (std::size_t i = b * per_batch; i < (b + 1) * per_batch; ++i) {
            const auto x = data.x(i);
            for (std::size_t j = 0; j < k; ++j) batch[j] += evaluate_loss(loss, linear_prediction(atoms[j], x), data.y(i));
        }
        for (std::size_t j = 0; j < k; ++j) {
            const double m = batch[j] / static_cast<double>(per_batch);
            sum[j] += m;
            sum_sq[j] += m * m;
        }
    }
    TrueRisk out;
    out.closed_form = false;
    out.values.resize(k);
    out.std_error.resize(k);
    const double nb = static_cast<double>(batches);
    for (std::size_t j = 0; j < k; ++j) {
        const double mean = sum[j] / nb;
        const double var = std::max(0.0, (sum_sq[j] - nb * mean * mean) / (nb - 1.0));
        out.values[j] = mean;
        out.std_error[j] = std::sqrt(var / nb);
    }
    return out;
}

// R(theta) = E[r_n(theta)]: closed form when available, Monte Carlo otherwise.
inline TrueRisk true_risk(const GeneratorSpec& gen, const AtomSet& atoms, const LossKind& loss,
                          const TrueRiskOptions& opts = {}) {
    if (has_closed_form_risk(gen, loss)) {
        TrueRisk out;
        out.values = true_risk_closed_form(gen, atoms, loss);
        out.std_error.assign(out.values.size(), 0.0);
        return out;
    }
    if (!opts.allow_monte_carlo) throw ConfigError("no closed-form risk for this generator/loss and Monte Carlo fallback is disabled");
    return monte_carlo_risk(gen, atoms, loss, opts.mc_draws, opts.mc_batches, opts.seed);
}

} // namespace hostile_pac
