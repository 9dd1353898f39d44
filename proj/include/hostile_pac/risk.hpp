#pragma once

// Losses, datasets, the per-observation loss table and the empirical risk.

#include "hostile_pac/error.hpp"
#include "hostile_pac/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hostile_pac {

namespace loss_kind {
struct Squared {};
struct Absolute {};
// Predicts +1 when <theta, x> >= threshold, else -1; label is +1 when y > 0.
struct ZeroOne {
    double threshold = 0.0;
};
} // namespace loss_kind

using LossKind = std::variant<loss_kind::Squared, loss_kind::Absolute, loss_kind::ZeroOne>;

inline bool is_zero_one(const LossKind& l) { return std::holds_alternative<loss_kind::ZeroOne>(l); }
inline bool is_squared(const LossKind& l) { return std::holds_alternative<loss_kind::Squared>(l); }

inline double evaluate_loss(const LossKind& loss, double prediction, double y) {
    return std::visit(
        [&](const auto& l) -> double {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, loss_kind::Squared>) {
                const double r = y - prediction;
                return r * r;
            } else if constexpr (std::is_same_v<L, loss_kind::Absolute>) {
                return std::abs(y - prediction);
            } else {
                const bool predicted_positive = prediction >= l.threshold;
                return predicted_positive == (y > 0.0) ? 0.0 : 1.0;
            }
        },
        loss);
}

// Ordered observations (x_i, y_i). Row order carries the dependence structure.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::size_t dim) : dim_(dim) { detail::require(dim > 0, "dataset dimension must be >= 1"); }

    void reserve(std::size_t n) {
        x_.reserve(n * dim_);
        y_.reserve(n);
    }

    void push_back(std::span<const double> x, double y) {
        detail::require(x.size() == dim_, "dataset: covariate dimension mismatch");
        detail::require(std::isfinite(y), "dataset: non-finite response");
        for (double v : x) detail::require(std::isfinite(v), "dataset: non-finite covariate");
        x_.insert(x_.end(), x.begin(), x.end());
        y_.push_back(y);
    }

    std::size_t size() const noexcept { return y_.size(); }
    std::size_t dimension() const noexcept { return dim_; }
    std::span<const double> x(std::size_t i) const { return {x_.data() + i * dim_, dim_}; }
    double y(std::size_t i) const { return y_[i]; }
    std::span<const double> responses() const noexcept { return y_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::size_t dim_ = 0;
};

// n x K matrix of losses, L(i, j) = loss of atom j on observation i.
class LossTable {
public:
    LossTable() = default;
    LossTable(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), v_(std::move(values)) {
        detail::require(v_.size() == rows_ * cols_, "loss table: value count does not match shape");
        for (double x : v_) detail::require(std::isfinite(x) && x >= 0.0, "loss table entries must be finite and >= 0");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const { return {v_.data() + i * cols_, cols_}; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

inline double linear_prediction(std::span<const double> theta, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) s += theta[c] * x[c];
    return s;
}

inline LossTable compute_loss_table(const Dataset& data, const AtomSet& atoms, const LossKind& loss) {
    detail::require(atoms.dimension() == data.dimension(), "loss table: atom dimension differs from covariate dimension");
    const std::size_t n = data.size();
    const std::size_t k = atoms.size();
    std::vector<double> v(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.x(i);
        const double y = data.y(i);
        for (std::size_t j = 0; j < k; ++j) v[i * k + j] = evaluate_loss(loss, linear_prediction(atoms[j], x), y);
    }
    return LossTable(n, k, std::move(v));
}

// Column means r_n(theta_j).
inline std::vector<double> empirical_risk(const LossTable& table) {
    detail::require(table.rows() >= 1, "empirical risk of an empty table");
    std::vector<double> r(table.cols(), 0.0);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto row = table.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] += row[j];
    }
    const double inv_n = 1.0 / static_cast<double>(table.rows());
    for (double& x : r) x *= inv_n;
    return r;
}

// Delimited text format: one observation per line, "y,x1,...,xk".
inline void write_dataset(std::ostream& os, const Dataset& data) {
    os << std::setprecision(17);
    for (std::size_t i = 0; i < data.size(); ++i) {
        os << data.y(i);
        for (double v : data.x(i)) os << ',' << v;
        os << '\n';
    }
}

inline Dataset read_dataset(std::istream& is) {
    Dataset data;
    std::string line;
    std::size_t lineno = 0;
    std::vector<double> fields;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        fields.clear();
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                fields.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError("dataset line " + std::to_string(lineno) + ": bad field '" + cell + "'");
            }
        }
        if (fields.size() < 2) throw ConfigError("dataset line " + std::to_string(lineno) + ": need y and at least one x");
        if (data.dimension() == 0) data = Dataset(fields.size() - 1);
        if (fields.size() - 1 != data.dimension())
            throw ConfigError("dataset line " + std::to_string(lineno) + ": inconsistent column count");
        data.push_back(std::span<const double>(fields).subspan(1), fields[0]);
    }
    if (data.size() == 0) throw ConfigError("dataset is empty");
    return data;
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset '" + path + "'");
    return read_dataset(in);
}

inline void save_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset '" + path + "'");
    write_dataset(out, data);
}

} // namespace hostile_pac
