#pragma once

/// Squared-distance measures used by the diversity penalty.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "divga/error.hpp"
#include "divga/genome.hpp"

namespace divga {

inline constexpr double default_epsilon = 1e-15;

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b) {
    if (a != b)
        throw Error(Errc::LengthMismatch,
                    "gene vectors of length " + std::to_string(a) + " and " + std::to_string(b));
}

} // namespace detail

inline double euclidean_sq(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

/// Per-coordinate scale-normalized squared distance:
/// sum_i (a_i - b_i)^2 / (|a_i| + |b_i| + eps)^2.
inline double dynamic_sq(std::span<const double> a, std::span<const double> b,
                         double eps = default_epsilon) {
    detail::require_same_length(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        const double scale = std::abs(a[i]) + std::abs(b[i]) + eps;
        sum += (d * d) / (scale * scale);
    }
    return sum;
}

/// Fraction of positions at which the labels differ.
inline double hamming_sq(std::span<const Label> a, std::span<const Label> b) {
    detail::require_same_length(a.size(), b.size());
    if (a.empty())
        return 0.0;
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        differing += a[i] == b[i] ? 0 : 1;
    return static_cast<double>(differing) / static_cast<double>(a.size());
}

enum class MeasureKind { EuclideanSq, DynamicSq, HammingSq, Custom };

/// A squared-distance measure over gene vectors of type Gene.
///
/// Custom measures must be symmetric and non-negative; that is a caller
/// contract (the engine spot-checks symmetry once per run).
template <GeneType Gene>
class DistanceMeasure {
public:
    using Function = std::function<double(std::span<const Gene>, std::span<const Gene>)>;

    /// Euclidean for numeric genomes, Hamming for categorical ones.
    DistanceMeasure()
        : kind_(std::is_same_v<Gene, double> ? MeasureKind::EuclideanSq : MeasureKind::HammingSq) {}

    static DistanceMeasure euclidean() { return DistanceMeasure(MeasureKind::EuclideanSq); }
    static DistanceMeasure dynamic(double eps = default_epsilon) {
        DistanceMeasure m(MeasureKind::DynamicSq);
        m.eps_ = eps;
        return m;
    }
    static DistanceMeasure hamming() { return DistanceMeasure(MeasureKind::HammingSq); }
    static DistanceMeasure custom(Function fn) {
        DistanceMeasure m(MeasureKind::Custom);
        m.custom_ = std::move(fn);
        return m;
    }

    MeasureKind kind() const noexcept { return kind_; }
    double epsilon() const noexcept { return eps_; }

    /// Whether this measure may be used with the Gene type at all.
    bool legal() const noexcept {
        switch (kind_) {
        case MeasureKind::EuclideanSq:
        case MeasureKind::DynamicSq: return std::is_same_v<Gene, double>;
        case MeasureKind::HammingSq: return std::is_same_v<Gene, Label>;
        case MeasureKind::Custom: return static_cast<bool>(custom_);
        }
        return false;
    }

    double operator()(std::span<const Gene> a, std::span<const Gene> b) const {
        switch (kind_) {
        case MeasureKind::EuclideanSq:
            if constexpr (std::is_same_v<Gene, double>)
                return euclidean_sq(a, b);
            break;
        case MeasureKind::DynamicSq:
            if constexpr (std::is_same_v<Gene, double>)
                return dynamic_sq(a, b, eps_);
            break;
        case MeasureKind::HammingSq:
            if constexpr (std::is_same_v<Gene, Label>)
                return hamming_sq(a, b);
            break;
        case MeasureKind::Custom:
            detail::require_same_length(a.size(), b.size());
            if (custom_)
                return custom_(a, b);
            break;
        }
        throw Error(Errc::ConfigInvalid, "distance measure is not valid for this genome kind");
    }

    double operator()(const Individual<Gene>& a, const Individual<Gene>& b) const {
        return (*this)(std::span<const Gene>(a.genes), std::span<const Gene>(b.genes));
    }

private:
    explicit DistanceMeasure(MeasureKind kind) : kind_(kind) {}

    MeasureKind kind_;
    double eps_ = default_epsilon;
    Function custom_;
};

/// One-tenth of the root-mean-square pairwise distance of `individuals`.
///
/// Returns 0 for an all-identical population; callers decide the fallback.
template <GeneType Gene>
double default_r0(std::span<const Individual<Gene>> individuals, const DistanceMeasure<Gene>& measure) {
    const std::size_t n = individuals.size();
    if (n < 2)
        throw Error(Errc::PopulationTooSmall, "need at least two individuals to estimate r0");
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;

    double total = 0.0;
    if constexpr (std::is_same_v<Gene, double>) {
        if (measure.kind() == MeasureKind::EuclideanSq) {
            // sum_{i<j} |x_i - x_j|^2 = n * sum_i |x_i - mean|^2, O(n N)
            const std::size_t dims = individuals.front().genes.size();
            std::vector<double> mean(dims, 0.0);
            for (const auto& ind : individuals) {
                detail::require_same_length(ind.genes.size(), dims);
                for (std::size_t k = 0; k < dims; ++k)
                    mean[k] += ind.genes[k];
            }
            for (auto& m : mean)
                m /= static_cast<double>(n);
            double scatter = 0.0;
            for (const auto& ind : individuals) {
                for (std::size_t k = 0; k < dims; ++k) {
                    const double d = ind.genes[k] - mean[k];
                    scatter += d * d;
                }
            }
            total = static_cast<double>(n) * scatter;
            return std::sqrt(total / pairs) / 10.0;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            total += measure(individuals[i], individuals[j]);
    return std::sqrt(total / pairs) / 10.0;
}

template <GeneType Gene>
double default_r0(const Population<Gene>& population, const DistanceMeasure<Gene>& measure) {
    return default_r0<Gene>(std::span<const Individual<Gene>>(population.individuals), measure);
}

} // namespace divga
