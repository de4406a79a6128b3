#pragma once

/// Survivor selection.
///
/// Diversity-enhanced selection picks survivors one at a time by highest
/// working fitness. After each pick, every remaining candidate has its
/// working fitness reduced by D0 * exp(-r^2 / r0^2), where r^2 is its
/// squared distance to the survivor just picked. Working fitness starts from
/// the stored fitness on every call, so nothing carries over between calls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divga/distance.hpp"
#include "divga/error.hpp"
#include "divga/genome.hpp"

namespace divga {

template <GeneType Gene>
struct DiversityConfig {
    double d0 = 1.0;
    double r0 = 1.0;
    DistanceMeasure<Gene> measure{};
};

enum class SelectionKind { DiversityEnhanced, TopN };

constexpr std::string_view to_string(SelectionKind kind) noexcept {
    return kind == SelectionKind::TopN ? "topn" : "diverse";
}

/// "Fitness proportionate" is accepted as an alias for TopN.
inline SelectionKind parse_selection_kind(std::string_view name) {
    if (name == "diverse" || name == "diversity-enhanced" || name == "Diversity Enhanced")
        return SelectionKind::DiversityEnhanced;
    if (name == "topn" || name == "top-n" || name == "fitness-proportionate" || name == "Fitness Proportionate")
        return SelectionKind::TopN;
    throw Error(Errc::ConfigInvalid, "unknown selection method '" + std::string(name) + "'");
}

template <GeneType Gene>
double diversity_penalty(const Individual<Gene>& a, const Individual<Gene>& b, const DiversityConfig<Gene>& config) {
    if (!(config.r0 > 0.0))
        throw Error(Errc::ConfigInvalid, "r0 must be positive");
    const double r_sq = config.measure(a, b);
    return config.d0 * std::exp(-r_sq / (config.r0 * config.r0));
}

namespace detail {

template <GeneType Gene>
void require_selectable(std::span<const Individual<Gene>> candidates, std::size_t count) {
    if (count > candidates.size())
        throw Error(Errc::CountExceedsPool, "cannot select " + std::to_string(count) + " from " +
                                                std::to_string(candidates.size()) + " candidates");
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (!candidates[i].evaluated())
            throw Error(Errc::UnevaluatedCandidate, "candidate " + std::to_string(i) + " has no fitness");
}

} // namespace detail

/// Indices of the survivors in pick order, plus the working fitness each had when picked.
struct SelectionResult {
    std::vector<std::size_t> order;
    std::vector<double> picked_working_fitness;
};

template <GeneType Gene>
SelectionResult select_diverse_indices(std::span<const Individual<Gene>> candidates, std::size_t count,
                                       const DiversityConfig<Gene>& config) {
    detail::require_selectable(candidates, count);
    if (!(config.r0 > 0.0))
        throw Error(Errc::ConfigInvalid, "r0 must be positive");

    const std::size_t n = candidates.size();
    std::vector<double> working(n);
    for (std::size_t i = 0; i < n; ++i)
        working[i] = *candidates[i].fitness;

    // Remaining candidates are kept in ascending index order so that a strict
    // '>' comparison resolves ties to the lowest index.
    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    const double inv_r0_sq = 1.0 / (config.r0 * config.r0);

    SelectionResult result;
    result.order.reserve(count);
    result.picked_working_fitness.reserve(count);
    for (std::size_t pick = 0; pick < count; ++pick) {
        std::size_t best_pos = 0;
        for (std::size_t p = 1; p < remaining.size(); ++p)
            if (working[remaining[p]] > working[remaining[best_pos]])
                best_pos = p;
        const std::size_t chosen = remaining[best_pos];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
        result.order.push_back(chosen);
        result.picked_working_fitness.push_back(working[chosen]);

        if (config.d0 == 0.0)
            continue;
        for (std::size_t k : remaining) {
            const double r_sq = config.measure(candidates[k], candidates[chosen]);
            working[k] -= config.d0 * std::exp(-r_sq * inv_r0_sq);
        }
    }
    return result;
}

/// Survivors in selection order. Each survivor's penalized_fitness holds the
/// working fitness it had when it was picked.
template <GeneType Gene>
std::vector<Individual<Gene>> select_diverse(std::span<const Individual<Gene>> candidates, std::size_t count,
                                             const DiversityConfig<Gene>& config) {
    const auto picked = select_diverse_indices(candidates, count, config);
    std::vector<Individual<Gene>> survivors;
    survivors.reserve(count);
    for (std::size_t i = 0; i < picked.order.size(); ++i) {
        survivors.push_back(candidates[picked.order[i]]);
        survivors.back().penalized_fitness = picked.picked_working_fitness[i];
    }
    return survivors;
}

template <GeneType Gene>
std::vector<std::size_t> select_top_n_indices(std::span<const Individual<Gene>> candidates, std::size_t count) {
    detail::require_selectable(candidates, count);
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *candidates[a].fitness > *candidates[b].fitness;
    });
    order.resize(count);
    return order;
}

/// The `count` fittest candidates, best first, ties broken by lowest index.
template <GeneType Gene>
std::vector<Individual<Gene>> select_top_n(std::span<const Individual<Gene>> candidates, std::size_t count) {
    std::vector<Individual<Gene>> survivors;
    survivors.reserve(count);
    for (std::size_t i : select_top_n_indices(candidates, count)) {
        survivors.push_back(candidates[i]);
        survivors.back().penalized_fitness.reset();
    }
    return survivors;
}

} // namespace divga
