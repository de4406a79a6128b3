#pragma once

/// Offspring creation: parent pairing, crossover and mutation.
///
/// Every operation takes the random stream explicitly. produce_offspring
/// consumes it in a fixed order: all pairs are drawn first, then for each
/// pair in turn the crossover draws followed by the mutation draws.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "divga/error.hpp"
#include "divga/genome.hpp"

namespace divga {

enum class CrossoverMethod { Midpoint, EitherOr, Between, None };
enum class PairingStrategy { AllPairs, RandomPairs };
enum class MutationMode { Additive, Multiplicative, Random, Categorical };

constexpr std::string_view to_string(CrossoverMethod m) noexcept {
    switch (m) {
    case CrossoverMethod::Midpoint: return "midpoint";
    case CrossoverMethod::EitherOr: return "eitheror";
    case CrossoverMethod::Between: return "between";
    case CrossoverMethod::None: return "none";
    }
    return "?";
}

constexpr bool crossover_legal(CrossoverMethod method, GeneKind kind) noexcept {
    return kind == GeneKind::Numeric || method == CrossoverMethod::EitherOr ||
           method == CrossoverMethod::None;
}

constexpr bool mutation_legal(MutationMode mode, GeneKind kind) noexcept {
    return (mode == MutationMode::Categorical) == (kind == GeneKind::Categorical);
}

struct MutationConfig {
    double rate = 0.1;
    MutationMode mode = MutationMode::Additive;
    // Mutated numeric genes are left unclipped unless this is set.
    bool clip_to_ranges = false;

    /// Defaults for a genome: rate 1/N, additive or categorical by kind.
    static MutationConfig defaults_for(const GeneSpec& spec) {
        MutationConfig cfg;
        cfg.rate = 1.0 / static_cast<double>(spec.number_of_genes);
        cfg.mode = spec.kind == GeneKind::Numeric ? MutationMode::Additive : MutationMode::Categorical;
        return cfg;
    }
};

using ParentPair = std::pair<std::size_t, std::size_t>;

/// AllPairs: every unordered pair once, n(n-1)/2 total, in lexicographic order.
/// RandomPairs: n independent uniform draws over distinct-index pairs.
inline std::vector<ParentPair> make_pairs(std::size_t n, PairingStrategy strategy, Rng& rng) {
    if (n < 2)
        throw Error(Errc::PopulationTooSmall, "pairing needs at least two individuals");
    std::vector<ParentPair> pairs;
    if (strategy == PairingStrategy::AllPairs) {
        pairs.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                pairs.emplace_back(i, j);
    } else {
        pairs.reserve(n);
        std::uniform_int_distribution<std::size_t> first(0, n - 1);
        std::uniform_int_distribution<std::size_t> other(0, n - 2);
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t a = first(rng);
            std::size_t b = other(rng);
            if (b >= a)
                ++b;
            pairs.emplace_back(a, b);
        }
    }
    return pairs;
}

template <GeneType Gene>
std::vector<ParentPair> make_pairs(const Population<Gene>& population, PairingStrategy strategy, Rng& rng) {
    return make_pairs(population.size(), strategy, rng);
}

/// Builds an unmutated, unevaluated child from two parents.
template <GeneType Gene>
Individual<Gene> crossover(const Individual<Gene>& a, const Individual<Gene>& b, CrossoverMethod method,
                           Rng& rng) {
    if (!crossover_legal(method, gene_kind_v<Gene>))
        throw Error(Errc::IllegalMethodForKind,
                    std::string(to_string(method)) + " crossover needs numeric genes");
    if (a.genes.size() != b.genes.size())
        throw Error(Errc::LengthMismatch, "parents have different gene counts");

    Individual<Gene> child;
    const std::size_t n = a.genes.size();
    switch (method) {
    case CrossoverMethod::None:
        child.genes = a.genes;
        break;
    case CrossoverMethod::EitherOr: {
        child.genes.reserve(n);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (std::size_t k = 0; k < n; ++k)
            child.genes.push_back(coin(rng) < 0.5 ? b.genes[k] : a.genes[k]);
        break;
    }
    case CrossoverMethod::Midpoint:
        if constexpr (std::is_same_v<Gene, double>) {
            child.genes.resize(n);
            for (std::size_t k = 0; k < n; ++k)
                child.genes[k] = (a.genes[k] + b.genes[k]) / 2.0;
        }
        break;
    case CrossoverMethod::Between:
        if constexpr (std::is_same_v<Gene, double>) {
            child.genes.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double lo = std::min(a.genes[k], b.genes[k]);
                const double hi = std::max(a.genes[k], b.genes[k]);
                // uniform_real_distribution requires lo < hi
                child.genes[k] = lo < hi ? std::uniform_real_distribution<double>(lo, hi)(rng) : lo;
            }
        }
        break;
    }
    return child;
}

/// Mutates each gene independently with probability `config.rate`.
///
/// Numeric: additive N(0, width_k / 10), multiplicative N(1, 0.5), or a fair
/// coin between the two per mutation event. Categorical: a uniform draw from
/// the full category set (may reproduce the current label).
template <GeneType Gene>
Individual<Gene> mutate(Individual<Gene> child, const MutationConfig& config, const GeneSpec& spec, Rng& rng) {
    if (!mutation_legal(config.mode, gene_kind_v<Gene>) || spec.kind != gene_kind_v<Gene>)
        throw Error(Errc::ConfigInvalid, "mutation mode does not match the genome kind");
    if (child.genes.size() != spec.number_of_genes)
        throw Error(Errc::ShapeMismatch, "child gene count differs from the genome spec");

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = 0; k < child.genes.size(); ++k) {
        if (!(unit(rng) < config.rate))
            continue;
        if constexpr (std::is_same_v<Gene, double>) {
            MutationMode mode = config.mode;
            if (mode == MutationMode::Random)
                mode = unit(rng) < 0.5 ? MutationMode::Additive : MutationMode::Multiplicative;
            const GeneRange& range = spec.numeric_ranges[k];
            if (mode == MutationMode::Additive)
                child.genes[k] += std::normal_distribution<double>(0.0, range.width() / 10.0)(rng);
            else
                child.genes[k] *= std::normal_distribution<double>(1.0, 0.5)(rng);
            if (config.clip_to_ranges)
                child.genes[k] = std::clamp(child.genes[k], range.lower, range.upper);
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, spec.categories.size() - 1);
            child.genes[k] = spec.categories[pick(rng)];
        }
    }
    child.fitness.reset();
    child.penalized_fitness.reset();
    return child;
}

/// Number of offspring produce_offspring yields for a population of n.
constexpr std::size_t offspring_count(std::size_t n, CrossoverMethod method, PairingStrategy strategy) noexcept {
    if (method == CrossoverMethod::None || strategy == PairingStrategy::RandomPairs)
        return n;
    return n * (n - 1) / 2;
}

/// One mutated child per parent pair, or one mutated copy per parent when
/// crossover is None. Offspring are unevaluated.
template <GeneType Gene>
std::vector<Individual<Gene>> produce_offspring(const Population<Gene>& population, CrossoverMethod method,
                                                PairingStrategy strategy, const MutationConfig& mutation,
                                                const GeneSpec& spec, Rng& rng) {
    std::vector<Individual<Gene>> offspring;
    if (method == CrossoverMethod::None) {
        offspring.reserve(population.size());
        for (const auto& parent : population.individuals) {
            Individual<Gene> copy;
            copy.genes = parent.genes;
            offspring.push_back(mutate(std::move(copy), mutation, spec, rng));
        }
        return offspring;
    }
    const auto pairs = make_pairs(population, strategy, rng);
    offspring.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        auto child = crossover(population.individuals[i], population.individuals[j], method, rng);
        offspring.push_back(mutate(std::move(child), mutation, spec, rng));
    }
    return offspring;
}

} // namespace divga
