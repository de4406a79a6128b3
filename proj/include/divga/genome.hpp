#pragma once

/// Genome declaration, individuals, and uniform random initialization.
///
/// A genome is homogeneous: an Individual<double> carries numeric genes and
/// an Individual<Label> carries categorical genes. The runtime GeneSpec
/// states which kind a problem uses, and every entry point checks that the
/// gene type it was instantiated with matches.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "divga/error.hpp"

namespace divga {

using Rng = std::mt19937_64;

/// Categories are opaque: compared only by equality, never ordered.
using Label = std::string;

enum class GeneKind { Numeric, Categorical };

template <class Gene>
concept GeneType = std::same_as<Gene, double> || std::same_as<Gene, Label>;

template <GeneType Gene>
inline constexpr GeneKind gene_kind_v =
    std::is_same_v<Gene, double> ? GeneKind::Numeric : GeneKind::Categorical;

struct GeneRange {
    double lower = 0.0;
    double upper = 0.0;

    double width() const noexcept { return upper - lower; }
};

struct GeneSpec {
    GeneKind kind = GeneKind::Numeric;
    std::vector<GeneRange> numeric_ranges;
    std::vector<Label> categories;
    std::size_t number_of_genes = 0;

    static GeneSpec numeric(std::vector<GeneRange> ranges) {
        GeneSpec spec;
        spec.kind = GeneKind::Numeric;
        spec.number_of_genes = ranges.size();
        spec.numeric_ranges = std::move(ranges);
        return spec;
    }

    static GeneSpec categorical(std::vector<Label> categories, std::size_t number_of_genes) {
        GeneSpec spec;
        spec.kind = GeneKind::Categorical;
        spec.categories = std::move(categories);
        spec.number_of_genes = number_of_genes;
        return spec;
    }
};

inline const GeneSpec& validate_spec(const GeneSpec& spec) {
    if (spec.number_of_genes == 0)
        throw Error(Errc::ZeroGenes, "genome must have at least one gene");
    if (spec.kind == GeneKind::Numeric) {
        if (!spec.categories.empty())
            throw Error(Errc::MixedKinds, "numeric genome declares categories");
        if (spec.numeric_ranges.size() != spec.number_of_genes)
            throw Error(Errc::ShapeMismatch, "one range per numeric gene is required");
        for (std::size_t k = 0; k < spec.numeric_ranges.size(); ++k) {
            const auto& r = spec.numeric_ranges[k];
            if (!(r.lower < r.upper))
                throw Error(Errc::EmptyRange, "gene " + std::to_string(k) + " has lower >= upper");
        }
    } else {
        if (!spec.numeric_ranges.empty())
            throw Error(Errc::MixedKinds, "categorical genome declares numeric ranges");
        std::unordered_set<Label> distinct(spec.categories.begin(), spec.categories.end());
        if (distinct.size() != spec.categories.size())
            throw Error(Errc::TooFewCategories, "categories must be distinct");
        if (distinct.size() < 2)
            throw Error(Errc::TooFewCategories, "at least two categories are required");
    }
    return spec;
}

template <GeneType Gene>
struct Individual {
    std::vector<Gene> genes;
    std::optional<double> fitness;
    // Working fitness at the moment this individual was picked by the most
    // recent diversity-enhanced selection. Not meaningful outside it.
    std::optional<double> penalized_fitness;

    bool evaluated() const noexcept { return fitness.has_value(); }
};

template <GeneType Gene>
struct Population {
    std::vector<Individual<Gene>> individuals;
    std::size_t generation_index = 0;

    std::size_t size() const noexcept { return individuals.size(); }
};

namespace detail {

template <GeneType Gene>
void require_kind(const GeneSpec& spec) {
    if (spec.kind != gene_kind_v<Gene>)
        throw Error(Errc::ShapeMismatch, "gene type does not match the declared genome kind");
}

template <GeneType Gene>
void require_shape(const GeneSpec& spec, std::span<const Gene> genes) {
    require_kind<Gene>(spec);
    if (genes.size() != spec.number_of_genes)
        throw Error(Errc::ShapeMismatch, "expected " + std::to_string(spec.number_of_genes) +
                                             " genes, got " + std::to_string(genes.size()));
    if constexpr (std::is_same_v<Gene, Label>) {
        for (const auto& g : genes) {
            if (std::find(spec.categories.begin(), spec.categories.end(), g) == spec.categories.end())
                throw Error(Errc::ShapeMismatch, "label '" + g + "' is not a declared category");
        }
    }
}

} // namespace detail

/// Draws every gene uniformly from its range (numeric) or from the category set.
template <GeneType Gene>
Individual<Gene> random_individual(const GeneSpec& spec, Rng& rng) {
    detail::require_kind<Gene>(spec);
    Individual<Gene> ind;
    ind.genes.reserve(spec.number_of_genes);
    if constexpr (std::is_same_v<Gene, double>) {
        for (const auto& r : spec.numeric_ranges)
            ind.genes.push_back(std::uniform_real_distribution<double>(r.lower, r.upper)(rng));
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, spec.categories.size() - 1);
        for (std::size_t k = 0; k < spec.number_of_genes; ++k)
            ind.genes.push_back(spec.categories[pick(rng)]);
    }
    return ind;
}

using WarningSink = std::function<void(const std::string&)>;

/// Seeds a population from user-provided gene vectors first, filling the
/// remainder with random individuals. Extra vectors beyond `size` are dropped.
template <GeneType Gene>
Population<Gene> seed_population(const GeneSpec& spec, std::size_t size,
                                 std::span<const std::vector<Gene>> init_genes, Rng& rng,
                                 const WarningSink& warn = {}) {
    if (size == 0)
        throw Error(Errc::PopulationTooSmall, "population size must be positive");
    for (const auto& genes : init_genes)
        detail::require_shape<Gene>(spec, genes);

    Population<Gene> pop;
    pop.individuals.reserve(size);
    if (init_genes.size() > size && warn)
        warn("init_genes has " + std::to_string(init_genes.size()) +
             " vectors but population size is " + std::to_string(size) + "; truncating");
    for (std::size_t i = 0; i < init_genes.size() && i < size; ++i)
        pop.individuals.push_back(Individual<Gene>{init_genes[i], std::nullopt, std::nullopt});
    while (pop.individuals.size() < size)
        pop.individuals.push_back(random_individual<Gene>(spec, rng));
    return pop;
}

template <GeneType Gene>
Population<Gene> seed_population(const GeneSpec& spec, std::size_t size, Rng& rng) {
    return seed_population<Gene>(spec, size, std::span<const std::vector<Gene>>{}, rng);
}

} // namespace divga
