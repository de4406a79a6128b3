#pragma once

/// Budget-matched comparison algorithms: a uniform random scan and a
/// classic DE/rand/1/bin differential evolution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "divga/engine.hpp"
#include "divga/error.hpp"
#include "divga/genome.hpp"

namespace divga {

struct TracePoint {
    std::size_t evaluations = 0;
    double mean_fitness = 0.0;
};

template <GeneType Gene>
struct RandomScanResult {
    // Kept-set mean after every evaluation once the kept set is full.
    std::vector<TracePoint> trace;
    // The keep_best best points, best first.
    std::vector<Individual<Gene>> kept;
    std::size_t total_evaluations = 0;
};

/// Draws `total_evaluations` uniform points and tracks the `keep_best` best.
template <GeneType Gene>
RandomScanResult<Gene> random_scan(const GeneSpec& spec, const FitnessFunction<Gene>& fitness,
                                   std::size_t total_evaluations, std::size_t keep_best, Rng& rng,
                                   std::size_t parallel_workers = 0) {
    validate_spec(spec);
    if (keep_best == 0 || keep_best > total_evaluations)
        throw Error(Errc::ConfigInvalid, "keep_best must lie in [1, total_evaluations]");

    // Min-heap on fitness so the weakest kept point is on top.
    auto weaker = [](const Individual<Gene>& a, const Individual<Gene>& b) { return *a.fitness > *b.fitness; };
    std::priority_queue<Individual<Gene>, std::vector<Individual<Gene>>, decltype(weaker)> kept(weaker);

    RandomScanResult<Gene> result;
    result.trace.reserve(total_evaluations - keep_best + 1);
    double kept_sum = 0.0;
    constexpr std::size_t batch_size = 1024;
    std::vector<Individual<Gene>> batch;
    for (std::size_t done = 0; done < total_evaluations;) {
        const std::size_t count = std::min(batch_size, total_evaluations - done);
        batch.clear();
        for (std::size_t i = 0; i < count; ++i)
            batch.push_back(random_individual<Gene>(spec, rng));
        evaluate_population<Gene>(batch, fitness, parallel_workers);

        for (auto& ind : batch) {
            ++done;
            const double f = *ind.fitness;
            if (kept.size() < keep_best) {
                kept_sum += f;
                kept.push(std::move(ind));
            } else if (f > *kept.top().fitness) {
                // Single increment keeps the running mean monotone under rounding.
                kept_sum += f - *kept.top().fitness;
                kept.pop();
                kept.push(std::move(ind));
            }
            if (kept.size() == keep_best)
                result.trace.push_back({done, kept_sum / static_cast<double>(keep_best)});
        }
    }
    result.total_evaluations = total_evaluations;
    result.kept.reserve(keep_best);
    while (!kept.empty()) {
        result.kept.push_back(kept.top());
        kept.pop();
    }
    std::reverse(result.kept.begin(), result.kept.end());
    return result;
}

struct DEConfig {
    std::size_t population_size = 200;
    std::size_t n_generations = 100;
    double differential_weight = 0.5;
    double crossover_probability = 0.9;
    std::uint64_t seed = 0;
    std::size_t parallel_workers = 0;
};

struct DEGeneration {
    std::size_t generation = 0;
    std::size_t evaluations = 0;
    double mean_fitness = 0.0;
    double best_fitness = 0.0;
    std::vector<double> slot_fitness;
};

struct DEResult {
    std::vector<Individual<double>> population;
    std::vector<DEGeneration> trace;
    std::size_t total_evaluations = 0;
};

/// Folds x back into [lower, upper] by mirror reflection at the bounds.
inline double reflect_into(double x, double lower, double upper) {
    if (x >= lower && x <= upper)
        return x;
    const double width = upper - lower;
    double t = std::fmod(x - lower, 2.0 * width);
    if (t < 0.0)
        t += 2.0 * width;
    return t <= width ? lower + t : upper - (t - width);
}

/// DE/rand/1/bin with greedy replacement (trial replaces target when its
/// fitness is >= the target's). All trials of a generation are built from
/// the population as it stood at the start of that generation.
inline DEResult differential_evolution(const GeneSpec& spec, const FitnessFunction<double>& fitness,
                                       const DEConfig& config) {
    validate_spec(spec);
    if (spec.kind != GeneKind::Numeric)
        throw Error(Errc::ConfigInvalid, "differential evolution needs a numeric genome");
    if (config.population_size < 4)
        throw Error(Errc::PopulationTooSmall, "differential evolution needs at least 4 individuals");
    if (!(config.differential_weight >= 0.0 && config.differential_weight <= 2.0))
        throw Error(Errc::ConfigInvalid, "differential weight must lie in [0, 2]");
    if (!(config.crossover_probability >= 0.0 && config.crossover_probability <= 1.0))
        throw Error(Errc::ConfigInvalid, "crossover probability must lie in [0, 1]");

    const std::size_t n = config.population_size;
    const std::size_t dims = spec.number_of_genes;
    Rng rng(config.seed);

    DEResult result;
    result.population.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        result.population.push_back(random_individual<double>(spec, rng));
    std::size_t evaluations = evaluate_population<double>(result.population, fitness, config.parallel_workers);

    auto record = [&](std::size_t generation) {
        DEGeneration g;
        g.generation = generation;
        g.evaluations = evaluations;
        g.best_fitness = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        g.slot_fitness.reserve(n);
        for (const auto& ind : result.population) {
            g.slot_fitness.push_back(*ind.fitness);
            sum += *ind.fitness;
            g.best_fitness = std::max(g.best_fitness, *ind.fitness);
        }
        g.mean_fitness = sum / static_cast<double>(n);
        result.trace.push_back(std::move(g));
    };
    record(0);

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<std::size_t> pick_dim(0, dims - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Individual<double>> trials(n);
    for (std::size_t generation = 1; generation <= config.n_generations; ++generation) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t a, b, c;
            do { a = pick(rng); } while (a == i);
            do { b = pick(rng); } while (b == i || b == a);
            do { c = pick(rng); } while (c == i || c == a || c == b);
            const auto& target = result.population[i].genes;
            const auto& va = result.population[a].genes;
            const auto& vb = result.population[b].genes;
            const auto& vc = result.population[c].genes;
            const std::size_t forced = pick_dim(rng);

            Individual<double>& trial = trials[i];
            trial.fitness.reset();
            trial.genes.resize(dims);
            for (std::size_t k = 0; k < dims; ++k) {
                if (unit(rng) < config.crossover_probability || k == forced) {
                    const double v = va[k] + config.differential_weight * (vb[k] - vc[k]);
                    trial.genes[k] = reflect_into(v, spec.numeric_ranges[k].lower, spec.numeric_ranges[k].upper);
                } else {
                    trial.genes[k] = target[k];
                }
            }
        }
        evaluations += evaluate_population<double>(trials, fitness, config.parallel_workers, generation);
        for (std::size_t i = 0; i < n; ++i)
            if (*trials[i].fitness >= *result.population[i].fitness)
                result.population[i] = trials[i];
        record(generation);
    }
    result.total_evaluations = evaluations;
    return result;
}

} // namespace divga
