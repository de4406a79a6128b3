#pragma once

/// The generational loop: initialize, evaluate, reproduce, select.
///
/// One seeded random stream drives the whole run in a fixed order
/// (initialization, then per generation: pairing, crossover, mutation).
/// Fitness evaluation consumes no randomness, so a run is reproducible
/// regardless of how many evaluation workers are used.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "divga/distance.hpp"
#include "divga/error.hpp"
#include "divga/genome.hpp"
#include "divga/io.hpp"
#include "divga/selection.hpp"
#include "divga/variation.hpp"

namespace divga {

/// Larger is better. Must be deterministic and safe to call concurrently
/// when parallel workers are enabled.
template <GeneType Gene>
using FitnessFunction = std::function<double(std::span<const Gene>)>;

/// Binds fixed auxiliary arguments after the gene vector: f(genes, args...).
template <GeneType Gene, class F, class... Args>
FitnessFunction<Gene> bind_fitness_args(F f, Args... args) {
    return [f = std::move(f), tup = std::make_tuple(std::move(args)...)](std::span<const Gene> genes) {
        return std::apply([&](const auto&... a) { return static_cast<double>(f(genes, a...)); }, tup);
    };
}

template <GeneType Gene>
struct EngineConfig {
    std::size_t population_size = 100;
    std::size_t n_generations = 20;
    // Unset: Between for numeric genomes, EitherOr for categorical ones.
    std::optional<CrossoverMethod> crossover;
    PairingStrategy pairing = PairingStrategy::RandomPairs;
    // Unset: rate 1/N with the additive (numeric) or categorical mode.
    std::optional<MutationConfig> mutation;
    SelectionKind selection = SelectionKind::DiversityEnhanced;
    double d0 = 1.0;
    // Unset: estimated from the initial population (numeric) or 1 (categorical).
    std::optional<double> r0;
    DistanceMeasure<Gene> measure{};
    std::optional<double> fitness_threshold;
    std::uint64_t seed = 0;
    std::size_t parallel_workers = 0;
    std::optional<std::filesystem::path> output_directory;
    int verbosity = 1;
    std::vector<std::vector<Gene>> init_genes;
};

enum class Termination { Completed, ThresholdReached };

template <GeneType Gene>
struct RunRecord {
    std::vector<GenerationSnapshot<Gene>> generations;
    std::size_t total_evaluations = 0;
    Termination termination = Termination::Completed;
    double r0 = 1.0;
    double d0 = 1.0;
    std::vector<std::string> warnings;
    std::optional<std::filesystem::path> survivors_path;
    std::optional<std::filesystem::path> fitness_path;

    const GenerationSnapshot<Gene>& final_generation() const { return generations.back(); }
    const std::vector<Individual<Gene>>& final_population() const { return generations.back().survivors; }
};

/// Evaluates every individual that has no fitness yet and returns how many
/// were evaluated. Results are committed in index order and only if every
/// evaluation succeeded; otherwise the lowest failing index is reported.
template <GeneType Gene>
std::size_t evaluate_population(std::span<Individual<Gene>> individuals, const FitnessFunction<Gene>& fitness,
                                std::size_t parallel_workers, std::size_t generation = 0) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < individuals.size(); ++i)
        if (!individuals[i].evaluated())
            pending.push_back(i);
    if (pending.empty())
        return 0;

    std::vector<double> results(pending.size());
    std::vector<std::exception_ptr> failures(pending.size());
    auto evaluate_one = [&](std::size_t slot) {
        try {
            results[slot] = fitness(std::span<const Gene>(individuals[pending[slot]].genes));
        } catch (...) {
            failures[slot] = std::current_exception();
        }
    };

    const std::size_t workers = std::min(parallel_workers, pending.size());
    if (workers == 0) {
        for (std::size_t slot = 0; slot < pending.size(); ++slot) {
            evaluate_one(slot);
            if (failures[slot])
                break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t slot = next++; slot < pending.size(); slot = next++)
                    evaluate_one(slot);
            });
    }

    for (std::size_t slot = 0; slot < pending.size(); ++slot) {
        if (!failures[slot])
            continue;
        std::string cause = "unknown error";
        try {
            std::rethrow_exception(failures[slot]);
        } catch (const std::exception& e) {
            cause = e.what();
        } catch (...) {
        }
        throw FitnessEvaluationError(pending[slot], generation, cause);
    }
    for (std::size_t slot = 0; slot < pending.size(); ++slot)
        individuals[pending[slot]].fitness = results[slot];
    return pending.size();
}

namespace detail {

template <GeneType Gene>
GenerationSnapshot<Gene> make_snapshot(const Population<Gene>& pop, std::size_t evaluations) {
    GenerationSnapshot<Gene> snap;
    snap.generation = pop.generation_index;
    snap.evaluations = evaluations;
    snap.survivors = pop.individuals;
    double sum = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& ind : pop.individuals) {
        sum += *ind.fitness;
        best = std::max(best, *ind.fitness);
    }
    snap.mean_fitness = sum / static_cast<double>(pop.individuals.size());
    snap.best_fitness = best;
    return snap;
}

template <GeneType Gene>
void validate_config(const GeneSpec& spec, const EngineConfig<Gene>& config, CrossoverMethod crossover,
                     const MutationConfig& mutation) {
    auto invalid = [](const std::string& why) { throw Error(Errc::ConfigInvalid, why); };
    if (spec.kind != gene_kind_v<Gene>)
        invalid("gene type does not match the declared genome kind");
    if (config.population_size < 2)
        invalid("population_size must be at least 2");
    if (config.n_generations < 1)
        invalid("n_generations must be positive");
    if (!crossover_legal(crossover, spec.kind))
        throw Error(Errc::IllegalMethodForKind,
                    std::string(to_string(crossover)) + " crossover needs numeric genes");
    if (!mutation_legal(mutation.mode, spec.kind))
        invalid("mutation mode does not match the genome kind");
    if (!(mutation.rate >= 0.0 && mutation.rate <= 1.0))
        invalid("mutation rate must lie in [0, 1]");
    if (!config.measure.legal())
        invalid("distance measure is not valid for this genome kind");
    if (!(config.d0 >= 0.0))
        invalid("D0 must be non-negative");
    if (config.r0 && !(*config.r0 > 0.0))
        invalid("r0 must be positive");
    if (config.verbosity < 0 || config.verbosity > 2)
        invalid("verbosity must be 0, 1 or 2");
}

class RunLog {
public:
    RunLog(int verbosity, RunWriter* writer) : verbosity_(verbosity), writer_(writer) {}

    void line(int level, const std::string& text) {
        if (verbosity_ < level)
            return;
        std::cout << text << '\n';
        if (writer_)
            writer_->log(text);
    }

    void error(const std::string& text) {
        std::cerr << text << '\n';
        if (writer_)
            writer_->log(text);
    }

    void warn(const std::string& text) {
        const std::string msg = "warning: " + text;
        if (verbosity_ >= 1)
            std::cerr << msg << '\n';
        if (writer_)
            writer_->log(msg);
    }

private:
    int verbosity_;
    RunWriter* writer_;
};

template <GeneType Gene>
std::string describe_genes(const std::vector<Gene>& genes) {
    std::string out = "[";
    for (std::size_t k = 0; k < genes.size(); ++k) {
        if (k)
            out += ", ";
        out += format_gene<Gene>(genes[k]);
    }
    return out + "]";
}

} // namespace detail

template <GeneType Gene>
RunRecord<Gene> run(const GeneSpec& spec, const FitnessFunction<Gene>& fitness, const EngineConfig<Gene>& config) {
    validate_spec(spec);
    const CrossoverMethod crossover = config.crossover.value_or(
        spec.kind == GeneKind::Numeric ? CrossoverMethod::Between : CrossoverMethod::EitherOr);
    const MutationConfig mutation = config.mutation.value_or(MutationConfig::defaults_for(spec));
    detail::validate_config(spec, config, crossover, mutation);

    RunRecord<Gene> record;
    record.d0 = config.d0;

    std::unique_ptr<RunWriter> writer;
    if (config.output_directory) {
        writer = std::make_unique<RunWriter>(*config.output_directory, timestamp_now(), spec.number_of_genes);
        record.survivors_path = writer->survivors_path();
        record.fitness_path = writer->fitness_path();
    }
    detail::RunLog log(config.verbosity, writer.get());
    auto warn = [&](const std::string& msg) {
        record.warnings.push_back(msg);
        log.warn(msg);
    };

    Rng rng(config.seed);
    Population<Gene> pop = seed_population<Gene>(
        spec, config.population_size, std::span<const std::vector<Gene>>(config.init_genes), rng, warn);

    std::size_t evaluations = 0;
    auto evaluate = [&](std::span<Individual<Gene>> batch, std::size_t generation) {
        try {
            evaluations += evaluate_population<Gene>(batch, fitness, config.parallel_workers, generation);
        } catch (const FitnessEvaluationError& e) {
            log.error(std::string("aborting run: ") + e.what());
            throw;
        }
    };
    evaluate(pop.individuals, 0);

    DiversityConfig<Gene> diversity{config.d0, 1.0, config.measure};
    if (config.selection == SelectionKind::DiversityEnhanced) {
        if (config.r0) {
            diversity.r0 = *config.r0;
        } else if (spec.kind == GeneKind::Numeric) {
            const double estimate = default_r0(pop, config.measure);
            if (estimate > 0.0 && std::isfinite(estimate)) {
                diversity.r0 = estimate;
            } else {
                warn("initial population has no spread; falling back to r0 = 1");
                diversity.r0 = 1.0;
            }
        }
        if (config.measure.kind() == MeasureKind::Custom) {
            const std::size_t checks = std::min<std::size_t>(pop.size() - 1, 10);
            for (std::size_t i = 0; i < checks; ++i) {
                const auto& a = pop.individuals[i];
                const auto& b = pop.individuals[i + 1];
                const double ab = config.measure(a, b);
                const double ba = config.measure(b, a);
                if (ab != ba || ab < 0.0) {
                    warn("custom distance measure is not symmetric and non-negative on the initial population");
                    break;
                }
            }
        }
    }
    record.r0 = diversity.r0;

    auto commit = [&] {
        record.generations.push_back(detail::make_snapshot(pop, evaluations));
        const auto& snap = record.generations.back();
        if (writer)
            writer->write(snap);
        std::ostringstream line;
        line << "generation " << snap.generation << ": best " << format_real(snap.best_fitness) << ", mean "
             << format_real(snap.mean_fitness) << ", evaluations " << snap.evaluations;
        log.line(1, line.str());
        for (std::size_t i = 0; i < snap.survivors.size(); ++i) {
            const auto& s = snap.survivors[i];
            std::ostringstream detail_line;
            detail_line << "  #" << i << " fitness " << format_real(*s.fitness);
            if (s.penalized_fitness)
                detail_line << " (penalized " << format_real(*s.penalized_fitness) << ")";
            detail_line << ' ' << detail::describe_genes(s.genes);
            log.line(2, detail_line.str());
        }
    };
    commit();

    for (std::size_t generation = 1; generation <= config.n_generations; ++generation) {
        auto offspring = produce_offspring(pop, crossover, config.pairing, mutation, spec, rng);
        evaluate(offspring, generation);

        std::vector<Individual<Gene>> pool = std::move(pop.individuals);
        pool.reserve(pool.size() + offspring.size());
        std::move(offspring.begin(), offspring.end(), std::back_inserter(pool));

        const std::span<const Individual<Gene>> candidates(pool);
        pop.individuals = config.selection == SelectionKind::TopN
                              ? select_top_n(candidates, config.population_size)
                              : select_diverse(candidates, config.population_size, diversity);
        pop.generation_index = generation;
        commit();

        if (config.fitness_threshold && record.generations.back().best_fitness >= *config.fitness_threshold) {
            record.termination = Termination::ThresholdReached;
            log.line(1, "fitness threshold reached");
            break;
        }
    }
    record.total_evaluations = evaluations;
    return record;
}

/// Writes a finished record to `directory` in the same format the engine
/// streams during a run.
template <GeneType Gene>
std::pair<std::filesystem::path, std::filesystem::path> persist(const RunRecord<Gene>& record,
                                                                const std::filesystem::path& directory,
                                                                const std::string& timestamp = timestamp_now()) {
    const std::size_t genes =
        record.generations.empty() || record.generations.front().survivors.empty()
            ? 0
            : record.generations.front().survivors.front().genes.size();
    RunWriter writer(directory, timestamp, genes);
    for (const auto& snap : record.generations)
        writer.write(snap);
    for (const auto& w : record.warnings)
        writer.log("warning: " + w);
    return {writer.survivors_path(), writer.fitness_path()};
}

} // namespace divga
