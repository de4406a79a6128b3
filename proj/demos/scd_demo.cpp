// E/K sequences of length 50 driven towards a target charge decoration,
// with fitness evaluated on four worker threads.

#include <algorithm>
#include <iostream>
#include <span>

#include "divga/bench.hpp"
#include "divga/engine.hpp"

int main() {
    using namespace divga;

    const GeneSpec spec = GeneSpec::categorical({"E", "K"}, 50);
    const double target_scd = -10.0;
    const auto fitness = bind_fitness_args<Label>(
        [](std::span<const Label> seq, double target) { return bench::scd_fitness(seq, target); }, target_scd);

    EngineConfig<Label> config;
    config.population_size = 100;
    config.n_generations = 50;
    config.parallel_workers = 4;
    config.seed = 7;
    config.verbosity = 0;

    const auto record = run<Label>(spec, fitness, config);
    for (const auto& ind : record.final_population()) {
        std::string text;
        for (const auto& g : ind.genes)
            text += g;
        std::cout << text << "  SCD " << bench::calculate_scd(ind.genes) << "  charge "
                  << bench::net_charge(ind.genes) << '\n';
    }
}
