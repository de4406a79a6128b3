// Points in the plane, fitness maximal on a circle of radius 5.
// Usage: circle_demo [output_directory]

#include <cmath>
#include <iostream>
#include <span>

#include "divga/bench.hpp"
#include "divga/engine.hpp"

int main(int argc, char** argv) {
    using namespace divga;

    const GeneSpec spec = GeneSpec::numeric({{-10.0, 10.0}, {-10.0, 10.0}});
    const FitnessFunction<double> fitness = [](std::span<const double> g) {
        const double distance = std::hypot(g[0], g[1]);
        return -5.0 * (distance - 5.0) * (distance - 5.0);
    };

    EngineConfig<double> config;
    config.population_size = 100;
    config.n_generations = 20;
    config.crossover = CrossoverMethod::Between;
    config.seed = 42;
    if (argc > 1)
        config.output_directory = argv[1];

    const auto record = run<double>(spec, fitness, config);
    const std::span<const Individual<double>> final_pop(record.final_population());
    std::cout << "mean |r - 5| = " << bench::mean_radial_error(final_pop, 5.0) << '\n';
    std::cout << "angular occupancy:";
    for (auto c : bench::angular_occupancy(final_pop))
        std::cout << ' ' << c;
    std::cout << '\n';
}
