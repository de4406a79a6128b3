#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "divga/bench.hpp"
#include "divga/engine.hpp"

using namespace divga;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("divga_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

const FitnessFunction<double> landscape = [](std::span<const double> g) { return bench::landscape_fitness(g); };

const FitnessFunction<double> sphere = [](std::span<const double> g) {
    double s = 0;
    for (double x : g)
        s -= x * x;
    return s;
};

EngineConfig<double> quiet(std::size_t n, std::size_t generations, std::uint64_t seed = 1) {
    EngineConfig<double> cfg;
    cfg.population_size = n;
    cfg.n_generations = generations;
    cfg.seed = seed;
    cfg.verbosity = 0;
    return cfg;
}

} // namespace

TEST(EvaluatePopulation, CountsAndCaching) {
    Rng rng(0);
    auto pop = seed_population<double>(GeneSpec::numeric({{-1, 1}, {-1, 1}}), 350, rng);
    EXPECT_EQ(evaluate_population<double>(pop.individuals, sphere, 0), 350u);
    const double before = *pop.individuals[3].fitness;
    EXPECT_EQ(evaluate_population<double>(pop.individuals, sphere, 0), 0u);
    EXPECT_EQ(*pop.individuals[3].fitness, before);
}

TEST(EvaluatePopulation, WorkerCountDoesNotChangeResults) {
    Rng a(9), b(9);
    const auto spec = GeneSpec::numeric({{-3, 3}, {-3, 3}});
    auto p0 = seed_population<double>(spec, 500, a);
    auto p4 = seed_population<double>(spec, 500, b);
    evaluate_population<double>(p0.individuals, landscape, 0);
    evaluate_population<double>(p4.individuals, landscape, 4);
    for (std::size_t i = 0; i < 500; ++i)
        EXPECT_EQ(*p0.individuals[i].fitness, *p4.individuals[i].fitness);
}

TEST(EvaluatePopulation, FailureReportsLowestIndex) {
    std::vector<Individual<double>> batch;
    for (int i = 0; i < 40; ++i)
        batch.push_back({{double(i)}, std::nullopt, std::nullopt});
    const FitnessFunction<double> picky = [](std::span<const double> g) -> double {
        if (g[0] == 17 || g[0] == 31)
            throw std::runtime_error("bad point");
        return g[0];
    };
    for (std::size_t workers : {0u, 3u}) {
        auto copy = batch;
        try {
            evaluate_population<double>(copy, picky, workers, 5);
            FAIL();
        } catch (const FitnessEvaluationError& e) {
            EXPECT_EQ(e.code(), Errc::FitnessEvaluationFailure);
            EXPECT_EQ(e.individual(), 17u);
            EXPECT_EQ(e.generation(), 5u);
        }
        for (const auto& ind : copy)
            EXPECT_FALSE(ind.evaluated());
    }
}

TEST(Run, ConstantFitness) {
    const FitnessFunction<double> zero = [](std::span<const double>) { return 0.0; };
    const auto rec = run<double>(GeneSpec::numeric({{0, 1}, {0, 1}}), zero, quiet(10, 7));
    ASSERT_EQ(rec.generations.size(), 8u);
    EXPECT_EQ(rec.termination, Termination::Completed);
    for (const auto& g : rec.generations)
        EXPECT_EQ(g.mean_fitness, 0.0);
}

TEST(Run, ThresholdStopsAfterFirstSelection) {
    auto cfg = quiet(10, 50);
    cfg.fitness_threshold = -1e300;
    const auto rec = run<double>(GeneSpec::numeric({{0, 1}}), sphere, cfg);
    EXPECT_EQ(rec.termination, Termination::ThresholdReached);
    EXPECT_EQ(rec.generations.size(), 2u);
}

TEST(Run, EvaluationAccounting) {
    auto cfg = quiet(12, 5);
    cfg.crossover = CrossoverMethod::Midpoint;
    cfg.pairing = PairingStrategy::AllPairs;
    const auto rec = run<double>(GeneSpec::numeric({{-1, 1}, {-1, 1}}), sphere, cfg);
    EXPECT_EQ(rec.total_evaluations, 12u + 5u * 66u);
    for (std::size_t g = 0; g < rec.generations.size(); ++g) {
        EXPECT_EQ(rec.generations[g].evaluations, 12u + g * 66u);
        EXPECT_EQ(rec.generations[g].survivors.size(), 12u);
    }
}

TEST(Run, SurvivorsAreNeverReevaluated) {
    std::atomic<std::size_t> calls{0};
    const FitnessFunction<double> counting = [&](std::span<const double> g) {
        ++calls;
        return sphere(g);
    };
    auto cfg = quiet(20, 10);
    cfg.crossover = CrossoverMethod::None;
    const auto rec = run<double>(GeneSpec::numeric({{-1, 1}}), counting, cfg);
    EXPECT_EQ(calls.load(), 20u + 10u * 20u);
    EXPECT_EQ(rec.total_evaluations, calls.load());
}

TEST(Run, BestFitnessNeverDecreases) {
    for (auto sel : {SelectionKind::TopN, SelectionKind::DiversityEnhanced}) {
        auto cfg = quiet(30, 40, 3);
        cfg.selection = sel;
        const auto rec = run<double>(bench::landscape_spec(), landscape, cfg);
        for (std::size_t g = 1; g < rec.generations.size(); ++g)
            EXPECT_GE(rec.generations[g].best_fitness, rec.generations[g - 1].best_fitness);
    }
}

TEST(Run, ReproducibleAcrossWorkerCounts) {
    auto cfg = quiet(40, 15, 123);
    cfg.crossover = CrossoverMethod::Between;
    const auto a = run<double>(bench::landscape_spec(), landscape, cfg);
    cfg.parallel_workers = 4;
    const auto b = run<double>(bench::landscape_spec(), landscape, cfg);
    ASSERT_EQ(a.generations.size(), b.generations.size());
    for (std::size_t g = 0; g < a.generations.size(); ++g)
        for (std::size_t i = 0; i < a.generations[g].survivors.size(); ++i) {
            EXPECT_EQ(a.generations[g].survivors[i].genes, b.generations[g].survivors[i].genes);
            EXPECT_EQ(*a.generations[g].survivors[i].fitness, *b.generations[g].survivors[i].fitness);
        }
}

TEST(Run, DefaultR0FromInitialPopulation) {
    auto cfg = quiet(50, 1, 8);
    const auto spec = GeneSpec::numeric({{-10, 10}, {-10, 10}});
    const auto rec = run<double>(spec, sphere, cfg);
    const double expected = default_r0<double>(std::span<const Individual<double>>(rec.generations[0].survivors),
                                               DistanceMeasure<double>::euclidean());
    EXPECT_EQ(rec.r0, expected);

    cfg.r0 = 0.25;
    EXPECT_EQ(run<double>(spec, sphere, cfg).r0, 0.25);
}

TEST(Run, IdenticalInitialPopulationFallsBackToUnitR0) {
    auto cfg = quiet(4, 1);
    cfg.init_genes = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
    const auto rec = run<double>(GeneSpec::numeric({{0, 1}, {0, 1}}), sphere, cfg);
    EXPECT_EQ(rec.r0, 1.0);
    EXPECT_EQ(rec.warnings.size(), 1u);
}

TEST(Run, CategoricalDefaults) {
    const auto spec = GeneSpec::categorical({"E", "K"}, 8);
    const FitnessFunction<Label> count_k = [](std::span<const Label> g) {
        return double(std::count(g.begin(), g.end(), "K"));
    };
    EngineConfig<Label> cfg;
    cfg.population_size = 10;
    cfg.n_generations = 5;
    cfg.verbosity = 0;
    const auto rec = run<Label>(spec, count_k, cfg);
    EXPECT_EQ(rec.r0, 1.0);
    EXPECT_EQ(rec.generations.size(), 6u);

    cfg.crossover = CrossoverMethod::Midpoint;
    try {
        run<Label>(spec, count_k, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IllegalMethodForKind);
    }
}

TEST(Run, ConfigValidation) {
    auto expect_invalid = [](EngineConfig<double> cfg) {
        try {
            run<double>(GeneSpec::numeric({{0, 1}}), sphere, cfg);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::ConfigInvalid);
        }
    };
    expect_invalid(quiet(1, 5));
    expect_invalid(quiet(5, 0));
    auto bad_measure = quiet(5, 1);
    bad_measure.measure = DistanceMeasure<double>::hamming();
    expect_invalid(bad_measure);
    auto bad_rate = quiet(5, 1);
    bad_rate.mutation = MutationConfig{1.5, MutationMode::Additive, false};
    expect_invalid(bad_rate);
    auto bad_r0 = quiet(5, 1);
    bad_r0.r0 = -1;
    expect_invalid(bad_r0);
}

TEST(Run, BindsAuxiliaryArguments) {
    const auto shifted = bind_fitness_args<double>(
        [](std::span<const double> g, double cx, double cy) { return -std::hypot(g[0] - cx, g[1] - cy); }, 2.0, -1.0);
    auto cfg = quiet(40, 30, 5);
    cfg.selection = SelectionKind::TopN;
    const auto rec = run<double>(GeneSpec::numeric({{-5, 5}, {-5, 5}}), shifted, cfg);
    const auto& best = rec.final_population().front();
    EXPECT_NEAR(best.genes[0], 2.0, 0.1);
    EXPECT_NEAR(best.genes[1], -1.0, 0.1);
}

TEST(Run, CustomMeasureAsymmetryWarns) {
    auto cfg = quiet(6, 1);
    cfg.measure = DistanceMeasure<double>::custom(
        [](std::span<const double> a, std::span<const double> b) { return std::max(0.0, a[0] - b[0]); });
    const auto rec = run<double>(GeneSpec::numeric({{0, 1}}), sphere, cfg);
    EXPECT_EQ(rec.warnings.size(), 1u);
}

TEST(Persist, FileLayout) {
    const auto dir = fresh_dir("layout");
    auto cfg = quiet(3, 2);
    cfg.output_directory = dir;
    const auto rec = run<double>(GeneSpec::numeric({{0, 1}, {0, 1}}), sphere, cfg);
    ASSERT_TRUE(rec.survivors_path && rec.fitness_path);

    const auto surv = read_lines(*rec.survivors_path);
    ASSERT_EQ(surv.size(), 1u + 3u * 3u);
    EXPECT_EQ(surv[0], "generation,index,fitness,g1,g2");
    for (std::size_t i = 1; i < surv.size(); ++i)
        EXPECT_EQ(std::count(surv[i].begin(), surv[i].end(), ','), 4);

    const auto fit = read_lines(*rec.fitness_path);
    ASSERT_EQ(fit.size(), 1u + 3u);
    EXPECT_EQ(fit[0], "generation,evaluations,mean_fitness,best_fitness");
    EXPECT_TRUE(std::filesystem::exists(dir / "log.txt"));

    const auto name = rec.survivors_path->filename().string();
    ASSERT_EQ(name.size(), std::string("YYYYMMDD-HHMMSS_survivors.csv").size());
    EXPECT_EQ(name[8], '-');
}

TEST(Persist, RealsRoundTrip) {
    const auto dir = fresh_dir("roundtrip");
    auto cfg = quiet(4, 1);
    cfg.output_directory = dir;
    const auto rec = run<double>(GeneSpec::numeric({{-1, 1}}), sphere, cfg);
    const auto lines = read_lines(*rec.survivors_path);
    // last snapshot, first survivor
    std::istringstream row(lines[1 + 4]);
    std::string gen, idx, fitness, gene;
    std::getline(row, gen, ',');
    std::getline(row, idx, ',');
    std::getline(row, fitness, ',');
    std::getline(row, gene, ',');
    const auto& first = rec.final_population().front();
    EXPECT_EQ(std::stod(fitness), *first.fitness);
    EXPECT_EQ(std::stod(gene), first.genes[0]);
}

TEST(Persist, CategoricalLabels) {
    const auto dir = fresh_dir("labels");
    EngineConfig<Label> cfg;
    cfg.population_size = 3;
    cfg.n_generations = 1;
    cfg.verbosity = 0;
    cfg.output_directory = dir;
    const FitnessFunction<Label> zero = [](std::span<const Label>) { return 0.0; };
    const auto rec = run<Label>(GeneSpec::categorical({"a,b", "c"}, 2), zero, cfg);
    for (const auto& line : read_lines(*rec.survivors_path)) {
        if (line.find("a,b") != std::string::npos) {
            EXPECT_NE(line.find("\"a,b\""), std::string::npos);
        }
    }
}

TEST(Persist, NoDirectoryNoFiles) {
    const auto rec = run<double>(GeneSpec::numeric({{0, 1}}), sphere, quiet(3, 1));
    EXPECT_FALSE(rec.survivors_path.has_value());
}

TEST(Persist, WritesFinishedRecord) {
    const auto rec = run<double>(GeneSpec::numeric({{0, 1}, {0, 1}}), sphere, quiet(3, 2));
    const auto dir = fresh_dir("persist");
    const auto [surv, fit] = persist(rec, dir, "20260101-000000");
    EXPECT_EQ(surv.filename(), "20260101-000000_survivors.csv");
    EXPECT_EQ(read_lines(surv).size(), 10u);
    EXPECT_EQ(read_lines(fit).size(), 4u);
}

TEST(Persist, AbortedRunKeepsPartialTrace) {
    const auto dir = fresh_dir("abort");
    std::atomic<int> calls{0};
    const FitnessFunction<double> flaky = [&](std::span<const double> g) {
        if (++calls > 5 + 3 * 5)
            throw std::runtime_error("solver diverged");
        return sphere(g);
    };
    auto cfg = quiet(5, 10);
    cfg.crossover = CrossoverMethod::None;
    cfg.output_directory = dir;
    try {
        run<double>(GeneSpec::numeric({{0, 1}}), flaky, cfg);
        FAIL();
    } catch (const FitnessEvaluationError& e) {
        EXPECT_EQ(e.generation(), 4u);
    }
    std::filesystem::path fitness_file;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().string().ends_with("_fitness.csv"))
            fitness_file = entry.path();
    // header + generations 0..3
    EXPECT_EQ(read_lines(fitness_file).size(), 5u);
    EXPECT_NE(slurp(dir / "log.txt").find("solver diverged"), std::string::npos);
}
