#pragma once

/// Benchmark fitness functions, diversity statistics and the experiment
/// drivers behind divga-bench.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "divga/baselines.hpp"
#include "divga/distance.hpp"
#include "divga/engine.hpp"
#include "divga/error.hpp"
#include "divga/genome.hpp"
#include "divga/io.hpp"

namespace divga::bench {

// ---------------------------------------------------------------------------
// Fitness functions
// ---------------------------------------------------------------------------

/// 10 cos(20 x1 x2) inside |x1|, |x2| <= 1.5 and a -1000 cliff outside.
inline double landscape_fitness(double x1, double x2) {
    if (std::abs(x1) > 1.5 || std::abs(x2) > 1.5)
        return -1000.0;
    return 10.0 * std::cos(20.0 * x1 * x2);
}

inline double landscape_fitness(std::span<const double> genes) { return landscape_fitness(genes[0], genes[1]); }

inline GeneSpec landscape_spec() { return GeneSpec::numeric({{-1.5, 1.5}, {-1.5, 1.5}}); }

/// Maximal (zero) on the circle of radius R about the origin.
inline double circle_fitness(double x, double y, double amplitude, double radius) {
    const double off = std::sqrt(x * x + y * y) - radius;
    return -amplitude * off * off;
}

inline int charge_of(const Label& residue) {
    if (residue == "K")
        return 1;
    if (residue == "E")
        return -1;
    throw Error(Errc::UnknownLabel, "residue '" + residue + "' is neither E nor K");
}

/// Sequence charge decoration, (1/N) sum_{a<b} q_a q_b sqrt(b - a).
///
/// Accumulated by separation: for each lag d the charge autocorrelation
/// sum_a q_a q_{a+d} is weighted by sqrt(d).
inline double calculate_scd(std::span<const Label> sequence) {
    if (sequence.empty())
        throw Error(Errc::ShapeMismatch, "SCD needs a non-empty sequence");
    std::vector<int> q;
    q.reserve(sequence.size());
    for (const auto& residue : sequence)
        q.push_back(charge_of(residue));
    const std::size_t n = q.size();
    double total = 0.0;
    for (std::size_t lag = 1; lag < n; ++lag) {
        long correlation = 0;
        for (std::size_t a = 0; a + lag < n; ++a)
            correlation += q[a] * q[a + lag];
        total += static_cast<double>(correlation) * std::sqrt(static_cast<double>(lag));
    }
    return total / static_cast<double>(n);
}

inline double scd_fitness(std::span<const Label> sequence, double target_scd) {
    const double off = calculate_scd(sequence) - target_scd;
    return -off * off;
}

inline int net_charge(std::span<const Label> sequence) {
    int total = 0;
    for (const auto& residue : sequence)
        total += charge_of(residue);
    return total;
}

inline std::vector<Label> sequence_from_string(std::string_view text) {
    std::vector<Label> out;
    out.reserve(text.size());
    for (char c : text)
        out.emplace_back(1, c);
    return out;
}

// ---------------------------------------------------------------------------
// Diversity statistics
// ---------------------------------------------------------------------------

/// Mean pairwise Euclidean distance.
inline double spread(std::span<const std::vector<double>> points) {
    const std::size_t n = points.size();
    if (n < 2)
        throw Error(Errc::PopulationTooSmall, "spread needs at least two points");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            total += std::sqrt(euclidean_sq(points[i], points[j]));
    return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

template <GeneType Gene>
std::vector<std::vector<Gene>> genes_of(std::span<const Individual<Gene>> individuals) {
    std::vector<std::vector<Gene>> out;
    out.reserve(individuals.size());
    for (const auto& ind : individuals)
        out.push_back(ind.genes);
    return out;
}

inline double spread(std::span<const Individual<double>> individuals) {
    const auto points = genes_of<double>(individuals);
    return spread(std::span<const std::vector<double>>(points));
}

inline double mean_pairwise_hamming(std::span<const Individual<Label>> individuals) {
    const std::size_t n = individuals.size();
    if (n < 2)
        throw Error(Errc::PopulationTooSmall, "need at least two individuals");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            total += hamming_sq(individuals[i].genes, individuals[j].genes);
    return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

inline double mean_radial_error(std::span<const Individual<double>> individuals, double radius) {
    double total = 0.0;
    for (const auto& ind : individuals)
        total += std::abs(std::hypot(ind.genes[0], ind.genes[1]) - radius);
    return total / static_cast<double>(individuals.size());
}

/// Counts of points per equal-width polar-angle bin over [0, 2 pi).
inline std::vector<std::size_t> angular_occupancy(std::span<const Individual<double>> individuals,
                                                  std::size_t bins = 12) {
    std::vector<std::size_t> counts(bins, 0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (const auto& ind : individuals) {
        double angle = std::atan2(ind.genes[1], ind.genes[0]);
        if (angle < 0.0)
            angle += two_pi;
        auto bin = static_cast<std::size_t>(angle / two_pi * static_cast<double>(bins));
        counts[std::min(bin, bins - 1)] += 1;
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

inline constexpr std::string_view experiment_names[] = {"landscape-compare", "circle", "scd", "crossover-sweep",
                                                        "random-compare"};

struct ExperimentOptions {
    std::optional<std::size_t> population;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> repetitions;
    std::optional<CrossoverMethod> crossover;
    std::optional<PairingStrategy> pairing;
    std::optional<SelectionKind> selection;
    std::optional<double> d0;
    std::optional<double> r0;
    std::size_t workers = 0;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> out;
};

struct RunRow {
    std::string algorithm;
    std::uint64_t seed = 0;
    double mean_fitness = 0.0;
    double best_fitness = 0.0;
    double spread = 0.0;
    std::size_t evaluations = 0;
    // Experiment-specific columns, same names and order on every row.
    std::vector<std::pair<std::string, double>> extra;
};

struct Aggregate {
    std::size_t runs = 0;
    double mean = 0.0;
    double sd = 0.0;
};

/// Mean and sample standard deviation.
inline Aggregate aggregate(std::span<const double> values) {
    Aggregate a;
    a.runs = values.size();
    if (values.empty())
        return a;
    for (double v : values)
        a.mean += v;
    a.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - a.mean) * (v - a.mean);
        a.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return a;
}

struct BenchmarkReport {
    std::string experiment;
    std::vector<RunRow> rows;
    std::vector<std::string> notes;
    std::optional<std::filesystem::path> runs_csv;
    std::optional<std::filesystem::path> summary_txt;

    std::vector<const RunRow*> rows_for(std::string_view algorithm) const {
        std::vector<const RunRow*> out;
        for (const auto& r : rows)
            if (r.algorithm == algorithm)
                out.push_back(&r);
        return out;
    }

    std::vector<std::string> algorithms() const {
        std::vector<std::string> out;
        for (const auto& r : rows)
            if (std::find(out.begin(), out.end(), r.algorithm) == out.end())
                out.push_back(r.algorithm);
        return out;
    }

    Aggregate aggregate_of(std::string_view algorithm, std::string_view column) const {
        std::vector<double> values;
        for (const RunRow* r : rows_for(algorithm)) {
            if (column == "mean_fitness")
                values.push_back(r->mean_fitness);
            else if (column == "best_fitness")
                values.push_back(r->best_fitness);
            else if (column == "spread")
                values.push_back(r->spread);
            else if (column == "evaluations")
                values.push_back(static_cast<double>(r->evaluations));
            else
                for (const auto& [name, v] : r->extra)
                    if (name == column)
                        values.push_back(v);
        }
        return aggregate(values);
    }

    std::string summary() const {
        std::ostringstream out;
        out << "experiment: " << experiment << '\n';
        for (const auto& algo : algorithms()) {
            const auto rs = rows_for(algo);
            out << '\n' << algo << " (" << rs.size() << " runs)\n";
            std::vector<std::string> columns = {"mean_fitness", "best_fitness", "spread", "evaluations"};
            for (const auto& [name, v] : rs.front()->extra)
                columns.push_back(name);
            for (const auto& c : columns) {
                const auto a = aggregate_of(algo, c);
                out << "  " << c << ": " << format_real(a.mean) << " +/- " << format_real(a.sd) << '\n';
            }
        }
        if (!notes.empty()) {
            out << '\n';
            for (const auto& n : notes)
                out << n << '\n';
        }
        return out.str();
    }

    void write(const std::filesystem::path& directory) {
        std::error_code ec;
        std::filesystem::create_directories(directory, ec);
        if (ec)
            throw Error(Errc::IoFailure, "cannot create " + directory.string() + ": " + ec.message());
        runs_csv = directory / (experiment + "_runs.csv");
        summary_txt = directory / (experiment + "_summary.txt");

        std::ofstream csv(*runs_csv, std::ios::binary | std::ios::trunc);
        if (!csv)
            throw Error(Errc::IoFailure, "cannot open " + runs_csv->string());
        csv << "algorithm,seed,mean_fitness,best_fitness,spread,evaluations";
        if (!rows.empty())
            for (const auto& [name, v] : rows.front().extra)
                csv << ',' << name;
        csv << '\n';
        for (const auto& r : rows) {
            csv << csv_field(r.algorithm) << ',' << r.seed << ',' << format_real(r.mean_fitness) << ','
                << format_real(r.best_fitness) << ',' << format_real(r.spread) << ',' << r.evaluations;
            for (const auto& [name, v] : r.extra)
                csv << ',' << format_real(v);
            csv << '\n';
        }
        csv.flush();
        if (!csv)
            throw Error(Errc::IoFailure, "write failed on " + runs_csv->string());

        std::ofstream txt(*summary_txt, std::ios::binary | std::ios::trunc);
        if (!txt)
            throw Error(Errc::IoFailure, "cannot open " + summary_txt->string());
        txt << summary();
        txt.flush();
        if (!txt)
            throw Error(Errc::IoFailure, "write failed on " + summary_txt->string());
    }
};

/// GA settings for the landscape experiments. Mutation-only offspring by
/// default; every override from the command line applies.
inline EngineConfig<double> landscape_ga_config(const ExperimentOptions& opt, std::uint64_t seed) {
    EngineConfig<double> cfg;
    cfg.population_size = opt.population.value_or(200);
    cfg.n_generations = opt.generations.value_or(100);
    cfg.crossover = opt.crossover.value_or(CrossoverMethod::None);
    cfg.pairing = opt.pairing.value_or(PairingStrategy::RandomPairs);
    cfg.selection = opt.selection.value_or(SelectionKind::DiversityEnhanced);
    cfg.d0 = opt.d0.value_or(1.0);
    cfg.r0 = opt.r0;
    cfg.seed = seed;
    cfg.parallel_workers = opt.workers;
    cfg.verbosity = 0;
    return cfg;
}

inline RunRow ga_row(std::string algorithm, std::uint64_t seed, const RunRecord<double>& rec) {
    RunRow row;
    row.algorithm = std::move(algorithm);
    row.seed = seed;
    row.mean_fitness = rec.final_generation().mean_fitness;
    row.best_fitness = rec.final_generation().best_fitness;
    row.spread = spread(std::span<const Individual<double>>(rec.final_population()));
    row.evaluations = rec.total_evaluations;
    return row;
}

inline BenchmarkReport landscape_compare(const ExperimentOptions& opt) {
    BenchmarkReport report;
    report.experiment = "landscape-compare";
    const GeneSpec spec = landscape_spec();
    const FitnessFunction<double> fitness = [](std::span<const double> g) { return landscape_fitness(g); };
    const std::size_t reps = opt.repetitions.value_or(10);
    std::size_t ga_wider = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const std::uint64_t seed = opt.seed + r;
        const auto cfg = landscape_ga_config(opt, seed);
        const auto rec = run<double>(spec, fitness, cfg);
        report.rows.push_back(ga_row("ga", seed, rec));

        DEConfig de;
        de.population_size = cfg.population_size;
        de.n_generations = cfg.n_generations;
        de.seed = seed;
        de.parallel_workers = opt.workers;
        const auto res = differential_evolution(spec, fitness, de);
        RunRow row;
        row.algorithm = "de";
        row.seed = seed;
        row.mean_fitness = res.trace.back().mean_fitness;
        row.best_fitness = res.trace.back().best_fitness;
        row.spread = spread(std::span<const Individual<double>>(res.population));
        row.evaluations = res.total_evaluations;
        if (report.rows[report.rows.size() - 1].spread > row.spread)
            ++ga_wider;
        report.rows.push_back(std::move(row));
    }
    report.notes.push_back("GA spread exceeds DE spread in " + std::to_string(ga_wider) + " of " +
                           std::to_string(reps) + " paired runs");
    return report;
}

inline BenchmarkReport circle(const ExperimentOptions& opt) {
    constexpr double amplitude = 5.0;
    constexpr double radius = 5.0;
    BenchmarkReport report;
    report.experiment = "circle";
    const GeneSpec spec = GeneSpec::numeric({{-10.0, 10.0}, {-10.0, 10.0}});
    const FitnessFunction<double> fitness = [](std::span<const double> g) {
        return circle_fitness(g[0], g[1], amplitude, radius);
    };
    const std::size_t reps = opt.repetitions.value_or(10);
    std::vector<std::size_t> pooled(12, 0);
    for (std::size_t r = 0; r < reps; ++r) {
        EngineConfig<double> cfg;
        cfg.population_size = opt.population.value_or(100);
        cfg.n_generations = opt.generations.value_or(20);
        cfg.crossover = opt.crossover.value_or(CrossoverMethod::Between);
        cfg.pairing = opt.pairing.value_or(PairingStrategy::RandomPairs);
        cfg.selection = opt.selection.value_or(SelectionKind::DiversityEnhanced);
        cfg.d0 = opt.d0.value_or(1.0);
        cfg.r0 = opt.r0;
        cfg.seed = opt.seed + r;
        cfg.parallel_workers = opt.workers;
        cfg.verbosity = 0;
        const auto rec = run<double>(spec, fitness, cfg);
        const std::span<const Individual<double>> final_pop(rec.final_population());
        const auto bins = angular_occupancy(final_pop, 12);
        const auto occupied = static_cast<double>(std::count_if(bins.begin(), bins.end(), [](auto c) { return c > 0; }));
        for (std::size_t b = 0; b < bins.size(); ++b)
            pooled[b] += bins[b];

        auto row = ga_row("ga", cfg.seed, rec);
        row.extra = {{"mean_radial_error", mean_radial_error(final_pop, radius)}, {"occupied_bins", occupied}};
        report.rows.push_back(std::move(row));
    }
    std::ostringstream hist;
    hist << "pooled angular occupancy (12 bins of 30 degrees):";
    for (auto c : pooled)
        hist << ' ' << c;
    report.notes.push_back(hist.str());
    return report;
}

inline BenchmarkReport scd(const ExperimentOptions& opt) {
    constexpr double target = -10.0;
    constexpr std::size_t length = 50;
    BenchmarkReport report;
    report.experiment = "scd";
    const GeneSpec spec = GeneSpec::categorical({"E", "K"}, length);
    const FitnessFunction<Label> fitness = bind_fitness_args<Label>(
        [](std::span<const Label> seq, double t) { return scd_fitness(seq, t); }, target);

    const std::size_t reps = opt.repetitions.value_or(10);
    std::map<int, std::size_t> scd_histogram;    // keyed by floor(SCD)
    std::map<int, std::size_t> charge_histogram; // keyed by net charge
    for (std::size_t r = 0; r < reps; ++r) {
        EngineConfig<Label> cfg;
        cfg.population_size = opt.population.value_or(100);
        cfg.n_generations = opt.generations.value_or(50);
        cfg.crossover = opt.crossover.value_or(CrossoverMethod::EitherOr);
        cfg.pairing = opt.pairing.value_or(PairingStrategy::RandomPairs);
        cfg.selection = opt.selection.value_or(SelectionKind::DiversityEnhanced);
        cfg.d0 = opt.d0.value_or(1.0);
        cfg.r0 = opt.r0;
        cfg.measure = DistanceMeasure<Label>::hamming();
        cfg.seed = opt.seed + r;
        cfg.parallel_workers = opt.workers;
        cfg.verbosity = 0;
        const auto rec = run<Label>(spec, fitness, cfg);
        const auto& final_pop = rec.final_population();

        double abs_error = 0.0;
        int lo = std::numeric_limits<int>::max();
        int hi = std::numeric_limits<int>::min();
        for (const auto& ind : final_pop) {
            const double s = calculate_scd(ind.genes);
            const int q = net_charge(ind.genes);
            abs_error += std::abs(s - target);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
            ++scd_histogram[static_cast<int>(std::floor(s))];
            ++charge_histogram[q];
        }
        RunRow row;
        row.algorithm = "ga";
        row.seed = cfg.seed;
        row.mean_fitness = rec.final_generation().mean_fitness;
        row.best_fitness = rec.final_generation().best_fitness;
        row.spread = mean_pairwise_hamming(final_pop);
        row.evaluations = rec.total_evaluations;
        row.extra = {{"mean_abs_scd_error", abs_error / static_cast<double>(final_pop.size())},
                     {"net_charge_range", static_cast<double>(hi - lo)}};
        report.rows.push_back(std::move(row));
    }
    report.notes.push_back("spread column: mean pairwise Hamming distance (fraction of differing positions)");
    std::ostringstream h1;
    h1 << "final-population SCD histogram (unit bins, lower edge: count):";
    for (const auto& [bin, count] : scd_histogram)
        h1 << ' ' << bin << ':' << count;
    report.notes.push_back(h1.str());
    std::ostringstream h2;
    h2 << "final-population net charge histogram (charge: count):";
    for (const auto& [q, count] : charge_histogram)
        h2 << ' ' << q << ':' << count;
    report.notes.push_back(h2.str());
    return report;
}

inline BenchmarkReport crossover_sweep(const ExperimentOptions& opt) {
    BenchmarkReport report;
    report.experiment = "crossover-sweep";
    const GeneSpec spec = landscape_spec();
    const FitnessFunction<double> fitness = [](std::span<const double> g) { return landscape_fitness(g); };
    const std::size_t reps = opt.repetitions.value_or(3);
    for (auto method : {CrossoverMethod::Midpoint, CrossoverMethod::EitherOr, CrossoverMethod::Between,
                        CrossoverMethod::None}) {
        for (std::size_t r = 0; r < reps; ++r) {
            auto cfg = landscape_ga_config(opt, opt.seed + r);
            cfg.crossover = method;
            const auto rec = run<double>(spec, fitness, cfg);
            report.rows.push_back(ga_row("ga-" + std::string(to_string(method)), cfg.seed, rec));
        }
    }
    return report;
}

inline BenchmarkReport random_compare(const ExperimentOptions& opt) {
    BenchmarkReport report;
    report.experiment = "random-compare";
    const GeneSpec spec = landscape_spec();
    const FitnessFunction<double> fitness = [](std::span<const double> g) { return landscape_fitness(g); };
    const std::size_t reps = opt.repetitions.value_or(10);
    std::size_t ga_better = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const std::uint64_t seed = opt.seed + r;
        const auto cfg = landscape_ga_config(opt, seed);
        const auto rec = run<double>(spec, fitness, cfg);
        report.rows.push_back(ga_row("ga", seed, rec));

        Rng rng(seed);
        const auto scan = random_scan<double>(spec, fitness, rec.total_evaluations, cfg.population_size, rng,
                                              opt.workers);
        RunRow row;
        row.algorithm = "random";
        row.seed = seed;
        row.mean_fitness = scan.trace.back().mean_fitness;
        row.best_fitness = *scan.kept.front().fitness;
        row.spread = spread(std::span<const Individual<double>>(scan.kept));
        row.evaluations = scan.total_evaluations;
        if (report.rows.back().mean_fitness > row.mean_fitness)
            ++ga_better;
        report.rows.push_back(std::move(row));
    }
    report.notes.push_back("GA final mean fitness exceeds the random scan's kept-set mean in " +
                           std::to_string(ga_better) + " of " + std::to_string(reps) + " paired runs");
    return report;
}

/// Runs a named experiment and, when `options.out` is set, writes
/// <experiment>_runs.csv and <experiment>_summary.txt there.
inline BenchmarkReport run_experiment(std::string_view name, const ExperimentOptions& options) {
    BenchmarkReport report;
    if (name == "landscape-compare")
        report = landscape_compare(options);
    else if (name == "circle")
        report = circle(options);
    else if (name == "scd")
        report = scd(options);
    else if (name == "crossover-sweep")
        report = crossover_sweep(options);
    else if (name == "random-compare")
        report = random_compare(options);
    else
        throw Error(Errc::UnknownExperiment, "no experiment named '" + std::string(name) + "'");
    if (options.out)
        report.write(*options.out);
    return report;
}

} // namespace divga::bench
