#pragma once

/// Plain-text run output: survivors CSV, fitness trace CSV, and log.txt.

#include <chrono>
#include <cstddef>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "divga/error.hpp"
#include "divga/genome.hpp"

namespace divga {

/// Reals are written with 17 significant digits so they round-trip exactly.
inline std::string format_real(double value) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << value;
    return out.str();
}

inline std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(text);
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

template <GeneType Gene>
std::string format_gene(const Gene& gene) {
    if constexpr (std::is_same_v<Gene, double>)
        return format_real(gene);
    else
        return csv_field(gene);
}

/// Local time as YYYYMMDD-HHMMSS.
inline std::string timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm local{};
    localtime_r(&now, &local);
    std::ostringstream out;
    out << std::put_time(&local, "%Y%m%d-%H%M%S");
    return out.str();
}

/// Per-generation population snapshot. Survivors are stored in selection order.
template <GeneType Gene>
struct GenerationSnapshot {
    std::size_t generation = 0;
    std::size_t evaluations = 0;
    double mean_fitness = 0.0;
    double best_fitness = 0.0;
    std::vector<Individual<Gene>> survivors;
};

/// Writes the three run files, flushing after every snapshot so that an
/// aborted run still leaves a usable partial trace.
class RunWriter {
public:
    RunWriter(const std::filesystem::path& directory, const std::string& timestamp, std::size_t number_of_genes) {
        std::error_code ec;
        std::filesystem::create_directories(directory, ec);
        if (ec)
            throw Error(Errc::IoFailure, "cannot create " + directory.string() + ": " + ec.message());
        survivors_path_ = directory / (timestamp + "_survivors.csv");
        fitness_path_ = directory / (timestamp + "_fitness.csv");
        log_path_ = directory / "log.txt";

        survivors_ = open(survivors_path_, std::ios::trunc);
        fitness_ = open(fitness_path_, std::ios::trunc);
        log_ = open(log_path_, std::ios::app);

        survivors_ << "generation,index,fitness";
        for (std::size_t k = 1; k <= number_of_genes; ++k)
            survivors_ << ",g" << k;
        survivors_ << '\n';
        fitness_ << "generation,evaluations,mean_fitness,best_fitness\n";
        flush();
    }

    template <GeneType Gene>
    void write(const GenerationSnapshot<Gene>& snapshot) {
        for (std::size_t i = 0; i < snapshot.survivors.size(); ++i) {
            const auto& ind = snapshot.survivors[i];
            survivors_ << snapshot.generation << ',' << i << ','
                       << (ind.fitness ? format_real(*ind.fitness) : std::string("nan"));
            for (const auto& g : ind.genes)
                survivors_ << ',' << format_gene<Gene>(g);
            survivors_ << '\n';
        }
        fitness_ << snapshot.generation << ',' << snapshot.evaluations << ','
                 << format_real(snapshot.mean_fitness) << ',' << format_real(snapshot.best_fitness) << '\n';
        flush();
    }

    void log(std::string_view line) {
        log_ << line << '\n';
        log_.flush();
        check(log_, log_path_);
    }

    const std::filesystem::path& survivors_path() const noexcept { return survivors_path_; }
    const std::filesystem::path& fitness_path() const noexcept { return fitness_path_; }
    const std::filesystem::path& log_path() const noexcept { return log_path_; }

private:
    static std::ofstream open(const std::filesystem::path& path, std::ios::openmode mode) {
        std::ofstream out(path, std::ios::out | std::ios::binary | mode);
        if (!out)
            throw Error(Errc::IoFailure, "cannot open " + path.string());
        return out;
    }

    static void check(const std::ofstream& out, const std::filesystem::path& path) {
        if (!out)
            throw Error(Errc::IoFailure, "write failed on " + path.string());
    }

    void flush() {
        survivors_.flush();
        fitness_.flush();
        check(survivors_, survivors_path_);
        check(fitness_, fitness_path_);
    }

    std::filesystem::path survivors_path_;
    std::filesystem::path fitness_path_;
    std::filesystem::path log_path_;
    std::ofstream survivors_;
    std::ofstream fitness_;
    std::ofstream log_;
};

} // namespace divga
