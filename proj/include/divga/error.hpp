#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divga {

enum class Errc {
    EmptyRange,
    MixedKinds,
    TooFewCategories,
    ZeroGenes,
    ShapeMismatch,
    PopulationTooSmall,
    IllegalMethodForKind,
    LengthMismatch,
    CountExceedsPool,
    UnevaluatedCandidate,
    FitnessEvaluationFailure,
    ConfigInvalid,
    IoFailure,
    UnknownLabel,
    UnknownExperiment,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::EmptyRange: return "EmptyRange";
    case Errc::MixedKinds: return "MixedKinds";
    case Errc::TooFewCategories: return "TooFewCategories";
    case Errc::ZeroGenes: return "ZeroGenes";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::PopulationTooSmall: return "PopulationTooSmall";
    case Errc::IllegalMethodForKind: return "IllegalMethodForKind";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::CountExceedsPool: return "CountExceedsPool";
    case Errc::UnevaluatedCandidate: return "UnevaluatedCandidate";
    case Errc::FitnessEvaluationFailure: return "FitnessEvaluationFailure";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IoFailure: return "IoFailure";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::UnknownExperiment: return "UnknownExperiment";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the Errc codes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised when a fitness function throws. Records where in the run it happened.
class FitnessEvaluationError : public Error {
public:
    FitnessEvaluationError(std::size_t individual, std::size_t generation, const std::string& cause)
        : Error(Errc::FitnessEvaluationFailure,
                "individual " + std::to_string(individual) + " in generation " +
                    std::to_string(generation) + ": " + cause),
          individual_(individual),
          generation_(generation) {}

    std::size_t individual() const noexcept { return individual_; }
    std::size_t generation() const noexcept { return generation_; }

private:
    std::size_t individual_;
    std::size_t generation_;
};

} // namespace divga
