#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stressmodel {

// Base for all library errors. `name()` is the stable machine-readable
// identity; the CLI prints it on stderr and exits 1.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define STRESSMODEL_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                                     \
        explicit Name(const std::string& what) : Error(#Name, what) {}        \
    }

// ingest
STRESSMODEL_DEFINE_ERROR(MissingFile);
STRESSMODEL_DEFINE_ERROR(MalformedRow);
STRESSMODEL_DEFINE_ERROR(NonPositivePrice);
STRESSMODEL_DEFINE_ERROR(NonMonotonicDate);
STRESSMODEL_DEFINE_ERROR(InsufficientData);
STRESSMODEL_DEFINE_ERROR(EmptyJoin);
STRESSMODEL_DEFINE_ERROR(WindowTooLarge);

// estimators
STRESSMODEL_DEFINE_ERROR(EmptySeries);
STRESSMODEL_DEFINE_ERROR(SetSizeTooSmall);
STRESSMODEL_DEFINE_ERROR(NoObservations);
STRESSMODEL_DEFINE_ERROR(DegenerateBucket);
STRESSMODEL_DEFINE_ERROR(TooFewObservations);
STRESSMODEL_DEFINE_ERROR(DegenerateCell);
STRESSMODEL_DEFINE_ERROR(MissingVolume);
STRESSMODEL_DEFINE_ERROR(MissingKappaChange);

// normality
STRESSMODEL_DEFINE_ERROR(SampleTooSmall);
STRESSMODEL_DEFINE_ERROR(SampleTooLarge);
STRESSMODEL_DEFINE_ERROR(ZeroVariance);
STRESSMODEL_DEFINE_ERROR(UnpopulatedBucket);

// riskmodel
STRESSMODEL_DEFINE_ERROR(EmptyTable);
STRESSMODEL_DEFINE_ERROR(InvalidInterval);
STRESSMODEL_DEFINE_ERROR(EmptySelection);
STRESSMODEL_DEFINE_ERROR(NegativeHorizon);

// portfolio
STRESSMODEL_DEFINE_ERROR(WeightOutOfRange);
STRESSMODEL_DEFINE_ERROR(DegenerateAssets);
STRESSMODEL_DEFINE_ERROR(EmptyGrid);
STRESSMODEL_DEFINE_ERROR(InsufficientBucketData);
STRESSMODEL_DEFINE_ERROR(ZeroBenchmarkVariance);

// simulate
STRESSMODEL_DEFINE_ERROR(InvalidConfig);
STRESSMODEL_DEFINE_ERROR(NonPositiveDefiniteCell);

// io / misc preconditions not named per-operation
STRESSMODEL_DEFINE_ERROR(MalformedInput);
STRESSMODEL_DEFINE_ERROR(InvalidArgument);

#undef STRESSMODEL_DEFINE_ERROR

}  // namespace stressmodel
