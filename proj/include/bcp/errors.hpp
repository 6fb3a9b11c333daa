#pragma once

#include <stdexcept>
#include <string>

namespace bcp {

// Base of every error raised by the library. kind() is the stable
// machine-readable name used by the CLI's JSON error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define BCP_DEFINE_ERROR(Name)                                                 \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    };

BCP_DEFINE_ERROR(DomainError)
BCP_DEFINE_ERROR(PoleError)
BCP_DEFINE_ERROR(IntegrabilityError)
BCP_DEFINE_ERROR(QuadratureFailure)
BCP_DEFINE_ERROR(NoConvergence)
BCP_DEFINE_ERROR(RateOverflow)
BCP_DEFINE_ERROR(NonAbsorbing)
BCP_DEFINE_ERROR(EmptyPath)
BCP_DEFINE_ERROR(SingularShooting)
BCP_DEFINE_ERROR(InstabilityDetected)
BCP_DEFINE_ERROR(NotPositiveRecurrent)
BCP_DEFINE_ERROR(NegativeMass)
BCP_DEFINE_ERROR(RootOrderViolation)
BCP_DEFINE_ERROR(IllConditioned)
BCP_DEFINE_ERROR(PreconditionViolated)
BCP_DEFINE_ERROR(CoarseningError)
BCP_DEFINE_ERROR(SpecError)

#undef BCP_DEFINE_ERROR

}  // namespace bcp
