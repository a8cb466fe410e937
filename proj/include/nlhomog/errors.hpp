#ifndef NLHOMOG_ERRORS_HPP
#define NLHOMOG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nlhomog {

// Bad configuration: unknown family, malformed config file, inconsistent
// declared bounds. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid input to an operation (failed precondition on data, not on config).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to reach its tolerance. Carries the residual
// actually achieved. CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_residual(achieved) {}
    double achieved_residual;
};

// The requested combination (storage mode, size, coefficient structure)
// is not supported.
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlhomog

#endif
