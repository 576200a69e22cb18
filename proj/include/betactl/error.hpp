#pragma once

#include <stdexcept>
#include <string>

namespace betactl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A history lookup asked for a time later than the newest stored sample.
class FutureLookup : public Error {
public:
    explicit FutureLookup(double t);
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// The integrator produced a non-finite state.
class NumericalBlowUp : public Error {
public:
    explicit NumericalBlowUp(double t);
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace betactl
