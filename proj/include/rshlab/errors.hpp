#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rshlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A kernel row is not a probability distribution.
class MalformedKernel : public Error {
  public:
    MalformedKernel(std::size_t row, const std::string &what)
        : Error("malformed kernel at row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

  private:
    std::size_t row_;
};

/// An optimal state has mass leaving it; lump_optimal() must run first.
class AbsorbingViolation : public Error {
  public:
    explicit AbsorbingViolation(std::size_t state)
        : Error("optimal state " + std::to_string(state) +
                " is not absorbing (apply lump_optimal first)"),
          state_(state) {}

    std::size_t state() const noexcept { return state_; }

  private:
    std::size_t state_;
};

class DimensionMismatch : public Error {
  public:
    DimensionMismatch(const std::string &what, std::size_t expected, std::size_t got)
        : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
                std::to_string(got)),
          expected_(expected) {}

    std::size_t expected() const noexcept { return expected_; }

  private:
    std::size_t expected_;
};

/// Invalid user input: bad problem definition, bad flag values, unreadable files.
class InputError : public Error {
  public:
    using Error::Error;
};

/// The state space exceeds the dense soft cap.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Iterative method exhausted its budget. Carries the best bracket found.
class NoConvergence : public Error {
  public:
    NoConvergence(const std::string &what, double lower, double upper)
        : Error(what + " (best bracket [" + std::to_string(lower) + ", " + std::to_string(upper) +
                "])"),
          lower_(lower), upper_(upper) {}

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

  private:
    double lower_;
    double upper_;
};

/// I - Q is singular: some non-optimal state never reaches the optimal set.
class SingularSystem : public Error {
  public:
    explicit SingularSystem(std::size_t pivot)
        : Error("I - Q is singular at non-optimal position " + std::to_string(pivot) +
                "; the chain is not convergent (run a convergence check first)"),
          pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

  private:
    std::size_t pivot_;
};

class Cancelled : public Error {
  public:
    Cancelled() : Error("computation cancelled") {}
};

} // namespace rshlab
