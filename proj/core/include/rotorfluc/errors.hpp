#pragma once

#include <stdexcept>
#include <string>

namespace rotorfluc {

// Basis too small for the dynamics: population reached the top of the
// J ladder beyond the allowed threshold.  Callers retry with a larger
// basis or give up and report non-convergence.
class TruncationOverflow : public std::runtime_error {
 public:
  TruncationOverflow(std::string msg, double top_population)
      : std::runtime_error(std::move(msg)), top_population_(top_population) {}
  double top_population() const { return top_population_; }

 private:
  double top_population_;
};

// Convergence ladder exhausted (or unreachable tolerance requested).
class NoConvergence : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integrator failed its own conservation tolerance.
class StepFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Series too short for the requested analysis window.
class InsufficientSpan : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config file unreadable or semantically invalid.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output files could not be written.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rotorfluc
