#ifndef QC1D_ERRORS_HPP
#define QC1D_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qc1d {

// Exit codes used by the CLI; library code only throws.
enum class ExitCode : int { ok = 0, validation = 2, solver = 3, stability = 4 };

// Geometry/input violates a documented constraint. The message names the
// constraint that failed.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Quantity left the domain of the model (nonpositive bond stretch etc.).
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Newton/line search could not make progress.
class SolverFailure : public std::runtime_error {
public:
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

// A_* <= 0: the a posteriori bounds are meaningless.
class StabilityLost : public std::runtime_error {
public:
  explicit StabilityLost(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qc1d

#endif
