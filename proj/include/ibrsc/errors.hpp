#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ibrsc {

/// Malformed or inconsistent input (files, ids, schema).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// System matrix could not be built or factorized.
class AssemblyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The current-limit quadratic has no real root.
class InfeasibleLimit : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver stopped without meeting its tolerance.
struct ConvergenceDiagnostics {
    int iterations = 0;
    double final_norm = 0.0;
    std::string worst_row;
    std::vector<double> history;
};

class NonConvergence : public std::runtime_error {
  public:
    NonConvergence(const std::string& what, ConvergenceDiagnostics diag)
        : std::runtime_error(what), diag_(std::move(diag)) {}
    const ConvergenceDiagnostics& diagnostics() const { return diag_; }

  private:
    ConvergenceDiagnostics diag_;
};

}  // namespace ibrsc
