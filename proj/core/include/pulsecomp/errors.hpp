#pragma once

#include <stdexcept>
#include <string>

namespace pulsecomp {

/// A linear system was too ill-conditioned to solve reliably.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : std::runtime_error(what + " (estimated condition number " +
                             std::to_string(condition_estimate) + ")"),
          condition_estimate_(condition_estimate) {}

    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

}  // namespace pulsecomp
