#pragma once

#include <stdexcept>
#include <string>

namespace bb84pns {

// Base for every "the physics cannot be satisfied" condition, as opposed to
// plain bad arguments (std::invalid_argument) or domain violations
// (std::domain_error), so callers can map them to a distinct exit path.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Bob's expected detection rate exceeds what Eve can deliver even when she
// forwards everything she receives.
class InfeasibleChannelError : public InfeasibleError {
public:
    explicit InfeasibleChannelError(const std::string& what) : InfeasibleError(what) {}
};

// The constrained attack search found no parameter set reproducing Bob's
// observed rate and error statistics.
class NoFeasibleAttackError : public InfeasibleError {
public:
    explicit NoFeasibleAttackError(const std::string& what) : InfeasibleError(what) {}
};

// An explicitly supplied attack violates the rate or error constraint beyond
// tolerance; the message carries both residuals.
class InfeasibleAttackError : public InfeasibleError {
public:
    InfeasibleAttackError(const std::string& what, double res_rate, double res_error)
        : InfeasibleError(what), res_rate(res_rate), res_error(res_error) {}
    double res_rate;
    double res_error;
};

// The closed-form approximation layer was evaluated outside its validity
// region (e.g. mean photon number so large the single-photon fraction
// Eve must forward turns negative).
class ApproxInfeasibleError : public InfeasibleError {
public:
    explicit ApproxInfeasibleError(const std::string& what) : InfeasibleError(what) {}
};

// Both honest count rates are exactly zero (no photons and no dark counts);
// the QBER is undefined rather than silently 0/0.
class NoCountsError : public std::runtime_error {
public:
    explicit NoCountsError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bb84pns
