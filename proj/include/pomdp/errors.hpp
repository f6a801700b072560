#pragma once

#include <stdexcept>
#include <string>

namespace pomdp {

/// Model file could not be parsed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model, belief or controller violates its invariants.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// P(o|b,a) is (numerically) zero; callers must not branch on this observation.
class ImpossibleObservation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear program failed (cycling, infeasible where feasibility is guaranteed, ...).
class LpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured size cap was exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pomdp
