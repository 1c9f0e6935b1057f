#pragma once

#include <stdexcept>
#include <string>

namespace hmf {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested field is not in the vetted catalog.
struct CatalogError : Error {
    using Error::Error;
};

// The fundamental unit has norm +1, so the narrow class group is nontrivial
// and the constructions here do not apply.
struct UnitSignError : Error {
    using Error::Error;
};

// No totally positive associate could be produced (defensive; unreachable
// for catalog fields, whose fundamental unit has norm -1).
struct PositivityError : Error {
    using Error::Error;
};

// Argument was required to be squarefree but is not.
struct NotSquarefreeError : Error {
    using Error::Error;
};

// Euler-criterion quadratic symbol requested at a prime of even norm.
struct EvenPrimeError : Error {
    using Error::Error;
};

// Level violates a structural requirement (e.g. not divisible by 4).
struct LevelError : Error {
    using Error::Error;
};

// A hypothesis of the basis theorem fails for the requested input
// (split prime in the level, character not trivial on units, ...).
struct HypothesisError : Error {
    using Error::Error;
};

// A coefficient was requested outside the region where the expansion
// is known.
struct BoxTooSmallError : Error {
    using Error::Error;
};

// A quantity that must not depend on a choice of representative turned
// out to depend on it.
struct WellDefinednessError : Error {
    using Error::Error;
};

// A numerical evaluation cannot reach the requested accuracy within the
// configured truncation budget.
struct ConvergenceError : Error {
    using Error::Error;
};

// Matrix fails the exact membership test of the required group.
struct MembershipError : Error {
    using Error::Error;
};

// Closed-form automorphy factor requested for a triangular element
// (lower-left entry zero), where the ratio is exactly 1 and the Gauss-sum
// formula degenerates.
struct DegenerateError : Error {
    using Error::Error;
};

// A quadratic character value vanished where the closed form needs a unit.
struct SymbolError : Error {
    using Error::Error;
};

// Malformed textual/JSON input.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace hmf
