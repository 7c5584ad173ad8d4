#ifndef LINREC_ERRORS_HPP
#define LINREC_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace linrec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Domain characteristic too small for a required division (factorials,
// progression nodes, Newton-basis denominators).
struct CharacteristicTooSmall : Error {
    explicit CharacteristicTooSmall(const std::string& what) : Error(what) {}
};

struct ConstantTermNotInvertible : Error {
    ConstantTermNotInvertible() : Error("constant term is not invertible") {}
};

struct NonInvertibleFactor : Error {
    std::uint64_t index;
    explicit NonInvertibleFactor(std::uint64_t j)
        : Error("factor at index " + std::to_string(j) + " is not invertible"), index(j) {}
};

struct ScaleVanishes : Error {
    std::uint64_t index;
    explicit ScaleVanishes(std::uint64_t n)
        : Error("leading coefficient vanishes at n = " + std::to_string(n)), index(n) {}
};

struct DomainMismatch : Error {
    DomainMismatch() : Error("operands belong to different coefficient domains") {}
};

struct DimensionMismatch : Error {
    DimensionMismatch() : Error("matrix dimensions do not match") {}
};

struct DegenerateOperand : Error {
    explicit DegenerateOperand(const std::string& what) : Error(what) {}
};

// No left-nullspace row found where the closure bounds promise one.
struct NoDependency : Error {
    NoDependency() : Error("dependency matrix has full column rank") {}
};

struct RadiusViolated : Error {
    RadiusViolated() : Error("evaluation point outside the convergence radius") {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace linrec

#endif
