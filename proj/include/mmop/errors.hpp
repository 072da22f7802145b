#pragma once

#include <stdexcept>
#include <string>

namespace mmop {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input is structurally invalid (bad dimensions, malformed config, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// det R(x) is numerically identically zero.
class NonRegular : public Error {
public:
    using Error::Error;
};

// Leading/sub-leading coefficients do not match the required block pattern.
class StructureViolation : public InvalidInput {
public:
    StructureViolation(const std::string& what, std::string block)
        : InvalidInput(what), offending_block(std::move(block)) {}
    std::string offending_block;
};

// Requested truncation cannot hold the banded image / product exactly.
class TruncationTooSmall : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// Polynomial left division left a residual above tolerance.
class DivisionFailure : public Error {
public:
    DivisionFailure(const std::string& what, double res)
        : Error(what), residual(res) {}
    double residual;
};

// Recovered root count disagrees with the expected determinant degree.
class RootCountMismatch : public Error {
public:
    using Error::Error;
};

// Canonical Jordan chain set could not be completed to the full multiplicity.
class ChainDeficiency : public Error {
public:
    using Error::Error;
};

// A stored moment table is too short for the requested truncation.
class InsufficientMomentTable : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// Gauss-Borel elimination hit a vanishing pivot: the leading principal minor
// at `index` is singular to working tolerance.
class QuasidefiniteFailure : public Error {
public:
    QuasidefiniteFailure(const std::string& what, int idx)
        : Error(what), index(idx) {}
    int index;
};

// The sample-value system for a connection-matrix column is singular,
// i.e. a tau determinant vanished.
class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, int col)
        : Error(what), column(col) {}
    int column;
};

// A tau determinant required by a Christoffel formula is flagged zero.
class ExistenceFailure : public Error {
public:
    ExistenceFailure(const std::string& what, int idx)
        : Error(what), index(idx) {}
    int index;
};

} // namespace mmop
