#pragma once

#include <stdexcept>
#include <string>

namespace gframelab {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- linear algebra -------------------------------------------------------

struct NotSquare : Error {
    explicit NotSquare(const std::string& what) : Error(what) {}
};

struct NotHermitian : Error {
    explicit NotHermitian(const std::string& what) : Error(what) {}
};

struct NotPositive : Error {
    explicit NotPositive(const std::string& what) : Error(what) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& what) : Error(what) {}
};

struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& what) : Error(what) {}
};

// ---- measure space / families ---------------------------------------------

struct SpaceMismatch : Error {
    explicit SpaceMismatch(const std::string& what) : Error(what) {}
};

struct UnknownNode : Error {
    explicit UnknownNode(const std::string& what) : Error(what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct BadInterval : Error {
    explicit BadInterval(const std::string& what) : Error(what) {}
};

struct NotOrthonormal : Error {
    explicit NotOrthonormal(const std::string& what) : Error(what) {}
};

// ---- controllers / duals ---------------------------------------------------

struct NonCommutingControllers : Error {
    explicit NonCommutingControllers(const std::string& what) : Error(what) {}
};

struct BadControllers : Error {
    explicit BadControllers(const std::string& what) : Error(what) {}
};

struct BesselPreconditionFailed : Error {
    explicit BesselPreconditionFailed(const std::string& what) : Error(what) {}
};

struct SingularFrameOperator : Error {
    explicit SingularFrameOperator(const std::string& what) : Error(what) {}
};

struct KernelViolation : Error {
    explicit KernelViolation(const std::string& what) : Error(what) {}
};

struct NotLeftInverse : Error {
    explicit NotLeftInverse(const std::string& what) : Error(what) {}
};

struct NotDual : Error {
    explicit NotDual(const std::string& what) : Error(what) {}
};

// ---- I/O -------------------------------------------------------------------

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(what) {}
};

}  // namespace gframelab
