#pragma once

#include <stdexcept>
#include <string>

namespace qlc {

// Base of the toolkit error taxonomy. Messages follow "function: detail".
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// circuit algebra
struct NonUnitaryScattering : Error { using Error::Error; };
struct SingularFeedback : Error { using Error::Error; };

// state-space compilation
struct ComplexResidue : Error { using Error::Error; };
struct SingularDrift : Error { using Error::Error; };
struct UnstableSystem : Error { using Error::Error; };
struct AlgebraicLoop : Error { using Error::Error; };

// noise models
struct NegativeNoise : Error { using Error::Error; };

// solvers
struct SolverFailure : Error { using Error::Error; };
struct NoStabilizingSolution : Error { using Error::Error; };
struct SingularMeasurementNoise : Error { using Error::Error; };

// component parameters
struct NegativeCoupling : Error { using Error::Error; };
struct InvalidTransmittance : Error { using Error::Error; };
struct NonPositiveParam : Error { using Error::Error; };
struct InvalidKindParams : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };

// optimization
struct NoStableStart : Error { using Error::Error; };
struct MaxIterations : Error { using Error::Error; };

// netlist parsing; what() starts with the JSON-pointer path where one exists
struct SyntaxError : Error { using Error::Error; };
struct UnknownComponent : Error { using Error::Error; };
struct PortArityMismatch : Error { using Error::Error; };

struct SchemaError : Error {
    SchemaError(const std::string& path, const std::string& detail)
        : Error(path + ": " + detail), path_(path) {}
    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

}  // namespace qlc
