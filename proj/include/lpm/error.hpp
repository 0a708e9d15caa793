#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lpm {

enum class ErrorCode {
  // Input errors.
  MalformedInput,
  UnknownField,
  NonSquareMatrix,
  AsymmetricMatrix,
  NonzeroDiagonal,
  NonPositiveOffDiagonal,
  TriangleViolation,
  InvalidNorm,
  DimensionMismatch,
  IndexOutOfRange,
  NonPositiveWeight,
  WeightSumMismatch,
  DuplicatePoint,
  SpaceMismatch,
  SupportCapExceeded,
  NoConvexStructure,
  NotAVertex,
  NotAnIsometry,
  DegenerateConfiguration,
  InvalidArgument,
  // Verification failures.
  CrossCheckDivergence,
  RayVerificationFailed,
  ProfileShapeMismatch,
  DegenerateEta,
  NonDiracImage,
  ReconstructionFailure,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedInput: return "malformed input";
    case ErrorCode::UnknownField: return "unknown field";
    case ErrorCode::NonSquareMatrix: return "non-square distance matrix";
    case ErrorCode::AsymmetricMatrix: return "asymmetric distance matrix";
    case ErrorCode::NonzeroDiagonal: return "nonzero diagonal entry";
    case ErrorCode::NonPositiveOffDiagonal: return "non-positive off-diagonal entry";
    case ErrorCode::TriangleViolation: return "triangle inequality violated";
    case ErrorCode::InvalidNorm: return "invalid norm parameters";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::IndexOutOfRange: return "point index out of range";
    case ErrorCode::NonPositiveWeight: return "non-positive weight";
    case ErrorCode::WeightSumMismatch: return "weights do not sum to 1";
    case ErrorCode::DuplicatePoint: return "duplicate atom";
    case ErrorCode::SpaceMismatch: return "space mismatch";
    case ErrorCode::SupportCapExceeded: return "support cap exceeded";
    case ErrorCode::NoConvexStructure: return "space has no convex structure";
    case ErrorCode::NotAVertex: return "point is not a hull vertex";
    case ErrorCode::NotAnIsometry: return "map is not an isometry";
    case ErrorCode::DegenerateConfiguration: return "degenerate point configuration";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::CrossCheckDivergence: return "brute/flow cross-check divergence";
    case ErrorCode::RayVerificationFailed: return "exposing ray verification failed";
    case ErrorCode::ProfileShapeMismatch: return "witness profile shape mismatch";
    case ErrorCode::DegenerateEta: return "degenerate eta measure";
    case ErrorCode::NonDiracImage: return "non-Dirac image";
    case ErrorCode::ReconstructionFailure: return "reconstruction failure";
  }
  return "unknown error";
}

/// True for errors caused by bad input, as opposed to a failed verification.
inline bool is_input_error(ErrorCode code) {
  return code < ErrorCode::CrossCheckDivergence;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace lpm
