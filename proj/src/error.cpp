// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/error.hpp"

namespace easr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSignal: return "InvalidSignal";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::EmptyRun: return "EmptyRun";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::AlreadyPreprocessed: return "AlreadyPreprocessed";
    case ErrorCode::InvalidSegmentation: return "InvalidSegmentation";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::StratificationFailure: return "StratificationFailure";
    case ErrorCode::InsufficientSubjects: return "InsufficientSubjects";
    case ErrorCode::PairingError: return "PairingError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace easr
