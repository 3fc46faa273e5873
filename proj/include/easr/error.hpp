// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace easr {

enum class ErrorCode {
  InvalidSignal,
  NotSymmetric,
  DegenerateCovariance,
  EmptyRun,
  DimensionMismatch,
  InvalidBand,
  AlreadyPreprocessed,
  InvalidSegmentation,
  EmptyClass,
  InvalidLabel,
  NonFiniteGradient,
  EmptySplit,
  StratificationFailure,
  InsufficientSubjects,
  PairingError,
  EmptyInput,
  DomainError,
  BadMagic,
  VersionUnsupported,
  HashMismatch,
  TruncatedPayload,
  InvalidPlan,
  IoError,
};

const char* error_code_name(ErrorCode code);

// Every library failure surfaces as an Error; code() is the machine-parsable
// category the CLI prints on exit.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace easr
