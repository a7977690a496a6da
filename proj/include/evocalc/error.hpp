// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evocalc authors

#pragma once

#include <stdexcept>
#include <string>

namespace evo {

enum class ErrorCode {
  InvalidArgument = 1,
  GridMismatch = 2,
  DimMismatch = 3,
  PreconditionFailed = 4,
  Numerical = 5,
  Config = 6,
  Io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace evo
