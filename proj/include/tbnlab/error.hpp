// Copyright 2026 The tbnlab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace tbnlab {

// Values mirror the TBN_E_* codes of the C API.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  Parse = 2,
  Io = 3,
  EmptyCollection = 10,
  BudgetExceeded = 11,
  NotSaturated = 12,
  EntropyBelowBound = 13,
  BadAnchor = 14,
  InvalidTM = 20,
  NondeterministicAttachment = 21,
  InputTooLong = 22,
  NotHaltingWithinBounds = 23,
  CountsViolation = 24,
  OutOfGrid = 25,
  SimulationViolated = 26,
  ArityMismatch = 30,
  InvalidCircuit = 31,
  WitnessInvalid = 40,
  NotComplete = 50,
  MalformedPolymer = 51,
  NonDeterministicCorner = 52,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tbnlab
