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

#include <cstdint>
#include <string>
#include <vector>

#include "tbnlab/core.hpp"

namespace tbnlab {

struct SolveLimits {
  int64_t maxMonomers = 20000;
  int64_t maxBranchNodes = 20000000;
  double timeBudgetSeconds = 300.0;
  int threads = 0;  // 0: TBNLAB_THREADS if set, else 1
};

struct SolveStats {
  int64_t nodes = 0;
  int64_t anchorBound = 0;   // proven upper bound on entropy of saturated configurations
  bool anchoredSearch = false;  // true when the bound was attained
  int threads = 1;
};

struct SolveResult {
  std::vector<Configuration> stable;  // one representative per symmetry class, sorted by class key
  std::vector<std::string> keys;      // canonical keys, parallel to `stable`
  int64_t enthalpy = 0;
  int64_t entropy = 0;
  SolveStats stats;
};

SolveResult enumerate_stable(const Collection& c, const SolveLimits& limits = {});
bool is_stable(const Collection& c, const Configuration& a, const SolveLimits& limits = {});

// Upper bound on the entropy of any saturated configuration, from anchor covering.
int64_t entropy_upper_bound(const Collection& c);

struct EntropyCertificate {
  std::vector<int> anchors;  // one instance id per polymer, in polymers() order
  int64_t claimedEntropy = 0;
};

struct CertificateVerdict {
  ErrorCode code = ErrorCode::Ok;
  std::string reason;
  bool ok() const { return code == ErrorCode::Ok; }
};

CertificateVerdict check_entropy_certificate(const Collection& c, const Configuration& a,
                                             const EntropyCertificate& cert);

std::string format_summary(const SolveResult& r);

int resolve_threads(int requested);

}  // namespace tbnlab
