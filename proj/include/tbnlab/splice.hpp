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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tbnlab/atam.hpp"
#include "tbnlab/tm_compiler.hpp"

namespace tbnlab {

// Three runs of the same machine whose location-free polymers can be cut and
// re-joined. Columns are aTAM columns in [1, 2t]; rows are tape cells, 0 on top.
struct SpliceWitness {
  std::string i, j, k;
  int64_t c1 = 0, c2 = 0;
  int64_t l1 = 0, l2 = 0;
  std::string outI, outK;                          // machine outputs on i and k
  std::array<Assembly, 3> assemblies;              // terminal assemblies for i, j, k
  std::array<std::vector<std::vector<int>>, 3> grids;  // tile index [column - 1][row]
};

struct SpliceSearchLimits {
  int64_t maxChecks = 50000000;  // column-pair comparisons
  int threads = 0;               // 0: TBNLAB_THREADS if set, else 1
};

// Scans ordered triples of distinct candidates, then c1 < c2 and rows, in
// lexicographic order. Returns the first witness; none does not mean the
// construction simulates correctly.
std::optional<SpliceWitness> find_splice_witness(const TMSpec& tm, const std::vector<std::string>& candidates,
                                                 int64_t s, int64_t t, const SpliceSearchLimits& limits = {});

// Grid of tile indices for columns 1..2t of the intended assembly on `input`.
std::vector<std::vector<int>> zigzag_grid(const ZigzagSystem& zz, const Assembly& a, int64_t s, int64_t t);

// Seed polymer of i up to column c1, then j up to c2, then k. `cons` must be
// compiled for input i. Throws WitnessInvalid if the cross bonds do not exist.
CanonicalConfig build_spliced_configuration(const SpliceWitness& w, const TbnConstruction& cons,
                                            const CountsPolicy& counts);

// Smallest uniform counts for which both the intended and the spliced polymer fit.
CountsPolicy splice_counts(const SpliceWitness& w, const TbnConstruction& cons);

struct SpliceReport {
  std::string i, j, k;
  int64_t c1 = 0, c2 = 0, l1 = 0, l2 = 0;
  CanonicalConfig correct, spliced;
  int64_t correctH = 0, splicedH = 0, correctS = 0, splicedS = 0;
  bool correctValid = false, splicedValid = false;  // validates and is saturated
  std::string correctOutput, splicedOutput;         // decoded from the seed polymers
  std::string expectedOutput;                       // machine output on i
  // Both configurations are equally stable, yet the spliced one decodes wrongly.
  bool violation() const {
    return correctValid && splicedValid && correctH == splicedH && correctS == splicedS &&
           correctOutput == expectedOutput && splicedOutput != expectedOutput;
  }
};

SpliceReport demonstrate_failure(const SpliceWitness& w, const TbnConstruction& cons,
                                 const std::optional<CountsPolicy>& counts = std::nullopt);

std::string format_splice_report(const SpliceReport& r);
// Recomputes every value from the embedded documents; throws Parse if the
// summary lines disagree with them.
SpliceReport parse_splice_report(std::string_view text);

}  // namespace tbnlab
