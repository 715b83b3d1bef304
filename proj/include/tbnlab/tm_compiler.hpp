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

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tbnlab/atam.hpp"
#include "tbnlab/core.hpp"
#include "tbnlab/solver.hpp"

namespace tbnlab {

// Per-type wiring used to build configurations structurally.
struct MonomerInfo {
  Role role = Role::Generic;
  int tmpl = -1;       // comp: index into tiles; end: index into endTemplates
  int64_t x = -1, y = -1;  // grid location, -1 when not hard-coded
  Domain inH, inV;     // inputs (comp, end)
  Domain outH, outV;   // outputs; outH unused for end monomers
  bool hasOutV = false;
  int capType = -1;    // for comp/end
  int target = -1;     // for caps
};

struct EndTemplate {
  char symbol = '_';
  std::string state;  // empty or the halt state
  CellClass cls = CellClass::Mid;
};

struct TbnConstruction {
  TMSpec tm;
  std::string input;
  int64_t s = 0, t = 0;
  bool hardCoded = true;
  ZigzagSystem zz;
  std::vector<EndTemplate> endTemplates;
  Collection types;  // every monomer type with count 1
  int seedType = -1;
  std::vector<int> compTypes, endTypes, capTypes;
  std::vector<MonomerInfo> info;  // per type
  // Intended computation: layout[x][y] is the comp type at grid (x,y) for x < 2t,
  // and the end type for x = 2t.
  std::vector<std::vector<int>> layout;
  std::map<std::tuple<int, int64_t, int64_t>, int> compAt;  // (template, x, y) -> type (hard-coded)
  std::map<std::tuple<int, int64_t>, int> endAt;             // (template, y) -> type (hard-coded)
  std::map<int, int> compOfTemplate, endOfTemplate;          // location-free

  std::vector<Domain> domains() const;  // sorted distinct domain types, primaries and stars
};

// Hard-coded construction over the 2t x s grid.
TbnConstruction compile_tm(const TMSpec& tm, const std::string& input, int64_t s, int64_t t);
// Same families without coordinate subscripts.
TbnConstruction compile_tm_locationfree(const TMSpec& tm, const std::string& input, int64_t s, int64_t t);

// |comp templates| * 2t * s + |end templates| * s + caps
int64_t expected_type_count(const TbnConstruction& cons);

struct CountsPolicy {
  int64_t seed = 1;
  int64_t comp = 1;  // computation and end monomers
  int64_t cap = 1;
  std::map<std::string, int64_t> overrides;  // by monomer type name
};

// Applies counts and enforces #seed <= c_min <= k_min.
Collection apply_counts(const TbnConstruction& cons, const CountsPolicy& counts);

struct CanonicalConfig {
  Collection collection;
  Configuration config;
  EntropyCertificate cert;
};

CanonicalConfig canonical_stable_config(const TbnConstruction& cons, const CountsPolicy& counts);

// Grid cell -> cell whose east output feeds its west input instead of the left
// neighbour. x = -1 names the seed.
using WestOverrides = std::map<std::pair<int64_t, int64_t>, std::pair<int64_t, int64_t>>;

// Like the canonical configuration, but every seed polymer follows `layout`.
// Throws WitnessInvalid when a required bond has no complementary free domain.
CanonicalConfig configuration_for_layout(const TbnConstruction& cons, const CountsPolicy& counts,
                                         const std::vector<std::vector<int>>& layout, const WestOverrides& west = {});

// Grid layout of the intended computation on another input, using this
// construction's types.
std::vector<std::vector<int>> layout_for_input(const TbnConstruction& cons, const std::string& input);

struct AlphaStep {
  Configuration config;
  int64_t H = 0, S = 0;
  std::string what;  // "initial", "swap <type>", "rebind"
};
std::vector<AlphaStep> build_alpha_sequence(const TbnConstruction& cons, const CountsPolicy& counts);

// Grid order: by x, then ascending y in even columns and descending y in odd ones.
std::strong_ordering zz_order(std::pair<int64_t, int64_t> a, std::pair<int64_t, int64_t> b, int64_t s, int64_t t);

// Decoders over a set of monomer types. Empty optional means undefined.
std::optional<std::string> e_input(const std::vector<MonomerType>& monomers);
std::optional<std::string> e_output(const std::vector<MonomerType>& monomers, int64_t s, char blank = '_');

enum class VerifyMode { Enumerate, Certificate };

struct VerifyReport {
  ErrorCode code = ErrorCode::Ok;
  std::string message;
  int64_t stableClasses = 0;
  int64_t H = 0, S = 0;
  std::string expectedOutput, decodedOutput;
  std::string counterexample;  // document dump of the offending polymer
  bool ok() const { return code == ErrorCode::Ok; }
};

VerifyReport verify_simulation(const Collection& c, const TbnConstruction& cons, VerifyMode mode,
                               const SolveLimits& limits = {});

// Strips the halt state and classes: "(H,1).top!d" -> '1'.
char label_symbol(const std::string& label);
std::string label_state(const std::string& label);

// Shared between compilers: wires a seed polymer whose grid cells hold the given
// types. Instances are taken from `next` (per type counters) and advanced.
void wire_computation(const TbnConstruction& cons, const Collection& c, const std::vector<std::vector<int>>& layout,
                      int seedInst, std::vector<int64_t>& next, Configuration& out, std::vector<int>* members = nullptr);

}  // namespace tbnlab
