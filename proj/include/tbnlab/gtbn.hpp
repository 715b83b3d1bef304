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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tbnlab/core.hpp"
#include "tbnlab/tm.hpp"

namespace tbnlab {

// Unit-square monomers. Faces are indexed N=0, E=1, S=2, W=3. A rotation r
// turns the square r quarter turns clockwise, so face f points to side (f+r)%4.
struct GeoMonomerType {
  std::string name;
  std::array<std::optional<Domain>, 4> faces;
};

int geo_side(int face, int rot);
int geo_opposite(int side);
std::pair<int64_t, int64_t> geo_step(int side);
// Rotates a vector r quarter turns clockwise.
std::pair<int64_t, int64_t> geo_rotate(int64_t x, int64_t y, int rot);

struct PlacedMonomer {
  int type = -1;
  int64_t x = 0, y = 0;
  int rot = 0;
  int unit = -1;       // unit index in a construction, -1 if none
  int64_t piece = -1;  // instance id of that unit within the configuration
};

// Member indices and the faces (of the unrotated types) that are bound.
struct GeoBond {
  int a = -1, fa = -1, b = -1, fb = -1;
  auto operator<=>(const GeoBond&) const = default;
};

// Positions are in the polymer's own frame; each polymer floats independently.
struct GeoPolymer {
  std::vector<PlacedMonomer> members;
  std::vector<GeoBond> bonds;
};

struct GeometricConfiguration {
  std::vector<GeoPolymer> polymers;
};

using GeoTypes = std::vector<GeoMonomerType>;

std::vector<std::string> validate_geo_polymer(const GeoTypes& types, const GeoPolymer& p);
std::vector<std::string> validate_geometric(const GeoTypes& types, const GeometricConfiguration& g);
int64_t geo_enthalpy(const GeometricConfiguration& g);
int64_t geo_entropy(const GeometricConfiguration& g);

// True iff some translation plus rotation of B puts face fb of member b against
// face fa of member a with complementary domains and no shared cell.
bool can_place(const GeoTypes& types, const GeoPolymer& A, int a, int fa, const GeoPolymer& B, int b, int fb);
// Two faces of one rigid polymer can bind only if they already face each other.
bool can_bind_within(const GeoTypes& types, const GeoPolymer& P, int a, int fa, int b, int fb);
// No unbound complementary pair can be brought together, within or across polymers.
bool effectively_saturated(const GeoTypes& types, const GeometricConfiguration& g);
// Every unbound complementary pair that could still bind: (polymer, member, face) twice.
std::vector<std::array<int, 6>> bindable_pairs(const GeoTypes& types, const GeometricConfiguration& g);

// ---------------------------------------------------------------------------
// Turing machine construction.

enum class GtbnUnitKind { Seed, Passive, Transition, Extension, End, Cap };
const char* gtbn_unit_kind_name(GtbnUnitKind k);

// A rigid supertile (or single monomer) in its own frame, rotation 0.
struct GtbnUnit {
  std::string name;
  GtbnUnitKind kind = GtbnUnitKind::Passive;
  std::vector<PlacedMonomer> members;
  std::vector<GeoBond> bonds;  // linker bonds inside the unit
  int inputMember = -1;        // member carrying the two input faces
  std::array<int, 2> inputFaces{-1, -1};
  int cap = -1;     // cap unit, for capped units
  int target = -1;  // capped unit, for caps
};

struct GtbnConstruction {
  TMSpec tm;
  std::string input;
  GeoTypes types;
  std::vector<GtbnUnit> units;
  int seed = -1;
  std::vector<int> pieces;           // units that attach during growth
  std::vector<std::string> linkers;  // domain bases private to one unit
  std::map<std::string, int> typeByName, unitByName;
  int64_t transitionTypes = 0;

  int type_index(const std::string& name) const;
  int unit_index(const std::string& name) const;
  bool is_seed_type(int type) const;
  bool is_linker(const Domain& d) const;
  int64_t tape_offset() const { return 3; }  // x of tape cell 0 in the seed frame
};

// Throws InvalidTM; NotHaltingWithinBounds if the machine does not halt on the
// input within maxSteps.
GtbnConstruction compile_tm_gtbn(const TMSpec& tm, const std::string& input, int64_t maxSteps = 100000);

// Copy counts per unit. pieceCopies = 0 means exactly what the seeds consume.
struct GtbnCounts {
  int64_t seeds = 2;
  int64_t pieceCopies = 0;
  int64_t capSurplus = 1;
};

// Pieces consumed by one computation, per unit index.
std::vector<int64_t> gtbn_piece_usage(const GtbnConstruction& cons, int64_t maxSteps = 1000000);
// Copies per unit index, caps included. Throws CountsViolation.
std::vector<int64_t> gtbn_unit_counts(const GtbnConstruction& cons, const GtbnCounts& counts);

// Polymers containing a seed are kept explicitly; everything else is one of
// two interchangeable shapes: a capped unit or a free cap.
struct GtbnState {
  std::vector<GeoPolymer> seeded;
  std::vector<int64_t> capped;    // per unit index
  std::vector<int64_t> freeCaps;  // per cap unit index
  int64_t nextPiece = 0;
};

GeometricConfiguration materialize(const GtbnConstruction& cons, const GtbnState& st);
int64_t gtbn_enthalpy(const GtbnConstruction& cons, const GtbnState& st);
int64_t gtbn_entropy(const GtbnConstruction& cons, const GtbnState& st);
// Bonds not counting links inside supertiles.
int64_t gtbn_unit_bonds(const GtbnConstruction& cons, const GtbnState& st);

GtbnState fully_capped_state(const GtbnConstruction& cons, const GtbnCounts& counts);

struct GrowStep {
  GtbnState state;
  int64_t H = 0, S = 0;
  std::string piece;  // empty for the initial state
  int polymer = -1;
  int64_t x = 0, y = 0;
  int rot = 0;
};

// One step per attached piece, starting from the fully capped state. Seeds are
// grown one after another. Throws BudgetExceeded, NonDeterministicCorner,
// CountsViolation.
std::vector<GrowStep> grow_computation(const GtbnConstruction& cons, const GtbnCounts& counts, int64_t maxSteps);

// The empty cell at which a finished computation waits for a partner, if any.
std::optional<std::pair<int64_t, int64_t>> completion_corner(const GtbnConstruction& cons, const GeoPolymer& p);

// Joins seeded polymers 2k and 2k+1 head to tail. Throws NotComplete.
GtbnState pair_computations(const GtbnConstruction& cons, const GtbnState& st);

// The tape symbol under the halted head, read from a paired polymer.
char read_output(const GtbnConstruction& cons, const GeoPolymer& p);

bool no_rotation_holds(const GtbnConstruction& cons, const GeoPolymer& p);

struct SeedlessFinding {
  int polymer = -1;
  std::string kind;  // "exposed-input" or "entropy-gap"
  int64_t pieces = 0, caps = 0, exposedInputs = 0;
  int64_t dH = 0, dS = 0;  // against capping every piece separately
};
std::vector<SeedlessFinding> audit_seedless(const GtbnConstruction& cons, const GeometricConfiguration& g);

// ---------------------------------------------------------------------------
// Exhaustive search over tiny collections.

struct GeoStableLimits {
  int64_t maxNodes = 20000000;
};

struct GeoStableResult {
  int64_t H = 0, S = 0;
  int64_t realizable = 0;  // matchings with a rigid placement
  // Instances are numbered by type, then copy. Each bond is {inst, face, inst, face}, sorted.
  std::vector<std::vector<std::array<int, 4>>> stable;
  std::vector<GeometricConfiguration> configs;
};

// Maximum bonds, then maximum polymers, over every rigidly realizable matching.
GeoStableResult enumerate_geometric_stable(const GeoTypes& types, const std::vector<int64_t>& counts,
                                           const GeoStableLimits& limits = {});

// ---------------------------------------------------------------------------
// Traces and drawings.

struct TracePlacement {
  int64_t x = 0, y = 0;
  int rot = 0;
  std::string name;
};

struct TraceStep {
  int64_t index = 0, H = 0, S = 0;
  std::string action;  // init, attach, pair
  std::string piece;
  int polymer = 0;
  std::vector<TracePlacement> placed;  // init/pair: whole polymer; attach: new members
};

std::vector<TraceStep> trace_steps(const GtbnConstruction& cons, const std::vector<GrowStep>& steps,
                                   const std::optional<GtbnState>& paired = std::nullopt);
std::string format_trace(const std::vector<TraceStep>& steps);
std::vector<TraceStep> parse_trace(std::string_view text);
// Placements of every seeded polymer after `upTo` steps (all when negative).
std::vector<std::vector<TracePlacement>> replay_trace(const std::vector<TraceStep>& steps, int64_t upTo = -1);
std::string render_svg(const std::vector<std::vector<TracePlacement>>& polymers);

}  // namespace tbnlab
