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
#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "geo_oracle.hpp"
#include "tbnlab/gtbn.hpp"
#include "util.hpp"

using namespace tbnlab;

namespace {

TMSpec load(const char* name) { return parse_tm(read_file(std::string(TBNLAB_TEST_DATA) + "/" + name)); }

std::vector<std::string> inputs_up_to(int len) {
  std::vector<std::string> out{""};
  for (int n = 1; n <= len; ++n)
    for (int m = 0; m < (1 << n); ++m) {
      std::string x;
      for (int b = n - 1; b >= 0; --b) x += (m >> b & 1) ? '1' : '0';
      out.push_back(x);
    }
  return out;
}

std::optional<Domain> P(const std::string& s) { return Domain(DomainName(s), false); }
std::optional<Domain> St(const std::string& s) { return Domain(DomainName(s), true); }

std::string faces_str(const GeoMonomerType& t) {
  std::string s;
  for (int f = 0; f < 4; ++f) {
    if (f) s += " ";
    s += t.faces[f] ? t.faces[f]->name.base + (t.faces[f]->star ? "*" : "") : std::string("-");
  }
  return s;
}

using geo_oracle::Cell;
using geo_oracle::naive_geo;
using geo_oracle::rotated;
using geo_oracle::side;
using geo_oracle::step;

// Tries every rotation of B and every translation in a window around A.
bool exhaustive_place(const GeoTypes& types, const GeoPolymer& A, int a, int fa, const GeoPolymer& B, int b, int fb,
                      bool allowMirror = false) {
  std::set<Cell> occA;
  for (const auto& m : A.members) occA.insert({m.x, m.y});
  const auto& da = types[A.members[a].type].faces[fa];
  const auto& db = types[B.members[b].type].faces[fb];
  if (!da || !db || !da->binds(*db)) return false;
  for (int mirror = 0; mirror <= (allowMirror ? 1 : 0); ++mirror)
    for (int r = 0; r < 4; ++r)
      for (int64_t tx = -12; tx <= 12; ++tx)
        for (int64_t ty = -12; ty <= 12; ++ty) {
          auto place = [&](const PlacedMonomer& m) {
            Cell c = {m.x, m.y};
            if (mirror) c.second = -c.second;
            c = rotated(c, r);
            return Cell{c.first + tx, c.second + ty};
          };
          auto faceSide = [&](const PlacedMonomer& m, int f) {
            int s = static_cast<int>(side(f, m.rot));
            if (mirror && (s == 0 || s == 2)) s = (s + 2) % 4;
            return (s + r) % 4;
          };
          Cell pa = {A.members[a].x, A.members[a].y};
          int sa = static_cast<int>(side(fa, A.members[a].rot));
          Cell pb = place(B.members[b]);
          if (pb != Cell{pa.first + step(sa).first, pa.second + step(sa).second}) continue;
          if (faceSide(B.members[b], fb) != (sa + 2) % 4) continue;
          bool clear = true;
          for (const auto& m : B.members) clear &= !occA.count(place(m));
          if (clear) return true;
        }
  return false;
}

// Pieces of the construction that count as the "computation" for a seeded polymer.
int count_type(const GtbnConstruction& c, const GeoPolymer& p, const std::string& prefix, const std::string& suffix) {
  int n = 0;
  for (const auto& m : p.members) {
    const auto& nm = c.types[m.type].name;
    if (nm.rfind(prefix, 0) == 0 && nm.size() >= suffix.size() && nm.compare(nm.size() - suffix.size(), suffix.size(), suffix) == 0) ++n;
  }
  return n;
}

// A 3x3 ring with an empty centre; member 0 at (0,-1) points into the hole.
GeoPolymer ring(GeoTypes& types, const std::string& inward) {
  std::vector<Cell> cells = {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
  GeoPolymer p;
  int base = static_cast<int>(types.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    GeoMonomerType t;
    t.name = "ring" + std::to_string(i);
    types.push_back(t);
  }
  for (size_t i = 0; i < cells.size(); ++i) {
    size_t j = (i + 1) % cells.size();
    Cell d = {cells[j].first - cells[i].first, cells[j].second - cells[i].second};
    int s = 0;
    while (step(s) != d) ++s;
    std::string link = "ring" + std::to_string(i);
    types[base + i].faces[s] = P(link);
    types[base + j].faces[(s + 2) % 4] = St(link);
    p.members.push_back({base + static_cast<int>(i), cells[i].first, cells[i].second, 0, -1, -1});
    if (i + 1 < cells.size()) p.bonds.push_back({static_cast<int>(i), s, static_cast<int>(j), (s + 2) % 4});
  }
  types[base].faces[kNorth] = P(inward);
  return p;
}

}  // namespace

TEST_CASE("construction tables") {
  auto c = compile_tm_gtbn(load("parity.tm"), "01");
  auto face = [&](const std::string& n) { return faces_str(c.types[c.type_index(n)]); };
  CHECK(face("L3") == "(_),l* R* extL_2,3* extL_3,4");
  CHECK(face("R3") == "(_),r* extR_3,4 extR_2,3* L*");
  CHECK(face("S1") == "EXT_LEFT* R* seed_1,2 -");
  CHECK(face("S9") == "EXT_RIGHT halt - seed_8,9*");
  CHECK(face("I1") == "(E,0),r* seed_I1,I2 - seed_3b,I1*");
  CHECK(face("I2") == "(1),r* seed_I2,4 - seed_I1,I2*");
  CHECK(face("(E,1)-move1") == "(1),l* (O)* (E,1),r R");
  CHECK(face("(B,0)-move1") == "(0),r* L (B,0),l (H)*");
  CHECK(face("(B,0)-skip") == "(B,0),l* R* (B,0),r R");
  CHECK(face("(1),haltR") == "- halt* (H,1),r R");
  CHECK(face("seed-cap1") == "- seedcap_1,2 EXT_RIGHT* -");
  CHECK(face("seed-cap2") == "- - seedcap_2,3 seedcap_1,2*");
  CHECK(face("seed-cap3") == "seedcap_2,3* - - halt*");

  // two blank pads each side of the input
  int pads = 0;
  for (const char* s : {"S3", "S3b", "S4", "S4b"}) pads += face(s).rfind("(_),r*", 0) == 0;
  CHECK(pads == 4);

  std::map<std::string, std::pair<int, int>> linkerUse;  // primary, starred
  for (const auto& t : c.types)
    for (const auto& d : t.faces)
      if (d && c.is_linker(*d)) (d->star ? linkerUse[d->name.base].second : linkerUse[d->name.base].first)++;
  for (const auto& [name, use] : linkerUse) {
    INFO(name);
    CHECK(use == std::pair<int, int>{1, 1});
  }
  for (const auto& u : c.units)
    if (u.kind == GtbnUnitKind::Cap)
      for (const auto& m : u.members)
        for (const auto& d : c.types[m.type].faces) CHECK((!d || d->star || c.is_linker(*d)));

  for (const char* tmName : {"bitflip.tm", "parity.tm", "restore.tm"}) {
    auto tm = load(tmName);
    auto cc = compile_tm_gtbn(tm, "");
    int64_t q = static_cast<int64_t>(tm.states.size()), g = static_cast<int64_t>(tm.tapeAlphabet.size());
    CHECK(cc.transitionTypes <= 3 * q * g * 2);
  }

  auto tm = load("bitflip.tm");
  CHECK_THROWS_AS(compile_tm_gtbn(tm, "012"), Error);
  TMSpec loop = parse_tm("states: A,H\ninput: 0,1\ntape: 0,1,_\nblank: _\nstart: A\nhalt: H\nA,0 -> A,0,R\nA,1 -> A,1,R\nA,_ -> A,_,R\n");
  try {
    compile_tm_gtbn(loop, "0", 50);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHaltingWithinBounds);
  }
}

TEST_CASE("can_place") {
  GeoTypes types = {{"x", {std::nullopt, P("a"), std::nullopt, std::nullopt}},
                    {"y", {std::nullopt, std::nullopt, std::nullopt, St("a")}}};
  GeoPolymer A{{{0, 0, 0, 0}}, {}}, B{{{1, 5, 5, 2}}, {}};
  CHECK(can_place(types, A, 0, kEast, B, 0, kWest));
  CHECK(can_place(types, B, 0, kWest, A, 0, kEast));
  CHECK_FALSE(can_place(types, A, 0, kEast, A, 0, kEast));

  SUBCASE("ring interior") {
    GeoTypes t;
    GeoPolymer r = ring(t, "a");
    GeoMonomerType one{"one", {std::nullopt, std::nullopt, St("a"), std::nullopt}};
    GeoMonomerType d0{"d0", {P("d"), std::nullopt, St("a"), std::nullopt}};
    GeoMonomerType d1{"d1", {std::nullopt, std::nullopt, St("d"), std::nullopt}};
    t.push_back(one);
    t.push_back(d0);
    t.push_back(d1);
    int n = static_cast<int>(t.size());
    GeoPolymer single{{{n - 3, 0, 0, 0}}, {}};
    GeoPolymer domino{{{n - 2, 0, 0, 0}, {n - 1, 0, 1, 0}}, {{0, kNorth, 1, kSouth}}};
    CHECK(validate_geo_polymer(t, r).empty());
    CHECK(validate_geo_polymer(t, domino).empty());
    CHECK(can_place(t, r, 0, kNorth, single, 0, kSouth));
    CHECK(exhaustive_place(t, r, 0, kNorth, single, 0, kSouth));
    CHECK_FALSE(can_place(t, r, 0, kNorth, domino, 0, kSouth));
    CHECK_FALSE(exhaustive_place(t, r, 0, kNorth, domino, 0, kSouth));
  }

  SUBCASE("reflection is not a motion") {
    // A: bonding square at (0,0) facing east, plus squares at (0,1) and (1,1).
    // B's second square sits north of its bonding square, so every rotation
    // lands it on (1,1); only a mirror image would swing it south.
    GeoTypes t = {{"a0", {P("w"), P("a"), std::nullopt, std::nullopt}},
                  {"a1", {std::nullopt, P("u"), St("w"), std::nullopt}},
                  {"a2", {std::nullopt, std::nullopt, std::nullopt, St("u")}},
                  {"b0", {P("v"), std::nullopt, std::nullopt, St("a")}},
                  {"b1", {std::nullopt, std::nullopt, St("v"), std::nullopt}}};
    GeoPolymer A{{{0, 0, 0, 0}, {1, 0, 1, 0}, {2, 1, 1, 0}}, {{0, kNorth, 1, kSouth}, {1, kEast, 2, kWest}}};
    GeoPolymer B{{{3, 0, 0, 0}, {4, 0, 1, 0}}, {{0, kNorth, 1, kSouth}}};
    REQUIRE(validate_geo_polymer(t, A).empty());
    REQUIRE(validate_geo_polymer(t, B).empty());
    CHECK_FALSE(can_place(t, A, 0, kEast, B, 0, kWest));
    CHECK_FALSE(exhaustive_place(t, A, 0, kEast, B, 0, kWest));
    CHECK(exhaustive_place(t, A, 0, kEast, B, 0, kWest, true));
  }
}

TEST_CASE("can_place agrees with an exhaustive motion search") {
  std::mt19937_64 rng(11);
  const char* names[] = {"a", "b"};
  for (int trial = 0; trial < 300; ++trial) {
    GeoTypes t;
    auto grow = [&](int n) {
      GeoPolymer p;
      std::set<Cell> used;
      Cell c{0, 0};
      for (int i = 0; i < n; ++i) {
        GeoMonomerType m;
        m.name = "m" + std::to_string(t.size());
        for (int f = 0; f < 4; ++f)
          if (rng() % 3 == 0) m.faces[f] = Domain(DomainName(names[rng() % 2]), rng() % 2);
        if (i > 0) {
          // walk to a fresh neighbour of the previous square, linking the two
          int s;
          Cell nc;
          int tries = 0;
          do {
            s = static_cast<int>(rng() % 4);
            nc = {c.first + step(s).first, c.second + step(s).second};
          } while (used.count(nc) && ++tries < 20);
          if (used.count(nc)) break;
          std::string link = "l" + std::to_string(t.size());
          t[p.members.back().type].faces[s] = P(link);
          m.faces[(s + 2) % 4] = St(link);
          p.bonds.push_back({static_cast<int>(p.members.size()) - 1, s, static_cast<int>(p.members.size()), (s + 2) % 4});
          c = nc;
        }
        used.insert(c);
        t.push_back(m);
        p.members.push_back({static_cast<int>(t.size()) - 1, c.first, c.second, static_cast<int>(rng() % 4), -1, -1});
      }
      return p;
    };
    GeoPolymer A = grow(1 + static_cast<int>(rng() % 5)), B = grow(1 + static_cast<int>(rng() % 4));
    for (int a = 0; a < static_cast<int>(A.members.size()); ++a)
      for (int fa = 0; fa < 4; ++fa)
        for (int b = 0; b < static_cast<int>(B.members.size()); ++b)
          for (int fb = 0; fb < 4; ++fb)
            REQUIRE(can_place(t, A, a, fa, B, b, fb) == exhaustive_place(t, A, a, fa, B, b, fb));
  }
}

TEST_CASE("effectively saturated") {
  auto c = compile_tm_gtbn(load("bitflip.tm"), "01");
  GtbnState base = fully_capped_state(c, {});
  auto g = materialize(c, base);
  CHECK(validate_geometric(c.types, g).empty());
  CHECK(effectively_saturated(c.types, g));
  // every input face of the baseline is bound
  for (const auto& p : g.polymers) {
    std::set<std::pair<int, int>> bound;
    for (const auto& b : p.bonds) bound.insert({b.a, b.fa}), bound.insert({b.b, b.fb});
    for (size_t i = 0; i < p.members.size(); ++i)
      for (int f = 0; f < 4; ++f) {
        const auto& d = c.types[p.members[i].type].faces[f];
        if (d && !d->star) CHECK(bound.count({static_cast<int>(i), f}));
      }
  }

  SUBCASE("an uncapped piece can join the growing computation") {
    // The first piece the computation needs, released from its cap.
    auto steps = grow_computation(c, {}, 100000);
    const std::string& first = steps.at(1).piece;
    GeometricConfiguration h = g;
    int u = c.unit_index(first);
    for (auto& p : h.polymers)
      if (p.members[0].unit == u) {
        GeoPolymer piece, cap;
        for (const auto& m : p.members) (m.unit == u ? piece : cap).members.push_back(m);
        for (const auto& b : p.bonds)
          if (p.members[b.a].unit == p.members[b.b].unit && p.members[b.a].unit != u) {
            int off = static_cast<int>(c.units[u].members.size());
            cap.bonds.push_back({b.a - off, b.fa, b.b - off, b.fb});
          }
        p = piece;
        h.polymers.push_back(cap);
        break;
      }
    REQUIRE(validate_geometric(c.types, h).empty());
    CHECK(geo_entropy(h) == geo_entropy(g) + 1);
    CHECK_FALSE(effectively_saturated(c.types, h));
  }

  SUBCASE("complements hidden in pockets") {
    // U shapes whose binding square sits at the bottom of a one-cell pocket.
    auto pocket = [](GeoTypes& t, const std::string& tag, std::optional<Domain> d) {
      std::vector<Cell> cells = {{0, 0}, {1, 0}, {1, 1}, {-1, 0}, {-1, 1}};
      int base = static_cast<int>(t.size());
      for (size_t i = 0; i < cells.size(); ++i) t.push_back({tag + std::to_string(i), {}});
      GeoPolymer p;
      for (size_t i = 0; i < cells.size(); ++i) p.members.push_back({base + static_cast<int>(i), cells[i].first, cells[i].second, 0, -1, -1});
      auto link = [&](int i, int j, int s, const std::string& nm) {
        t[base + i].faces[s] = P(tag + nm);
        t[base + j].faces[(s + 2) % 4] = St(tag + nm);
        p.bonds.push_back({i, s, j, (s + 2) % 4});
      };
      link(0, 1, kEast, "r");
      link(1, 2, kNorth, "ru");
      link(0, 3, kWest, "l");
      link(3, 4, kNorth, "lu");
      t[base].faces[kNorth] = d;
      return p;
    };
    GeoTypes t;
    GeometricConfiguration pk;
    pk.polymers.push_back(pocket(t, "p", P("a")));
    pk.polymers.push_back(pocket(t, "q", St("a")));
    REQUIRE(validate_geometric(t, pk).empty());
    CHECK(effectively_saturated(t, pk));
    CHECK_FALSE(exhaustive_place(t, pk.polymers[0], 0, kNorth, pk.polymers[1], 0, kNorth));
    // with one of the pockets opened up the pair binds
    GeometricConfiguration open = pk;
    open.polymers[1] = GeoPolymer{{pk.polymers[1].members[0]}, {}};
    t[open.polymers[1].members[0].type].faces = {St("a"), std::nullopt, std::nullopt, std::nullopt};
    CHECK_FALSE(effectively_saturated(t, open));
  }
}

TEST_CASE("growth, pairing and readout on every short input") {
  for (const char* tmName : {"bitflip.tm", "parity.tm"}) {
    auto tm = load(tmName);
    for (const auto& in : inputs_up_to(3)) {
      INFO(tmName << " input \"" << in << "\"");
      auto c = compile_tm_gtbn(tm, in);
      auto steps = grow_computation(c, {}, 100000);
      REQUIRE(steps.size() > 1);
      for (size_t i = 1; i < steps.size(); ++i) {
        CHECK(steps[i].H == steps[0].H);
        CHECK(steps[i].S == steps[0].S);
        CHECK(gtbn_unit_bonds(c, steps[i].state) == gtbn_unit_bonds(c, steps[i - 1].state));
        const auto& p = steps[i].state.seeded[steps[i].polymer];
        CHECK(no_rotation_holds(c, p));
      }
      const GtbnState& done = steps.back().state;
      for (const auto& p : done.seeded) {
        REQUIRE(completion_corner(c, p));
        // the top row holds the halting head and grows rightwards (rows 1, 3, ...)
        int64_t top = 0, haltY = -1;
        for (const auto& m : p.members) {
          const auto& nm = c.types[m.type].name;
          if (nm.rfind("cap", 0) != 0 && nm.rfind("seed-cap", 0) != 0) top = std::max(top, m.y);
          if (nm.find(",haltR") != std::string::npos) haltY = m.y;
        }
        CHECK(haltY == top);
        CHECK(top % 2 == 1);
      }
      auto paired = pair_computations(c, done);
      CHECK(gtbn_enthalpy(c, paired) == steps[0].H);
      CHECK(gtbn_entropy(c, paired) == steps[0].S + 1);
      REQUIRE(paired.seeded.size() == 1);
      CHECK(count_type(c, paired.seeded[0], "S1", "") == 2);
      CHECK(no_rotation_holds(c, paired.seeded[0]));
      CHECK(read_output(c, paired.seeded[0]) == run_tm(tm, in, 10000).headSymbol);
      CHECK(audit_seedless(c, materialize(c, paired)).empty());
    }
  }
}

TEST_CASE("every engine configuration is valid and effectively saturated") {
  auto tm = load("parity.tm");
  auto c = compile_tm_gtbn(tm, "01");
  auto steps = grow_computation(c, {}, 100000);
  for (size_t i = 0; i < steps.size(); ++i) {
    auto g = materialize(c, steps[i].state);
    INFO("step " << i);
    REQUIRE(validate_geometric(c.types, g).empty());
    CHECK(geo_enthalpy(g) == steps[i].H);
    CHECK(geo_entropy(g) == steps[i].S);
    CHECK(effectively_saturated(c.types, g));
    for (const auto& p : g.polymers) CHECK(no_rotation_holds(c, p));
  }
  auto paired = pair_computations(c, steps.back().state);
  auto g = materialize(c, paired);
  REQUIRE(validate_geometric(c.types, g).empty());
  CHECK(geo_entropy(g) == steps[0].S + 1);
  CHECK(effectively_saturated(c.types, g));
}

TEST_CASE("each attachment trades two cap bonds for two polymer bonds") {
  auto c = compile_tm_gtbn(load("bitflip.tm"), "10");
  GtbnCounts one;
  one.seeds = 1;
  auto steps = grow_computation(c, one, 100000);
  int64_t pieces = static_cast<int64_t>(steps.size()) - 1;
  auto usage = gtbn_piece_usage(c);
  int64_t used = 0;
  for (auto u : usage) used += u;
  CHECK(used == pieces);
  for (size_t i = 1; i < steps.size(); ++i) {
    const auto& a = steps[i - 1].state;
    const auto& b = steps[i].state;
    int u = c.unit_index(steps[i].piece);
    CHECK(b.capped[u] == a.capped[u] - 1);
    CHECK(b.freeCaps[c.units[u].cap] == a.freeCaps[c.units[u].cap] + 1);
    CHECK(b.seeded[0].bonds.size() == a.seeded[0].bonds.size() + 2 + c.units[u].bonds.size());
  }
  // tally over the seeded polymer and the caps it released
  const auto& p = steps.back().state.seeded[0];
  int64_t unitBonds = 0;
  for (const auto& b : p.bonds)
    if (!c.is_linker(*c.types[p.members[b.a].type].faces[b.fa])) ++unitBonds;
  int64_t released = 0;
  for (size_t u = 0; u < c.units.size(); ++u) released += steps.back().state.freeCaps[u] - steps[0].state.freeCaps[u];
  CHECK(unitBonds == 2 + 2 * pieces);
  CHECK(1 + released == 1 + pieces);
}

TEST_CASE("pairing with two pairs") {
  auto tm = load("bitflip.tm");
  auto c = compile_tm_gtbn(tm, "1");
  GtbnCounts four;
  four.seeds = 4;
  auto steps = grow_computation(c, four, 100000);
  auto paired = pair_computations(c, steps.back().state);
  CHECK(paired.seeded.size() == 2);
  CHECK(gtbn_enthalpy(c, paired) == steps[0].H);
  CHECK(gtbn_entropy(c, paired) == steps[0].S + 2);
  for (const auto& p : paired.seeded) CHECK(read_output(c, p) == '0');
}

TEST_CASE("growth and pairing errors") {
  auto tm = load("bitflip.tm");
  auto c = compile_tm_gtbn(tm, "01");
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Ok;
  };
  CHECK(code([&] { grow_computation(c, {}, 3); }) == ErrorCode::BudgetExceeded);
  GtbnCounts noSurplus;
  noSurplus.capSurplus = 0;
  CHECK(code([&] { fully_capped_state(c, noSurplus); }) == ErrorCode::CountsViolation);
  GtbnCounts scarce;
  scarce.pieceCopies = 1;
  CHECK(code([&] { grow_computation(c, scarce, 100000); }) == ErrorCode::CountsViolation);
  GtbnState base = fully_capped_state(c, {});
  CHECK(code([&] { pair_computations(c, base); }) == ErrorCode::NotComplete);
  GtbnCounts three;
  three.seeds = 3;
  auto odd = grow_computation(c, three, 100000);
  CHECK(code([&] { pair_computations(c, odd.back().state); }) == ErrorCode::NotComplete);

  // A twin of a passive piece makes the corner ambiguous.
  GtbnConstruction twin = c;
  int u = twin.unit_index("(_),R");
  GtbnUnit copy = twin.units[u];
  copy.name = "(_),R-twin";
  GeoMonomerType t = twin.types[copy.members[0].type];
  t.name += "-twin";
  copy.members[0].type = static_cast<int>(twin.types.size());
  twin.types.push_back(t);
  twin.units.push_back(copy);
  twin.pieces.push_back(static_cast<int>(twin.units.size()) - 1);
  CHECK(code([&] { gtbn_piece_usage(twin); }) == ErrorCode::NonDeterministicCorner);

  // readout on malformed polymers
  auto steps = grow_computation(c, {}, 100000);
  CHECK(code([&] { read_output(c, steps.back().state.seeded[0]); }) == ErrorCode::MalformedPolymer);
  auto paired = pair_computations(c, steps.back().state);
  GeoPolymer bad = paired.seeded[0];
  for (auto& m : bad.members)
    if (c.types[m.type].name == "(0),haltR") {
      m.type = c.type_index("(1),haltR");
      break;
    }
  CHECK(code([&] { read_output(c, bad); }) == ErrorCode::MalformedPolymer);
}

TEST_CASE("seedless polymers are audited") {
  auto c = compile_tm_gtbn(load("bitflip.tm"), "0");
  int64_t nextId = 0;
  // Builds unit u with its members placed relative to `at`, optionally capped.
  auto add = [&](GeoPolymer& p, const std::string& name, Cell at, bool withCap) {
    int u = c.unit_index(name);
    const auto& unit = c.units[u];
    int64_t id = nextId++;
    int base = static_cast<int>(p.members.size());
    for (const auto& m : unit.members) p.members.push_back({m.type, at.first + m.x, at.second + m.y, 0, u, id});
    for (const auto& b : unit.bonds) p.bonds.push_back({b.a + base, b.fa, b.b + base, b.fb});
    if (withCap) {
      int cu = unit.cap;
      int64_t cid = nextId++;
      int cb = static_cast<int>(p.members.size());
      for (const auto& m : c.units[cu].members) p.members.push_back({m.type, at.first + m.x, at.second + m.y, 0, cu, cid});
      for (const auto& b : c.units[cu].bonds) p.bonds.push_back({b.a + cb, b.fa, b.b + cb, b.fb});
      p.bonds.push_back({base + unit.inputMember, unit.inputFaces[0], cb, (unit.inputFaces[0] + 2) % 4});
      p.bonds.push_back({base + unit.inputMember, unit.inputFaces[1], cb + 2, (unit.inputFaces[1] + 2) % 4});
    }
    return base;
  };
  auto freeCap = [&](const std::string& name) {
    GeoPolymer p;
    int cu = c.units[c.unit_index(name)].cap;
    int64_t id = nextId++;
    for (const auto& m : c.units[cu].members) p.members.push_back({m.type, m.x, m.y, 0, cu, id});
    for (const auto& b : c.units[cu].bonds) p.bonds.push_back(b);
    return p;
  };
  auto capped = [&](const std::string& name) {
    GeoPolymer p;
    add(p, name, {0, 0}, true);
    return p;
  };

  // A capped (0),R whose east output feeds a second (0),R.
  GeoPolymer row;
  int a = add(row, "(0),R", {0, 0}, true);
  int b = add(row, "(0),R", {1, 0}, false);
  row.bonds.push_back({a, kEast, b, kWest});

  SUBCASE("exposed input") {
    GeometricConfiguration g{{row, freeCap("(0),R")}};
    REQUIRE(validate_geometric(c.types, g).empty());
    auto f = audit_seedless(c, g);
    REQUIRE(f.size() == 1);
    CHECK(f[0].kind == "exposed-input");
    CHECK(f[0].dH < 0);
    GeometricConfiguration baseline{{capped("(0),R"), capped("(0),R")}};
    CHECK(f[0].dH == geo_enthalpy(g) - geo_enthalpy(baseline));
    CHECK(f[0].dS == geo_entropy(g) - geo_entropy(baseline));
    // the only cap that fits the exposed face is blocked by the first piece's cap
    CHECK(effectively_saturated(c.types, g));
  }

  SUBCASE("fully capped spurious block") {
    GeoPolymer block = row;
    int l = add(block, "(0),L", {1, -1}, true);
    block.bonds.push_back({l, kNorth, b, kSouth});
    GeometricConfiguration g{{block, freeCap("(0),R")}};
    REQUIRE(validate_geometric(c.types, g).empty());
    auto f = audit_seedless(c, g);
    REQUIRE(f.size() == 1);
    CHECK(f[0].kind == "entropy-gap");
    CHECK(f[0].dH == 0);
    CHECK(f[0].dS < 0);
    GeometricConfiguration baseline{{capped("(0),R"), capped("(0),R"), capped("(0),L")}};
    CHECK(f[0].dH == geo_enthalpy(g) - geo_enthalpy(baseline));
    CHECK(f[0].dS == geo_entropy(g) - geo_entropy(baseline));
  }
}

TEST_CASE("geometric stability search matches a naive oracle") {
  std::mt19937_64 rng(5);
  const char* names[] = {"a", "b"};
  int compared = 0;
  for (int trial = 0; trial < 120; ++trial) {
    GeoTypes types;
    std::vector<int64_t> counts;
    int total = 0;
    int nTypes = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < nTypes; ++t) {
      GeoMonomerType m;
      m.name = "m" + std::to_string(t);
      int faces = 0;
      for (int f = 0; f < 4; ++f)
        if (rng() % 2) m.faces[f] = Domain(DomainName(names[rng() % 2]), rng() % 2), ++faces;
      if (!faces) m.faces[rng() % 4] = Domain(DomainName("a"), rng() % 2);
      int64_t n = 1 + static_cast<int64_t>(rng() % 3);
      if (total + n > 6) break;
      total += static_cast<int>(n);
      types.push_back(m);
      counts.push_back(n);
    }
    auto fast = enumerate_geometric_stable(types, counts);
    auto slow = naive_geo(types, counts);
    INFO("trial " << trial);
    CHECK(fast.H == slow.H);
    CHECK(fast.S == slow.S);
    std::set<std::vector<std::array<int, 4>>> got(fast.stable.begin(), fast.stable.end());
    CHECK(got.size() == fast.stable.size());
    CHECK(got == slow.stable);
    for (const auto& g : fast.configs) {
      CHECK(validate_geometric(types, g).empty());
      CHECK(effectively_saturated(types, g));
    }
    ++compared;
  }
  CHECK(compared > 50);

  SUBCASE("a twelve-monomer fixture") {
    // Corners that can close into 2x2 squares or stay as open chains, plus
    // a capping square that competes for one of the corner faces.
    GeoTypes t = {{"c", {P("n"), St("e"), std::nullopt, std::nullopt}},
                  {"d", {std::nullopt, P("e"), St("n"), std::nullopt}},
                  {"k", {std::nullopt, std::nullopt, St("n"), std::nullopt}}};
    std::vector<int64_t> counts = {4, 4, 4};
    auto fast = enumerate_geometric_stable(t, counts);
    auto slow = naive_geo(t, counts);
    CHECK(fast.H == slow.H);
    CHECK(fast.S == slow.S);
    std::set<std::vector<std::array<int, 4>>> got(fast.stable.begin(), fast.stable.end());
    CHECK(got == slow.stable);
    for (const auto& g : fast.configs) CHECK(effectively_saturated(t, g));
  }
}

TEST_CASE("trace round trip and drawing") {
  auto c = compile_tm_gtbn(load("bitflip.tm"), "1");
  auto steps = grow_computation(c, {}, 100000);
  auto paired = pair_computations(c, steps.back().state);
  auto ts = trace_steps(c, steps, paired);
  auto text = format_trace(ts);
  auto back = parse_trace(text);
  CHECK(format_trace(back) == text);
  auto grown = replay_trace(back, static_cast<int64_t>(steps.size()) - 1);
  REQUIRE(grown.size() == 2);
  CHECK(grown[0].size() == steps.back().state.seeded[0].members.size());
  auto fin = replay_trace(back);
  REQUIRE(fin.size() == 1);
  CHECK(fin[0].size() == paired.seeded[0].members.size());
  auto svg = render_svg(fin);
  size_t rects = 0;
  for (size_t p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++rects;
  CHECK(rects == fin[0].size());
  CHECK_THROWS_AS(parse_trace("0 0 0 S1\n"), Error);
  CHECK_THROWS_AS(parse_trace("step 0 grow polymer=0 H=1 S=1 piece=-\n"), Error);
}
