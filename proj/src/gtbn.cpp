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
#include "tbnlab/gtbn.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "util.hpp"

namespace tbnlab {

namespace {

using Cell = std::pair<int64_t, int64_t>;

Cell operator+(Cell a, Cell b) { return {a.first + b.first, a.second + b.second}; }
Cell operator-(Cell a, Cell b) { return {a.first - b.first, a.second - b.second}; }

Cell pos(const PlacedMonomer& m) { return {m.x, m.y}; }

const std::optional<Domain>& face_domain(const GeoTypes& types, const PlacedMonomer& m, int f) {
  return types.at(static_cast<size_t>(m.type)).faces[f];
}

std::map<Cell, int> occupancy(const GeoPolymer& p) {
  std::map<Cell, int> occ;
  for (size_t i = 0; i < p.members.size(); ++i) occ.emplace(pos(p.members[i]), static_cast<int>(i));
  return occ;
}

std::set<std::pair<int, int>> bound_faces(const GeoPolymer& p) {
  std::set<std::pair<int, int>> s;
  for (const auto& b : p.bonds) {
    s.insert({b.a, b.fa});
    s.insert({b.b, b.fb});
  }
  return s;
}

bool complementary(const std::optional<Domain>& x, const std::optional<Domain>& y) {
  return x && y && x->binds(*y);
}

// The unique motion of B that puts face fb of b against face fa of a.
bool placement_free(const GeoTypes& types, const GeoPolymer& A, const std::map<Cell, int>& occA, int a, int fa,
                    const GeoPolymer& B, int b, int fb) {
  const auto& ma = A.members.at(a);
  const auto& mb = B.members.at(b);
  if (!complementary(face_domain(types, ma, fa), face_domain(types, mb, fb))) return false;
  int dA = geo_side(fa, ma.rot);
  Cell target = pos(ma) + geo_step(dA);
  int rotB = (geo_opposite(dA) - fb + 8) & 3;
  int delta = (rotB - mb.rot + 8) & 3;
  for (const auto& m : B.members) {
    Cell rel = pos(m) - pos(mb);
    auto r = geo_rotate(rel.first, rel.second, delta);
    if (occA.count(target + Cell(r.first, r.second))) return false;
  }
  return true;
}

}  // namespace

int geo_side(int face, int rot) { return (face + rot) & 3; }
int geo_opposite(int side) { return (side + 2) & 3; }

std::pair<int64_t, int64_t> geo_step(int side) {
  switch (side & 3) {
    case 0: return {0, 1};
    case 1: return {1, 0};
    case 2: return {0, -1};
    default: return {-1, 0};
  }
}

std::pair<int64_t, int64_t> geo_rotate(int64_t x, int64_t y, int rot) {
  switch (rot & 3) {
    case 0: return {x, y};
    case 1: return {y, -x};
    case 2: return {-x, -y};
    default: return {-y, x};
  }
}

std::vector<std::string> validate_geo_polymer(const GeoTypes& types, const GeoPolymer& p) {
  std::vector<std::string> errs;
  if (p.members.empty()) errs.push_back("empty polymer");
  std::map<Cell, int> occ;
  for (size_t i = 0; i < p.members.size(); ++i) {
    const auto& m = p.members[i];
    if (m.type < 0 || static_cast<size_t>(m.type) >= types.size()) {
      errs.push_back("member " + std::to_string(i) + ": unknown type");
      return errs;
    }
    if (m.rot < 0 || m.rot > 3) errs.push_back("member " + std::to_string(i) + ": rotation out of range");
    if (!occ.emplace(pos(m), static_cast<int>(i)).second)
      errs.push_back("member " + std::to_string(i) + ": overlaps member " + std::to_string(occ[pos(m)]));
  }
  std::set<std::pair<int, int>> used;
  int n = static_cast<int>(p.members.size());
  DisjointSets ds(n);
  for (const auto& b : p.bonds) {
    std::string tag = "bond " + std::to_string(b.a) + "." + std::to_string(b.fa) + "-" + std::to_string(b.b) +
                      "." + std::to_string(b.fb);
    if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n || b.fa < 0 || b.fa > 3 || b.fb < 0 || b.fb > 3) {
      errs.push_back(tag + ": index out of range");
      continue;
    }
    const auto& ma = p.members[b.a];
    const auto& mb = p.members[b.b];
    if (!complementary(face_domain(types, ma, b.fa), face_domain(types, mb, b.fb)))
      errs.push_back(tag + ": faces are not complementary");
    int side = geo_side(b.fa, ma.rot);
    if (pos(mb) != pos(ma) + geo_step(side) || geo_side(b.fb, mb.rot) != geo_opposite(side))
      errs.push_back(tag + ": faces do not meet");
    if (!used.insert({b.a, b.fa}).second || !used.insert({b.b, b.fb}).second)
      errs.push_back(tag + ": face bound twice");
    ds.unite(b.a, b.b);
  }
  for (int i = 1; i < n; ++i)
    if (ds.find(i) != ds.find(0)) {
      errs.push_back("polymer is not connected");
      break;
    }
  return errs;
}

std::vector<std::string> validate_geometric(const GeoTypes& types, const GeometricConfiguration& g) {
  std::vector<std::string> errs;
  for (const auto& t : types)
    if (std::none_of(t.faces.begin(), t.faces.end(), [](const auto& f) { return f.has_value(); }))
      errs.push_back("type " + t.name + " has no domain");
  for (size_t i = 0; i < g.polymers.size(); ++i)
    for (auto& e : validate_geo_polymer(types, g.polymers[i])) errs.push_back("polymer " + std::to_string(i) + ": " + e);
  return errs;
}

int64_t geo_enthalpy(const GeometricConfiguration& g) {
  int64_t h = 0;
  for (const auto& p : g.polymers) h += static_cast<int64_t>(p.bonds.size());
  return h;
}

int64_t geo_entropy(const GeometricConfiguration& g) { return static_cast<int64_t>(g.polymers.size()); }

bool can_place(const GeoTypes& types, const GeoPolymer& A, int a, int fa, const GeoPolymer& B, int b, int fb) {
  return placement_free(types, A, occupancy(A), a, fa, B, b, fb);
}

bool can_bind_within(const GeoTypes& types, const GeoPolymer& P, int a, int fa, int b, int fb) {
  if (a == b) return false;
  const auto& ma = P.members.at(a);
  const auto& mb = P.members.at(b);
  if (!complementary(face_domain(types, ma, fa), face_domain(types, mb, fb))) return false;
  int side = geo_side(fa, ma.rot);
  return pos(mb) == pos(ma) + geo_step(side) && geo_side(fb, mb.rot) == geo_opposite(side);
}

std::vector<std::array<int, 6>> bindable_pairs(const GeoTypes& types, const GeometricConfiguration& g) {
  struct Open {
    int poly, member, face;
  };
  std::map<DomainName, std::pair<std::vector<Open>, std::vector<Open>>> byName;  // primary, starred
  for (size_t pi = 0; pi < g.polymers.size(); ++pi) {
    const auto& p = g.polymers[pi];
    auto bound = bound_faces(p);
    for (size_t mi = 0; mi < p.members.size(); ++mi)
      for (int f = 0; f < 4; ++f) {
        const auto& d = face_domain(types, p.members[mi], f);
        if (!d || bound.count({static_cast<int>(mi), f})) continue;
        auto& slot = byName[d->name];
        (d->star ? slot.second : slot.first).push_back({static_cast<int>(pi), static_cast<int>(mi), f});
      }
  }
  std::vector<std::optional<std::map<Cell, int>>> occ(g.polymers.size());
  auto occOf = [&](int pi) -> const std::map<Cell, int>& {
    if (!occ[pi]) occ[pi] = occupancy(g.polymers[pi]);
    return *occ[pi];
  };
  std::vector<std::array<int, 6>> out;
  for (const auto& [name, lists] : byName)
    for (const auto& u : lists.first)
      for (const auto& v : lists.second) {
        bool ok = u.poly == v.poly
                      ? can_bind_within(types, g.polymers[u.poly], u.member, u.face, v.member, v.face)
                      : placement_free(types, g.polymers[u.poly], occOf(u.poly), u.member, u.face,
                                       g.polymers[v.poly], v.member, v.face);
        if (ok) out.push_back({u.poly, u.member, u.face, v.poly, v.member, v.face});
      }
  return out;
}

bool effectively_saturated(const GeoTypes& types, const GeometricConfiguration& g) {
  return bindable_pairs(types, g).empty();
}

// ---------------------------------------------------------------------------
// Construction

const char* gtbn_unit_kind_name(GtbnUnitKind k) {
  switch (k) {
    case GtbnUnitKind::Seed: return "seed";
    case GtbnUnitKind::Passive: return "passive";
    case GtbnUnitKind::Transition: return "transition";
    case GtbnUnitKind::Extension: return "extension";
    case GtbnUnitKind::End: return "end";
    case GtbnUnitKind::Cap: return "cap";
  }
  return "?";
}

int GtbnConstruction::type_index(const std::string& name) const {
  auto it = typeByName.find(name);
  if (it == typeByName.end()) throw Error(ErrorCode::InvalidArgument, "no monomer type " + name);
  return it->second;
}

int GtbnConstruction::unit_index(const std::string& name) const {
  auto it = unitByName.find(name);
  if (it == unitByName.end()) throw Error(ErrorCode::InvalidArgument, "no unit " + name);
  return it->second;
}

bool GtbnConstruction::is_seed_type(int type) const {
  for (const auto& m : units.at(seed).members)
    if (m.type == type) return true;
  return false;
}

bool GtbnConstruction::is_linker(const Domain& d) const {
  return std::find(linkers.begin(), linkers.end(), d.name.base) != linkers.end();
}

namespace {

using Faces = std::array<std::optional<Domain>, 4>;

std::optional<Domain> prim(const std::string& base) { return Domain(DomainName(base), false); }
std::optional<Domain> star(const std::string& base) { return Domain(DomainName(base), true); }
const std::optional<Domain> kNone;

std::string sym(char c) { return std::string(1, c); }
std::string value(char v, char tag) { return "(" + sym(v) + ")," + sym(tag); }
std::string head(const std::string& q, char v, char tag) { return "(" + q + "," + sym(v) + ")," + sym(tag); }
std::string signal(const std::string& q) { return "(" + q + ")"; }

class Builder {
 public:
  explicit Builder(GtbnConstruction& c) : c_(c) {}

  int type(const std::string& name, Faces faces) {
    if (c_.typeByName.count(name)) throw Error(ErrorCode::InvalidTM, "duplicate monomer name " + name);
    int id = static_cast<int>(c_.types.size());
    c_.types.push_back({name, std::move(faces)});
    c_.typeByName[name] = id;
    return id;
  }

  void linker(const std::string& base) { c_.linkers.push_back(base); }

  // Members are (type, x, y). Adjacent linker faces are bonded.
  int unit(const std::string& name, GtbnUnitKind kind, const std::vector<std::tuple<int, int64_t, int64_t>>& ms) {
    GtbnUnit u;
    u.name = name;
    u.kind = kind;
    for (auto [t, x, y] : ms) u.members.push_back({t, x, y, 0, -1, -1});
    std::map<Cell, int> occ;
    for (size_t i = 0; i < u.members.size(); ++i) occ[pos(u.members[i])] = static_cast<int>(i);
    for (size_t i = 0; i < u.members.size(); ++i)
      for (int f = 0; f < 4; ++f) {
        const auto& d = c_.types[u.members[i].type].faces[f];
        if (!d || d->star || !c_.is_linker(*d)) continue;
        auto it = occ.find(pos(u.members[i]) + geo_step(f));
        int g = geo_opposite(f);
        if (it == occ.end() || !complementary(d, c_.types[u.members[it->second].type].faces[g]))
          throw Error(ErrorCode::InvalidArgument, "unit " + name + ": dangling linker " + d->str());
        u.bonds.push_back({static_cast<int>(i), f, it->second, g});
      }
    if (kind != GtbnUnitKind::Cap) {
      for (size_t i = 0; i < u.members.size(); ++i)
        for (int f = 0; f < 4; ++f) {
          const auto& d = c_.types[u.members[i].type].faces[f];
          if (!d || d->star || c_.is_linker(*d)) continue;
          if (u.inputMember >= 0 && u.inputMember != static_cast<int>(i))
            throw Error(ErrorCode::InvalidArgument, "unit " + name + ": inputs on two members");
          u.inputMember = static_cast<int>(i);
          if (u.inputFaces[0] < 0)
            u.inputFaces[0] = f;
          else if (u.inputFaces[1] < 0)
            u.inputFaces[1] = f;
          else
            throw Error(ErrorCode::InvalidArgument, "unit " + name + ": more than two inputs");
        }
      if (u.inputFaces[1] < 0) throw Error(ErrorCode::InvalidArgument, "unit " + name + ": needs two inputs");
      // clockwise order: the second input is one quarter turn after the first
      if ((u.inputFaces[0] + 1) % 4 != u.inputFaces[1]) std::swap(u.inputFaces[0], u.inputFaces[1]);
      if ((u.inputFaces[0] + 1) % 4 != u.inputFaces[1])
        throw Error(ErrorCode::InvalidArgument, "unit " + name + ": inputs are not on adjacent faces");
    }
    int id = static_cast<int>(c_.units.size());
    c_.units.push_back(std::move(u));
    c_.unitByName[name] = id;
    return id;
  }

  int single(const std::string& name, GtbnUnitKind kind, Faces faces) {
    return unit(name, kind, {{type(name, std::move(faces)), 0, 0}});
  }

  // Three squares in an L around the input corner of `target`.
  void cap(int target, const std::string& name, const std::string& prefix, const std::string& linkBase) {
    const GtbnUnit& t = c_.units[target];
    const auto& m = t.members[t.inputMember];
    int f1 = t.inputFaces[0], f2 = t.inputFaces[1];
    auto in1 = c_.types[m.type].faces[f1]->complement();
    auto in2 = c_.types[m.type].faces[f2]->complement();
    std::string l12 = linkBase + "_1,2", l23 = linkBase + "_2,3";
    linker(l12);
    linker(l23);
    Faces a{}, b{}, c{};
    a[geo_opposite(f1)] = in1;
    a[f2] = prim(l12);
    b[geo_opposite(f2)] = star(l12);
    b[geo_opposite(f1)] = prim(l23);
    c[f1] = star(l23);
    c[geo_opposite(f2)] = in2;
    Cell p = pos(m);
    Cell p1 = p + geo_step(f1), p3 = p + geo_step(f2), p2 = p1 + geo_step(f2);
    int ta = type(prefix + "1", a), tb = type(prefix + "2", b), tc = type(prefix + "3", c);
    int id = unit(name, GtbnUnitKind::Cap,
                  {{ta, p1.first, p1.second}, {tb, p2.first, p2.second}, {tc, p3.first, p3.second}});
    c_.units[id].target = target;
    c_.units[target].cap = id;
  }

 private:
  GtbnConstruction& c_;
};

}  // namespace

GtbnConstruction compile_tm_gtbn(const TMSpec& tm, const std::string& input, int64_t maxSteps) {
  validate_tm(tm);
  check_input(tm, input);
  for (const auto& q : tm.states)
    if (q.find_first_of("[]") != std::string::npos)
      throw Error(ErrorCode::InvalidTM, "state names may not contain brackets: " + q);
  try {
    run_tm(tm, input, maxSteps);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    throw Error(ErrorCode::NotHaltingWithinBounds, "machine does not halt on \"" + input + "\" within " +
                                                       std::to_string(maxSteps) + " steps");
  }

  GtbnConstruction c;
  c.tm = tm;
  c.input = input;
  Builder b(c);
  const char blank = tm.blank;
  const int64_t n = static_cast<int64_t>(input.size());

  // Seed: S1 above S2, then a row S2 S3 S3b I1..In S4 S4b S5 .. S9.
  {
    std::vector<std::string> row = {"S2", "S3", "S3b"};
    for (int64_t k = 1; k <= n; ++k) row.push_back("I" + std::to_string(k));
    for (const char* s : {"S4", "S4b", "S5", "S6", "S7", "S8", "S9"}) row.push_back(s);
    auto shortName = [](const std::string& s) { return s[0] == 'S' ? s.substr(1) : s; };
    auto link = [&](const std::string& x, const std::string& y) { return "seed_" + shortName(x) + "," + shortName(y); };
    b.linker(link("S1", "S2"));
    for (size_t k = 0; k + 1 < row.size(); ++k) b.linker(link(row[k], row[k + 1]));

    std::vector<std::tuple<int, int64_t, int64_t>> ms;
    ms.emplace_back(b.type("S1", {star("EXT_LEFT"), star("R"), prim(link("S1", "S2")), kNone}), 0, 1);
    for (size_t k = 0; k < row.size(); ++k) {
      const std::string& nm = row[k];
      Faces f{};
      int64_t cell = static_cast<int64_t>(k) - 3;  // tape cell; -2 and -1 are the left pads
      if (nm == "S2") {
        f[kNorth] = star(link("S1", "S2"));
      } else if (nm == "S5") {
        f[kNorth] = star("EXT_RIGHT");
      } else if (nm == "S9") {
        f[kNorth] = prim("EXT_RIGHT");
      } else if (nm == "S6" || nm == "S7" || nm == "S8") {
      } else {
        char v = (cell >= 0 && cell < n) ? input[static_cast<size_t>(cell)] : blank;
        f[kNorth] = star(cell == 0 ? head(tm.start, v, 'r') : value(v, 'r'));
      }
      f[kEast] = k + 1 < row.size() ? prim(link(nm, row[k + 1])) : prim("halt");
      if (k > 0) f[kWest] = star(link(row[k - 1], nm));
      ms.emplace_back(b.type(nm, f), static_cast<int64_t>(k), 0);
    }
    c.seed = b.unit("seed", GtbnUnitKind::Seed, ms);
  }

  std::vector<char> gamma = tm.tapeAlphabet;
  if (std::find(gamma.begin(), gamma.end(), blank) == gamma.end()) gamma.push_back(blank);

  for (char v : gamma) {
    c.pieces.push_back(b.single("(" + sym(v) + "),L", GtbnUnitKind::Passive,
                                {star(value(v, 'r')), prim("L"), prim(value(v, 'l')), star("L")}));
    c.pieces.push_back(b.single("(" + sym(v) + "),R", GtbnUnitKind::Passive,
                                {star(value(v, 'l')), star("R"), prim(value(v, 'r')), prim("R")}));
  }

  std::set<std::pair<std::string, Move>> moved;
  for (const auto& [key, tr] : tm.delta) {
    const auto& [q, s] = key;
    if (q == tm.halt) continue;
    std::string qs = "(" + q + "," + sym(s) + ")";
    if (tr.move == Move::L) {
      c.pieces.push_back(b.single(qs + "-skip", GtbnUnitKind::Transition,
                                  {star(head(q, s, 'l')), star("R"), prim(head(q, s, 'r')), prim("R")}));
      c.pieces.push_back(b.single(qs + "-move1", GtbnUnitKind::Transition,
                                  {star(value(tr.write, 'r')), prim("L"), prim(head(q, s, 'l')), star(signal(tr.next))}));
    } else {
      c.pieces.push_back(b.single(qs + "-skip", GtbnUnitKind::Transition,
                                  {star(head(q, s, 'r')), prim("L"), prim(head(q, s, 'l')), star("L")}));
      c.pieces.push_back(b.single(qs + "-move1", GtbnUnitKind::Transition,
                                  {star(value(tr.write, 'l')), star(signal(tr.next)), prim(head(q, s, 'r')), prim("R")}));
    }
    if (!moved.insert({tr.next, tr.move}).second) continue;
    for (char v : gamma) {
      std::string nm = "(" + tr.next + "," + sym(v) + ")-move2" + (tr.move == Move::L ? "L" : "R");
      if (tr.move == Move::L)
        c.pieces.push_back(b.single(nm, GtbnUnitKind::Transition,
                                    {star(head(tr.next, v, 'r')), prim(signal(tr.next)), prim(value(v, 'l')), star("L")}));
      else
        c.pieces.push_back(b.single(nm, GtbnUnitKind::Transition,
                                    {star(head(tr.next, v, 'l')), star("R"), prim(value(v, 'r')), prim(signal(tr.next))}));
    }
  }
  for (int u : c.pieces)
    if (c.units[u].kind == GtbnUnitKind::Transition) ++c.transitionTypes;

  for (const char* s : {"extL_1,2", "extL_2,3", "extL_3,4", "extL_4,1", "extR_1,2", "extR_2,3", "extR_3,4", "extR_4,1"})
    b.linker(s);
  {
    int l1 = b.type("L1", {star("extL_4,1"), prim("extL_1,2"), kNone, kNone});
    int l2 = b.type("L2", {prim("extL_2,3"), prim("L"), prim("EXT_LEFT"), star("extL_1,2")});
    int l3 = b.type("L3", {star(value(blank, 'l')), star("R"), star("extL_2,3"), prim("extL_3,4")});
    int l4 = b.type("L4", {star("EXT_LEFT"), star("extL_3,4"), prim("extL_4,1"), kNone});
    c.pieces.push_back(b.unit("ext-left", GtbnUnitKind::Extension, {{l1, 0, 0}, {l2, 1, 0}, {l4, 0, 1}, {l3, 1, 1}}));
    int r1 = b.type("R1", {star("extR_4,1"), kNone, kNone, prim("extR_1,2")});
    int r2 = b.type("R2", {prim("extR_2,3"), star("extR_1,2"), prim("EXT_RIGHT"), prim("R")});
    int r3 = b.type("R3", {star(value(blank, 'r')), prim("extR_3,4"), star("extR_2,3"), star("L")});
    int r4 = b.type("R4", {star("EXT_RIGHT"), kNone, prim("extR_4,1"), star("extR_3,4")});
    c.pieces.push_back(b.unit("ext-right", GtbnUnitKind::Extension, {{r2, 0, 0}, {r1, 1, 0}, {r3, 0, 1}, {r4, 1, 1}}));
  }

  for (char v : gamma) {
    std::string tag = "(" + sym(v) + ")";
    c.pieces.push_back(b.single(tag + ",haltL", GtbnUnitKind::End,
                                {star(head(tm.halt, v, 'r')), prim("L"), prim(head(tm.halt, v, 'l')), star("L")}));
    c.pieces.push_back(b.single(tag + ",haltR", GtbnUnitKind::End,
                                {kNone, star("halt"), prim(head(tm.halt, v, 'r')), prim("R")}));
    c.pieces.push_back(b.single(tag + ",R1", GtbnUnitKind::End, {kNone, star("halt"), prim(value(v, 'r')), prim("halt")}));
  }

  b.cap(c.seed, "seed-cap", "seed-cap", "seedcap");
  for (int u : c.pieces) b.cap(u, "cap:" + c.units[u].name, "cap:" + c.units[u].name + ".", "cap:" + c.units[u].name);
  return c;
}

// ---------------------------------------------------------------------------
// States

namespace {

// Appends unit u (and optionally its cap) to p, placing member m of u at `at`
// with rotation rot. Returns the index of the first new member.
int append_unit(const GtbnConstruction& c, GeoPolymer& p, int u, int member, Cell at, int rot, int64_t piece) {
  const GtbnUnit& unit = c.units[u];
  int base = static_cast<int>(p.members.size());
  Cell origin = pos(unit.members[member]);
  for (const auto& m : unit.members) {
    Cell rel = pos(m) - origin;
    auto r = geo_rotate(rel.first, rel.second, rot);
    p.members.push_back({m.type, at.first + r.first, at.second + r.second, rot, u, piece});
  }
  for (const auto& bd : unit.bonds) p.bonds.push_back({bd.a + base, bd.fa, bd.b + base, bd.fb});
  return base;
}

GeoPolymer capped_polymer(const GtbnConstruction& c, int u, int64_t piece, int64_t capPiece) {
  GeoPolymer p;
  const GtbnUnit& unit = c.units[u];
  append_unit(c, p, u, 0, pos(unit.members[0]), 0, piece);
  int capBase = append_unit(c, p, unit.cap, 0, pos(c.units[unit.cap].members[0]), 0, capPiece);
  int f1 = unit.inputFaces[0], f2 = unit.inputFaces[1];
  p.bonds.push_back({unit.inputMember, f1, capBase + 0, geo_opposite(f1)});
  p.bonds.push_back({unit.inputMember, f2, capBase + 2, geo_opposite(f2)});
  return p;
}

GeoPolymer free_cap(const GtbnConstruction& c, int capUnit, int64_t piece) {
  GeoPolymer p;
  append_unit(c, p, capUnit, 0, pos(c.units[capUnit].members[0]), 0, piece);
  return p;
}

int64_t non_linker_bonds(const GtbnConstruction& c, const GeoPolymer& p) {
  int64_t h = 0;
  for (const auto& bd : p.bonds)
    if (!c.is_linker(*face_domain(c.types, p.members[bd.a], bd.fa))) ++h;
  return h;
}

}  // namespace

std::vector<int64_t> gtbn_unit_counts(const GtbnConstruction& cons, const GtbnCounts& counts) {
  if (counts.seeds < 1) throw Error(ErrorCode::CountsViolation, "need at least one seed");
  if (counts.capSurplus < 1) throw Error(ErrorCode::CountsViolation, "caps must outnumber the pieces they cap");
  if (counts.pieceCopies < 0) throw Error(ErrorCode::CountsViolation, "negative piece count");
  std::vector<int64_t> out(cons.units.size(), 0);
  std::vector<int64_t> usage;
  if (counts.pieceCopies == 0) usage = gtbn_piece_usage(cons);
  out[cons.seed] = counts.seeds;
  for (int u : cons.pieces)
    out[u] = counts.pieceCopies > 0 ? counts.pieceCopies : std::max<int64_t>(1, usage[u] * counts.seeds);
  for (size_t u = 0; u < cons.units.size(); ++u)
    if (cons.units[u].kind == GtbnUnitKind::Cap) out[u] = out[cons.units[u].target] + counts.capSurplus;
  return out;
}

GtbnState fully_capped_state(const GtbnConstruction& cons, const GtbnCounts& counts) {
  auto copies = gtbn_unit_counts(cons, counts);
  GtbnState st;
  st.capped.assign(cons.units.size(), 0);
  st.freeCaps.assign(cons.units.size(), 0);
  for (int64_t k = 0; k < copies[cons.seed]; ++k) {
    st.seeded.push_back(capped_polymer(cons, cons.seed, st.nextPiece, st.nextPiece + 1));
    st.nextPiece += 2;
  }
  for (int u : cons.pieces) st.capped[u] = copies[u];
  for (size_t u = 0; u < cons.units.size(); ++u)
    if (cons.units[u].kind == GtbnUnitKind::Cap) st.freeCaps[u] = copies[u] - copies[cons.units[u].target];
  return st;
}

GeometricConfiguration materialize(const GtbnConstruction& cons, const GtbnState& st) {
  GeometricConfiguration g;
  g.polymers = st.seeded;
  int64_t id = st.nextPiece;
  for (size_t u = 0; u < cons.units.size(); ++u) {
    for (int64_t k = 0; k < st.capped[u]; ++k) {
      g.polymers.push_back(capped_polymer(cons, static_cast<int>(u), id, id + 1));
      id += 2;
    }
    for (int64_t k = 0; k < st.freeCaps[u]; ++k) g.polymers.push_back(free_cap(cons, static_cast<int>(u), id++));
  }
  return g;
}

int64_t gtbn_enthalpy(const GtbnConstruction& cons, const GtbnState& st) {
  int64_t h = 0;
  for (const auto& p : st.seeded) h += static_cast<int64_t>(p.bonds.size());
  for (size_t u = 0; u < cons.units.size(); ++u) {
    const auto& unit = cons.units[u];
    if (st.capped[u] > 0)
      h += st.capped[u] * static_cast<int64_t>(unit.bonds.size() + cons.units[unit.cap].bonds.size() + 2);
    h += st.freeCaps[u] * static_cast<int64_t>(unit.bonds.size());
  }
  return h;
}

int64_t gtbn_entropy(const GtbnConstruction& cons, const GtbnState& st) {
  int64_t s = static_cast<int64_t>(st.seeded.size());
  for (size_t u = 0; u < cons.units.size(); ++u) s += st.capped[u] + st.freeCaps[u];
  return s;
}

int64_t gtbn_unit_bonds(const GtbnConstruction& cons, const GtbnState& st) {
  int64_t h = 0;
  for (const auto& p : st.seeded) h += non_linker_bonds(cons, p);
  for (size_t u = 0; u < cons.units.size(); ++u) h += 2 * st.capped[u];
  return h;
}

// ---------------------------------------------------------------------------
// Growth

namespace {

struct Frontier {
  std::map<Cell, int> occ;
  std::map<Cell, std::vector<std::pair<int, int>>> open;  // outputs pointing at an empty cell

  void add_outputs(const GtbnConstruction& c, const GeoPolymer& p, int from, const std::set<std::pair<int, int>>& bound) {
    for (int i = from; i < static_cast<int>(p.members.size()); ++i) {
      const auto& m = p.members[i];
      for (int f = 0; f < 4; ++f) {
        const auto& d = face_domain(c.types, m, f);
        if (!d || !d->star || c.is_linker(*d) || bound.count({i, f})) continue;
        Cell t = pos(m) + geo_step(geo_side(f, m.rot));
        if (!occ.count(t)) open[t].push_back({i, f});
      }
    }
  }

  Frontier(const GtbnConstruction& c, const GeoPolymer& p) {
    occ = occupancy(p);
    add_outputs(c, p, 0, bound_faces(p));
  }
};

struct Match {
  int unit = -1, rot = 0;
  Cell at;
  std::pair<int, int> out1, out2;  // polymer outputs bound to input faces 0 and 1
};

std::vector<Match> corner_matches(const GtbnConstruction& c, const GeoPolymer& p, const Frontier& fr) {
  std::vector<Match> found;
  for (const auto& [cell, outs] : fr.open) {
    if (outs.size() < 2) continue;
    for (int u : c.pieces) {
      const GtbnUnit& unit = c.units[u];
      const auto& im = unit.members[unit.inputMember];
      for (int rot = 0; rot < 4; ++rot) {
        std::optional<std::pair<int, int>> got[2];
        for (int k = 0; k < 2; ++k) {
          int f = unit.inputFaces[k];
          int side = geo_side(f, rot);
          const auto& d = c.types[im.type].faces[f];
          for (const auto& o : outs) {
            const auto& om = p.members[o.first];
            if (geo_side(o.second, om.rot) == geo_opposite(side) && complementary(d, face_domain(c.types, om, o.second)))
              got[k] = o;
          }
        }
        if (!got[0] || !got[1]) continue;
        bool clear = true;
        Cell origin = pos(im);
        for (const auto& m : unit.members) {
          Cell rel = pos(m) - origin;
          auto r = geo_rotate(rel.first, rel.second, rot);
          if (fr.occ.count(cell + Cell(r.first, r.second))) clear = false;
        }
        if (clear) found.push_back({u, rot, cell, *got[0], *got[1]});
      }
    }
  }
  return found;
}

std::optional<Cell> find_completion(const GtbnConstruction& c, const GeoPolymer& p, const Frontier& fr) {
  for (const auto& [cell, outs] : fr.open) {
    if (outs.size() != 2) continue;
    std::set<std::string> names;
    for (const auto& o : outs) names.insert(face_domain(c.types, p.members[o.first], o.second)->name.base);
    if (names == std::set<std::string>{"halt", "EXT_RIGHT"}) return cell;
  }
  return std::nullopt;
}

// Attaches the match to seeded polymer pi and releases the piece's cap.
void attach(const GtbnConstruction& c, GtbnState& st, int pi, Frontier& fr, const Match& mt, bool unlimited) {
  const GtbnUnit& unit = c.units[mt.unit];
  if (!unlimited) {
    if (st.capped[mt.unit] <= 0)
      throw Error(ErrorCode::CountsViolation, "ran out of copies of " + unit.name);
    --st.capped[mt.unit];
    ++st.freeCaps[unit.cap];
  }
  GeoPolymer& p = st.seeded[pi];
  int base = append_unit(c, p, mt.unit, unit.inputMember, mt.at, mt.rot, st.nextPiece++);
  int in = base + unit.inputMember;
  p.bonds.push_back({mt.out1.first, mt.out1.second, in, unit.inputFaces[0]});
  p.bonds.push_back({mt.out2.first, mt.out2.second, in, unit.inputFaces[1]});
  for (int i = base; i < static_cast<int>(p.members.size()); ++i) {
    Cell cell = pos(p.members[i]);
    fr.occ[cell] = i;
    fr.open.erase(cell);
  }
  auto bound = bound_faces(p);
  // A new face meeting an unbound complement would be a second way to attach.
  for (int i = base; i < static_cast<int>(p.members.size()); ++i)
    for (int f = 0; f < 4; ++f) {
      if (bound.count({i, f})) continue;
      const auto& m = p.members[i];
      auto it = fr.occ.find(pos(m) + geo_step(geo_side(f, m.rot)));
      if (it == fr.occ.end()) continue;
      for (int g = 0; g < 4; ++g)
        if (!bound.count({it->second, g}) && can_bind_within(c.types, p, i, f, it->second, g))
          throw Error(ErrorCode::NonDeterministicCorner, unit.name + " meets a second unbound complement");
    }
  fr.add_outputs(c, p, base, bound);
}

// Grows every seeded polymer of st to completion.
int64_t grow_all(const GtbnConstruction& c, GtbnState& st, int64_t maxSteps, bool unlimited,
                 const std::function<void(const GtbnState&, int, const Match&)>& onStep) {
  int64_t steps = 0;
  for (int pi = 0; pi < static_cast<int>(st.seeded.size()); ++pi) {
    Frontier fr(c, st.seeded[pi]);
    while (true) {
      auto ms = corner_matches(c, st.seeded[pi], fr);
      if (ms.empty()) {
        if (find_completion(c, st.seeded[pi], fr)) break;
        throw Error(ErrorCode::NonDeterministicCorner, "no piece fits polymer " + std::to_string(pi));
      }
      if (ms.size() > 1) {
        std::string names;
        for (const auto& m : ms) names += " " + c.units[m.unit].name;
        throw Error(ErrorCode::NonDeterministicCorner, "several pieces fit:" + names);
      }
      if (++steps > maxSteps) throw Error(ErrorCode::BudgetExceeded, "growth exceeded " + std::to_string(maxSteps) + " steps");
      attach(c, st, pi, fr, ms[0], unlimited);
      if (onStep) onStep(st, pi, ms[0]);
    }
  }
  return steps;
}

}  // namespace

std::vector<int64_t> gtbn_piece_usage(const GtbnConstruction& cons, int64_t maxSteps) {
  GtbnState st;
  st.seeded.push_back(capped_polymer(cons, cons.seed, 0, 1));
  st.nextPiece = 2;
  st.capped.assign(cons.units.size(), 0);
  st.freeCaps.assign(cons.units.size(), 0);
  std::vector<int64_t> used(cons.units.size(), 0);
  grow_all(cons, st, maxSteps, true, [&](const GtbnState&, int, const Match& m) { ++used[m.unit]; });
  return used;
}

std::vector<GrowStep> grow_computation(const GtbnConstruction& cons, const GtbnCounts& counts, int64_t maxSteps) {
  GtbnState st = fully_capped_state(cons, counts);
  std::vector<GrowStep> out;
  out.push_back({st, gtbn_enthalpy(cons, st), gtbn_entropy(cons, st), "", -1, 0, 0, 0});
  grow_all(cons, st, maxSteps, false, [&](const GtbnState& s, int pi, const Match& m) {
    out.push_back({s, gtbn_enthalpy(cons, s), gtbn_entropy(cons, s), cons.units[m.unit].name, pi, m.at.first,
                   m.at.second, m.rot});
  });
  return out;
}

std::optional<std::pair<int64_t, int64_t>> completion_corner(const GtbnConstruction& cons, const GeoPolymer& p) {
  Frontier fr(cons, p);
  if (!corner_matches(cons, p, fr).empty()) return std::nullopt;
  return find_completion(cons, p, fr);
}

// ---------------------------------------------------------------------------
// Pairing and readout

namespace {

// p without the members of unit `drop`; bonds are renumbered.
GeoPolymer without_unit(const GeoPolymer& p, int drop) {
  GeoPolymer q;
  std::vector<int> idx(p.members.size(), -1);
  for (size_t i = 0; i < p.members.size(); ++i)
    if (p.members[i].unit != drop) {
      idx[i] = static_cast<int>(q.members.size());
      q.members.push_back(p.members[i]);
    }
  for (const auto& b : p.bonds)
    if (idx[b.a] >= 0 && idx[b.b] >= 0) q.bonds.push_back({idx[b.a], b.fa, idx[b.b], b.fb});
  return q;
}

int member_of_type(const GeoPolymer& p, int type) {
  for (size_t i = 0; i < p.members.size(); ++i)
    if (p.members[i].type == type) return static_cast<int>(i);
  return -1;
}

}  // namespace

GtbnState pair_computations(const GtbnConstruction& cons, const GtbnState& st) {
  if (st.seeded.size() % 2 != 0) throw Error(ErrorCode::NotComplete, "an odd number of computations cannot be paired");
  int s9 = cons.type_index("S9");
  int seedCap = cons.units[cons.seed].cap;
  GtbnState out = st;
  out.seeded.clear();
  for (size_t k = 0; k + 1 < st.seeded.size(); k += 2) {
    const GeoPolymer& A0 = st.seeded[k];
    const GeoPolymer& B0 = st.seeded[k + 1];
    auto ca = completion_corner(cons, A0), cb = completion_corner(cons, B0);
    if (!ca || !cb) throw Error(ErrorCode::NotComplete, "computation " + std::to_string(!ca ? k : k + 1) + " is not finished");
    Frontier fa(cons, A0), fb(cons, B0);
    auto outsA = fa.open.at(*ca), outsB = fb.open.at(*cb);
    GeoPolymer A = without_unit(A0, seedCap), B = without_unit(B0, seedCap);
    // outputs keep their indices only if the cap was appended after them
    auto remap = [](const GeoPolymer& full, const GeoPolymer& cut, int i) {
      for (size_t j = 0; j < cut.members.size(); ++j) {
        const auto& a = full.members[i];
        const auto& b = cut.members[j];
        if (a.x == b.x && a.y == b.y && a.type == b.type) return static_cast<int>(j);
      }
      return -1;
    };
    for (auto& o : outsA) o.first = remap(A0, A, o.first);
    for (auto& o : outsB) o.first = remap(B0, B, o.first);
    int a9 = member_of_type(A, s9), b9 = member_of_type(B, s9);
    Cell pb9 = pos(B.members[b9]);
    GeoPolymer P = A;
    int base = static_cast<int>(P.members.size());
    for (auto m : B.members) {
      Cell rel = pos(m) - pb9;
      auto r = geo_rotate(rel.first, rel.second, 2);
      m.x = ca->first + r.first;
      m.y = ca->second + r.second;
      m.rot = (m.rot + 2) & 3;
      P.members.push_back(m);
    }
    for (const auto& b : B.bonds) P.bonds.push_back({b.a + base, b.fa, b.b + base, b.fb});
    std::map<Cell, int> occ;
    for (size_t i = 0; i < P.members.size(); ++i)
      if (!occ.emplace(pos(P.members[i]), static_cast<int>(i)).second)
        throw Error(ErrorCode::SimulationViolated, "paired computations overlap");
    auto join = [&](const std::vector<std::pair<int, int>>& outs, int offset, int target) {
      for (const auto& o : outs) {
        int m = o.first + offset;
        int side = geo_side(o.second, P.members[m].rot);
        bool done = false;
        for (int g = 0; g < 4 && !done; ++g)
          if (can_bind_within(cons.types, P, m, o.second, target, g)) {
            P.bonds.push_back({m, o.second, target, g});
            done = true;
          }
        if (!done || pos(P.members[target]) != pos(P.members[m]) + geo_step(side))
          throw Error(ErrorCode::SimulationViolated, "seed does not fit the partner's corner");
      }
    };
    join(outsA, 0, base + b9);
    join(outsB, base, a9);
    out.seeded.push_back(std::move(P));
    out.freeCaps[seedCap] += 2;
  }
  return out;
}

char read_output(const GtbnConstruction& cons, const GeoPolymer& p) {
  int s1 = cons.type_index("S1");
  int seeds = 0;
  std::vector<char> vals;
  for (const auto& m : p.members) {
    if (m.type == s1) ++seeds;
    const std::string& nm = cons.types.at(m.type).name;
    if (nm.size() == 9 && nm[0] == '(' && nm.compare(2, 7, "),haltR") == 0) vals.push_back(nm[1]);
  }
  if (seeds != 2) throw Error(ErrorCode::MalformedPolymer, "expected two seeds, found " + std::to_string(seeds));
  if (vals.size() != 2) throw Error(ErrorCode::MalformedPolymer, "expected two halt monomers, found " + std::to_string(vals.size()));
  if (vals[0] != vals[1]) throw Error(ErrorCode::MalformedPolymer, "halt monomers disagree");
  return vals[0];
}

bool no_rotation_holds(const GtbnConstruction& cons, const GeoPolymer& p) {
  int n = static_cast<int>(p.members.size());
  DisjointSets ds(n);
  std::vector<bool> seed(n);
  for (int i = 0; i < n; ++i) seed[i] = cons.is_seed_type(p.members[i].type);
  for (const auto& b : p.bonds)
    if (!seed[b.a] && !seed[b.b]) ds.unite(b.a, b.b);
  std::map<int, int> rot;
  for (int i = 0; i < n; ++i) {
    if (seed[i]) continue;
    auto [it, fresh] = rot.emplace(ds.find(i), p.members[i].rot);
    if (!fresh && it->second != p.members[i].rot) return false;
  }
  return true;
}

std::vector<SeedlessFinding> audit_seedless(const GtbnConstruction& cons, const GeometricConfiguration& g) {
  std::vector<int> unitOfType(cons.types.size(), -1);
  for (size_t u = 0; u < cons.units.size(); ++u)
    for (const auto& m : cons.units[u].members) unitOfType[m.type] = static_cast<int>(u);
  std::vector<SeedlessFinding> out;
  for (size_t pi = 0; pi < g.polymers.size(); ++pi) {
    const auto& p = g.polymers[pi];
    bool seeded = false;
    std::set<std::pair<int, int64_t>> pieces, caps;
    for (size_t i = 0; i < p.members.size(); ++i) {
      const auto& m = p.members[i];
      int u = m.unit >= 0 ? m.unit : unitOfType.at(m.type);
      int64_t id = m.piece >= 0 ? m.piece : -1 - static_cast<int64_t>(i);
      auto kind = cons.units.at(u).kind;
      if (kind == GtbnUnitKind::Seed) seeded = true;
      else if (kind == GtbnUnitKind::Cap) caps.insert({u, id});
      else pieces.insert({u, id});
    }
    if (seeded || pieces.size() < 2) continue;
    auto bound = bound_faces(p);
    int64_t exposed = 0;
    for (size_t i = 0; i < p.members.size(); ++i) {
      const auto& m = p.members[i];
      int u = m.unit >= 0 ? m.unit : unitOfType.at(m.type);
      if (cons.units[u].kind == GtbnUnitKind::Cap) continue;
      for (int f = 0; f < 4; ++f) {
        const auto& d = face_domain(cons.types, m, f);
        if (d && !d->star && !cons.is_linker(*d) && !bound.count({static_cast<int>(i), f})) ++exposed;
      }
    }
    SeedlessFinding fd;
    fd.polymer = static_cast<int>(pi);
    fd.pieces = static_cast<int64_t>(pieces.size());
    fd.caps = static_cast<int64_t>(caps.size());
    fd.exposedInputs = exposed;
    fd.dH = -exposed;
    fd.dS = 1 - fd.caps;
    if (exposed > 0)
      fd.kind = "exposed-input";
    else if (fd.caps >= 2)
      fd.kind = "entropy-gap";
    else
      continue;
    out.push_back(fd);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive search

namespace {

struct Place {
  int comp;
  int64_t x, y;
  int rot;
};

struct Search {
  const GeoTypes& types;
  std::vector<int> instType;
  std::vector<std::pair<int, int>> slots;  // (instance, face)
  std::vector<int> partner;
  std::vector<std::array<int, 4>> bonds;
  int64_t nodes = 0, maxNodes = 0;
  GeoStableResult res;
  std::vector<std::vector<Place>> bestPlaces;
  bool any = false;

  const std::optional<Domain>& dom(int s) const { return types[instType[slots[s].first]].faces[slots[s].second]; }

  static bool bind(std::vector<Place>& pl, int u, int fu, int v, int fv) {
    const Place pu = pl[u], pv = pl[v];
    int du = geo_side(fu, pu.rot);
    Cell target = Cell(pu.x, pu.y) + geo_step(du);
    if (pu.comp == pv.comp) return Cell(pv.x, pv.y) == target && geo_side(fv, pv.rot) == geo_opposite(du);
    int delta = ((geo_opposite(du) - fv - pv.rot) % 4 + 8) & 3;
    std::set<Cell> taken;
    for (const auto& p : pl)
      if (p.comp == pu.comp) taken.insert({p.x, p.y});
    std::vector<Place> next = pl;
    for (size_t w = 0; w < pl.size(); ++w) {
      if (pl[w].comp != pv.comp) continue;
      auto r = geo_rotate(pl[w].x - pv.x, pl[w].y - pv.y, delta);
      Cell c = target + Cell(r.first, r.second);
      if (taken.count(c)) return false;
      next[w] = {pu.comp, c.first, c.second, (pl[w].rot + delta) & 3};
    }
    pl = std::move(next);
    return true;
  }

  void leaf(const std::vector<Place>& pl) {
    ++res.realizable;
    int64_t h = static_cast<int64_t>(bonds.size());
    std::set<int> comps;
    for (const auto& p : pl) comps.insert(p.comp);
    int64_t s = static_cast<int64_t>(comps.size());
    if (!any || h > res.H || (h == res.H && s > res.S)) {
      any = true;
      res.H = h;
      res.S = s;
      res.stable.clear();
      bestPlaces.clear();
    }
    if (h == res.H && s == res.S) {
      auto b = bonds;
      std::sort(b.begin(), b.end());
      res.stable.push_back(b);
      bestPlaces.push_back(pl);
    }
  }

  void rec(size_t x, std::vector<Place>& pl, int64_t freeSlots) {
    if (++nodes > maxNodes) throw Error(ErrorCode::BudgetExceeded, "geometric search exceeded node budget");
    if (any && static_cast<int64_t>(bonds.size()) + freeSlots / 2 < res.H) return;
    if (x == slots.size()) {
      leaf(pl);
      return;
    }
    if (partner[x] >= 0) {
      rec(x + 1, pl, freeSlots);
      return;
    }
    for (size_t y = x + 1; y < slots.size(); ++y) {
      if (partner[y] >= 0 || slots[y].first == slots[x].first || !complementary(dom(x), dom(y))) continue;
      std::vector<Place> next = pl;
      if (!bind(next, slots[x].first, slots[x].second, slots[y].first, slots[y].second)) continue;
      partner[x] = static_cast<int>(y);
      partner[y] = static_cast<int>(x);
      auto [a, b] = std::minmax(slots[x], slots[y]);
      bonds.push_back({a.first, a.second, b.first, b.second});
      rec(x + 1, next, freeSlots - 2);
      bonds.pop_back();
      partner[x] = partner[y] = -1;
    }
    rec(x + 1, pl, freeSlots - 1);
  }
};

}  // namespace

GeoStableResult enumerate_geometric_stable(const GeoTypes& types, const std::vector<int64_t>& counts,
                                           const GeoStableLimits& limits) {
  if (counts.size() != types.size()) throw Error(ErrorCode::InvalidArgument, "one count per type is required");
  Search s{types, {}, {}, {}, {}, 0, limits.maxNodes, {}, {}, false};
  for (size_t t = 0; t < types.size(); ++t)
    for (int64_t k = 0; k < counts[t]; ++k) s.instType.push_back(static_cast<int>(t));
  if (s.instType.empty()) throw Error(ErrorCode::EmptyCollection, "no monomers");
  for (size_t i = 0; i < s.instType.size(); ++i)
    for (int f = 0; f < 4; ++f)
      if (types[s.instType[i]].faces[f]) s.slots.push_back({static_cast<int>(i), f});
  s.partner.assign(s.slots.size(), -1);
  std::vector<Place> pl;
  for (size_t i = 0; i < s.instType.size(); ++i) pl.push_back({static_cast<int>(i), 0, 0, 0});
  s.rec(0, pl, static_cast<int64_t>(s.slots.size()));

  for (size_t k = 0; k < s.res.stable.size(); ++k) {
    const auto& places = s.bestPlaces[k];
    std::map<int, int> polyOf;
    std::vector<int> memberOf(places.size());
    GeometricConfiguration g;
    for (size_t i = 0; i < places.size(); ++i) {
      auto [it, fresh] = polyOf.emplace(places[i].comp, static_cast<int>(g.polymers.size()));
      if (fresh) g.polymers.emplace_back();
      auto& p = g.polymers[it->second];
      memberOf[i] = static_cast<int>(p.members.size());
      p.members.push_back({s.instType[i], places[i].x, places[i].y, places[i].rot, -1, static_cast<int64_t>(i)});
    }
    for (const auto& b : s.res.stable[k])
      g.polymers[polyOf[places[b[0]].comp]].bonds.push_back({memberOf[b[0]], b[1], memberOf[b[2]], b[3]});
    s.res.configs.push_back(std::move(g));
  }
  return s.res;
}

// ---------------------------------------------------------------------------
// Traces

namespace {

TracePlacement placement(const GtbnConstruction& c, const PlacedMonomer& m) {
  return {m.x, m.y, m.rot, c.types.at(m.type).name};
}

}  // namespace

std::vector<TraceStep> trace_steps(const GtbnConstruction& cons, const std::vector<GrowStep>& steps,
                                   const std::optional<GtbnState>& paired) {
  std::vector<TraceStep> out;
  if (steps.empty()) return out;
  const auto& first = steps.front();
  for (size_t p = 0; p < first.state.seeded.size(); ++p) {
    TraceStep t{0, first.H, first.S, "init", "", static_cast<int>(p), {}};
    for (const auto& m : first.state.seeded[p].members) t.placed.push_back(placement(cons, m));
    out.push_back(std::move(t));
  }
  for (size_t i = 1; i < steps.size(); ++i) {
    const auto& s = steps[i];
    TraceStep t{static_cast<int64_t>(i), s.H, s.S, "attach", s.piece, s.polymer, {}};
    const auto& before = steps[i - 1].state.seeded[s.polymer].members;
    const auto& after = s.state.seeded[s.polymer].members;
    for (size_t k = before.size(); k < after.size(); ++k) t.placed.push_back(placement(cons, after[k]));
    out.push_back(std::move(t));
  }
  if (paired) {
    int64_t idx = static_cast<int64_t>(steps.size());
    for (size_t p = 0; p < paired->seeded.size(); ++p) {
      TraceStep t{idx, gtbn_enthalpy(cons, *paired), gtbn_entropy(cons, *paired), "pair", "", static_cast<int>(p), {}};
      for (const auto& m : paired->seeded[p].members) t.placed.push_back(placement(cons, m));
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::string format_trace(const std::vector<TraceStep>& steps) {
  std::ostringstream os;
  for (const auto& s : steps) {
    os << "step " << s.index << ' ' << s.action << " polymer=" << s.polymer << " H=" << s.H << " S=" << s.S
       << " piece=" << (s.piece.empty() ? "-" : s.piece) << '\n';
    for (const auto& p : s.placed) os << p.x << ' ' << p.y << ' ' << p.rot << ' ' << p.name << '\n';
  }
  return os.str();
}

std::vector<TraceStep> parse_trace(std::string_view text) {
  std::vector<TraceStep> out;
  int lineNo = 0;
  for (const auto& raw : split_lines(text)) {
    ++lineNo;
    auto line = strip_comment(raw);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::Parse, "trace line " + std::to_string(lineNo) + ": " + why);
    };
    if (tok[0] == "step") {
      if (tok.size() != 7) throw bad("step lines have seven fields");
      TraceStep s;
      s.index = parse_int(tok[1]);
      s.action = tok[2];
      if (s.action != "init" && s.action != "attach" && s.action != "pair") throw bad("unknown action " + s.action);
      auto field = [&](const std::string& t, const std::string& key) {
        if (t.rfind(key + "=", 0) != 0) throw bad("expected " + key + "=");
        return t.substr(key.size() + 1);
      };
      s.polymer = static_cast<int>(parse_int(field(tok[3], "polymer")));
      s.H = parse_int(field(tok[4], "H"));
      s.S = parse_int(field(tok[5], "S"));
      s.piece = field(tok[6], "piece");
      if (s.piece == "-") s.piece.clear();
      out.push_back(std::move(s));
    } else {
      if (out.empty()) throw bad("placement before the first step");
      if (tok.size() != 4) throw bad("placement lines are: x y rot name");
      int64_t rot = parse_int(tok[2]);
      if (rot < 0 || rot > 3) throw bad("rotation out of range");
      out.back().placed.push_back({parse_int(tok[0]), parse_int(tok[1]), static_cast<int>(rot), tok[3]});
    }
  }
  return out;
}

std::vector<std::vector<TracePlacement>> replay_trace(const std::vector<TraceStep>& steps, int64_t upTo) {
  std::vector<std::vector<TracePlacement>> polys, paired;
  bool pairing = false;
  for (const auto& s : steps) {
    if (upTo >= 0 && s.index > upTo) break;
    if (s.polymer < 0) throw Error(ErrorCode::Parse, "negative polymer index");
    auto& target = s.action == "pair" ? paired : polys;
    if (s.action == "pair") pairing = true;
    if (target.size() <= static_cast<size_t>(s.polymer)) target.resize(s.polymer + 1);
    auto& p = target[s.polymer];
    if (s.action != "attach") p.clear();
    p.insert(p.end(), s.placed.begin(), s.placed.end());
  }
  return pairing ? paired : polys;
}

std::string render_svg(const std::vector<std::vector<TracePlacement>>& polymers) {
  const int cell = 28;
  struct Box {
    int64_t x0, x1, y0, y1;
  };
  std::vector<Box> boxes;
  int64_t width = 0, height = 0;
  for (const auto& p : polymers) {
    Box b{0, 0, 0, 0};
    if (!p.empty()) b = {p[0].x, p[0].x, p[0].y, p[0].y};
    for (const auto& m : p) {
      b.x0 = std::min(b.x0, m.x);
      b.x1 = std::max(b.x1, m.x);
      b.y0 = std::min(b.y0, m.y);
      b.y1 = std::max(b.y1, m.y);
    }
    boxes.push_back(b);
    width += (b.x1 - b.x0 + 3) * cell;
    height = std::max(height, (b.y1 - b.y0 + 3) * cell);
  }
  auto colour = [](const std::string& n) {
    if (n.rfind("seed-cap", 0) == 0 || n.rfind("cap:", 0) == 0) return "#d9d9d9";
    if (n[0] == 'S' || n[0] == 'I') return "#f4a261";
    if ((n[0] == 'L' || n[0] == 'R') && n.size() == 2) return "#8ecae6";
    if (n.find("halt") != std::string::npos || n.find(",R1") != std::string::npos) return "#e76f51";
    if (n.find("-skip") != std::string::npos || n.find("-move") != std::string::npos) return "#2a9d8f";
    return "#ffffff";
  };
  auto escape = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o.push_back(c);
    }
    return o;
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << std::max<int64_t>(width, cell) << "\" height=\""
     << std::max<int64_t>(height, cell) << "\" font-family=\"monospace\" font-size=\"6\">\n";
  int64_t offset = 0;
  for (size_t k = 0; k < polymers.size(); ++k) {
    const Box& b = boxes[k];
    for (const auto& m : polymers[k]) {
      int64_t px = offset + (m.x - b.x0 + 1) * cell;
      int64_t py = (b.y1 - m.y + 1) * cell;
      os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
         << colour(m.name) << "\" stroke=\"#333\"/>";
      // a tick on the side the square's north face points to
      auto d = geo_step(m.rot);
      os << "<circle cx=\"" << px + cell / 2 + d.first * (cell / 2 - 3) << "\" cy=\""
         << py + cell / 2 - d.second * (cell / 2 - 3) << "\" r=\"1.5\" fill=\"#000\"/>";
      os << "<text x=\"" << px + 2 << "\" y=\"" << py + cell / 2 + 2 << "\">" << escape(m.name) << "</text>\n";
    }
    offset += (b.x1 - b.x0 + 3) * cell;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace tbnlab
