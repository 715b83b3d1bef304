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
#include "tbnlab/tm_compiler.hpp"

#include <algorithm>
#include <climits>
#include <set>

namespace tbnlab {

char label_symbol(const std::string& label) {
  if (!label.empty() && label[0] == '(') {
    auto close = label.find(')');
    if (close == std::string::npos || close < 2) throw Error(ErrorCode::Parse, "bad content label '" + label + "'");
    return label[close - 1];
  }
  if (label.empty()) throw Error(ErrorCode::Parse, "empty content label");
  return label[0];
}

std::string label_state(const std::string& label) {
  if (label.empty() || label[0] != '(') return {};
  auto comma = label.rfind(',', label.find(')'));
  return label.substr(1, comma - 1);
}

std::vector<Domain> TbnConstruction::domains() const {
  std::set<Domain> all;
  for (auto& m : types.types())
    for (auto& d : m.domains) {
      all.insert(d);
      all.insert(d.complement());
    }
  return {all.begin(), all.end()};
}

namespace {

Domain dom(const std::string& label, Orient o, bool hard, int64_t x, int64_t y, bool star) {
  std::vector<int> sub;
  if (hard) sub = {static_cast<int>(x), static_cast<int>(y)};
  return Domain(DomainName(label, o, sub), star);
}

Domain helper(int64_t row, bool star) { return Domain(DomainName("g", Orient::None, {static_cast<int>(row)}), star); }

bool ascending(int64_t gx) { return gx % 2 == 0; }

MonomerInfo comp_info(const TileType& tile, int tmpl, bool hard, int64_t gx, int64_t gy) {
  MonomerInfo mi;
  mi.role = Role::Comp;
  mi.tmpl = tmpl;
  if (hard) {
    mi.x = gx;
    mi.y = gy;
  }
  // Tiles in aTAM columns growing down run in ascending grid rows.
  const int inSide = tile.growsDown ? kNorth : kSouth;
  const int outSide = tile.growsDown ? kSouth : kNorth;
  mi.inH = dom(tile.glues[kWest].label, Orient::H, hard, gx, gy, false);
  mi.inV = dom(tile.glues[inSide].label, Orient::V, hard, gx, gy, false);
  mi.outH = dom(tile.glues[kEast].label, Orient::H, hard, gx + 1, gy, true);
  // A column's first tile takes its turn input from the seed, not from the
  // previous column's last tile; that would let a leftover first tile hang off a
  // capped producer at no entropy cost.
  const std::string& ov = tile.glues[outSide].label;
  if (ov != "turn") {
    mi.outV = dom(ov, Orient::V, hard, gx, gy + (tile.growsDown ? 1 : -1), true);
    mi.hasOutV = true;
  }
  return mi;
}

std::string content_of(const EndTemplate& e) {
  return e.state.empty() ? symbol_content(e.symbol) : head_content(e.state, e.symbol);
}

MonomerInfo end_info(const EndTemplate& e, int tmpl, bool hard, int64_t gx, int64_t gy) {
  MonomerInfo mi;
  mi.role = Role::End;
  mi.tmpl = tmpl;
  if (hard) {
    mi.x = gx;
    mi.y = gy;
  }
  const bool first = e.cls == CellClass::Top || e.cls == CellClass::Solo;
  const bool last = e.cls == CellClass::Bot || e.cls == CellClass::Solo;
  mi.inH = dom(horizontal_label(content_of(e), e.cls, first, true), Orient::H, hard, gx, gy, false);
  mi.inV = dom(first ? "turn" : "up", Orient::V, hard, gx, gy, false);
  if (!last) {
    mi.outV = dom("up", Orient::V, hard, gx, gy + 1, true);
    mi.hasOutV = true;
  }
  return mi;
}

MonomerType info_monomer(const std::string& name, const MonomerInfo& mi, int64_t row) {
  std::vector<Domain> ds{mi.inH, mi.inV};
  if (mi.role == Role::Comp) ds.push_back(mi.outH);
  if (mi.hasOutV) ds.push_back(mi.outV);
  if (mi.role == Role::End) ds.push_back(helper(row, true));
  return make_monomer(name, ds, mi.role);
}

// The intended computation: 2t columns after the input column.
Assembly intended_assembly(const TbnConstruction& cons, const std::string& input) {
  const TMSpec& tm = cons.tm;
  const int64_t s = cons.s, t = cons.t;
  Assembly a;
  try {
    a = assemble_zigzag(cons.zz, input, {(2 * t + 1) * s + 1, 2 * t});
  } catch (const Error& e) {
    throw Error(ErrorCode::NotHaltingWithinBounds, std::string("zig-zag growth failed: ") + e.what());
  }
  const int64_t cols = 2 * t;
  for (int64_t x = 1; x <= cols; ++x)
    for (int64_t y = 0; y < s; ++y)
      if (!a.tile(x, y))
        throw Error(ErrorCode::NotHaltingWithinBounds,
                    "head leaves the " + std::to_string(s) + "-cell tape before column " + std::to_string(x));
  if (column_snapshot(a, cols, s).state != tm.halt)
    throw Error(ErrorCode::NotHaltingWithinBounds,
                "machine has not halted after " + std::to_string(cols) + " columns (time bound " +
                    std::to_string(t) + ")");

  return a;
}

std::vector<std::vector<int>> layout_from_assembly(const TbnConstruction& cons, const Assembly& a) {
  const int64_t s = cons.s, cols = 2 * cons.t;
  const bool hard = cons.hardCoded;
  const int nE = static_cast<int>(cons.endTemplates.size());
  std::map<std::string, int> tileIndex;
  for (size_t i = 0; i < cons.zz.tiles.size(); ++i) tileIndex[cons.zz.tiles[i].name] = static_cast<int>(i);
  std::vector<std::vector<int>> layout(cols + 1, std::vector<int>(s, -1));
  for (int64_t x = 1; x <= cols; ++x)
    for (int64_t y = 0; y < s; ++y) {
      const TileType* tile = a.tile(x, s - 1 - y);
      int k = tileIndex.at(tile->name);
      layout[x - 1][y] = hard ? cons.compAt.at({k, x - 1, y}) : cons.compOfTemplate.at(k);
    }
  for (int64_t y = 0; y < s; ++y) {
    const TileType* tile = a.tile(cols, s - 1 - y);
    CellClass cls = y == 0 ? (s == 1 ? CellClass::Solo : CellClass::Top) : (y == s - 1 ? CellClass::Bot : CellClass::Mid);
    int found = -1;
    for (int k = 0; k < nE; ++k)
      if (cons.endTemplates[k].symbol == tile->symbol && cons.endTemplates[k].state == tile->state &&
          cons.endTemplates[k].cls == cls)
        found = k;
    layout[cols][y] = cons.endAt.at({found, y});
  }
  return layout;
}

TbnConstruction compile(const TMSpec& tm, const std::string& input, int64_t s, int64_t t, bool hard) {
  validate_tm(tm);
  check_input(tm, input);
  if (s < 1 || t < 1) throw Error(ErrorCode::InvalidArgument, "space and time bounds must be positive");
  if (static_cast<int64_t>(input.size()) > s)
    throw Error(ErrorCode::InputTooLong,
                "input length " + std::to_string(input.size()) + " exceeds space bound " + std::to_string(s));
  TbnConstruction cons;
  cons.tm = tm;
  cons.input = input;
  cons.s = s;
  cons.t = t;
  cons.hardCoded = hard;
  cons.zz = build_zigzag_tileset(tm, {s, true});

  Assembly a = intended_assembly(cons, input);
  const int64_t cols = 2 * t;

  for (char sym : tm.tapeAlphabet)
    for (const std::string& st : {std::string(), tm.halt})
      for (CellClass c : {CellClass::Top, CellClass::Mid, CellClass::Bot, CellClass::Solo})
        cons.endTemplates.push_back({sym, st, c});

  Collection& C = cons.types;
  // seed
  {
    auto fam = input_tile_family(cons.zz, input);
    std::vector<Domain> ds;
    for (int64_t cell = 0; cell < s; ++cell) {
      const TileType& tile = fam[static_cast<size_t>(s - 1 - cell)];
      ds.push_back(dom(tile.glues[kEast].label, Orient::H, hard, 0, cell, true));
      ds.push_back(helper(cell, false));
    }
    for (int64_t x = 0; x <= 2 * t; ++x) ds.push_back(dom("turn", Orient::V, hard, x, ascending(x) ? 0 : s - 1, true));
    cons.seedType = C.add_type(make_monomer("seed", ds, Role::Seed), 1);
    MonomerInfo mi;
    mi.role = Role::Seed;
    cons.info.push_back(mi);
  }
  auto add = [&](const std::string& name, const MonomerInfo& mi, int64_t row) {
    int id = C.add_type(info_monomer(name, mi, row), 1);
    cons.info.push_back(mi);
    return id;
  };
  const int nT = static_cast<int>(cons.zz.tiles.size());
  const int nE = static_cast<int>(cons.endTemplates.size());
  if (hard) {
    for (int k = 0; k < nT; ++k)
      for (int64_t x = 0; x < cols; ++x)
        for (int64_t y = 0; y < s; ++y) {
          int id = add("c" + std::to_string(k) + "_x" + std::to_string(x) + "_y" + std::to_string(y),
                       comp_info(cons.zz.tiles[k], k, true, x, y), y);
          cons.compTypes.push_back(id);
          cons.compAt[{k, x, y}] = id;
        }
  } else {
    for (int k = 0; k < nT; ++k) {
      int id = add("c" + std::to_string(k), comp_info(cons.zz.tiles[k], k, false, 0, 0), 0);
      cons.compTypes.push_back(id);
      cons.compOfTemplate[k] = id;
    }
  }
  // End monomers keep their row on the helper domain in both variants.
  for (int k = 0; k < nE; ++k)
    for (int64_t y = 0; y < s; ++y) {
      int id = add("e" + std::to_string(k) + "_y" + std::to_string(y), end_info(cons.endTemplates[k], k, hard, cols, y),
                   y);
      cons.info.back().y = y;
      cons.endTypes.push_back(id);
      cons.endAt[{k, y}] = id;
    }
  std::vector<int> targets = cons.compTypes;
  targets.insert(targets.end(), cons.endTypes.begin(), cons.endTypes.end());
  for (int tgt : targets) {
    MonomerInfo mi;
    mi.role = Role::Cap;
    mi.target = tgt;
    int id = C.add_type(make_monomer("k_" + C.type(tgt).name,
                                     {cons.info[tgt].inH.complement(), cons.info[tgt].inV.complement()}, Role::Cap),
                        1);
    cons.info.push_back(mi);
    cons.info[tgt].capType = id;
    cons.capTypes.push_back(id);
  }

  cons.layout = layout_from_assembly(cons, a);
  return cons;
}

struct Wiring {
  std::vector<std::vector<int>> inst;                   // [x][y]
  std::vector<std::vector<std::vector<Bond>>> inBonds;  // bonds consumed by the cell
  std::vector<Bond> helperBonds;                        // seed g to end g*
};

class SlotPicker {
 public:
  explicit SlotPicker(const Collection& c) : c_(c) {}
  SlotRef take(int inst, const Domain& d) {
    const auto& ds = c_.instance_type(inst).domains;
    for (size_t k = 0; k < ds.size(); ++k)
      if (ds[k] == d && used_.insert({inst, static_cast<int>(k)}).second) return {inst, static_cast<int>(k)};
    throw Error(ErrorCode::WitnessInvalid, "monomer '" + c_.instance_type(inst).name + "' has no free domain " + d.str());
  }

 private:
  const Collection& c_;
  std::set<std::pair<int, int>> used_;
};

Wiring wire(const TbnConstruction& cons, const Collection& c, const std::vector<std::vector<int>>& layout, int seedInst,
            std::vector<int64_t>& next, SlotPicker& pick, const WestOverrides* west = nullptr) {
  Wiring w;
  const int64_t X = static_cast<int64_t>(layout.size());
  const int64_t s = static_cast<int64_t>(layout[0].size());
  w.inst.assign(X, std::vector<int>(s));
  w.inBonds.assign(X, std::vector<std::vector<Bond>>(s));
  for (int64_t x = 0; x < X; ++x)
    for (int64_t y = 0; y < s; ++y) {
      int type = layout[x][y];
      if (next[type] >= c.count(type))
        throw Error(ErrorCode::CountsViolation, "not enough copies of '" + c.type(type).name + "'");
      w.inst[x][y] = c.first_instance(type) + static_cast<int>(next[type]++);
    }
  for (int64_t x = 0; x < X; ++x)
    for (int64_t y = 0; y < s; ++y) {
      int m = w.inst[x][y];
      const MonomerInfo& mi = cons.info[layout[x][y]];
      int64_t wx = x - 1, wy = y;
      if (west) {
        auto it = west->find({x, y});
        if (it != west->end()) std::tie(wx, wy) = it->second;
      }
      int westProducer = wx < 0 ? seedInst : w.inst[wx][wy];
      const bool first = ascending(x) ? y == 0 : y == s - 1;
      int vProducer = first ? seedInst : w.inst[x][ascending(x) ? y - 1 : y + 1];
      w.inBonds[x][y].push_back(make_bond(pick.take(m, mi.inH), pick.take(westProducer, mi.inH.complement())));
      w.inBonds[x][y].push_back(make_bond(pick.take(m, mi.inV), pick.take(vProducer, mi.inV.complement())));
      if (mi.role == Role::End)
        w.helperBonds.push_back(make_bond(pick.take(m, helper(y, true)), pick.take(seedInst, helper(y, false))));
    }
  return w;
}

std::vector<Bond> cap_bonds(const TbnConstruction& cons, const Collection& c, int inst, int capInst, SlotPicker& pick) {
  const MonomerInfo& mi = cons.info[c.type_of(inst)];
  return {make_bond(pick.take(inst, mi.inH), pick.take(capInst, mi.inH.complement())),
          make_bond(pick.take(inst, mi.inV), pick.take(capInst, mi.inV.complement()))};
}

EntropyCertificate certify(const Collection& c, const Configuration& a) {
  EntropyCertificate cert;
  for (auto& p : polymers(c, a)) {
    int anchor = -1;
    for (int m : p.members)
      if (c.instance_type(m).role == Role::Seed) anchor = m;
    if (anchor < 0)
      for (int m : p.members)
        if (c.instance_type(m).role == Role::Cap) {
          anchor = m;
          break;
        }
    cert.anchors.push_back(anchor < 0 ? p.members.front() : anchor);
  }
  cert.claimedEntropy = static_cast<int64_t>(cert.anchors.size());
  return cert;
}

std::vector<std::pair<int64_t, int64_t>> zz_cells(int64_t X, int64_t s) {
  std::vector<std::pair<int64_t, int64_t>> out;
  for (int64_t x = 0; x < X; ++x)
    for (int64_t k = 0; k < s; ++k) out.push_back({x, ascending(x) ? k : s - 1 - k});
  return out;
}

}  // namespace

TbnConstruction compile_tm(const TMSpec& tm, const std::string& input, int64_t s, int64_t t) {
  return compile(tm, input, s, t, true);
}

TbnConstruction compile_tm_locationfree(const TMSpec& tm, const std::string& input, int64_t s, int64_t t) {
  return compile(tm, input, s, t, false);
}

int64_t expected_type_count(const TbnConstruction& cons) {
  int64_t comp = static_cast<int64_t>(cons.zz.tiles.size());
  int64_t endXY = static_cast<int64_t>(cons.endTemplates.size()) * cons.s;
  int64_t compXY = cons.hardCoded ? comp * 2 * cons.t * cons.s : comp;
  return 1 + compXY + endXY + (compXY + endXY);
}

Collection apply_counts(const TbnConstruction& cons, const CountsPolicy& counts) {
  Collection c = cons.types;
  for (int t = 0; t < c.num_types(); ++t) {
    Role r = c.type(t).role;
    c.set_count(t, r == Role::Seed ? counts.seed : r == Role::Cap ? counts.cap : counts.comp);
  }
  for (auto& [name, n] : counts.overrides) {
    auto t = c.find_type(name);
    if (!t) throw Error(ErrorCode::InvalidArgument, "count override for unknown monomer '" + name + "'");
    c.set_count(*t, n);
  }
  int64_t cmin = INT64_MAX, kmin = INT64_MAX;
  for (int t : cons.compTypes) cmin = std::min(cmin, c.count(t));
  for (int t : cons.endTypes) cmin = std::min(cmin, c.count(t));
  for (int t : cons.capTypes) kmin = std::min(kmin, c.count(t));
  int64_t seeds = c.count(cons.seedType);
  if (!(seeds <= cmin && cmin <= kmin))
    throw Error(ErrorCode::CountsViolation, "counts must satisfy #seed <= c_min <= k_min, got " +
                                                std::to_string(seeds) + ", " + std::to_string(cmin) + ", " +
                                                std::to_string(kmin));
  return c;
}

void wire_computation(const TbnConstruction& cons, const Collection& c, const std::vector<std::vector<int>>& layout,
                      int seedInst, std::vector<int64_t>& next, Configuration& out, std::vector<int>* members) {
  SlotPicker pick(c);
  Wiring w = wire(cons, c, layout, seedInst, next, pick);
  for (auto& col : w.inBonds)
    for (auto& cell : col) out.bonds.insert(out.bonds.end(), cell.begin(), cell.end());
  out.bonds.insert(out.bonds.end(), w.helperBonds.begin(), w.helperBonds.end());
  if (members) {
    members->push_back(seedInst);
    for (auto& col : w.inst) members->insert(members->end(), col.begin(), col.end());
  }
}

namespace {

struct Built {
  Collection c;
  std::vector<Wiring> wirings;  // per seed copy
  std::vector<Bond> leftover;   // cap bonds of unused comp/end monomers
  std::vector<int64_t> used;    // per type, copies inside computation polymers
};

Built build(const TbnConstruction& cons, const CountsPolicy& counts, const std::vector<std::vector<int>>& layout,
            const WestOverrides* west) {
  Built b;
  b.c = apply_counts(cons, counts);
  SlotPicker pick(b.c);
  b.used.assign(b.c.num_types(), 0);
  for (int64_t k = 0; k < b.c.count(cons.seedType); ++k)
    b.wirings.push_back(wire(cons, b.c, layout, b.c.first_instance(cons.seedType) + static_cast<int>(k), b.used, pick,
                             west));
  std::vector<int> targets = cons.compTypes;
  targets.insert(targets.end(), cons.endTypes.begin(), cons.endTypes.end());
  for (int t : targets) {
    int cap = cons.info[t].capType;
    for (int64_t j = b.used[t]; j < b.c.count(t); ++j) {
      auto bs = cap_bonds(cons, b.c, b.c.first_instance(t) + static_cast<int>(j),
                          b.c.first_instance(cap) + static_cast<int>(j), pick);
      b.leftover.insert(b.leftover.end(), bs.begin(), bs.end());
    }
  }
  return b;
}

}  // namespace

CanonicalConfig configuration_for_layout(const TbnConstruction& cons, const CountsPolicy& counts,
                                        const std::vector<std::vector<int>>& layout, const WestOverrides& west) {
  Built b = build(cons, counts, layout, &west);
  CanonicalConfig out;
  out.collection = b.c;
  for (auto& w : b.wirings) {
    for (auto& col : w.inBonds)
      for (auto& cell : col) out.config.bonds.insert(out.config.bonds.end(), cell.begin(), cell.end());
    out.config.bonds.insert(out.config.bonds.end(), w.helperBonds.begin(), w.helperBonds.end());
  }
  out.config.bonds.insert(out.config.bonds.end(), b.leftover.begin(), b.leftover.end());
  out.config.normalise();
  out.cert = certify(out.collection, out.config);
  return out;
}

CanonicalConfig canonical_stable_config(const TbnConstruction& cons, const CountsPolicy& counts) {
  return configuration_for_layout(cons, counts, cons.layout);
}

std::vector<std::vector<int>> layout_for_input(const TbnConstruction& cons, const std::string& input) {
  check_input(cons.tm, input);
  if (static_cast<int64_t>(input.size()) > cons.s)
    throw Error(ErrorCode::InputTooLong, "input '" + input + "' exceeds the space bound");
  return layout_from_assembly(cons, intended_assembly(cons, input));
}

std::vector<AlphaStep> build_alpha_sequence(const TbnConstruction& cons, const CountsPolicy& counts) {
  Built b = build(cons, counts, cons.layout, nullptr);
  const Collection& c = b.c;
  const int64_t X = static_cast<int64_t>(cons.layout.size());
  const int64_t s = cons.s;

  // Every polymer monomer starts on its own cap; j-th copy pairs with the j-th cap copy.
  // Fresh slot bookkeeping: these bonds replace wiring bonds on the same slots.
  SlotPicker capPick(c), parkPick(c);
  std::set<Bond> cur(b.leftover.begin(), b.leftover.end());
  std::map<int, std::vector<Bond>> capped;  // instance -> its cap bonds in the initial state
  for (auto& w : b.wirings)
    for (int64_t x = 0; x < X; ++x)
      for (int64_t y = 0; y < s; ++y) {
        int m = w.inst[x][y];
        int t = c.type_of(m);
        int j = m - c.first_instance(t);
        auto bs = cap_bonds(cons, c, m, c.first_instance(cons.info[t].capType) + j, capPick);
        capped[m] = bs;
        cur.insert(bs.begin(), bs.end());
      }
  // Seed helpers first bind capped end monomers that stay outside the computation.
  std::vector<Bond> parking;
  std::map<int, int64_t> spare;  // end type -> next spare copy
  for (size_t k = 0; k < b.wirings.size(); ++k) {
    int seedInst = c.first_instance(cons.seedType) + static_cast<int>(k);
    for (int64_t y = 0; y < s; ++y) {
      int chosen = -1;
      for (int t : cons.endTypes) {
        if (cons.info[t].y != y) continue;
        int64_t& n = spare.try_emplace(t, b.used[t]).first->second;
        if (n < c.count(t)) {
          chosen = c.first_instance(t) + static_cast<int>(n++);
          break;
        }
      }
      if (chosen < 0) throw Error(ErrorCode::CountsViolation, "no spare end monomer for row " + std::to_string(y));
      parking.push_back(make_bond(parkPick.take(chosen, helper(y, true)), parkPick.take(seedInst, helper(y, false))));
    }
  }
  cur.insert(parking.begin(), parking.end());

  std::vector<AlphaStep> seq;
  auto snapshot = [&](const std::string& what) {
    AlphaStep st;
    st.config.bonds.assign(cur.begin(), cur.end());
    st.config.normalise();
    st.H = enthalpy(st.config);
    st.S = entropy(c, st.config);
    st.what = what;
    seq.push_back(std::move(st));
  };
  snapshot("initial");
  for (auto [x, y] : zz_cells(X, s)) {
    for (auto& w : b.wirings) {
      int m = w.inst[x][y];
      for (auto& bd : capped[m]) cur.erase(bd);
      for (auto& bd : w.inBonds[x][y]) cur.insert(bd);
    }
    snapshot("swap " + c.type(cons.layout[x][y]).name);
  }
  for (auto& bd : parking) cur.erase(bd);
  for (auto& w : b.wirings) cur.insert(w.helperBonds.begin(), w.helperBonds.end());
  snapshot("rebind");
  return seq;
}

std::strong_ordering zz_order(std::pair<int64_t, int64_t> a, std::pair<int64_t, int64_t> b, int64_t s, int64_t t) {
  for (auto p : {a, b})
    if (p.first < 0 || p.first > 2 * t - 1 || p.second < 0 || p.second > s - 1)
      throw Error(ErrorCode::OutOfGrid,
                  "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ") outside the grid");
  if (a.first != b.first) return a.first <=> b.first;
  return ascending(a.first) ? a.second <=> b.second : b.second <=> a.second;
}

std::optional<std::string> e_input(const std::vector<MonomerType>& monomers) {
  const MonomerType* seed = nullptr;
  for (auto& m : monomers)
    if (m.role == Role::Seed) {
      if (seed) return std::nullopt;
      seed = &m;
    }
  if (!seed) return std::nullopt;
  std::map<int, char> rows;
  for (auto& d : seed->domains) {
    if (!d.star || d.name.orient != Orient::H) continue;
    if (!d.name.has_loc() || d.name.loc().first != 0) return std::nullopt;
    if (!rows.emplace(d.name.loc().second, label_symbol(d.name.base)).second) return std::nullopt;
  }
  std::string out;
  int expect = 0;
  for (auto& [r, ch] : rows) {
    if (r != expect++) return std::nullopt;
    out.push_back(ch);
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::optional<std::string> e_output(const std::vector<MonomerType>& monomers, int64_t s, char blank) {
  std::map<int, char> rows;
  for (auto& m : monomers) {
    if (m.role != Role::End) continue;
    int row = -1;
    char sym = 0;
    for (auto& d : m.domains) {
      if (d.star && d.name.base == "g" && d.name.sub.size() == 1) row = d.name.sub[0];
      if (!d.star && d.name.orient == Orient::H) sym = label_symbol(d.name.base);
    }
    if (row < 0 || !sym) return std::nullopt;
    if (!rows.emplace(row, sym).second) return std::nullopt;
  }
  if (static_cast<int64_t>(rows.size()) != s) return std::nullopt;
  std::string tape;
  int expect = 0;
  for (auto& [r, ch] : rows) {
    if (r != expect++) return std::nullopt;
    tape.push_back(ch);
  }
  size_t b = tape.find_first_not_of(blank);
  if (b == std::string::npos) return std::string();
  return tape.substr(b, tape.find_last_not_of(blank) - b + 1);
}

VerifyReport verify_simulation(const Collection& c, const TbnConstruction& cons, VerifyMode mode,
                               const SolveLimits& limits) {
  VerifyReport rep;
  rep.expectedOutput = run_tm(cons.tm, cons.input, 4 * cons.t + 4).output;
  std::string expectedInput = cons.input;
  auto check_polymers = [&](const Configuration& a) -> bool {
    for (auto& p : polymers(c, a)) {
      std::vector<MonomerType> ms;
      bool hasSeed = false;
      for (int m : p.members) {
        ms.push_back(c.instance_type(m));
        hasSeed |= ms.back().role == Role::Seed;
      }
      if (!hasSeed) continue;
      auto in = e_input(ms);
      auto out = e_output(ms, cons.s, cons.tm.blank);
      rep.decodedOutput = out.value_or("<undefined>");
      if (!in || *in != expectedInput || !out || *out != rep.expectedOutput) {
        rep.code = ErrorCode::SimulationViolated;
        rep.message = "seed polymer decodes input '" + in.value_or("<undefined>") + "' output '" +
                      rep.decodedOutput + "', expected '" + expectedInput + "' -> '" + rep.expectedOutput + "'";
        rep.counterexample = dump_polymer(c, p);
        return false;
      }
    }
    return true;
  };
  if (mode == VerifyMode::Enumerate) {
    SolveResult r = enumerate_stable(c, limits);
    rep.stableClasses = static_cast<int64_t>(r.stable.size());
    rep.H = r.enthalpy;
    rep.S = r.entropy;
    for (auto& a : r.stable)
      if (!check_polymers(a)) return rep;
    rep.message = std::to_string(rep.stableClasses) + " stable class(es), all seed polymers decode correctly";
    return rep;
  }
  CountsPolicy counts;
  // The caller's collection fixes the counts; rebuild them as overrides.
  for (int t = 0; t < c.num_types(); ++t) counts.overrides[c.type(t).name] = c.count(t);
  counts.seed = c.count(cons.seedType);
  CanonicalConfig cc = canonical_stable_config(cons, counts);
  rep.H = enthalpy(cc.config);
  rep.S = entropy(c, cc.config);
  auto verdict = check_entropy_certificate(c, cc.config, cc.cert);
  if (!verdict.ok()) {
    rep.code = ErrorCode::SimulationViolated;
    rep.message = "certificate rejected: " + verdict.reason;
    return rep;
  }
  if (!check_polymers(cc.config)) return rep;
  rep.stableClasses = 1;
  rep.message = "certificate accepted, seed polymers decode correctly";
  return rep;
}

}  // namespace tbnlab
