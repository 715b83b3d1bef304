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
#include "tbnlab/atam.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tbnlab {

const char* cell_class_name(CellClass c) {
  switch (c) {
    case CellClass::Top: return "top";
    case CellClass::Mid: return "mid";
    case CellClass::Bot: return "bot";
    case CellClass::Solo: return "solo";
  }
  return "?";
}

std::vector<int> TileType::inputSides() const {
  if (kind == TileKind::Input) return glues[kSouth].empty() ? std::vector<int>{} : std::vector<int>{kSouth};
  if (kind == TileKind::Extension) return {kNorth};
  return growsDown ? std::vector<int>{kNorth, kWest} : std::vector<int>{kSouth, kWest};
}

std::string head_content(const std::string& q, char a) { return "(" + q + "," + std::string(1, a) + ")"; }
std::string symbol_content(char a) { return std::string(1, a); }

std::string horizontal_label(const std::string& content, CellClass c, bool last, bool nextDown) {
  return content + "." + cell_class_name(c) + (last ? (nextDown ? "!d" : "!u") : "");
}

namespace {

int strength_of(const std::string& label) {
  if (label.empty() || label == "turn") return 0;
  if (label.find('!') != std::string::npos) return 2;
  if (label.rfind("ext.", 0) == 0 || label.rfind("in.", 0) == 0) return 2;
  return 1;
}

Glue glue(const std::string& label) { return Glue{label, strength_of(label)}; }

constexpr const char* kPlain = "-";
constexpr const char* kHalted = "#";

bool is_first(bool down, CellClass c) {
  return c == CellClass::Solo || (down ? c == CellClass::Top : c == CellClass::Bot);
}
bool is_end(bool down, CellClass c) {
  return c == CellClass::Solo || (down ? c == CellClass::Bot : c == CellClass::Top);
}

CellClass class_of(int64_t cell, int64_t height) {
  if (height == 1) return CellClass::Solo;
  if (cell == 0) return CellClass::Top;
  if (cell == height - 1) return CellClass::Bot;
  return CellClass::Mid;
}

struct Content {
  char symbol;
  std::string state;  // empty: no head
  std::string str() const { return state.empty() ? symbol_content(symbol) : head_content(state, symbol); }
};

}  // namespace

ZigzagSystem build_zigzag_tileset(const TMSpec& tm, const ZigzagOptions& opts) {
  validate_tm(tm);
  if (opts.space && *opts.space < 1) throw Error(ErrorCode::InvalidArgument, "space bound must be at least 1");
  ZigzagSystem sys;
  sys.tm = tm;
  sys.opts = opts;
  const bool bounded = opts.space.has_value();

  std::vector<Content> contents;
  for (char a : tm.tapeAlphabet) contents.push_back({a, ""});
  for (auto& q : tm.states)
    for (char a : tm.tapeAlphabet) contents.push_back({a, q});
  std::vector<std::string> vins{kPlain};
  for (auto& q : tm.states) vins.push_back(q);
  if (!opts.noop) vins.push_back(kHalted);

  for (bool down : {true, false}) {
    const std::string dirTag = down ? "d." : "u.";
    for (CellClass cls : {CellClass::Top, CellClass::Mid, CellClass::Bot, CellClass::Solo}) {
      const bool first = is_first(down, cls);
      // In the unbounded variant a down column ends on an extension tile.
      const bool extends = !bounded && down && (cls == CellClass::Bot || cls == CellClass::Solo);
      const bool last = is_end(down, cls) && !extends;
      std::vector<std::string> inputs = first ? std::vector<std::string>{"turn"} : vins;
      for (const Content& west : contents) {
        for (const std::string& vin : inputs) {
          const bool carry = vin != "turn" && vin != kPlain && vin != kHalted;
          if (!west.state.empty() && (carry || vin == kHalted)) continue;  // one head per column
          Content out = west;
          std::string vout = kPlain;
          if (west.state.empty()) {
            if (carry) out.state = vin;
            if (vin == kHalted) vout = kHalted;
          } else if (west.state != tm.halt) {
            const Transition& tr = tm.step(west.state, west.symbol);
            if ((tr.move == Move::R) == down) {
              if (last) continue;                          // head would leave the tape
              if (!down && cls == CellClass::Top) continue;  // left end of the tape
              out = {tr.write, ""};
              vout = tr.next;
            }
          }
          if (!opts.noop && out.state == tm.halt) vout = kHalted;
          CellClass outCls = cls;
          if (extends) outCls = cls == CellClass::Solo ? CellClass::Top : CellClass::Mid;

          TileType t;
          t.kind = TileKind::Comp;
          t.growsDown = down;
          t.cls = cls;
          t.symbol = out.symbol;
          t.state = out.state;
          t.glues[kWest] = glue(horizontal_label(west.str(), cls, first, down));
          std::string east = horizontal_label(out.str(), outCls, last, !down);
          if (last && vout == kHalted) east = horizontal_label(out.str(), outCls, false) + "!h";
          t.glues[kEast] = glue(east);
          const int inSide = down ? kNorth : kSouth;
          const int outSide = down ? kSouth : kNorth;
          t.glues[inSide] = glue(first ? std::string("turn") : dirTag + vin);
          if (last)
            t.glues[outSide] = glue("turn");
          else if (extends)
            t.glues[outSide] = glue("ext." + vout);
          else
            t.glues[outSide] = glue(dirTag + vout);
          t.name = std::string(down ? "D" : "U") + cell_class_name(cls) + ":" + west.str() + "|" + vin;
          sys.tiles.push_back(std::move(t));
        }
      }
    }
  }
  if (!bounded) {
    for (const std::string& v : vins) {
      TileType t;
      t.kind = TileKind::Extension;
      t.growsDown = true;
      t.cls = CellClass::Bot;
      const bool carry = v != kPlain && v != kHalted;
      t.symbol = tm.blank;
      if (carry) t.state = v;
      const bool halted = v == kHalted || (!opts.noop && t.state == tm.halt);
      Content out{tm.blank, t.state};
      t.glues[kNorth] = glue("ext." + v);
      t.glues[kEast] = glue(halted ? horizontal_label(out.str(), CellClass::Bot, false) + "!h"
                                  : horizontal_label(out.str(), CellClass::Bot, true, false));
      t.glues[kSouth] = glue("turn");
      t.name = "X:" + v;
      sys.tiles.push_back(std::move(t));
    }
  }
  for (auto& t : sys.tiles)
    for (auto& g : t.glues)
      if (!g.empty()) sys.glueStrength[g.label] = g.strength;
  return sys;
}

std::vector<TileType> input_tile_family(const ZigzagSystem& sys, const std::string& input) {
  check_input(sys.tm, input);
  int64_t h;
  if (sys.opts.space) {
    h = *sys.opts.space;
    if (static_cast<int64_t>(input.size()) > h)
      throw Error(ErrorCode::InputTooLong, "input length " + std::to_string(input.size()) + " exceeds space bound " +
                                               std::to_string(h));
  } else {
    h = std::max<int64_t>(1, static_cast<int64_t>(input.size()));
  }
  std::vector<TileType> out;
  for (int64_t c = h - 1; c >= 0; --c) {
    TileType t;
    t.kind = TileKind::Input;
    t.growsDown = false;
    t.cls = class_of(c, h);
    t.symbol = c < static_cast<int64_t>(input.size()) ? input[c] : sys.tm.blank;
    if (c == 0) t.state = sys.tm.start;
    Content content{t.symbol, t.state};
    std::string east = horizontal_label(content.str(), t.cls, c == 0, true);
    if (c == 0 && !sys.opts.noop && sys.tm.start == sys.tm.halt) east = horizontal_label(content.str(), t.cls, false) + "!h";
    t.glues[kEast] = glue(east);
    if (c < h - 1) t.glues[kSouth] = glue("in." + std::to_string(c));
    if (c > 0) t.glues[kNorth] = glue("in." + std::to_string(c - 1));
    t.name = "I" + std::to_string(c) + ":" + content.str();
    out.push_back(std::move(t));
  }
  return out;
}

int64_t Assembly::max_x() const {
  int64_t m = 0;
  for (auto& [p, i] : at) m = std::max(m, p.first);
  return m;
}

std::string Assembly::dump() const {
  std::ostringstream os;
  for (auto& p : order) os << p.first << " " << p.second << " " << types[at.at(p)].name << "\n";
  return os.str();
}

Assembly assemble(const std::vector<TileType>& tiles, const TileType& seed, int temperature,
                  const AssembleLimits& limits) {
  Assembly a;
  a.types = tiles;
  a.types.push_back(seed);
  const int seedIdx = static_cast<int>(a.types.size()) - 1;
  std::map<std::pair<int, std::string>, std::vector<int>> bySide;
  for (int i = 0; i < seedIdx; ++i)
    for (int s = 0; s < 4; ++s)
      if (a.types[i].glues[s].strength > 0) bySide[{s, a.types[i].glues[s].label}].push_back(i);

  static const int dx[4] = {0, 1, 0, -1};
  static const int dy[4] = {1, 0, -1, 0};
  a.at[{0, 0}] = seedIdx;
  a.order.push_back({0, 0});
  std::set<std::pair<int64_t, int64_t>> dirty, ready;
  std::map<std::pair<int64_t, int64_t>, int> choice;
  auto touch = [&](int64_t x, int64_t y) {
    for (int s = 0; s < 4; ++s) dirty.insert({x + dx[s], y + dy[s]});
  };
  touch(0, 0);
  while (true) {
    for (auto site : dirty) {
      if (a.at.count(site) || site.first > limits.maxColumn) continue;
      std::set<int> cands;
      for (int s = 0; s < 4; ++s) {
        const TileType* nb = a.tile(site.first + dx[s], site.second + dy[s]);
        if (!nb) continue;
        const Glue& g = nb->glues[(s + 2) % 4];
        if (g.strength <= 0) continue;
        auto it = bySide.find({s, g.label});
        if (it != bySide.end()) cands.insert(it->second.begin(), it->second.end());
      }
      std::vector<int> fit;
      for (int t : cands) {
        int total = 0;
        for (int s = 0; s < 4; ++s) {
          const TileType* nb = a.tile(site.first + dx[s], site.second + dy[s]);
          if (!nb) continue;
          const Glue& mine = a.types[t].glues[s];
          if (!mine.empty() && nb->glues[(s + 2) % 4].label == mine.label) total += mine.strength;
        }
        if (total >= temperature) fit.push_back(t);
      }
      if (fit.size() > 1)
        throw Error(ErrorCode::NondeterministicAttachment,
                    "tiles '" + a.types[fit[0]].name + "' and '" + a.types[fit[1]].name + "' both fit at (" +
                        std::to_string(site.first) + "," + std::to_string(site.second) + ")");
      if (fit.size() == 1) {
        ready.insert(site);
        choice[site] = fit[0];
      }
    }
    dirty.clear();
    if (ready.empty()) break;
    if (static_cast<int64_t>(a.order.size()) >= limits.maxTiles)
      throw Error(ErrorCode::BudgetExceeded, "tile budget of " + std::to_string(limits.maxTiles) + " reached");
    auto site = *ready.begin();
    ready.erase(ready.begin());
    a.at[site] = choice[site];
    a.order.push_back(site);
    touch(site.first, site.second);
  }
  return a;
}

Assembly assemble_zigzag(const ZigzagSystem& sys, const std::string& input, const AssembleLimits& limits) {
  auto family = input_tile_family(sys, input);
  std::vector<TileType> tiles(family.begin() + 1, family.end());
  tiles.insert(tiles.end(), sys.tiles.begin(), sys.tiles.end());
  return assemble(tiles, family.front(), 2, limits);
}

ColumnSnapshot column_snapshot(const Assembly& a, int64_t x, int64_t inputHeight) {
  std::vector<std::pair<int64_t, const TileType*>> cells;
  for (auto& [p, i] : a.at)
    if (p.first == x) cells.push_back({inputHeight - 1 - p.second, &a.types[i]});
  std::sort(cells.begin(), cells.end(), [](auto& l, auto& r) { return l.first < r.first; });
  ColumnSnapshot s;
  for (auto& [c, t] : cells) {
    if (!t->state.empty()) {
      s.head = c;
      s.state = t->state;
    }
    s.tape.push_back(t->symbol);
  }
  return s;
}

}  // namespace tbnlab
