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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tbnlab/tm.hpp"

namespace tbnlab {

struct Glue {
  std::string label;  // empty: no glue
  int strength = 0;
  bool empty() const { return label.empty(); }
  bool operator==(const Glue&) const = default;
};

// Position of a tile within its column.
enum class CellClass { Top, Mid, Bot, Solo };
const char* cell_class_name(CellClass c);

enum class TileKind { Input, Comp, Extension };

struct TileType {
  std::string name;
  std::array<Glue, 4> glues;  // N, E, S, W
  TileKind kind = TileKind::Comp;
  bool growsDown = false;  // growth direction of the column the tile sits in
  CellClass cls = CellClass::Mid;
  // Tape cell represented after this column.
  char symbol = '_';
  std::string state;  // head state if the head sits here, else empty
  // Sides whose glues bind when the tile attaches.
  std::vector<int> inputSides() const;
};

struct ZigzagOptions {
  std::optional<int64_t> space;  // bounded tape height; unbounded when absent
  // true: after the halt state, columns keep copying forever.
  // false: growth stops at the end of the column that first carries the halt state.
  bool noop = true;
};

struct ZigzagSystem {
  TMSpec tm;
  ZigzagOptions opts;
  std::vector<TileType> tiles;  // computation and extension tiles, input independent
  std::map<std::string, int> glueStrength;
};

// Glue labels used by the generator.
std::string head_content(const std::string& q, char a);
std::string symbol_content(char a);
// A column's last tile marks its east glue with the growth direction of the next column.
std::string horizontal_label(const std::string& content, CellClass c, bool last, bool nextDown = false);

ZigzagSystem build_zigzag_tileset(const TMSpec& tm, const ZigzagOptions& opts);
// The input column for `input`; element 0 is the seed tile placed at the origin.
std::vector<TileType> input_tile_family(const ZigzagSystem& sys, const std::string& input);

struct Assembly {
  std::vector<TileType> types;
  std::map<std::pair<int64_t, int64_t>, int> at;   // (x,y) -> index into types
  std::vector<std::pair<int64_t, int64_t>> order;  // attachment order, seed first
  const TileType* tile(int64_t x, int64_t y) const {
    auto it = at.find({x, y});
    return it == at.end() ? nullptr : &types[it->second];
  }
  int64_t max_x() const;
  std::string dump() const;  // "x y name" per tile in attachment order
};

struct AssembleLimits {
  int64_t maxTiles = 1000000;
  int64_t maxColumn = std::numeric_limits<int64_t>::max();  // sites beyond are ignored
};

// Deterministic growth from `seed` at the origin. Throws NondeterministicAttachment
// if two tile types fit one site, BudgetExceeded if maxTiles is reached.
Assembly assemble(const std::vector<TileType>& tiles, const TileType& seed, int temperature = 2,
                  const AssembleLimits& limits = {});

Assembly assemble_zigzag(const ZigzagSystem& sys, const std::string& input, const AssembleLimits& limits = {});

struct ColumnSnapshot {
  std::string tape;  // top cell first
  int64_t head = -1;
  std::string state;
  bool operator==(const ColumnSnapshot&) const = default;
};

// Reads column x top to bottom. Cell 0 is the topmost tile of the input column.
ColumnSnapshot column_snapshot(const Assembly& a, int64_t x, int64_t inputHeight);

}  // namespace tbnlab
