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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tbnlab/error.hpp"

namespace tbnlab {

// Sides of a square tile or monomer, clockwise from north.
enum Side { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

enum class Move : char { L = 'L', R = 'R' };

struct Transition {
  std::string next;
  char write = '_';
  Move move = Move::R;
};

// Tape symbols are single characters; states are arbitrary tokens.
struct TMSpec {
  std::vector<std::string> states;
  std::vector<char> inputAlphabet;
  std::vector<char> tapeAlphabet;
  char blank = '_';
  std::string start;
  std::string halt;
  std::map<std::pair<std::string, char>, Transition> delta;

  const Transition& step(const std::string& q, char a) const;
  bool has_state(const std::string& q) const;
  bool has_symbol(char a) const;
};

// Throws InvalidTM on any structural problem.
void validate_tm(const TMSpec& tm);
TMSpec parse_tm(const std::string& text);
std::string print_tm(const TMSpec& tm);

struct TMConfig {
  std::string state;
  int64_t head = 0;
  std::map<int64_t, char> tape;  // non-blank cells only
  char read(int64_t cell, char blank) const {
    auto it = tape.find(cell);
    return it == tape.end() ? blank : it->second;
  }
  bool operator==(const TMConfig&) const = default;
};

struct TMRun {
  bool halted = false;
  int64_t steps = 0;
  int64_t minCell = 0, maxCell = 0;  // every cell the head visited, plus the input
  int64_t cellsUsed = 0;
  TMConfig final;
  std::string tape;    // cells minCell..maxCell
  std::string output;  // tape with surrounding blanks removed
  char headSymbol = '_';
};

TMConfig initial_config(const TMSpec& tm, const std::string& input);
// Applies one transition; the state must not be the halt state.
TMConfig tm_step(const TMSpec& tm, const TMConfig& c);
// Budget error if the machine has not halted after maxSteps transitions.
TMRun run_tm(const TMSpec& tm, const std::string& input, int64_t maxSteps);
// Every configuration from the initial one to the halting one.
std::vector<TMConfig> trace_tm(const TMSpec& tm, const std::string& input, int64_t maxSteps);

void check_input(const TMSpec& tm, const std::string& input);

}  // namespace tbnlab
