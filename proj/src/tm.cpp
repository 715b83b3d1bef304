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
#include "tbnlab/tm.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "util.hpp"

namespace tbnlab {

const Transition& TMSpec::step(const std::string& q, char a) const {
  auto it = delta.find({q, a});
  if (it == delta.end())
    throw Error(ErrorCode::InvalidTM, "no transition for (" + q + "," + std::string(1, a) + ")");
  return it->second;
}

bool TMSpec::has_state(const std::string& q) const {
  return std::find(states.begin(), states.end(), q) != states.end();
}

bool TMSpec::has_symbol(char a) const {
  return std::find(tapeAlphabet.begin(), tapeAlphabet.end(), a) != tapeAlphabet.end();
}

void validate_tm(const TMSpec& tm) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidTM, m); };
  if (tm.states.empty()) bad("no states");
  if (std::set<std::string>(tm.states.begin(), tm.states.end()).size() != tm.states.size()) bad("duplicate state");
  if (std::set<char>(tm.tapeAlphabet.begin(), tm.tapeAlphabet.end()).size() != tm.tapeAlphabet.size())
    bad("duplicate tape symbol");
  if (!tm.has_state(tm.start)) bad("unknown start state '" + tm.start + "'");
  if (!tm.has_state(tm.halt)) bad("unknown halt state '" + tm.halt + "'");
  if (!tm.has_symbol(tm.blank)) bad("blank not in tape alphabet");
  for (char a : tm.inputAlphabet) {
    if (!tm.has_symbol(a)) bad(std::string("input symbol '") + a + "' not in tape alphabet");
    if (a == tm.blank) bad("blank in input alphabet");
  }
  for (char a : tm.tapeAlphabet)
    if (a == ',' || a == '(' || a == ')' || a == '.' || a == '!' || a == '[' || a == ']' || a == ' ' || a == '*' ||
        a == ':' || (a == '_' && a != tm.blank))
      bad(std::string("reserved tape symbol '") + a + "'");
  for (auto& q : tm.states)
    for (char ch : q)
      if (ch == ',' || ch == '(' || ch == ')' || ch == '.' || ch == '!' || ch == '[' || ch == ']' || ch == ' ' ||
          ch == '*' || ch == ':')
        bad("reserved character in state '" + q + "'");
  for (auto& [k, tr] : tm.delta) {
    if (!tm.has_state(k.first) || !tm.has_symbol(k.second)) bad("transition on unknown state/symbol");
    if (k.first == tm.halt) bad("transition out of the halt state");
    if (!tm.has_state(tr.next) || !tm.has_symbol(tr.write)) bad("transition to unknown state/symbol");
  }
  for (auto& q : tm.states) {
    if (q == tm.halt) continue;
    for (char a : tm.tapeAlphabet)
      if (!tm.delta.count({q, a})) bad("delta not total: missing (" + q + "," + std::string(1, a) + ")");
  }
}

namespace {

std::vector<char> parse_symbols(const std::string& v) {
  std::vector<char> out;
  for (auto& s : split(v, ',')) {
    if (s.empty()) continue;
    if (s.size() != 1) throw Error(ErrorCode::InvalidTM, "tape symbols must be single characters: '" + s + "'");
    out.push_back(s[0]);
  }
  return out;
}

std::string join_symbols(const std::vector<char>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s.push_back(v[i]);
  }
  return s;
}

}  // namespace

TMSpec parse_tm(const std::string& text) {
  TMSpec tm;
  bool haveBlank = false;
  int lineNo = 0;
  for (auto& raw : split_lines(text)) {
    ++lineNo;
    std::string line = strip_comment(raw);
    auto t = std::string(trim(line));
    if (t.empty()) continue;
    auto arrow = t.find("->");
    if (arrow != std::string::npos) {
      auto lhs = split(t.substr(0, arrow), ',');
      auto rhs = split(t.substr(arrow + 2), ',');
      if (lhs.size() != 2 || rhs.size() != 3 || lhs[1].size() != 1 || rhs[1].size() != 1 ||
          (rhs[2] != "L" && rhs[2] != "R"))
        throw Error(ErrorCode::InvalidTM, "line " + std::to_string(lineNo) + ": bad transition '" + t + "'");
      auto key = std::make_pair(lhs[0], lhs[1][0]);
      if (tm.delta.count(key))
        throw Error(ErrorCode::InvalidTM, "line " + std::to_string(lineNo) + ": duplicate transition");
      tm.delta[key] = Transition{rhs[0], rhs[1][0], rhs[2] == "L" ? Move::L : Move::R};
      continue;
    }
    auto colon = t.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::InvalidTM, "line " + std::to_string(lineNo) + ": expected 'key: value'");
    std::string key(trim(t.substr(0, colon)));
    std::string val(trim(t.substr(colon + 1)));
    if (key == "states") {
      for (auto& s : split(val, ','))
        if (!s.empty()) tm.states.push_back(s);
    } else if (key == "input") {
      tm.inputAlphabet = parse_symbols(val);
    } else if (key == "tape") {
      tm.tapeAlphabet = parse_symbols(val);
    } else if (key == "blank") {
      if (val.size() != 1) throw Error(ErrorCode::InvalidTM, "blank must be one character");
      tm.blank = val[0];
      haveBlank = true;
    } else if (key == "start") {
      tm.start = val;
    } else if (key == "halt") {
      tm.halt = val;
    } else {
      throw Error(ErrorCode::InvalidTM, "line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
    }
  }
  if (!haveBlank) tm.blank = '_';
  validate_tm(tm);
  return tm;
}

std::string print_tm(const TMSpec& tm) {
  std::ostringstream os;
  os << "states: ";
  for (size_t i = 0; i < tm.states.size(); ++i) os << (i ? "," : "") << tm.states[i];
  os << "\ninput: " << join_symbols(tm.inputAlphabet) << "\ntape: " << join_symbols(tm.tapeAlphabet)
     << "\nblank: " << tm.blank << "\nstart: " << tm.start << "\nhalt: " << tm.halt << "\n";
  for (auto& q : tm.states)
    for (char a : tm.tapeAlphabet) {
      auto it = tm.delta.find({q, a});
      if (it == tm.delta.end()) continue;
      os << q << "," << a << " -> " << it->second.next << "," << it->second.write << ","
         << static_cast<char>(it->second.move) << "\n";
    }
  return os.str();
}

void check_input(const TMSpec& tm, const std::string& input) {
  for (char a : input)
    if (std::find(tm.inputAlphabet.begin(), tm.inputAlphabet.end(), a) == tm.inputAlphabet.end())
      throw Error(ErrorCode::InvalidArgument, std::string("input symbol '") + a + "' not in input alphabet");
}

TMConfig initial_config(const TMSpec& tm, const std::string& input) {
  check_input(tm, input);
  TMConfig c;
  c.state = tm.start;
  c.head = 0;
  for (size_t i = 0; i < input.size(); ++i) c.tape[static_cast<int64_t>(i)] = input[i];
  return c;
}

TMConfig tm_step(const TMSpec& tm, const TMConfig& c) {
  const Transition& tr = tm.step(c.state, c.read(c.head, tm.blank));
  TMConfig n = c;
  if (tr.write == tm.blank)
    n.tape.erase(c.head);
  else
    n.tape[c.head] = tr.write;
  n.state = tr.next;
  n.head += tr.move == Move::R ? 1 : -1;
  return n;
}

std::vector<TMConfig> trace_tm(const TMSpec& tm, const std::string& input, int64_t maxSteps) {
  std::vector<TMConfig> out{initial_config(tm, input)};
  while (out.back().state != tm.halt) {
    if (static_cast<int64_t>(out.size()) - 1 >= maxSteps)
      throw Error(ErrorCode::BudgetExceeded, "machine did not halt within " + std::to_string(maxSteps) + " steps");
    out.push_back(tm_step(tm, out.back()));
  }
  return out;
}

TMRun run_tm(const TMSpec& tm, const std::string& input, int64_t maxSteps) {
  auto tr = trace_tm(tm, input, maxSteps);
  TMRun r;
  r.halted = true;
  r.steps = static_cast<int64_t>(tr.size()) - 1;
  r.minCell = 0;
  r.maxCell = input.empty() ? 0 : static_cast<int64_t>(input.size()) - 1;
  for (auto& c : tr) {
    r.minCell = std::min(r.minCell, c.head);
    r.maxCell = std::max(r.maxCell, c.head);
  }
  r.cellsUsed = r.maxCell - r.minCell + 1;
  r.final = tr.back();
  for (int64_t k = r.minCell; k <= r.maxCell; ++k) r.tape.push_back(r.final.read(k, tm.blank));
  size_t b = r.tape.find_first_not_of(tm.blank);
  if (b != std::string::npos) r.output = r.tape.substr(b, r.tape.find_last_not_of(tm.blank) - b + 1);
  r.headSymbol = r.final.read(r.final.head, tm.blank);
  return r;
}

}  // namespace tbnlab
