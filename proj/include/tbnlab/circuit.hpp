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

#include "tbnlab/core.hpp"
#include "tbnlab/solver.hpp"
#include "tbnlab/tm_compiler.hpp"

namespace tbnlab {

enum class NodeKind { Input, Gate, Output };

struct PortRef {
  int node = -1;
  int port = 0;
  bool operator==(const PortRef&) const = default;
};

struct CircuitNode {
  NodeKind kind = NodeKind::Gate;
  std::string name;
  std::vector<PortRef> in;         // gate inputs, or the single source of an output node
  int outputs = 0;                 // bits produced (1 for input nodes)
  std::vector<std::string> table;  // gate: row p holds the outputs for input pattern p (first input is the high bit)
};

struct CircuitSpec {
  std::vector<CircuitNode> nodes;
  std::vector<int> inputs, outputs;  // node ids in declaration order
  int maxFanIn = 8;
};

// Text format, one node per line:
//   input a
//   gate d in=a,b,c table=000:00,001:10,...
//   output z from=d.1
// A gate output is referenced as name.port; a bare name means port 0.
CircuitSpec parse_circuit(const std::string& text);
std::string print_circuit(const CircuitSpec& c);
void validate_circuit(const CircuitSpec& c);
std::vector<int> topo_order(const CircuitSpec& c);

std::string eval_circuit(const CircuitSpec& c, const std::string& input);

struct CircuitEdge {
  PortRef from;
  int to = -1, toSlot = 0;
  std::vector<int> sub;  // (from, to), plus a port index when two edges join the same pair
  Domain value(char bit) const;
};

struct CircuitTbn {
  CircuitSpec spec;
  std::string input;
  Collection types;  // every monomer type with count 1
  int seedType = -1;
  std::vector<std::vector<int>> gateTypes;   // per node: type per input pattern (gates only)
  std::vector<std::array<int, 2>> endTypes;  // per node: end type per carried bit (outputs only)
  std::vector<int> capOf;                    // per type: its cap type, or -1
  std::vector<int> gateMonomers, endMonomers, capTypes;
  std::vector<CircuitEdge> edges;
  std::vector<std::vector<int>> inEdges;   // per node, edge ids by input slot
  std::vector<std::vector<int>> outEdges;  // per node, edge ids by output port (input nodes: every fan-out edge)
};

CircuitTbn compile_circuit(const CircuitSpec& c, const std::string& input);
Collection apply_circuit_counts(const CircuitTbn& tbn, const CountsPolicy& counts);
CanonicalConfig canonical_circuit_config(const CircuitTbn& tbn, const CountsPolicy& counts);

// Output bits in output-node order; empty optional when the set is not one coherent readout.
std::optional<std::string> decode_circuit_output(const CircuitTbn& tbn, const std::vector<MonomerType>& monomers);
std::optional<std::string> decode_circuit_input(const CircuitTbn& tbn, const std::vector<MonomerType>& monomers);

VerifyReport verify_circuit_simulation(const Collection& c, const CircuitTbn& tbn, VerifyMode mode,
                                       const SolveLimits& limits = {});

}  // namespace tbnlab
