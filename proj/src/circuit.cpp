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
#include "tbnlab/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <map>
#include <set>
#include <sstream>

#include "util.hpp"

namespace tbnlab {

namespace {

bool is_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
}

bool is_bits(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char ch) { return ch == '0' || ch == '1'; });
}

std::string pattern_bits(int p, int width) {
  std::string s;
  for (int k = width - 1; k >= 0; --k) s.push_back((p >> k) & 1 ? '1' : '0');
  return s;
}

std::string port_name(const CircuitSpec& c, PortRef r) {
  const auto& n = c.nodes.at(r.node);
  return n.kind == NodeKind::Gate && n.outputs > 1 ? n.name + "." + std::to_string(r.port) : n.name;
}

// Node values: per node, its output bits; per gate, the pattern it saw.
struct Evaluation {
  std::vector<std::string> out;
  std::vector<int> pattern;
};

Evaluation evaluate(const CircuitSpec& c, const std::string& input) {
  if (input.size() != c.inputs.size() || !is_bits(input))
    throw Error(ErrorCode::ArityMismatch, "circuit takes " + std::to_string(c.inputs.size()) + " input bits, got '" +
                                              input + "'");
  Evaluation ev;
  ev.out.assign(c.nodes.size(), "");
  ev.pattern.assign(c.nodes.size(), -1);
  for (size_t k = 0; k < c.inputs.size(); ++k) ev.out[c.inputs[k]] = std::string(1, input[k]);
  for (int v : topo_order(c)) {
    const auto& n = c.nodes[v];
    if (n.kind == NodeKind::Input) continue;
    int p = 0;
    for (auto& r : n.in) p = p * 2 + (ev.out[r.node][r.port] - '0');
    if (n.kind == NodeKind::Gate) {
      ev.pattern[v] = p;
      ev.out[v] = n.table[p];
    } else {
      ev.out[v] = std::string(1, static_cast<char>('0' + p));
    }
  }
  return ev;
}

}  // namespace

CircuitSpec parse_circuit(const std::string& text) {
  CircuitSpec c;
  struct Pending {
    int node;
    std::vector<std::string> refs;
    int line;
  };
  std::vector<Pending> pending;
  std::map<std::string, int> byName;
  int lineNo = 0;
  for (auto& raw : split_lines(text)) {
    ++lineNo;
    auto toks = split_ws(strip_comment(raw));
    if (toks.empty()) continue;
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::Parse, "line " + std::to_string(lineNo) + ": " + why);
    };
    if (toks.size() < 2) throw bad("expected a node kind and a name");
    CircuitNode n;
    n.name = toks[1];
    if (!is_ident(n.name)) throw bad("bad node name '" + n.name + "'");
    if (byName.count(n.name)) throw bad("duplicate node '" + n.name + "'");
    std::map<std::string, std::string> kv;
    for (size_t k = 2; k < toks.size(); ++k) {
      auto eq = toks[k].find('=');
      if (eq == std::string::npos) throw bad("expected key=value, got '" + toks[k] + "'");
      kv[toks[k].substr(0, eq)] = toks[k].substr(eq + 1);
    }
    int id = static_cast<int>(c.nodes.size());
    if (toks[0] == "input") {
      if (!kv.empty()) throw bad("input nodes take no attributes");
      n.kind = NodeKind::Input;
      n.outputs = 1;
      c.inputs.push_back(id);
    } else if (toks[0] == "gate") {
      if (kv.size() != 2 || !kv.count("in") || !kv.count("table")) throw bad("gate needs in= and table=");
      n.kind = NodeKind::Gate;
      auto refs = kv["in"].empty() ? std::vector<std::string>{} : split(kv["in"], ',');
      pending.push_back({id, refs, lineNo});
      std::map<std::string, std::string> rows;
      for (auto& entry : split(kv["table"], ',')) {
        auto colon = entry.find(':');
        if (colon == std::string::npos) throw bad("table entry '" + entry + "' lacks ':'");
        std::string in = entry.substr(0, colon), out = entry.substr(colon + 1);
        if (!is_bits(in) || !is_bits(out) || in.size() != refs.size())
          throw bad("table entry '" + entry + "' does not match fan-in " + std::to_string(refs.size()));
        if (!rows.emplace(in, out).second) throw bad("duplicate table row '" + in + "'");
      }
      if (refs.size() > 30) throw bad("fan-in too large");
      size_t nRows = size_t(1) << refs.size();
      if (rows.size() != nRows) throw bad("table must list all " + std::to_string(nRows) + " input patterns");
      for (size_t p = 0; p < nRows; ++p) {
        const auto& out = rows.at(pattern_bits(static_cast<int>(p), static_cast<int>(refs.size())));
        if (p > 0 && out.size() != n.table[0].size()) throw bad("table rows differ in output width");
        n.table.push_back(out);
      }
      n.outputs = static_cast<int>(n.table[0].size());
      if (n.outputs == 0) throw bad("gate produces no outputs");
    } else if (toks[0] == "output") {
      if (kv.size() != 1 || !kv.count("from")) throw bad("output needs from=");
      n.kind = NodeKind::Output;
      pending.push_back({id, {kv["from"]}, lineNo});
      c.outputs.push_back(id);
    } else {
      throw bad("unknown node kind '" + toks[0] + "'");
    }
    byName[n.name] = id;
    c.nodes.push_back(std::move(n));
  }
  for (auto& p : pending)
    for (auto& ref : p.refs) {
      auto dot = ref.find('.');
      std::string name = ref.substr(0, dot);
      auto it = byName.find(name);
      if (it == byName.end())
        throw Error(ErrorCode::InvalidCircuit, "line " + std::to_string(p.line) + ": unknown node '" + name + "'");
      int port = dot == std::string::npos ? 0 : static_cast<int>(parse_int(ref.substr(dot + 1)));
      c.nodes[p.node].in.push_back({it->second, port});
    }
  validate_circuit(c);
  return c;
}

std::string print_circuit(const CircuitSpec& c) {
  std::ostringstream os;
  for (auto& n : c.nodes) {
    if (n.kind == NodeKind::Input) {
      os << "input " << n.name << "\n";
    } else if (n.kind == NodeKind::Gate) {
      os << "gate " << n.name << " in=";
      for (size_t k = 0; k < n.in.size(); ++k) os << (k ? "," : "") << port_name(c, n.in[k]);
      os << " table=";
      for (size_t p = 0; p < n.table.size(); ++p)
        os << (p ? "," : "") << pattern_bits(static_cast<int>(p), static_cast<int>(n.in.size())) << ":" << n.table[p];
      os << "\n";
    } else {
      os << "output " << n.name << " from=" << port_name(c, n.in.at(0)) << "\n";
    }
  }
  return os.str();
}

std::vector<int> topo_order(const CircuitSpec& c) {
  const int n = static_cast<int>(c.nodes.size());
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (int v = 0; v < n; ++v)
    for (auto& r : c.nodes[v].in) {
      ++indeg[v];
      succ[r.node].push_back(v);
    }
  std::vector<int> order, ready;
  for (int v = n - 1; v >= 0; --v)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int u : succ[v])
      if (--indeg[u] == 0) ready.push_back(u);
  }
  if (static_cast<int>(order.size()) != n) throw Error(ErrorCode::InvalidCircuit, "circuit has a cycle");
  return order;
}

void validate_circuit(const CircuitSpec& c) {
  auto fail = [](const std::string& why) { return Error(ErrorCode::InvalidCircuit, why); };
  if (c.inputs.empty()) throw fail("circuit has no inputs");
  if (c.outputs.empty()) throw fail("circuit has no outputs");
  std::map<std::pair<int, int>, int> uses;
  for (auto& n : c.nodes) {
    if (n.kind == NodeKind::Output && n.in.size() != 1) throw fail("output '" + n.name + "' needs exactly one source");
    if (n.kind == NodeKind::Gate) {
      if (n.in.empty()) throw fail("gate '" + n.name + "' has no inputs");
      if (static_cast<int>(n.in.size()) > c.maxFanIn)
        throw fail("gate '" + n.name + "' has fan-in " + std::to_string(n.in.size()) + ", limit " +
                   std::to_string(c.maxFanIn));
      if (n.table.size() != (size_t(1) << n.in.size())) throw fail("gate '" + n.name + "' has an incomplete table");
    }
    for (auto& r : n.in) {
      if (r.node < 0 || r.node >= static_cast<int>(c.nodes.size())) throw fail("dangling reference");
      const auto& src = c.nodes[r.node];
      if (src.kind == NodeKind::Output) throw fail("node '" + n.name + "' reads output node '" + src.name + "'");
      if (r.port < 0 || r.port >= src.outputs)
        throw fail("node '" + n.name + "' reads missing port " + std::to_string(r.port) + " of '" + src.name + "'");
      ++uses[{r.node, r.port}];
    }
  }
  for (size_t v = 0; v < c.nodes.size(); ++v) {
    const auto& n = c.nodes[v];
    for (int p = 0; p < (n.kind == NodeKind::Output ? 0 : n.outputs); ++p) {
      int u = uses.count({static_cast<int>(v), p}) ? uses[{static_cast<int>(v), p}] : 0;
      if (n.kind == NodeKind::Gate && u != 1)
        throw fail("gate output " + port_name(c, {static_cast<int>(v), p}) + " must feed exactly one node, feeds " +
                   std::to_string(u));
      if (n.kind == NodeKind::Input && u == 0) throw fail("input '" + n.name + "' is unused");
    }
  }
  topo_order(c);
}

std::string eval_circuit(const CircuitSpec& c, const std::string& input) {
  Evaluation ev = evaluate(c, input);
  std::string out;
  for (int u : c.outputs) out += ev.out[u];
  return out;
}

Domain CircuitEdge::value(char bit) const { return Domain(DomainName(std::string(1, bit), Orient::None, sub), false); }

namespace {

Domain helper(int node, bool star) { return Domain(DomainName("g", Orient::None, {node}), star); }

}  // namespace

CircuitTbn compile_circuit(const CircuitSpec& spec, const std::string& input) {
  validate_circuit(spec);
  Evaluation ev = evaluate(spec, input);
  CircuitTbn tbn;
  tbn.spec = spec;
  tbn.input = input;
  const int n = static_cast<int>(spec.nodes.size());
  tbn.inEdges.assign(n, {});
  tbn.outEdges.assign(n, {});
  for (int v = 0; v < n; ++v)
    if (spec.nodes[v].kind == NodeKind::Gate) tbn.outEdges[v].assign(spec.nodes[v].outputs, -1);
  std::map<std::pair<int, int>, int> pairCount;
  for (int v = 0; v < n; ++v)
    for (auto& r : spec.nodes[v].in) ++pairCount[{r.node, v}];
  std::map<std::pair<int, int>, int> pairSeen;
  for (int v = 0; v < n; ++v)
    for (size_t k = 0; k < spec.nodes[v].in.size(); ++k) {
      PortRef r = spec.nodes[v].in[k];
      CircuitEdge e;
      e.from = r;
      e.to = v;
      e.toSlot = static_cast<int>(k);
      e.sub = {r.node, v};
      if (pairCount[{r.node, v}] > 1) e.sub.push_back(pairSeen[{r.node, v}]++);
      int id = static_cast<int>(tbn.edges.size());
      tbn.edges.push_back(e);
      tbn.inEdges[v].push_back(id);
      if (spec.nodes[r.node].kind == NodeKind::Gate)
        tbn.outEdges[r.node][r.port] = id;
      else
        tbn.outEdges[r.node].push_back(id);
    }

  Collection& C = tbn.types;
  {
    std::vector<Domain> ds;
    for (int a : spec.inputs)
      for (int e : tbn.outEdges[a]) ds.push_back(tbn.edges[e].value(ev.out[a][0]).complement());
    for (int u : spec.outputs) ds.push_back(helper(u, false));
    tbn.seedType = C.add_type(make_monomer("seed", ds, Role::Seed), 1);
  }
  tbn.gateTypes.assign(n, {});
  tbn.endTypes.assign(n, {-1, -1});
  std::vector<std::pair<int, std::vector<Domain>>> capSpecs;  // target, its input domains
  for (int v = 0; v < n; ++v) {
    const auto& node = spec.nodes[v];
    if (node.kind == NodeKind::Gate) {
      const int fanIn = static_cast<int>(node.in.size());
      for (int p = 0; p < (1 << fanIn); ++p) {
        std::string bits = pattern_bits(p, fanIn);
        std::vector<Domain> ins, ds;
        for (int k = 0; k < fanIn; ++k) ins.push_back(tbn.edges[tbn.inEdges[v][k]].value(bits[k]));
        ds = ins;
        for (int j = 0; j < node.outputs; ++j) ds.push_back(tbn.edges[tbn.outEdges[v][j]].value(node.table[p][j]).complement());
        int id = C.add_type(make_monomer(node.name + "_" + bits, ds, Role::Gate), 1);
        tbn.gateTypes[v].push_back(id);
        tbn.gateMonomers.push_back(id);
        capSpecs.push_back({id, ins});
      }
    } else if (node.kind == NodeKind::Output) {
      const CircuitEdge& e = tbn.edges[tbn.inEdges[v][0]];
      for (char b : {'0', '1'}) {
        int id = C.add_type(make_monomer("end_" + node.name + "_" + b, {e.value(b), helper(v, true)}, Role::End), 1);
        tbn.endTypes[v][b - '0'] = id;
        tbn.endMonomers.push_back(id);
        capSpecs.push_back({id, {e.value(b)}});
      }
    }
  }
  for (auto& [target, ins] : capSpecs) {
    std::vector<Domain> ds;
    for (auto& d : ins) ds.push_back(d.complement());
    int id = C.add_type(make_monomer("k_" + C.type(target).name, ds, Role::Cap), 1);
    tbn.capTypes.push_back(id);
    if (static_cast<int>(tbn.capOf.size()) <= target) tbn.capOf.resize(target + 1, -1);
    tbn.capOf[target] = id;
  }
  tbn.capOf.resize(C.num_types(), -1);
  return tbn;
}

Collection apply_circuit_counts(const CircuitTbn& tbn, const CountsPolicy& counts) {
  Collection c = tbn.types;
  for (int t = 0; t < c.num_types(); ++t) {
    Role r = c.type(t).role;
    c.set_count(t, r == Role::Seed ? counts.seed : r == Role::Cap ? counts.cap : counts.comp);
  }
  for (auto& [name, k] : counts.overrides) {
    auto t = c.find_type(name);
    if (!t) throw Error(ErrorCode::InvalidArgument, "count override for unknown monomer '" + name + "'");
    c.set_count(*t, k);
  }
  int64_t cmin = INT64_MAX, kmin = INT64_MAX;
  for (int t : tbn.gateMonomers) cmin = std::min(cmin, c.count(t));
  for (int t : tbn.endMonomers) cmin = std::min(cmin, c.count(t));
  for (int t : tbn.capTypes) kmin = std::min(kmin, c.count(t));
  int64_t seeds = c.count(tbn.seedType);
  if (!(seeds <= cmin && cmin <= kmin))
    throw Error(ErrorCode::CountsViolation, "counts must satisfy #seed <= c_min <= k_min, got " +
                                                std::to_string(seeds) + ", " + std::to_string(cmin) + ", " +
                                                std::to_string(kmin));
  return c;
}

namespace {

class Slots {
 public:
  explicit Slots(const Collection& c) : c_(c) {}
  SlotRef take(int inst, const Domain& d) {
    const auto& ds = c_.instance_type(inst).domains;
    for (size_t k = 0; k < ds.size(); ++k)
      if (ds[k] == d && used_.insert({inst, static_cast<int>(k)}).second) return {inst, static_cast<int>(k)};
    throw Error(ErrorCode::InvalidCircuit, "monomer '" + c_.instance_type(inst).name + "' has no free " + d.str());
  }

 private:
  const Collection& c_;
  std::set<std::pair<int, int>> used_;
};

}  // namespace

CanonicalConfig canonical_circuit_config(const CircuitTbn& tbn, const CountsPolicy& counts) {
  CanonicalConfig out;
  out.collection = apply_circuit_counts(tbn, counts);
  const Collection& c = out.collection;
  const CircuitSpec& spec = tbn.spec;
  Evaluation ev = evaluate(spec, tbn.input);
  Slots slots(c);
  std::vector<int64_t> used(c.num_types(), 0);
  auto instance = [&](int type) {
    if (used[type] >= c.count(type))
      throw Error(ErrorCode::CountsViolation, "not enough copies of '" + c.type(type).name + "'");
    return c.first_instance(type) + static_cast<int>(used[type]++);
  };
  const auto order = topo_order(spec);
  for (int64_t k = 0; k < c.count(tbn.seedType); ++k) {
    int seed = c.first_instance(tbn.seedType) + static_cast<int>(k);
    std::vector<int> inst(spec.nodes.size(), seed);
    for (int v : order) {
      const auto& node = spec.nodes[v];
      if (node.kind == NodeKind::Input) continue;
      int type = node.kind == NodeKind::Gate ? tbn.gateTypes[v][ev.pattern[v]] : tbn.endTypes[v][ev.out[v][0] - '0'];
      inst[v] = instance(type);
      for (size_t s = 0; s < node.in.size(); ++s) {
        PortRef r = node.in[s];
        Domain d = tbn.edges[tbn.inEdges[v][s]].value(ev.out[r.node][r.port]);
        out.config.add(slots.take(inst[v], d), slots.take(inst[r.node], d.complement()));
      }
      if (node.kind == NodeKind::Output) out.config.add(slots.take(inst[v], helper(v, true)), slots.take(seed, helper(v, false)));
    }
  }
  std::vector<int> targets = tbn.gateMonomers;
  targets.insert(targets.end(), tbn.endMonomers.begin(), tbn.endMonomers.end());
  for (int t : targets) {
    int cap = tbn.capOf[t];
    for (int64_t j = used[t]; j < c.count(t); ++j) {
      int m = c.first_instance(t) + static_cast<int>(j);
      int k = c.first_instance(cap) + static_cast<int>(j);
      for (auto& d : c.type(cap).domains) out.config.add(slots.take(m, d.complement()), slots.take(k, d));
    }
  }
  out.config.normalise();
  for (auto& p : polymers(c, out.config)) {
    int anchor = p.members.front();
    for (int m : p.members)
      if (c.instance_type(m).role == Role::Seed) anchor = m;
    if (c.instance_type(anchor).role != Role::Seed)
      for (int m : p.members)
        if (c.instance_type(m).role == Role::Cap) {
          anchor = m;
          break;
        }
    out.cert.anchors.push_back(anchor);
  }
  out.cert.claimedEntropy = static_cast<int64_t>(out.cert.anchors.size());
  return out;
}

std::optional<std::string> decode_circuit_output(const CircuitTbn& tbn, const std::vector<MonomerType>& monomers) {
  std::map<int, char> byNode;
  for (auto& m : monomers) {
    if (m.role != Role::End) continue;
    int node = -1;
    char bit = 0;
    for (auto& d : m.domains) {
      if (d.star && d.name.base == "g" && d.name.sub.size() == 1) node = d.name.sub[0];
      if (!d.star && (d.name.base == "0" || d.name.base == "1")) bit = d.name.base[0];
    }
    if (node < 0 || !bit || !byNode.emplace(node, bit).second) return std::nullopt;
  }
  if (byNode.size() != tbn.spec.outputs.size()) return std::nullopt;
  std::string out;
  for (int u : tbn.spec.outputs) {
    auto it = byNode.find(u);
    if (it == byNode.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

std::optional<std::string> decode_circuit_input(const CircuitTbn& tbn, const std::vector<MonomerType>& monomers) {
  const MonomerType* seed = nullptr;
  for (auto& m : monomers)
    if (m.role == Role::Seed) {
      if (seed) return std::nullopt;
      seed = &m;
    }
  if (!seed) return std::nullopt;
  std::map<int, char> bits;
  for (auto& d : seed->domains) {
    if (!d.star || d.name.sub.size() < 2) continue;
    auto [it, fresh] = bits.emplace(d.name.sub[0], d.name.base[0]);
    if (!fresh && it->second != d.name.base[0]) return std::nullopt;
  }
  std::string out;
  for (int a : tbn.spec.inputs) {
    auto it = bits.find(a);
    if (it == bits.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

VerifyReport verify_circuit_simulation(const Collection& c, const CircuitTbn& tbn, VerifyMode mode,
                                       const SolveLimits& limits) {
  VerifyReport rep;
  rep.expectedOutput = eval_circuit(tbn.spec, tbn.input);
  auto check = [&](const Configuration& a) {
    for (auto& p : polymers(c, a)) {
      std::vector<MonomerType> ms;
      bool hasSeed = false;
      for (int m : p.members) {
        ms.push_back(c.instance_type(m));
        hasSeed |= ms.back().role == Role::Seed;
      }
      if (!hasSeed) continue;
      auto in = decode_circuit_input(tbn, ms);
      auto out = decode_circuit_output(tbn, ms);
      rep.decodedOutput = out.value_or("<undefined>");
      if (!in || *in != tbn.input || !out || *out != rep.expectedOutput) {
        rep.code = ErrorCode::SimulationViolated;
        rep.message = "seed polymer decodes input '" + in.value_or("<undefined>") + "' output '" + rep.decodedOutput +
                      "', expected '" + tbn.input + "' -> '" + rep.expectedOutput + "'";
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
      if (!check(a)) return rep;
    rep.message = std::to_string(rep.stableClasses) + " stable class(es), all seed polymers decode correctly";
    return rep;
  }
  CountsPolicy counts;
  for (int t = 0; t < c.num_types(); ++t) counts.overrides[c.type(t).name] = c.count(t);
  CanonicalConfig cc = canonical_circuit_config(tbn, counts);
  rep.H = enthalpy(cc.config);
  rep.S = entropy(c, cc.config);
  auto verdict = check_entropy_certificate(c, cc.config, cc.cert);
  if (!verdict.ok()) {
    rep.code = ErrorCode::SimulationViolated;
    rep.message = "certificate rejected: " + verdict.reason;
    return rep;
  }
  if (!check(cc.config)) return rep;
  rep.stableClasses = 1;
  rep.message = "certificate accepted, seed polymers decode correctly";
  return rep;
}

}  // namespace tbnlab
