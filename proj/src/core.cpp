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
#include "tbnlab/core.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "util.hpp"

namespace tbnlab {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotSaturated: return "NotSaturated";
    case ErrorCode::EntropyBelowBound: return "EntropyBelowBound";
    case ErrorCode::BadAnchor: return "BadAnchor";
    case ErrorCode::InvalidTM: return "InvalidTM";
    case ErrorCode::NondeterministicAttachment: return "NondeterministicAttachment";
    case ErrorCode::InputTooLong: return "InputTooLong";
    case ErrorCode::NotHaltingWithinBounds: return "NotHaltingWithinBounds";
    case ErrorCode::CountsViolation: return "CountsViolation";
    case ErrorCode::OutOfGrid: return "OutOfGrid";
    case ErrorCode::SimulationViolated: return "SimulationViolated";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::InvalidCircuit: return "InvalidCircuit";
    case ErrorCode::WitnessInvalid: return "WitnessInvalid";
    case ErrorCode::NotComplete: return "NotComplete";
    case ErrorCode::MalformedPolymer: return "MalformedPolymer";
    case ErrorCode::NonDeterministicCorner: return "NonDeterministicCorner";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- names

namespace {

bool special_char(char ch) {
  return ch == '_' || ch == '(' || ch == ')' || ch == '*' || ch == ',' || ch == '[' ||
         ch == ']' || ch == ':' || std::isspace(static_cast<unsigned char>(ch));
}

bool needs_brackets(const std::string& base, Orient o) {
  if (base.empty()) return true;
  for (char ch : base)
    if (special_char(ch)) return true;
  if (o == Orient::None && base.size() >= 2 && (base.back() == 'h' || base.back() == 'v'))
    return true;
  return false;
}

}  // namespace

std::string DomainName::str() const {
  if (base.find(']') != std::string::npos)
    throw Error(ErrorCode::InvalidArgument, "domain base may not contain ']'");
  std::string out;
  if (needs_brackets(base, orient))
    out = "[" + base + "]";
  else
    out = base;
  if (orient != Orient::None) out.push_back(static_cast<char>(orient));
  if (!sub.empty()) {
    out += "_(";
    for (size_t i = 0; i < sub.size(); ++i) {
      if (i) out.push_back(',');
      out += std::to_string(sub[i]);
    }
    out.push_back(')');
  }
  return out;
}

DomainName DomainName::parse(std::string_view text) {
  std::string t(trim(text));
  if (t.empty()) throw Error(ErrorCode::Parse, "empty domain name");
  DomainName n;
  if (t.back() == ')') {
    auto pos = t.rfind("_(");
    if (pos == std::string::npos) throw Error(ErrorCode::Parse, "bad subscript in '" + t + "'");
    std::string inner = t.substr(pos + 2, t.size() - pos - 3);
    for (auto& part : split(inner, ',')) n.sub.push_back(parse_int(part));
    t = t.substr(0, pos);
  }
  if (!t.empty() && t.front() == '[') {
    auto close = t.find(']');
    if (close == std::string::npos) throw Error(ErrorCode::Parse, "unclosed '[' in domain");
    n.base = t.substr(1, close - 1);
    std::string rest = t.substr(close + 1);
    if (rest == "h")
      n.orient = Orient::H;
    else if (rest == "v")
      n.orient = Orient::V;
    else if (!rest.empty())
      throw Error(ErrorCode::Parse, "bad orientation '" + rest + "'");
  } else {
    if (t.size() >= 2 && (t.back() == 'h' || t.back() == 'v')) {
      n.orient = static_cast<Orient>(t.back());
      t.pop_back();
    }
    for (char ch : t)
      if (special_char(ch)) throw Error(ErrorCode::Parse, "bad character in domain '" + t + "'");
    n.base = t;
  }
  if (n.base.empty()) throw Error(ErrorCode::Parse, "empty domain base");
  return n;
}

std::string Domain::str() const { return name.str() + (star ? "*" : ""); }

Domain Domain::parse(std::string_view text) {
  auto t = trim(text);
  bool star = false;
  if (!t.empty() && t.back() == '*') {
    star = true;
    t.remove_suffix(1);
  }
  return Domain(DomainName::parse(t), star);
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Generic: return "generic";
    case Role::Seed: return "seed";
    case Role::Comp: return "comp";
    case Role::End: return "end";
    case Role::Cap: return "cap";
    case Role::Gate: return "gate";
  }
  return "generic";
}

std::optional<Role> parse_role(std::string_view s) {
  for (Role r : {Role::Generic, Role::Seed, Role::Comp, Role::End, Role::Cap, Role::Gate})
    if (s == role_name(r)) return r;
  return std::nullopt;
}

MonomerType make_monomer(std::string name, std::vector<Domain> domains, Role role) {
  std::vector<std::pair<std::string, Domain>> keyed;
  keyed.reserve(domains.size());
  for (auto& d : domains) keyed.emplace_back(d.str(), d);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  MonomerType m;
  m.name = std::move(name);
  m.role = role;
  for (auto& [k, d] : keyed) m.domains.push_back(d);
  return m;
}

// ---------------------------------------------------------------- collection

int Collection::add_type(MonomerType t, int64_t count) {
  if (t.domains.empty()) throw Error(ErrorCode::InvalidArgument, "monomer '" + t.name + "' has no domains");
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "negative count");
  if (t.name.empty()) throw Error(ErrorCode::InvalidArgument, "empty monomer name");
  if (byName_.count(t.name)) throw Error(ErrorCode::InvalidArgument, "duplicate monomer name '" + t.name + "'");
  byName_[t.name] = static_cast<int>(types_.size());
  types_.push_back(std::move(t));
  counts_.push_back(count);
  rebuild();
  return static_cast<int>(types_.size()) - 1;
}

void Collection::set_count(int i, int64_t n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative count");
  counts_.at(i) = n;
  rebuild();
}

std::optional<int> Collection::find_type(std::string_view name) const {
  auto it = byName_.find(std::string(name));
  if (it == byName_.end()) return std::nullopt;
  return it->second;
}

void Collection::rebuild() {
  first_.assign(types_.size() + 1, 0);
  for (size_t i = 0; i < types_.size(); ++i) first_[i + 1] = first_[i] + counts_[i];
}

int Collection::type_of(int inst) const {
  if (inst < 0 || inst >= num_instances()) throw Error(ErrorCode::InvalidArgument, "instance out of range");
  auto it = std::upper_bound(first_.begin(), first_.end(), static_cast<int64_t>(inst));
  return static_cast<int>(it - first_.begin()) - 1;
}

// ---------------------------------------------------------------- configuration

Bond make_bond(SlotRef x, SlotRef y) {
  if (y < x) std::swap(x, y);
  return Bond{x, y};
}

void Configuration::normalise() {
  for (auto& b : bonds) b = make_bond(b.a, b.b);
  std::sort(bonds.begin(), bonds.end());
}

int64_t max_bond_count(const Collection& c) {
  std::map<DomainName, std::pair<int64_t, int64_t>> tally;
  for (int t = 0; t < c.num_types(); ++t)
    for (auto& d : c.type(t).domains) {
      auto& e = tally[d.name];
      (d.star ? e.second : e.first) += c.count(t);
    }
  int64_t total = 0;
  for (auto& [n, e] : tally) total += std::min(e.first, e.second);
  return total;
}

int64_t enthalpy(const Configuration& a) { return static_cast<int64_t>(a.bonds.size()); }

std::vector<Polymer> polymers(const Collection& c, const Configuration& a) {
  int n = c.num_instances();
  DisjointSets ds(n);
  for (auto& b : a.bonds) ds.unite(b.a.inst, b.b.inst);
  std::vector<int> compOf(n, -1);
  std::vector<Polymer> out;
  for (int i = 0; i < n; ++i) {
    int r = ds.find(i);
    if (compOf[r] < 0) {
      compOf[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[compOf[r]].members.push_back(i);
  }
  for (auto& b : a.bonds) out[compOf[ds.find(b.a.inst)]].bonds.push_back(b);
  return out;
}

int64_t entropy(const Collection& c, const Configuration& a) {
  if (c.num_instances() == 0) throw Error(ErrorCode::EmptyCollection, "entropy of an empty collection");
  DisjointSets ds(c.num_instances());
  int64_t comps = c.num_instances();
  for (auto& b : a.bonds)
    if (ds.unite(b.a.inst, b.b.inst)) --comps;
  return comps;
}

bool is_saturated(const Collection& c, const Configuration& a) {
  return enthalpy(a) == max_bond_count(c);
}

std::vector<std::string> validate_configuration(const Collection& c, const Configuration& a) {
  std::vector<std::string> out;
  std::set<SlotRef> used;
  int n = c.num_instances();
  auto slotOk = [&](const SlotRef& s) {
    if (s.inst < 0 || s.inst >= n) {
      out.push_back("unknown instance #" + std::to_string(s.inst));
      return false;
    }
    int k = static_cast<int>(c.instance_type(s.inst).domains.size());
    if (s.slot < 0 || s.slot >= k) {
      out.push_back("unknown slot #" + std::to_string(s.inst) + "." + std::to_string(s.slot));
      return false;
    }
    return true;
  };
  for (auto& b : a.bonds) {
    bool ok = slotOk(b.a);
    ok = slotOk(b.b) && ok;
    if (!ok) continue;
    std::string tag = "(#" + std::to_string(b.a.inst) + "." + std::to_string(b.a.slot) + ")-(#" +
                      std::to_string(b.b.inst) + "." + std::to_string(b.b.slot) + ")";
    const Domain& x = c.instance_type(b.a.inst).domains[b.a.slot];
    const Domain& y = c.instance_type(b.b.inst).domains[b.b.slot];
    if (!x.binds(y)) out.push_back("non-complementary bond " + tag);
    for (const SlotRef& s : {b.a, b.b})
      if (!used.insert(s).second)
        out.push_back("not a matching: slot #" + std::to_string(s.inst) + "." + std::to_string(s.slot) +
                      " bound twice");
  }
  return out;
}

// ---------------------------------------------------------------- canonical form

namespace {

struct LocalGraph {
  std::vector<int> typeOf;                   // per local vertex
  std::vector<std::tuple<int, int, int>> e;  // (primary holder, star holder, label)
  std::vector<std::vector<std::tuple<int, int, int>>> adj;  // (label, dir, nbr)
};

std::vector<int> refine(const LocalGraph& g, std::vector<int> color) {
  size_t n = color.size();
  size_t classes = std::set<int>(color.begin(), color.end()).size();
  while (true) {
    std::vector<std::pair<std::vector<int>, int>> sig(n);
    for (size_t v = 0; v < n; ++v) {
      std::vector<std::tuple<int, int, int>> nb;
      nb.reserve(g.adj[v].size());
      for (auto& [lab, dir, w] : g.adj[v]) nb.emplace_back(lab, dir, color[w]);
      std::sort(nb.begin(), nb.end());
      std::vector<int> s{color[v]};
      for (auto& [x, y, z] : nb) {
        s.push_back(x);
        s.push_back(y);
        s.push_back(z);
      }
      sig[v] = {std::move(s), static_cast<int>(v)};
    }
    std::vector<std::vector<int>> uniq;
    uniq.reserve(n);
    for (auto& s : sig) uniq.push_back(s.first);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<int> next(n);
    for (size_t v = 0; v < n; ++v)
      next[v] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), sig[v].first) - uniq.begin());
    color.swap(next);
    if (uniq.size() == classes) return color;
    classes = uniq.size();
  }
}

std::string render(const LocalGraph& g, const std::vector<int>& color) {
  size_t n = color.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return color[x] < color[y]; });
  std::vector<int> pos(n);
  for (size_t i = 0; i < n; ++i) pos[order[i]] = static_cast<int>(i);
  std::vector<std::tuple<int, int, int>> edges;
  for (auto& [p, q, lab] : g.e) edges.emplace_back(pos[p], pos[q], lab);
  std::sort(edges.begin(), edges.end());
  std::string s;
  for (size_t i = 0; i < n; ++i) {
    s += std::to_string(g.typeOf[order[i]]);
    s.push_back(',');
  }
  s.push_back('|');
  for (auto& [p, q, lab] : edges) {
    s += std::to_string(p) + ">" + std::to_string(q) + ":" + std::to_string(lab) + ";";
  }
  return s;
}

std::string search_canon(const LocalGraph& g, std::vector<int> color, long& budget) {
  color = refine(g, std::move(color));
  size_t n = color.size();
  std::map<int, std::vector<int>> cells;
  for (size_t v = 0; v < n; ++v) cells[color[v]].push_back(static_cast<int>(v));
  const std::vector<int>* target = nullptr;
  for (auto& [col, vs] : cells)
    if (vs.size() > 1) {
      target = &vs;
      break;
    }
  if (!target) return render(g, color);
  std::string best;
  bool have = false;
  for (int v : *target) {
    if (--budget < 0) throw Error(ErrorCode::BudgetExceeded, "canonical labelling budget exhausted");
    std::vector<int> c2(n);
    for (size_t w = 0; w < n; ++w) c2[w] = color[w] * 2 + 1;
    c2[v] = color[v] * 2;
    std::string s = search_canon(g, std::move(c2), budget);
    if (!have || s < best) {
      best = std::move(s);
      have = true;
    }
  }
  return best;
}

}  // namespace

std::string canonical_polymer_key(const Collection& c, const Polymer& p) {
  LocalGraph g;
  std::unordered_map<int, int> local;
  for (size_t i = 0; i < p.members.size(); ++i) {
    local[p.members[i]] = static_cast<int>(i);
    g.typeOf.push_back(c.type_of(p.members[i]));
  }
  // Labels are the domain-name strings themselves, interned in sorted order so the
  // numbering does not depend on instance ids.
  std::vector<std::string> names;
  for (auto& b : p.bonds) names.push_back(c.instance_type(b.a.inst).domains[b.a.slot].name.str());
  std::vector<std::string> sortedNames = names;
  std::sort(sortedNames.begin(), sortedNames.end());
  sortedNames.erase(std::unique(sortedNames.begin(), sortedNames.end()), sortedNames.end());
  g.adj.resize(p.members.size());
  for (size_t i = 0; i < p.bonds.size(); ++i) {
    const Bond& b = p.bonds[i];
    bool aStar = c.instance_type(b.a.inst).domains[b.a.slot].star;
    int prim = local.at(aStar ? b.b.inst : b.a.inst);
    int star = local.at(aStar ? b.a.inst : b.b.inst);
    int lab = static_cast<int>(std::lower_bound(sortedNames.begin(), sortedNames.end(), names[i]) -
                               sortedNames.begin());
    g.e.emplace_back(prim, star, lab);
    g.adj[prim].emplace_back(lab, 0, star);
    g.adj[star].emplace_back(lab, 1, prim);
  }
  long budget = 200000;
  std::string body = search_canon(g, g.typeOf, budget);
  std::string labels;
  for (auto& s : sortedNames) labels += s + ";";
  return body + "|" + labels;
}

std::string canonical_key(const Collection& c, const Configuration& a) {
  std::vector<std::string> keys;
  for (auto& p : polymers(c, a)) {
    if (p.bonds.empty())
      keys.push_back(std::to_string(c.type_of(p.members[0])) + ",||");
    else
      keys.push_back(canonical_polymer_key(c, p));
  }
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (auto& k : keys) {
    out += k;
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------- text formats

std::string dump_collection(const Collection& c) {
  std::ostringstream os;
  for (int t = 0; t < c.num_types(); ++t) {
    const auto& m = c.type(t);
    os << m.name;
    if (c.count(t) != 1) os << " x" << c.count(t);
    if (m.role != Role::Generic) os << " @" << role_name(m.role);
    os << ":";
    for (size_t i = 0; i < m.domains.size(); ++i) os << (i ? "," : " ") << m.domains[i].str();
    os << "\n";
  }
  return os.str();
}

namespace {

void parse_collection_line(Collection& c, const std::string& line, int lineNo) {
  auto colon = line.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorCode::Parse, "line " + std::to_string(lineNo) + ": expected ':'");
  auto head = split_ws(line.substr(0, colon));
  if (head.empty()) throw Error(ErrorCode::Parse, "line " + std::to_string(lineNo) + ": missing name");
  std::string name = head[0];
  int64_t count = 1;
  Role role = Role::Generic;
  for (size_t i = 1; i < head.size(); ++i) {
    const std::string& tok = head[i];
    if (tok.size() > 1 && tok[0] == 'x') {
      count = parse_int(tok.substr(1));
    } else if (tok.size() > 1 && tok[0] == '@') {
      auto r = parse_role(tok.substr(1));
      if (!r) throw Error(ErrorCode::Parse, "line " + std::to_string(lineNo) + ": unknown role " + tok);
      role = *r;
    } else {
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineNo) + ": unexpected token '" + tok + "'");
    }
  }
  std::vector<Domain> ds;
  for (auto& part : split_top(line.substr(colon + 1), ',')) {
    if (trim(part).empty()) continue;
    ds.push_back(Domain::parse(part));
  }
  c.add_type(make_monomer(name, std::move(ds), role), count);
}

SlotRef parse_slot(std::string_view s) {
  // "(#i.slot)"
  auto t = trim(s);
  if (t.size() < 5 || t.front() != '(' || t[1] != '#' || t.back() != ')')
    throw Error(ErrorCode::Parse, "bad slot reference '" + std::string(t) + "'");
  auto inner = t.substr(2, t.size() - 3);
  auto dot = inner.find('.');
  if (dot == std::string_view::npos) throw Error(ErrorCode::Parse, "bad slot reference");
  return SlotRef{static_cast<int>(parse_int(inner.substr(0, dot))),
                 static_cast<int>(parse_int(inner.substr(dot + 1)))};
}

}  // namespace

Collection parse_collection(std::string_view text) {
  Collection c;
  int lineNo = 0;
  for (auto& raw : split_lines(text)) {
    ++lineNo;
    std::string line = strip_comment(raw);
    if (trim(line).empty()) continue;
    parse_collection_line(c, line, lineNo);
  }
  return c;
}

std::string dump_bonds(const Configuration& a) {
  std::ostringstream os;
  for (auto& b : a.bonds)
    os << "(#" << b.a.inst << "." << b.a.slot << ")-(#" << b.b.inst << "." << b.b.slot << ")\n";
  return os.str();
}

Configuration parse_bonds(std::string_view text) {
  Configuration a;
  for (auto& raw : split_lines(text)) {
    std::string line = strip_comment(raw);
    auto t = trim(line);
    if (t.empty()) continue;
    auto mid = t.find(")-(");
    if (mid == std::string_view::npos) throw Error(ErrorCode::Parse, "bad bond line '" + std::string(t) + "'");
    a.add(parse_slot(t.substr(0, mid + 1)), parse_slot(t.substr(mid + 2)));
  }
  a.normalise();
  return a;
}

std::string dump_document(const Collection& c, const Configuration& a) {
  return dump_collection(c) + "---\n" + dump_bonds(a);
}

std::string dump_polymer(const Collection& c, const Polymer& p) {
  // Members are sorted by instance id, so same-type copies are contiguous.
  Collection sub;
  std::map<int, int> local;
  std::map<int, int> typeIdx;
  std::vector<int64_t> counts;
  for (int m : p.members) {
    int t = c.type_of(m);
    auto it = typeIdx.find(t);
    if (it == typeIdx.end()) {
      it = typeIdx.emplace(t, static_cast<int>(counts.size())).first;
      counts.push_back(0);
    }
    ++counts[it->second];
  }
  for (auto& [t, k] : typeIdx) sub.add_type(c.type(t), counts[k]);
  std::vector<int64_t> used(counts.size(), 0);
  for (int m : p.members) {
    int k = typeIdx.at(c.type_of(m));
    local[m] = sub.first_instance(k) + static_cast<int>(used[k]++);
  }
  Configuration a;
  for (auto& b : p.bonds) a.add({local.at(b.a.inst), b.a.slot}, {local.at(b.b.inst), b.b.slot});
  a.normalise();
  return dump_document(sub, a);
}

std::pair<Collection, Configuration> parse_document(std::string_view text) {
  std::string head, tail;
  bool inBonds = false;
  for (auto& raw : split_lines(text)) {
    if (!inBonds && trim(raw) == "---") {
      inBonds = true;
      continue;
    }
    (inBonds ? tail : head) += raw + "\n";
  }
  return {parse_collection(head), parse_bonds(tail)};
}

}  // namespace tbnlab
