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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tbnlab/error.hpp"

namespace tbnlab {

enum class Orient : char { None = 0, H = 'h', V = 'v' };

// Structured domain name: base label, orientation tag, optional integer subscript.
// Canonical text: base, then orientation letter, then "_(a,b,...)" when subscripted.
// The base is bracketed when it would otherwise be ambiguous.
struct DomainName {
  std::string base;
  Orient orient = Orient::None;
  std::vector<int> sub;

  DomainName() = default;
  explicit DomainName(std::string b, Orient o = Orient::None, std::vector<int> s = {})
      : base(std::move(b)), orient(o), sub(std::move(s)) {}

  std::string str() const;
  static DomainName parse(std::string_view text);

  bool has_loc() const { return sub.size() == 2; }
  std::pair<int, int> loc() const { return {sub.at(0), sub.at(1)}; }

  auto operator<=>(const DomainName&) const = default;
};

struct Domain {
  DomainName name;
  bool star = false;

  Domain() = default;
  Domain(DomainName n, bool s) : name(std::move(n)), star(s) {}

  Domain complement() const { return Domain(name, !star); }
  bool binds(const Domain& o) const { return name == o.name && star != o.star; }
  std::string str() const;
  static Domain parse(std::string_view text);

  auto operator<=>(const Domain&) const = default;
};

inline Domain complement(const Domain& d) { return d.complement(); }

enum class Role { Generic, Seed, Comp, End, Cap, Gate };
const char* role_name(Role r);
std::optional<Role> parse_role(std::string_view s);

struct MonomerType {
  std::string name;
  std::vector<Domain> domains;  // canonical (sorted) order; slot i is domains[i]
  Role role = Role::Generic;
};

// Builds a monomer type with its domains in canonical slot order.
MonomerType make_monomer(std::string name, std::vector<Domain> domains, Role role = Role::Generic);

// Count vector over monomer types. Type index order is the canonical type order;
// instance ids are assigned by (type index, copy index).
class Collection {
 public:
  int add_type(MonomerType t, int64_t count);
  int num_types() const { return static_cast<int>(types_.size()); }
  const MonomerType& type(int i) const { return types_.at(i); }
  const std::vector<MonomerType>& types() const { return types_; }
  int64_t count(int i) const { return counts_.at(i); }
  void set_count(int i, int64_t n);
  std::optional<int> find_type(std::string_view name) const;

  int num_instances() const { return first_.empty() ? 0 : static_cast<int>(first_.back()); }
  int type_of(int inst) const;
  int first_instance(int type) const { return static_cast<int>(first_.at(type)); }
  const MonomerType& instance_type(int inst) const { return types_[type_of(inst)]; }

 private:
  void rebuild();
  std::vector<MonomerType> types_;
  std::vector<int64_t> counts_;
  std::vector<int64_t> first_;  // prefix sums, size num_types+1
  std::unordered_map<std::string, int> byName_;
};

struct SlotRef {
  int inst = -1;
  int slot = -1;
  auto operator<=>(const SlotRef&) const = default;
};

struct Bond {
  SlotRef a, b;  // a < b after normalisation
  auto operator<=>(const Bond&) const = default;
};

Bond make_bond(SlotRef x, SlotRef y);

struct Configuration {
  std::vector<Bond> bonds;  // sorted, normalised
  void normalise();
  void add(SlotRef x, SlotRef y) { bonds.push_back(make_bond(x, y)); }
  bool operator==(const Configuration&) const = default;
};

struct Polymer {
  std::vector<int> members;  // sorted instance ids
  std::vector<Bond> bonds;   // bonds among members
};

int64_t max_bond_count(const Collection& c);
int64_t enthalpy(const Configuration& a);
int64_t entropy(const Collection& c, const Configuration& a);
bool is_saturated(const Collection& c, const Configuration& a);
std::vector<Polymer> polymers(const Collection& c, const Configuration& a);
// Every violated configuration invariant; empty means well formed.
std::vector<std::string> validate_configuration(const Collection& c, const Configuration& a);

// Symmetry-invariant key: equal iff the configurations differ only by permuting
// same-type instances and identical slots within a monomer.
std::string canonical_key(const Collection& c, const Configuration& a);
std::string canonical_polymer_key(const Collection& c, const Polymer& p);

// Text formats.
std::string dump_collection(const Collection& c);
Collection parse_collection(std::string_view text);
std::string dump_bonds(const Configuration& a);
Configuration parse_bonds(std::string_view text);
// Collection, then a "---" line, then bond lines.
std::string dump_document(const Collection& c, const Configuration& a);
std::pair<Collection, Configuration> parse_document(std::string_view text);
// One polymer as a standalone document.
std::string dump_polymer(const Collection& c, const Polymer& p);

}  // namespace tbnlab
