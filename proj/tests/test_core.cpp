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
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tbnlab/core.hpp"

using namespace tbnlab;

namespace {
Domain D(const char* s) { return Domain::parse(s); }
Collection coll(std::initializer_list<std::pair<std::vector<const char*>, int>> spec) {
  Collection c;
  int k = 0;
  for (auto& [ds, n] : spec) {
    std::vector<Domain> v;
    for (auto* d : ds) v.push_back(D(d));
    c.add_type(make_monomer("m" + std::to_string(k++), v), n);
  }
  return c;
}
}  // namespace

TEST_CASE("complement flips polarity and keeps the name") {
  CHECK(complement(D("a")) == D("a*"));
  CHECK(complement(D("a*")) == D("a"));
  Domain x = D("bv_(3,1)");
  CHECK(x.name.orient == Orient::V);
  CHECK(x.name.loc() == std::pair{3, 1});
  CHECK(complement(x).str() == "bv_(3,1)*");
  CHECK(complement(complement(x)) == x);
  CHECK(D("a").binds(D("a*")));
  CHECK_FALSE(D("a").binds(D("a")));
  CHECK_FALSE(D("a").binds(D("b*")));
}

TEST_CASE("domain names round trip") {
  for (const char* s : {"a", "1h_(0,3)", "[(q,a)]v_(2,1)", "g_(4)", "qH0", "[ah]", "x_(1,2,3)*", "[a b]h"}) {
    Domain d = D(s);
    CHECK(Domain::parse(d.str()) == d);
  }
  DomainName n("ah");
  CHECK(DomainName::parse(n.str()) == n);
  DomainName m("a", Orient::H);
  CHECK(DomainName::parse(m.str()) == m);
  CHECK(m.str() != n.str());
}

TEST_CASE("max bond count") {
  CHECK(max_bond_count(coll({{{"a"}, 1}, {{"a*"}, 1}})) == 1);
  CHECK(max_bond_count(coll({{{"a"}, 2}, {{"a*"}, 1}})) == 1);
  CHECK(max_bond_count(Collection{}) == 0);
}

TEST_CASE("enthalpy, entropy, saturation") {
  Collection c = coll({{{"a"}, 1}, {{"a*"}, 1}});
  Configuration none;
  CHECK(enthalpy(none) == 0);
  CHECK(entropy(c, none) == 2);
  CHECK_FALSE(is_saturated(c, none));
  Configuration one;
  one.add({0, 0}, {1, 0});
  CHECK(enthalpy(one) == 1);
  CHECK(entropy(c, one) == 1);
  CHECK(is_saturated(c, one));
  CHECK(is_saturated(coll({{{"a"}, 1}, {{"b"}, 1}}), none));
  CHECK(entropy(coll({{{"a"}, 3}}), none) == 3);
  CHECK_THROWS_AS(entropy(Collection{}, none), Error);
}

TEST_CASE("polymers partition in canonical order") {
  Collection c = coll({{{"a", "b"}, 1}, {{"a*"}, 1}, {{"b*"}, 1}});
  Configuration a;
  a.add({0, 0}, {1, 0});
  a.add({0, 1}, {2, 0});
  a.normalise();
  auto ps = polymers(c, a);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].members.size() == 3);
  CHECK(polymers(coll({{{"a"}, 2}}), {}).size() == 2);
}

TEST_CASE("validate_configuration reports violations") {
  Collection c = coll({{{"a"}, 1}, {{"b*"}, 1}, {{"a*"}, 1}});
  Configuration ok;
  ok.add({0, 0}, {2, 0});
  CHECK(validate_configuration(c, ok).empty());
  Configuration bad;
  bad.add({0, 0}, {1, 0});
  auto v = validate_configuration(c, bad);
  REQUIRE(!v.empty());
  CHECK(v[0].find("non-complementary bond") != std::string::npos);
  Configuration twice;
  twice.add({0, 0}, {2, 0});
  twice.add({0, 0}, {2, 0});
  auto w = validate_configuration(c, twice);
  bool found = false;
  for (auto& s : w) found |= s.find("not a matching") != std::string::npos;
  CHECK(found);
}

TEST_CASE("document format round trips") {
  Collection c = coll({{{"a", "bh_(1,2)"}, 2}, {{"a*"}, 1}, {{"bh_(1,2)*"}, 3}});
  Configuration a;
  a.add({0, 0}, {2, 0});
  a.add({1, 1}, {3, 0});
  a.normalise();
  std::string doc = dump_document(c, a);
  auto [c2, a2] = parse_document(doc);
  CHECK(dump_document(c2, a2) == doc);
  CHECK(a2 == a);
  CHECK(c2.count(2) == 3);
}

TEST_CASE("property: enthalpy bound, partition, relabelling invariance") {
  std::mt19937_64 rng(20260101);
  for (int iter = 0; iter < 100; ++iter) {
    Collection c = oracle::random_collection(rng);
    auto naive = oracle::naive_stable(c);
    CHECK(naive.maxBonds == max_bond_count(c));
    // random greedy matching
    auto slots = oracle::flatten(c);
    std::vector<int> order(slots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> used(slots.size(), 0);
    Configuration a;
    for (int x : order)
      for (int y : order)
        if (!used[x] && !used[y] && x != y && slots[x].name == slots[y].name && slots[x].star != slots[y].star &&
            (rng() & 1)) {
          used[x] = used[y] = 1;
          a.add({slots[x].inst, slots[x].slot}, {slots[y].inst, slots[y].slot});
        }
    a.normalise();
    CHECK(validate_configuration(c, a).empty());
    CHECK(enthalpy(a) <= max_bond_count(c));
    CHECK(is_saturated(c, a) == (enthalpy(a) == max_bond_count(c)));
    auto ps = polymers(c, a);
    size_t total = 0;
    for (auto& p : ps) total += p.members.size();
    CHECK(total == static_cast<size_t>(c.num_instances()));
    // permute same-type instances
    std::vector<int> perm(c.num_instances());
    for (int t = 0; t < c.num_types(); ++t) {
      std::vector<int> g;
      for (int64_t k = 0; k < c.count(t); ++k) g.push_back(c.first_instance(t) + static_cast<int>(k));
      auto h = g;
      std::shuffle(h.begin(), h.end(), rng);
      for (size_t k = 0; k < g.size(); ++k) perm[g[k]] = h[k];
    }
    Configuration b;
    for (auto& e : a.bonds) b.add({perm[e.a.inst], e.a.slot}, {perm[e.b.inst], e.b.slot});
    b.normalise();
    CHECK(entropy(c, a) == entropy(c, b));
    CHECK(canonical_key(c, a) == canonical_key(c, b));
    CHECK(oracle::brute_canon(c, a) == oracle::brute_canon(c, b));
  }
}

TEST_CASE("canonical key separates what brute force separates") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 60; ++iter) {
    Collection c = oracle::random_collection(rng);
    auto slots = oracle::flatten(c);
    std::vector<Configuration> cs;
    for (int rep = 0; rep < 6; ++rep) {
      std::vector<char> used(slots.size(), 0);
      Configuration a;
      for (size_t x = 0; x < slots.size(); ++x)
        for (size_t y = x + 1; y < slots.size(); ++y)
          if (!used[x] && !used[y] && slots[x].name == slots[y].name && slots[x].star != slots[y].star && (rng() % 3)) {
            used[x] = used[y] = 1;
            a.add({slots[x].inst, slots[x].slot}, {slots[y].inst, slots[y].slot});
          }
      a.normalise();
      cs.push_back(a);
    }
    for (auto& x : cs)
      for (auto& y : cs)
        CHECK((canonical_key(c, x) == canonical_key(c, y)) == (oracle::brute_canon(c, x) == oracle::brute_canon(c, y)));
  }
}
