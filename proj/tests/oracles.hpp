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
// Independent reference implementations used by the tests. Deliberately naive.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tbnlab/core.hpp"

namespace oracle {

using tbnlab::Collection;
using tbnlab::Configuration;

struct FlatSlot {
  int inst, slot;
  std::string name;
  bool star;
};

inline std::vector<FlatSlot> flatten(const Collection& c) {
  std::vector<FlatSlot> out;
  for (int i = 0; i < c.num_instances(); ++i) {
    const auto& m = c.instance_type(i);
    for (size_t s = 0; s < m.domains.size(); ++s)
      out.push_back({i, static_cast<int>(s), m.domains[s].name.str(), m.domains[s].star});
  }
  return out;
}

inline int components(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  auto f = [&](int x) {
    while (p[x] != x) x = p[x];
    return x;
  };
  int comps = n;
  for (auto [a, b] : edges) {
    int x = f(a), y = f(b);
    if (x != y) {
      p[x] = y;
      --comps;
    }
  }
  return comps;
}

// Canonical form by trying every permutation of same-type instances. Slots are
// represented by their domain name, which already quotients identical slots.
inline std::string brute_canon(const Collection& c, const Configuration& a) {
  std::vector<std::vector<int>> groups;
  for (int t = 0; t < c.num_types(); ++t) {
    std::vector<int> g;
    for (int64_t k = 0; k < c.count(t); ++k) g.push_back(c.first_instance(t) + static_cast<int>(k));
    groups.push_back(g);
  }
  std::vector<std::vector<int>> perms = groups;
  std::string best;
  bool have = false;
  std::vector<int> map(c.num_instances());
  std::function<void(size_t)> rec = [&](size_t g) {
    if (g == perms.size()) {
      std::vector<std::tuple<int, std::string, int>> es;
      for (auto& b : a.bonds) {
        const auto& da = c.instance_type(b.a.inst).domains[b.a.slot];
        int pi = da.star ? b.b.inst : b.a.inst;
        int si = da.star ? b.a.inst : b.b.inst;
        es.emplace_back(map[pi], da.name.str(), map[si]);
      }
      std::sort(es.begin(), es.end());
      std::string s;
      for (auto& [x, n, y] : es) s += std::to_string(x) + "-" + n + "-" + std::to_string(y) + ";";
      if (!have || s < best) {
        best = s;
        have = true;
      }
      return;
    }
    std::vector<int> p = groups[g];
    std::sort(p.begin(), p.end());
    do {
      for (size_t k = 0; k < p.size(); ++k) map[groups[g][k]] = p[k];
      rec(g + 1);
    } while (std::next_permutation(p.begin(), p.end()));
  };
  rec(0);
  return best;
}

struct NaiveResult {
  int64_t maxBonds = 0;
  int64_t entropy = 0;
  std::set<std::string> classes;  // brute_canon of every stable configuration
  int64_t saturatedCount = 0;
};

// Enumerates every matching, keeps the maximum-cardinality ones, then the
// entropy-maximal among those.
inline NaiveResult naive_stable(const Collection& c) {
  auto slots = flatten(c);
  int n = static_cast<int>(slots.size());
  std::vector<int> partner(n, -1);
  std::vector<std::vector<std::pair<int, int>>> all;
  int64_t bestH = -1;
  std::vector<std::pair<int, int>> cur;
  std::function<void(int)> rec = [&](int x) {
    if (x == n) {
      int64_t h = static_cast<int64_t>(cur.size());
      if (h > bestH) {
        bestH = h;
        all.clear();
      }
      if (h == bestH) all.push_back(cur);
      return;
    }
    if (partner[x] >= 0) {
      rec(x + 1);
      return;
    }
    rec(x + 1);
    for (int y = x + 1; y < n; ++y) {
      if (partner[y] >= 0 || slots[y].name != slots[x].name || slots[y].star == slots[x].star) continue;
      partner[x] = y;
      partner[y] = x;
      cur.emplace_back(x, y);
      rec(x + 1);
      cur.pop_back();
      partner[x] = partner[y] = -1;
    }
  };
  rec(0);
  NaiveResult r;
  r.maxBonds = bestH;
  r.saturatedCount = static_cast<int64_t>(all.size());
  r.entropy = -1;
  std::vector<Configuration> best;
  for (auto& m : all) {
    std::vector<std::pair<int, int>> edges;
    Configuration cfg;
    for (auto [x, y] : m) {
      edges.emplace_back(slots[x].inst, slots[y].inst);
      cfg.add({slots[x].inst, slots[x].slot}, {slots[y].inst, slots[y].slot});
    }
    cfg.normalise();
    int64_t s = components(c.num_instances(), edges);
    if (s > r.entropy) {
      r.entropy = s;
      best.clear();
    }
    if (s == r.entropy) best.push_back(cfg);
  }
  for (auto& cfg : best) r.classes.insert(brute_canon(c, cfg));
  return r;
}

inline Collection random_collection(std::mt19937_64& rng, int maxMonomers = 6, int maxNames = 3, int maxCount = 2) {
  static const char* kNames[] = {"a", "b", "c", "d"};
  while (true) {
    Collection c;
    int nTypes = std::uniform_int_distribution<int>(1, 4)(rng);
    int total = 0;
    for (int t = 0; t < nTypes; ++t) {
      int nd = std::uniform_int_distribution<int>(1, 3)(rng);
      std::vector<tbnlab::Domain> ds;
      for (int k = 0; k < nd; ++k) {
        int nm = std::uniform_int_distribution<int>(0, maxNames - 1)(rng);
        bool star = std::uniform_int_distribution<int>(0, 1)(rng);
        ds.emplace_back(tbnlab::DomainName(kNames[nm]), star);
      }
      int cnt = std::uniform_int_distribution<int>(1, maxCount)(rng);
      if (total + cnt > maxMonomers) break;
      total += cnt;
      c.add_type(tbnlab::make_monomer("m" + std::to_string(t), ds), cnt);
    }
    if (c.num_instances() > 0) return c;
  }
}

}  // namespace oracle
