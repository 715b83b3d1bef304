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
#include "tbnlab/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace tbnlab {

int resolve_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    n = 1;
    if (const char* env = std::getenv("TBNLAB_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) n = v;
    }
  } else if (const char* env = std::getenv("TBNLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) n = std::min(n, v);
  }
  return std::max(1, n);
}

namespace {

enum NameMode { kInert = 0, kPrimaryShort = 1, kStarShort = 2, kBalanced = 3 };

struct TypeName {
  int name;
  int64_t p, s;  // own primary / star slots with this name
};

// Read-only preprocessing shared by all workers.
struct Prep {
  const Collection* c = nullptr;
  int nTypes = 0, nInst = 0, nSlots = 0, nNames = 0;
  std::vector<int> instType, instSlotBase, slotInst, slotName, slotSide, slotCanon;
  std::vector<int> typeSlots;
  std::vector<std::vector<TypeName>> typeNames;
  std::vector<std::vector<int>> namesOfType;
  std::vector<std::vector<int>> typesOfName;  // types carrying the name
  std::vector<std::array<std::vector<int>, 2>> nameSlots;
  std::vector<int> mode;
  std::vector<char> mustBind;
  std::vector<int> mustSlots;
  std::vector<int64_t> P, Q;

  // anchors
  std::vector<int> anchorIdx;  // per type, -1 if not an anchor
  int nAnchorTypes = 0, words = 1;
  std::vector<uint64_t> dom;  // per type * words
  int64_t anchorBound = 0;

  const uint64_t* domOf(int t) const { return dom.data() + static_cast<size_t>(t) * words; }
};

int64_t need_star(const Prep& pp, const TypeName& tn) {
  int m = pp.mode[tn.name];
  return (m == kPrimaryShort || m == kBalanced) ? tn.p : 0;
}
int64_t need_prim(const Prep& pp, const TypeName& tn) {
  int m = pp.mode[tn.name];
  return (m == kStarShort || m == kBalanced) ? tn.s : 0;
}

bool self_sufficient(const Prep& pp, int t) {
  for (auto& tn : pp.typeNames[t]) {
    switch (pp.mode[tn.name]) {
      case kPrimaryShort: if (tn.p > tn.s) return false; break;
      case kStarShort: if (tn.s > tn.p) return false; break;
      case kBalanced: if (tn.p != tn.s) return false; break;
      default: break;
    }
  }
  return true;
}

void build_prep(Prep& pp, const Collection& c) {
  pp.c = &c;
  pp.nTypes = c.num_types();
  pp.nInst = c.num_instances();
  std::unordered_map<std::string, int> nameId;
  std::vector<std::vector<std::pair<int, int>>> typeSlotNS(pp.nTypes);
  for (int t = 0; t < pp.nTypes; ++t) {
    const auto& m = c.type(t);
    for (size_t s = 0; s < m.domains.size(); ++s) {
      auto key = m.domains[s].name.str();
      auto it = nameId.find(key);
      int id;
      if (it == nameId.end()) {
        id = static_cast<int>(nameId.size());
        nameId.emplace(key, id);
      } else {
        id = it->second;
      }
      typeSlotNS[t].emplace_back(id, m.domains[s].star ? 1 : 0);
    }
  }
  pp.nNames = static_cast<int>(nameId.size());
  pp.typeSlots.resize(pp.nTypes);
  pp.typeNames.resize(pp.nTypes);
  pp.namesOfType.resize(pp.nTypes);
  pp.typesOfName.resize(pp.nNames);
  pp.P.assign(pp.nNames, 0);
  pp.Q.assign(pp.nNames, 0);
  for (int t = 0; t < pp.nTypes; ++t) {
    pp.typeSlots[t] = static_cast<int>(typeSlotNS[t].size());
    std::map<int, std::pair<int64_t, int64_t>> own;
    for (auto& [n, side] : typeSlotNS[t]) (side ? own[n].second : own[n].first)++;
    for (auto& [n, ps] : own) {
      pp.typeNames[t].push_back({n, ps.first, ps.second});
      pp.namesOfType[t].push_back(n);
      pp.P[n] += ps.first * c.count(t);
      pp.Q[n] += ps.second * c.count(t);
      if (c.count(t) > 0) pp.typesOfName[n].push_back(t);
    }
  }
  pp.mode.assign(pp.nNames, kInert);
  for (int n = 0; n < pp.nNames; ++n) {
    if (pp.P[n] == 0 || pp.Q[n] == 0) continue;
    pp.mode[n] = pp.P[n] < pp.Q[n] ? kPrimaryShort : (pp.Q[n] < pp.P[n] ? kStarShort : kBalanced);
  }
  pp.nameSlots.resize(pp.nNames);
  pp.instType.resize(pp.nInst);
  pp.instSlotBase.resize(pp.nInst);
  int slot = 0;
  for (int i = 0; i < pp.nInst; ++i) {
    int t = c.type_of(i);
    pp.instType[i] = t;
    pp.instSlotBase[i] = slot;
    const auto& doms = c.type(t).domains;
    for (size_t s = 0; s < doms.size(); ++s) {
      auto [n, side] = typeSlotNS[t][s];
      pp.slotInst.push_back(i);
      pp.slotName.push_back(n);
      pp.slotSide.push_back(side);
      int canon = static_cast<int>(s);
      while (canon > 0 && doms[canon - 1] == doms[s]) --canon;
      pp.slotCanon.push_back(canon);
      pp.nameSlots[n][side].push_back(slot);
      int m = pp.mode[n];
      bool must = (m == kBalanced) || (m == kPrimaryShort && side == 0) || (m == kStarShort && side == 1);
      pp.mustBind.push_back(must ? 1 : 0);
      if (must) pp.mustSlots.push_back(slot);
      ++slot;
    }
  }
  pp.nSlots = slot;
}

// Removes non-anchor types that cannot take part in an anchor-free polymer.
// `alive` marks surviving non-anchor types; `supply` is [name*2+side].
int64_t eliminate(const Prep& pp, std::vector<char>& alive, std::vector<int64_t>& supply,
                  std::vector<int> work) {
  int64_t removed = 0;
  std::vector<char> queued(pp.nNames, 0);
  for (int n : work) queued[n] = 1;
  auto fails = [&](int t) {
    for (auto& tn : pp.typeNames[t]) {
      if (need_star(pp, tn) > supply[tn.name * 2 + 1]) return true;
      if (need_prim(pp, tn) > supply[tn.name * 2 + 0]) return true;
    }
    return false;
  };
  auto kill = [&](int t) {
    alive[t] = 0;
    removed += pp.c->count(t);
    for (auto& tn : pp.typeNames[t]) {
      supply[tn.name * 2 + 0] -= tn.p * pp.c->count(t);
      supply[tn.name * 2 + 1] -= tn.s * pp.c->count(t);
      if (!queued[tn.name]) {
        queued[tn.name] = 1;
        work.push_back(tn.name);
      }
    }
  };
  while (!work.empty()) {
    int n = work.back();
    work.pop_back();
    queued[n] = 0;
    for (int t : pp.typesOfName[n])
      if (alive[t] && fails(t)) kill(t);
  }
  return removed;
}

// True when no anchor-free polymer can satisfy its must-bind slots.
bool covers(const Prep& pp, const std::vector<char>& isAnchor) {
  const Collection& c = *pp.c;
  std::vector<char> alive(pp.nTypes, 0);
  std::vector<int64_t> supply(static_cast<size_t>(pp.nNames) * 2, 0);
  for (int t = 0; t < pp.nTypes; ++t) {
    if (isAnchor[t] || c.count(t) == 0) continue;
    alive[t] = 1;
    for (auto& tn : pp.typeNames[t]) {
      supply[tn.name * 2 + 0] += tn.p * c.count(t);
      supply[tn.name * 2 + 1] += tn.s * c.count(t);
    }
  }
  std::vector<int> all(pp.nNames);
  for (int n = 0; n < pp.nNames; ++n) all[n] = n;
  eliminate(pp, alive, supply, all);
  return std::find(alive.begin(), alive.end(), 1) == alive.end();
}

// Drops anchors that are not needed for coverage, largest counts first.
void shrink_cover(const Prep& pp, std::vector<char>& isAnchor, const std::vector<char>& forced) {
  std::vector<int> order;
  for (int t = 0; t < pp.nTypes; ++t)
    if (isAnchor[t] && !forced[t]) order.push_back(t);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pp.c->count(a) > pp.c->count(b); });
  for (int t : order) {
    isAnchor[t] = 0;
    if (!covers(pp, isAnchor)) isAnchor[t] = 1;
  }
}

void compute_anchors(Prep& pp) {
  const Collection& c = *pp.c;
  std::vector<char> isAnchor(pp.nTypes, 0), alive(pp.nTypes, 0);
  for (int t = 0; t < pp.nTypes; ++t) {
    if (c.count(t) == 0) continue;
    if (self_sufficient(pp, t))
      isAnchor[t] = 1;
    else
      alive[t] = 1;
  }
  std::vector<int64_t> supply(static_cast<size_t>(pp.nNames) * 2, 0);
  for (int t = 0; t < pp.nTypes; ++t)
    if (alive[t])
      for (auto& tn : pp.typeNames[t]) {
        supply[tn.name * 2 + 0] += tn.p * c.count(t);
        supply[tn.name * 2 + 1] += tn.s * c.count(t);
      }
  std::vector<int> all(pp.nNames);
  for (int n = 0; n < pp.nNames; ++n) all[n] = n;
  eliminate(pp, alive, supply, all);
  while (true) {
    std::vector<int> survivors;
    for (int t = 0; t < pp.nTypes; ++t)
      if (alive[t]) survivors.push_back(t);
    if (survivors.empty()) break;
    int best = survivors[0];
    double bestScore = -1;
    for (int t : survivors) {
      auto a2 = alive;
      auto s2 = supply;
      a2[t] = 0;
      for (auto& tn : pp.typeNames[t]) {
        s2[tn.name * 2 + 0] -= tn.p * c.count(t);
        s2[tn.name * 2 + 1] -= tn.s * c.count(t);
      }
      std::vector<int> w(pp.namesOfType[t]);
      double score = static_cast<double>(eliminate(pp, a2, s2, w)) / static_cast<double>(c.count(t));
      if (score > bestScore) {
        bestScore = score;
        best = t;
      }
    }
    isAnchor[best] = 1;
    alive[best] = 0;
    for (auto& tn : pp.typeNames[best]) {
      supply[tn.name * 2 + 0] -= tn.p * c.count(best);
      supply[tn.name * 2 + 1] -= tn.s * c.count(best);
    }
    eliminate(pp, alive, supply, pp.namesOfType[best]);
  }
  // The greedy pick can overshoot; shrink it, and compare with the seed/cap roles as a hint.
  std::vector<char> forced(pp.nTypes, 0);
  for (int t = 0; t < pp.nTypes; ++t) forced[t] = c.count(t) > 0 && self_sufficient(pp, t);
  auto weight = [&](const std::vector<char>& set) {
    int64_t w = 0;
    for (int t = 0; t < pp.nTypes; ++t)
      if (set[t]) w += c.count(t);
    return w;
  };
  std::vector<char> hinted = forced;
  for (int t = 0; t < pp.nTypes; ++t)
    if (c.count(t) > 0 && (c.type(t).role == Role::Seed || c.type(t).role == Role::Cap)) hinted[t] = 1;
  if (covers(pp, hinted)) {
    shrink_cover(pp, hinted, forced);
    shrink_cover(pp, isAnchor, forced);
    if (weight(hinted) < weight(isAnchor)) isAnchor = hinted;
  } else {
    shrink_cover(pp, isAnchor, forced);
  }
  pp.anchorIdx.assign(pp.nTypes, -1);
  pp.anchorBound = 0;
  for (int t = 0; t < pp.nTypes; ++t)
    if (isAnchor[t]) {
      pp.anchorIdx[t] = pp.nAnchorTypes++;
      pp.anchorBound += c.count(t);
    }
  pp.words = std::max(1, (pp.nAnchorTypes + 63) / 64);
  pp.dom.assign(static_cast<size_t>(pp.nTypes) * pp.words, 0);
  std::vector<uint64_t> full(pp.words, 0);
  for (int a = 0; a < pp.nAnchorTypes; ++a) full[a / 64] |= uint64_t(1) << (a % 64);
  for (int t = 0; t < pp.nTypes; ++t)
    if (pp.anchorIdx[t] < 0) std::copy(full.begin(), full.end(), pp.dom.begin() + static_cast<size_t>(t) * pp.words);
  // Greatest fixpoint of: anchors a non-anchor type can share a polymer with.
  bool changed = true;
  std::vector<uint64_t> allowed(pp.words), next(pp.words);
  while (changed) {
    changed = false;
    for (int t = 0; t < pp.nTypes; ++t) {
      if (pp.anchorIdx[t] >= 0 || c.count(t) == 0) continue;
      uint64_t* d = pp.dom.data() + static_cast<size_t>(t) * pp.words;
      std::copy(d, d + pp.words, next.begin());
      for (auto& tn : pp.typeNames[t]) {
        for (int side = 0; side < 2; ++side) {
          int64_t need = side == 1 ? need_star(pp, tn) : need_prim(pp, tn);
          if (need == 0) continue;
          std::fill(allowed.begin(), allowed.end(), 0);
          bool unrestricted = false;
          for (int u : pp.typesOfName[tn.name]) {
            bool has = false;
            for (auto& un : pp.typeNames[u])
              if (un.name == tn.name) has = side == 1 ? un.s > 0 : un.p > 0;
            if (!has) continue;
            if (pp.anchorIdx[u] >= 0) {
              allowed[pp.anchorIdx[u] / 64] |= uint64_t(1) << (pp.anchorIdx[u] % 64);
            } else if (u == t) {
              unrestricted = true;
              break;
            } else {
              const uint64_t* du = pp.domOf(u);
              for (int w = 0; w < pp.words; ++w) allowed[w] |= du[w];
            }
          }
          if (!unrestricted)
            for (int w = 0; w < pp.words; ++w) next[w] &= allowed[w];
        }
      }
      if (!std::equal(next.begin(), next.end(), d)) {
        std::copy(next.begin(), next.end(), d);
        changed = true;
      }
    }
  }
}

struct Shared {
  std::atomic<int64_t> nodes{0};
  std::atomic<int64_t> best{-1};
  std::atomic<bool> abort{false};
  ErrorCode abortCode = ErrorCode::Ok;
  std::string abortMsg;
  std::mutex mu;
  int64_t maxNodes = 0;
  std::chrono::steady_clock::time_point deadline;

  void fail(ErrorCode code, const std::string& msg) {
    std::lock_guard<std::mutex> lk(mu);
    if (!abort.exchange(true)) {
      abortCode = code;
      abortMsg = msg;
    }
  }
};

struct Nogood {
  int name, side;
  bool self = false;                   // the tried bond was within one instance
  std::vector<int> chooser, partners;  // sorted instance ids
};

class Search {
 public:
  Search(const Prep& pp, bool anchored, Shared& sh) : P(pp), anchored_(anchored), sh_(sh) {
    partner_.assign(P.nSlots, -1);
    bound_.assign(P.nInst, 0);
    par_.resize(P.nInst);
    sz_.assign(P.nInst, 1);
    next_.resize(P.nInst);
    anc_.assign(P.nInst, -1);
    ancCount_.assign(P.nInst, 0);
    cdom_.assign(static_cast<size_t>(P.nInst) * P.words, 0);
    for (int i = 0; i < P.nInst; ++i) {
      par_[i] = i;
      next_[i] = i;
      int t = P.instType[i];
      uint64_t* d = cdom_.data() + static_cast<size_t>(i) * P.words;
      if (P.anchorIdx[t] >= 0) {
        anc_[i] = i;
        ancCount_[i] = 1;
        std::fill(d, d + P.words, ~uint64_t(0));
      } else {
        std::copy(P.domOf(t), P.domOf(t) + P.words, d);
      }
    }
    comps_ = P.nInst;
    cand_.assign(P.nSlots, 0);
    dirty_.assign(P.nNames, 0);
    for (int n = 0; n < P.nNames; ++n) mark(n);
    ngByInst_.resize(P.nInst);
  }

  // Runs forced moves from the root; returns the first branching slot or -1.
  int descend_forced(std::vector<int>& cands) {
    while (true) {
      if (sh_.abort) return -1;
      refresh();
      int x = pick();
      if (x < 0) {
        leaf();
        return -1;
      }
      if (cand_[x] == 0) return -1;
      if (!anchored_ && prune()) return -1;
      candidates(x, cands);
      if (cands.size() != 1) return x;
      bind(x, cands[0]);
    }
  }

  void run_branch(int x, const std::vector<int>& cands, size_t k) {
    for (size_t j = 0; j < k; ++j) push_nogood(x, cands[j]);
    bind(x, cands[k]);
    dfs();
  }

  void dfs() {
    int64_t n = ++sh_.nodes;
    if ((n & 1023) == 0) {
      if (n > sh_.maxNodes) sh_.fail(ErrorCode::BudgetExceeded, "branch node budget exhausted");
      if (std::chrono::steady_clock::now() > sh_.deadline) sh_.fail(ErrorCode::BudgetExceeded, "time budget exhausted");
    }
    if (sh_.abort) return;
    refresh();
    int x = pick();
    if (x < 0) {
      leaf();
      return;
    }
    if (cand_[x] == 0) return;
    if (!anchored_ && prune()) return;
    std::vector<int> cands;
    candidates(x, cands);
    size_t pushed = 0;
    for (size_t k = 0; k < cands.size(); ++k) {
      bind(x, cands[k]);
      dfs();
      unbind(x, cands[k]);
      if (sh_.abort) break;
      if (k + 1 < cands.size()) {
        push_nogood(x, cands[k]);
        ++pushed;
      }
    }
    while (pushed--) pop_nogood();
  }

  std::map<std::string, Configuration> found;
  int64_t foundS = -1;

 private:
  const Prep& P;
  bool anchored_;
  Shared& sh_;
  std::vector<int> partner_, bound_;
  std::vector<int> par_, sz_, next_, anc_, ancCount_;
  std::vector<uint64_t> cdom_;
  struct Merge {
    int child, root, oldSz, oldAnc, oldAncCount;
    size_t domPos;
  };
  std::vector<Merge> hist_;
  std::vector<uint64_t> domHist_;
  int comps_ = 0;
  std::vector<int> cand_;
  std::vector<char> dirty_;
  std::vector<int> dirtyList_;
  std::vector<Nogood> nogoods_;
  std::vector<std::vector<int>> ngByInst_;

  int find(int x) const {
    while (par_[x] != x) x = par_[x];
    return x;
  }
  uint64_t* dom(int root) { return cdom_.data() + static_cast<size_t>(root) * P.words; }
  const uint64_t* dom(int root) const { return cdom_.data() + static_cast<size_t>(root) * P.words; }

  void mark(int n) {
    if (!dirty_[n]) {
      dirty_[n] = 1;
      dirtyList_.push_back(n);
    }
  }
  void mark_component(int root) {
    int v = root;
    do {
      for (int n : P.namesOfType[P.instType[v]]) mark(n);
      v = next_[v];
    } while (v != root);
  }

  bool pristine(int inst) const { return bound_[inst] == 0; }

  // Merge legality under the one-anchor-per-polymer discipline.
  bool legal(int ri, int rj) const {
    if (!anchored_ || ri == rj) return true;
    int a = anc_[ri] >= 0 ? anc_[ri] : -1;
    int b = anc_[rj] >= 0 ? anc_[rj] : -1;
    if (a >= 0 && b >= 0) return false;
    const uint64_t* di = dom(ri);
    const uint64_t* dj = dom(rj);
    int an = a >= 0 ? a : b;
    if (an >= 0) {
      int idx = P.anchorIdx[P.instType[an]];
      return ((di[idx / 64] & dj[idx / 64]) >> (idx % 64)) & 1;
    }
    for (int w = 0; w < P.words; ++w)
      if (di[w] & dj[w]) return true;
    return false;
  }

  bool forbidden(int x, int y) const {
    auto check = [&](int ch, int pa) {
      int ci = P.slotInst[ch], pi = P.slotInst[pa];
      for (int g : ngByInst_[ci]) {
        const Nogood& ng = nogoods_[g];
        if (ng.name != P.slotName[ch] || ng.side != P.slotSide[ch]) continue;
        // a symmetric copy of a self bond is a self bond, and vice versa
        if (ng.self ? pi == ci : pi != ci && std::binary_search(ng.partners.begin(), ng.partners.end(), pi))
          return true;
      }
      return false;
    };
    return check(x, y) || check(y, x);
  }

  void candidates(int x, std::vector<int>& out) const {
    out.clear();
    int xi = P.slotInst[x];
    int rx = find(xi);
    const auto& list = P.nameSlots[P.slotName[x]][1 - P.slotSide[x]];
    // Dedup keys: pristine instances by (type, canonical slot); others by (instance, canonical slot).
    std::vector<std::pair<int64_t, int>> seen;
    for (int y : list) {
      if (partner_[y] >= 0) continue;
      int yi = P.slotInst[y];
      int64_t key = (pristine(yi) && yi != xi)
                        ? -(static_cast<int64_t>(P.instType[yi]) * 64 + P.slotCanon[y]) - 1
                        : static_cast<int64_t>(yi) * 64 + P.slotCanon[y];
      bool dup = false;
      for (auto& s : seen)
        if (s.first == key) {
          dup = true;
          break;
        }
      if (dup) continue;
      if (!legal(rx, find(yi))) continue;
      if (forbidden(x, y)) continue;
      seen.emplace_back(key, y);
      out.push_back(y);
    }
  }

  void refresh() {
    std::vector<int> tmp;
    for (int n : dirtyList_) {
      dirty_[n] = 0;
      for (int side = 0; side < 2; ++side)
        for (int x : P.nameSlots[n][side]) {
          if (!P.mustBind[x] || partner_[x] >= 0) continue;
          candidates(x, tmp);
          cand_[x] = static_cast<int>(tmp.size());
        }
    }
    dirtyList_.clear();
  }

  int pick() const {
    int best = -1, bestC = 0;
    for (int x : P.mustSlots) {
      if (partner_[x] >= 0) continue;
      if (best < 0 || cand_[x] < bestC) {
        best = x;
        bestC = cand_[x];
        if (bestC == 0) break;
      }
    }
    return best;
  }

  bool prune() const {
    int64_t best = sh_.best.load();
    if (best < 0) return false;
    std::set<int> needy;
    for (int x : P.mustSlots) {
      if (partner_[x] >= 0) continue;
      int r = find(P.slotInst[x]);
      if (needy.count(r)) continue;
      bool internal = false;
      for (int y : P.nameSlots[P.slotName[x]][1 - P.slotSide[x]])
        if (partner_[y] < 0 && y != x && find(P.slotInst[y]) == r) {
          internal = true;
          break;
        }
      if (!internal) needy.insert(r);
    }
    int64_t bound = comps_ - static_cast<int64_t>((needy.size() + 1) / 2);
    bound = std::min<int64_t>(bound, P.anchorBound);
    return bound < best;
  }

  void bind(int x, int y) {
    int xi = P.slotInst[x], yi = P.slotInst[y];
    int rx = find(xi), ry = find(yi);
    mark_component(rx);
    if (ry != rx) mark_component(ry);
    mark(P.slotName[x]);
    partner_[x] = y;
    partner_[y] = x;
    ++bound_[xi];
    ++bound_[yi];
    if (rx == ry) {
      hist_.push_back({-1, -1, 0, 0, 0, 0});
      return;
    }
    if (sz_[rx] < sz_[ry]) std::swap(rx, ry);
    hist_.push_back({ry, rx, sz_[rx], anc_[rx], ancCount_[rx], domHist_.size()});
    uint64_t* d = dom(rx);
    domHist_.insert(domHist_.end(), d, d + P.words);
    par_[ry] = rx;
    sz_[rx] += sz_[ry];
    if (anc_[rx] < 0) anc_[rx] = anc_[ry];
    ancCount_[rx] += ancCount_[ry];
    const uint64_t* e = dom(ry);
    for (int w = 0; w < P.words; ++w) d[w] &= e[w];
    std::swap(next_[rx], next_[ry]);
    --comps_;
  }

  void unbind(int x, int y) {
    int xi = P.slotInst[x], yi = P.slotInst[y];
    Merge m = hist_.back();
    hist_.pop_back();
    mark(P.slotName[x]);
    mark_component(find(xi));
    if (m.child >= 0) {
      std::swap(next_[m.root], next_[m.child]);
      par_[m.child] = m.child;
      sz_[m.root] = m.oldSz;
      anc_[m.root] = m.oldAnc;
      ancCount_[m.root] = m.oldAncCount;
      std::copy(domHist_.begin() + m.domPos, domHist_.begin() + m.domPos + P.words, dom(m.root));
      domHist_.resize(m.domPos);
      ++comps_;
    }
    partner_[x] = -1;
    partner_[y] = -1;
    --bound_[xi];
    --bound_[yi];
  }

  void push_nogood(int x, int y) {
    Nogood ng;
    ng.name = P.slotName[x];
    ng.side = P.slotSide[x];
    int xi = P.slotInst[x], yi = P.slotInst[y];
    ng.chooser.push_back(xi);
    if (pristine(xi)) {
      int t = P.instType[xi];
      int f = P.c->first_instance(t);
      for (int64_t k = 0; k < P.c->count(t); ++k)
        if (f + k != xi && pristine(static_cast<int>(f + k))) ng.chooser.push_back(static_cast<int>(f + k));
    }
    if (yi == xi) {
      ng.self = true;
    } else if (pristine(yi)) {
      int t = P.instType[yi];
      int f = P.c->first_instance(t);
      for (int64_t k = 0; k < P.c->count(t); ++k)
        if (f + k != xi && pristine(static_cast<int>(f + k))) ng.partners.push_back(static_cast<int>(f + k));
    } else {
      ng.partners.push_back(yi);
    }
    std::sort(ng.chooser.begin(), ng.chooser.end());
    std::sort(ng.partners.begin(), ng.partners.end());
    int id = static_cast<int>(nogoods_.size());
    for (int ci : ng.chooser) ngByInst_[ci].push_back(id);
    mark(ng.name);
    nogoods_.push_back(std::move(ng));
  }

  void pop_nogood() {
    int id = static_cast<int>(nogoods_.size()) - 1;
    for (int ci : nogoods_[id].chooser) ngByInst_[ci].pop_back();
    mark(nogoods_[id].name);
    nogoods_.pop_back();
  }

  void leaf() {
    int64_t S = comps_;
    if (!anchored_) {
      int64_t b = sh_.best.load();
      while (S > b && !sh_.best.compare_exchange_weak(b, S)) {
      }
    }
    if (S < foundS) return;
    if (S > foundS) {
      found.clear();
      foundS = S;
    }
    Configuration cfg;
    for (int x = 0; x < P.nSlots; ++x) {
      int y = partner_[x];
      if (y > x) {
        int xi = P.slotInst[x], yi = P.slotInst[y];
        cfg.add({xi, x - P.instSlotBase[xi]}, {yi, y - P.instSlotBase[yi]});
      }
    }
    cfg.normalise();
    std::string key = canonical_key(*P.c, cfg);
    auto it = found.find(key);
    if (it == found.end())
      found.emplace(std::move(key), std::move(cfg));
    else if (cfg.bonds < it->second.bonds)
      it->second = std::move(cfg);
  }
};

struct Outcome {
  std::map<std::string, Configuration> found;
  int64_t S = -1;
};

Outcome run_search(const Prep& pp, bool anchored, Shared& sh, int threads) {
  Search root(pp, anchored, sh);
  std::vector<int> cands;
  int x = root.descend_forced(cands);
  Outcome out;
  auto absorb = [&](Search& s) {
    if (s.foundS < 0) return;
    if (s.foundS > out.S) {
      out.found.clear();
      out.S = s.foundS;
    }
    if (s.foundS < out.S) return;
    for (auto& [k, cfg] : s.found) {
      auto it = out.found.find(k);
      if (it == out.found.end())
        out.found.emplace(k, cfg);
      else if (cfg.bonds < it->second.bonds)
        it->second = cfg;
    }
  };
  if (x < 0) {
    absorb(root);
    return out;
  }
  std::vector<Search> workers;
  size_t nTasks = cands.size();
  int nThreads = static_cast<int>(std::min<size_t>(static_cast<size_t>(threads), nTasks));
  if (nThreads <= 1) {
    for (size_t k = 0; k < nTasks && !sh.abort; ++k) {
      Search s = root;
      s.run_branch(x, cands, k);
      absorb(s);
    }
    return out;
  }
  std::atomic<size_t> nextTask{0};
  std::vector<std::vector<Search>> results(nThreads);
  std::vector<std::thread> pool;
  for (int t = 0; t < nThreads; ++t)
    pool.emplace_back([&, t] {
      while (true) {
        size_t k = nextTask++;
        if (k >= nTasks || sh.abort) break;
        Search s = root;
        s.run_branch(x, cands, k);
        results[t].push_back(std::move(s));
      }
    });
  for (auto& th : pool) th.join();
  for (auto& rs : results)
    for (auto& s : rs) absorb(s);
  return out;
}

}  // namespace

int64_t entropy_upper_bound(const Collection& c) {
  Prep pp;
  build_prep(pp, c);
  compute_anchors(pp);
  return pp.anchorBound;
}

SolveResult enumerate_stable(const Collection& c, const SolveLimits& limits) {
  if (c.num_instances() == 0) throw Error(ErrorCode::EmptyCollection, "cannot solve an empty collection");
  if (c.num_instances() > limits.maxMonomers)
    throw Error(ErrorCode::BudgetExceeded, "collection has " + std::to_string(c.num_instances()) +
                                               " monomers, limit is " + std::to_string(limits.maxMonomers));
  Prep pp;
  build_prep(pp, c);
  compute_anchors(pp);
  Shared sh;
  sh.maxNodes = limits.maxBranchNodes;
  sh.deadline = std::chrono::steady_clock::now() +
                std::chrono::microseconds(static_cast<int64_t>(limits.timeBudgetSeconds * 1e6));
  int threads = resolve_threads(limits.threads);
  Outcome out = run_search(pp, true, sh, threads);
  bool anchored = !out.found.empty();
  if (!anchored && !sh.abort) out = run_search(pp, false, sh, threads);
  if (sh.abort) throw Error(sh.abortCode, sh.abortMsg);
  if (out.found.empty()) throw Error(ErrorCode::BudgetExceeded, "search produced no saturated configuration");
  SolveResult r;
  r.entropy = out.S;
  r.enthalpy = max_bond_count(c);
  for (auto& [k, cfg] : out.found) {
    r.keys.push_back(k);
    r.stable.push_back(cfg);
  }
  r.stats.nodes = sh.nodes.load();
  r.stats.anchorBound = pp.anchorBound;
  r.stats.anchoredSearch = anchored;
  r.stats.threads = threads;
  return r;
}

bool is_stable(const Collection& c, const Configuration& a, const SolveLimits& limits) {
  if (!validate_configuration(c, a).empty()) return false;
  if (!is_saturated(c, a)) return false;
  SolveResult r = enumerate_stable(c, limits);
  if (entropy(c, a) != r.entropy) return false;
  std::string key = canonical_key(c, a);
  return std::binary_search(r.keys.begin(), r.keys.end(), key);
}

CertificateVerdict check_entropy_certificate(const Collection& c, const Configuration& a,
                                             const EntropyCertificate& cert) {
  auto violations = validate_configuration(c, a);
  if (!violations.empty()) return {ErrorCode::NotSaturated, "invalid configuration: " + violations.front()};
  if (!is_saturated(c, a))
    return {ErrorCode::NotSaturated, "H=" + std::to_string(enthalpy(a)) + " below maximum " +
                                         std::to_string(max_bond_count(c))};
  auto ps = polymers(c, a);
  if (cert.anchors.size() != ps.size())
    return {ErrorCode::BadAnchor, "certificate lists " + std::to_string(cert.anchors.size()) +
                                      " anchors for " + std::to_string(ps.size()) + " polymers"};
  std::set<int> used;
  for (size_t i = 0; i < ps.size(); ++i) {
    int an = cert.anchors[i];
    if (!std::binary_search(ps[i].members.begin(), ps[i].members.end(), an))
      return {ErrorCode::BadAnchor, "anchor #" + std::to_string(an) + " not in polymer " + std::to_string(i)};
    Role r = c.instance_type(an).role;
    if (r != Role::Seed && r != Role::Cap)
      return {ErrorCode::BadAnchor, "anchor #" + std::to_string(an) + " is neither seed nor cap"};
    if (!used.insert(an).second) return {ErrorCode::BadAnchor, "anchor #" + std::to_string(an) + " reused"};
  }
  int64_t seeds = 0, caps = 0;
  for (int t = 0; t < c.num_types(); ++t) {
    if (c.type(t).role == Role::Seed) seeds += c.count(t);
    if (c.type(t).role == Role::Cap) caps += c.count(t);
  }
  int64_t S = static_cast<int64_t>(ps.size());
  if (cert.claimedEntropy != S)
    return {ErrorCode::BadAnchor, "claimed entropy " + std::to_string(cert.claimedEntropy) + " but S=" +
                                      std::to_string(S)};
  if (S != seeds + caps)
    return {ErrorCode::EntropyBelowBound, "S=" + std::to_string(S) + " but #seed+#cap=" +
                                              std::to_string(seeds + caps)};
  return {};
}

std::string format_summary(const SolveResult& r) {
  std::ostringstream os;
  os << "H=" << r.enthalpy << " S=" << r.entropy << " count=" << r.stable.size();
  return os.str();
}

}  // namespace tbnlab
