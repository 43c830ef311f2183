#include "pagesmooth/rand_engines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "pagesmooth/det_policies.hpp"

namespace pagesmooth {

namespace {

bool is_mark(RandPolicy p) { return p == RandPolicy::MARK; }
bool is_lru(RandPolicy p) { return p == RandPolicy::LRU_RANDOM || p == RandPolicy::LRU_RANDOM_DEMAND; }
bool is_demand(RandPolicy p) { return p == RandPolicy::RANDOM_DEMAND || p == RandPolicy::LRU_RANDOM_DEMAND; }

PageId mark_page(PageId code) { return code / 2; }
bool marked(PageId code) { return code % 2 == 1; }

void check_page(PageId p) {
  if (p < 0 || p == kEmptySlot) throw std::invalid_argument("page ids must be non-negative");
}

}  // namespace

std::string rand_policy_name(RandPolicy p) {
  switch (p) {
    case RandPolicy::RANDOM: return "random";
    case RandPolicy::RANDOM_DEMAND: return "random-demand";
    case RandPolicy::LRU_RANDOM: return "lru-random";
    case RandPolicy::LRU_RANDOM_DEMAND: return "lru-random-demand";
    case RandPolicy::MARK: return "mark";
    case RandPolicy::EOA: return "eoa";
  }
  return "?";
}

void write_expected_csv(std::ostream& out, const RequestSequence& s, const ExpectedMisses& e) {
  out << "index,page,miss_probability,miss_decimal\n";
  for (std::size_t j = 0; j < s.size(); ++j)
    out << j << ',' << s[j] << ',' << to_fraction(e.per_request[j]) << ',' << to_double(e.per_request[j]) << '\n';
}

ExactEngine::ExactEngine(RandPolicy policy, const CacheConfig& cfg, std::size_t state_cap)
    : policy_(policy), k_(cfg.k), cap_(state_cap), hk_(harmonic(cfg.k)) {
  cfg.validate();
  dist_[State(static_cast<std::size_t>(k_), kEmptySlot)] = 1;
}

bool ExactEngine::state_has(const State& s, PageId p) const {
  for (PageId q : s) {
    if (q == kEmptySlot) continue;
    if ((is_mark(policy_) ? mark_page(q) : q) == p) return true;
  }
  return false;
}

void ExactEngine::successors(const State& s, PageId p, const Rational& w, std::map<State, Rational>& out) const {
  const std::size_t k = s.size();
  const bool hit = state_has(s, p);
  const Rational wk = w / static_cast<long>(k);
  auto free_slot = std::find(s.begin(), s.end(), kEmptySlot);

  if (is_lru(policy_)) {
    State t = s;
    if (hit) {
      t.erase(std::find(t.begin(), t.end(), p));
      t.insert(t.begin(), p);
      out[t] += w;
      return;
    }
    if (is_demand(policy_) && free_slot != s.end()) {
      t.pop_back();
      t.insert(t.begin(), p);
      out[t] += w;
      return;
    }
    for (std::size_t idx = 0; idx < k; ++idx) {
      long i = static_cast<long>(k - idx);  // i = 1 is the oldest slot
      State u = s;
      u.erase(u.begin() + static_cast<std::ptrdiff_t>(idx));
      u.insert(u.begin(), p);
      out[u] += w / (hk_ * i);
    }
    return;
  }

  if (is_mark(policy_)) {
    State t = s;
    if (hit) {
      for (auto& q : t)
        if (q != kEmptySlot && mark_page(q) == p) q = 2 * p + 1;
      std::sort(t.begin(), t.end());
      out[t] += w;
      return;
    }
    if (free_slot != s.end()) {
      t[static_cast<std::size_t>(free_slot - s.begin())] = 2 * p + 1;
      std::sort(t.begin(), t.end());
      out[t] += w;
      return;
    }
    if (std::all_of(t.begin(), t.end(), marked))
      for (auto& q : t) q = 2 * mark_page(q);
    std::vector<std::size_t> unmarked;
    for (std::size_t idx = 0; idx < k; ++idx)
      if (!marked(t[idx])) unmarked.push_back(idx);
    Rational wu = w / static_cast<long>(unmarked.size());
    for (std::size_t idx : unmarked) {
      State u = t;
      u[idx] = 2 * p + 1;
      std::sort(u.begin(), u.end());
      out[u] += wu;
    }
    return;
  }

  if (policy_ == RandPolicy::EOA) {
    for (std::size_t idx = 0; idx < k; ++idx) {
      State u = s;
      if (hit) {
        if (u[idx] != p) u[idx] = kEmptySlot;
      } else {
        u[idx] = p;
      }
      std::sort(u.begin(), u.end());
      out[u] += wk;
    }
    return;
  }

  // Random
  if (hit) {
    out[s] += w;
    return;
  }
  if (is_demand(policy_) && free_slot != s.end()) {
    State t = s;
    t[static_cast<std::size_t>(free_slot - s.begin())] = p;
    std::sort(t.begin(), t.end());
    out[t] += w;
    return;
  }
  for (std::size_t idx = 0; idx < k; ++idx) {
    State u = s;
    u[idx] = p;
    std::sort(u.begin(), u.end());
    out[u] += wk;
  }
}

Rational ExactEngine::absent_probability(PageId p) const {
  Rational a(0);
  for (const auto& [s, w] : dist_)
    if (!state_has(s, p)) a += w;
  return a;
}

Rational ExactEngine::request(PageId p) {
  check_page(p);
  Rational miss = absent_probability(p);
  std::map<State, Rational> next;
  for (const auto& [s, w] : dist_) {
    successors(s, p, w, next);
    if (next.size() > cap_) throw BudgetExceeded("state distribution exceeds cap");
  }
  dist_ = std::move(next);
  return miss;
}

Rational ExactEngine::total_mass() const {
  Rational t(0);
  for (const auto& kv : dist_) t += kv.second;
  return t;
}

ExpectedMisses run_engine(RandPolicy policy, const CacheConfig& cfg, const RequestSequence& s, std::size_t cap) {
  ExactEngine e(policy, cfg, cap);
  ExpectedMisses out;
  for (PageId p : s) out.push(e.request(p));
  return out;
}

ExpectedMisses expected_random(const CacheConfig& cfg, const RequestSequence& s, bool demand) {
  return run_engine(demand ? RandPolicy::RANDOM_DEMAND : RandPolicy::RANDOM, cfg, s);
}

ExpectedMisses expected_lru_random(const CacheConfig& cfg, const RequestSequence& s, bool demand) {
  return run_engine(demand ? RandPolicy::LRU_RANDOM_DEMAND : RandPolicy::LRU_RANDOM, cfg, s);
}

std::vector<Rational> lru_random_eviction_law(int k) {
  Rational hk = harmonic(k);
  std::vector<Rational> law;
  for (int i = 1; i <= k; ++i) law.push_back(1 / (hk * i));
  return law;
}

ExpectedMisses expected_mark(const CacheConfig& cfg, const RequestSequence& s) {
  cfg.validate();
  ExpectedMisses out;
  PhasePartition pp = phase_partition(s, cfg.k);
  std::set<PageId> old_pages, current;
  std::size_t next_phase = 1;
  long n_new = 0, j_old = 0;
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    if (next_phase < pp.boundaries.size() && pp.boundaries[next_phase] == idx) {
      old_pages = std::move(current);
      current.clear();
      n_new = j_old = 0;
      ++next_phase;
    }
    PageId p = s[idx];
    check_page(p);
    if (current.count(p)) {
      out.push(Rational(0));
    } else if (old_pages.count(p)) {
      ++j_old;
      out.push(make_rational(n_new, cfg.k - j_old + 1));
    } else {
      ++n_new;
      out.push(Rational(1));
    }
    current.insert(p);
  }
  return out;
}

ExpectedMisses mark_enumeration(const CacheConfig& cfg, const RequestSequence& s) {
  return run_engine(RandPolicy::MARK, cfg, s);
}

std::vector<std::optional<std::size_t>> reuse_distances(const RequestSequence& s) {
  std::unordered_map<PageId, std::size_t> last;
  std::vector<std::optional<std::size_t>> out;
  for (std::size_t j = 0; j < s.size(); ++j) {
    auto it = last.find(s[j]);
    if (it == last.end()) out.push_back(std::nullopt);
    else out.push_back(j - it->second - 1);
    last[s[j]] = j;
  }
  return out;
}

ExpectedMisses expected_eoa(const CacheConfig& cfg, const RequestSequence& s) {
  cfg.validate();
  for (PageId p : s) check_page(p);
  Rational keep(cfg.k - 1, cfg.k);
  keep.canonicalize();
  ExpectedMisses out;
  for (auto d : reuse_distances(s)) {
    if (!d) out.push(Rational(1));
    else out.push(1 - rpow(keep, static_cast<unsigned>(*d)));
  }
  return out;
}

ExpectedMisses eoa_enumeration(const CacheConfig& cfg, const RequestSequence& s) {
  return run_engine(RandPolicy::EOA, cfg, s);
}

Rational smoothed_lru_hit_prob(std::optional<std::size_t> age, const CacheConfig& cfg) {
  cfg.validate();
  if (!age) return 0;
  long a = static_cast<long>(*age), k = cfg.k, i = cfg.i;
  if (a < k - i) return 1;
  if (a < k + i) {
    Rational r(k + i - a, 2 * i + 1);
    r.canonicalize();
    return r;
  }
  return 0;
}

Rational step_lru_hit_prob(std::optional<std::size_t> age, const CacheConfig& cfg) {
  cfg.validate();
  if (!age) return 0;
  long a = static_cast<long>(*age), k = cfg.k, i = cfg.i;
  if (a < k - i) return 1;
  if (a < k + i) return Rational(1, 2);
  return 0;
}

namespace {

template <class HitFn>
ExpectedMisses age_based(const CacheConfig& cfg, const RequestSequence& s, HitFn hit) {
  for (PageId p : s) check_page(p);
  ExpectedMisses out;
  for (auto a : request_ages(s)) out.push(1 - hit(a, cfg));
  return out;
}

}  // namespace

ExpectedMisses expected_smoothed_lru(const CacheConfig& cfg, const RequestSequence& s) {
  return age_based(cfg, s, smoothed_lru_hit_prob);
}

ExpectedMisses expected_step_lru(const CacheConfig& cfg, const RequestSequence& s) {
  return age_based(cfg, s, step_lru_hit_prob);
}

std::vector<std::set<int>> step_lru_age_sets(int k, int i) {
  std::vector<std::set<int>> out;
  std::vector<int> band;
  for (int a = k - i; a < k + i; ++a) band.push_back(a);
  std::vector<bool> pick(band.size(), false);
  std::fill(pick.begin(), pick.begin() + i, true);
  do {
    std::set<int> D;
    for (std::size_t j = 0; j < band.size(); ++j)
      if (pick[j]) D.insert(band[j]);
    out.push_back(std::move(D));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

ExpectedMisses step_lru_ensemble(const CacheConfig& cfg, const RequestSequence& s, std::size_t enum_cap) {
  cfg.validate();
  auto sets = step_lru_age_sets(cfg.k, cfg.i);
  if (sets.size() > enum_cap) throw BudgetExceeded("Det-Step-LRU ensemble exceeds enumeration cap");
  std::vector<long> miss_counts(s.size(), 0);
  for (const auto& D : sets) {
    auto t = simulate(DetPolicyKind::det_step_lru(D), cfg, s);
    for (std::size_t j = 0; j < s.size(); ++j) miss_counts[j] += t.miss_flags[j] ? 1 : 0;
  }
  ExpectedMisses out;
  long n = static_cast<long>(sets.size());
  for (long c : miss_counts) {
    Rational r(c, n);
    r.canonicalize();
    out.push(r);
  }
  return out;
}

ExpectedMisses smoothed_lru_ensemble(const CacheConfig& cfg, const RequestSequence& s, std::size_t enum_cap) {
  cfg.validate();
  ExpectedMisses out;
  out.per_request.assign(s.size(), Rational(0));
  for (int j = 0; j <= cfg.i; ++j) {
    auto step = step_lru_ensemble(CacheConfig(cfg.k, j), s, enum_cap);
    Rational weight(j == 0 ? 1 : 2, 2 * cfg.i + 1);
    weight.canonicalize();
    for (std::size_t r = 0; r < s.size(); ++r) out.per_request[r] += weight * step.per_request[r];
  }
  for (const auto& r : out.per_request) out.value += r;
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// One stochastic run; returns the miss count.
std::size_t sample_run(const std::string& policy, const CacheConfig& cfg, const RequestSequence& s,
                       const std::vector<double>& lru_law, Rng& rng) {
  const std::size_t k = static_cast<std::size_t>(cfg.k);
  std::size_t misses = 0;
  if (policy == "smoothed-lru" || policy == "step-lru") {
    int j = cfg.i;
    if (policy == "smoothed-lru") {
      // j = 0 with weight 1, j >= 1 with weight 2, out of 2i+1
      std::size_t ticket = uniform_index(rng, static_cast<std::size_t>(2 * cfg.i + 1));
      j = ticket == 0 ? 0 : static_cast<int>((ticket + 1) / 2);
    }
    std::vector<int> band;
    for (int a = cfg.k - j; a < cfg.k + j; ++a) band.push_back(a);
    std::shuffle(band.begin(), band.end(), rng);
    std::set<int> D(band.begin(), band.begin() + j);
    return simulate(DetPolicyKind::det_step_lru(D), CacheConfig(cfg.k, j), s).miss_count;
  }
  std::vector<PageId> slots(k, kEmptySlot);  // LRU-Random: youngest first
  std::set<PageId> marks;
  for (PageId p : s) {
    auto it = std::find(slots.begin(), slots.end(), p);
    bool hit = it != slots.end();
    auto free_slot = std::find(slots.begin(), slots.end(), kEmptySlot);
    if (!hit) ++misses;
    if (policy == "random" || policy == "random-demand") {
      if (hit) continue;
      if (policy == "random-demand" && free_slot != slots.end()) *free_slot = p;
      else slots[uniform_index(rng, k)] = p;
    } else if (policy == "lru-random" || policy == "lru-random-demand") {
      if (hit) {
        slots.erase(it);
      } else if (policy == "lru-random-demand" && free_slot != slots.end()) {
        slots.pop_back();
      } else {
        double u = std::uniform_real_distribution<double>(0, 1)(rng), acc = 0;
        std::size_t idx = 0;  // oldest first in the law
        for (; idx + 1 < k; ++idx) {
          acc += lru_law[idx];
          if (u < acc) break;
        }
        slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(k - 1 - idx));
      }
      slots.insert(slots.begin(), p);
    } else if (policy == "mark") {
      if (!hit) {
        if (free_slot != slots.end()) {
          *free_slot = p;
        } else {
          if (marks.size() == k) marks.clear();
          std::vector<std::size_t> unmarked;
          for (std::size_t idx = 0; idx < k; ++idx)
            if (!marks.count(slots[idx])) unmarked.push_back(idx);
          slots[unmarked[uniform_index(rng, unmarked.size())]] = p;
        }
      }
      marks.insert(p);
    } else if (policy == "eoa") {
      std::size_t idx = uniform_index(rng, k);
      if (hit) {
        if (slots[idx] != p) slots[idx] = kEmptySlot;
      } else {
        slots[idx] = p;
      }
    } else {
      throw std::invalid_argument("unknown randomized policy: " + policy);
    }
  }
  return misses;
}

}  // namespace

std::vector<std::string> monte_carlo_policies() {
  return {"random", "random-demand", "lru-random", "lru-random-demand", "mark", "eoa", "smoothed-lru", "step-lru"};
}

McEstimate monte_carlo(const std::string& policy, const CacheConfig& cfg, const RequestSequence& s,
                       std::size_t trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  auto known = monte_carlo_policies();
  if (std::find(known.begin(), known.end(), policy) == known.end())
    throw std::invalid_argument("unknown randomized policy: " + policy);
  for (PageId p : s) check_page(p);
  std::vector<double> law;
  for (const auto& r : lru_random_eviction_law(cfg.k)) law.push_back(to_double(r));
  double sum = 0, sumsq = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(splitmix64(seed ^ splitmix64(t)));
    double m = static_cast<double>(sample_run(policy, cfg, s, law, rng));
    sum += m;
    sumsq += m * m;
  }
  McEstimate e;
  e.trials = trials;
  e.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double var = (sumsq - sum * e.mean) / static_cast<double>(trials - 1);
    e.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
  }
  return e;
}

std::vector<std::size_t> LayerRepresentation::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& l : layers) out.push_back(l.size());
  return out;
}

LayerRepresentation layer_update(const LayerRepresentation& w, PageId p) {
  const std::size_t k = w.layers.size();
  if (k == 0) throw std::invalid_argument("layer representation needs k >= 1 layers");
  std::size_t j = k;  // 0-based index of p's layer, k if fresh
  for (std::size_t idx = 0; idx < k; ++idx)
    if (w.layers[idx].count(p)) j = idx;
  LayerRepresentation out;
  out.layers.push_back({p});
  if (j == k) {
    if (k >= 2) {
      std::set<PageId> merged = w.layers[0];
      merged.insert(w.layers[1].begin(), w.layers[1].end());
      out.layers.push_back(std::move(merged));
      for (std::size_t idx = 2; idx < k; ++idx) out.layers.push_back(w.layers[idx]);
    }
  } else if (j == k - 1) {
    for (std::size_t idx = 0; idx + 1 < k; ++idx) out.layers.push_back(w.layers[idx]);
  } else {
    for (std::size_t idx = 0; idx < j; ++idx) out.layers.push_back(w.layers[idx]);
    std::set<PageId> merged = w.layers[j];
    merged.insert(w.layers[j + 1].begin(), w.layers[j + 1].end());
    merged.erase(p);
    out.layers.push_back(std::move(merged));
    for (std::size_t idx = j + 2; idx < k; ++idx) out.layers.push_back(w.layers[idx]);
  }
  return out;
}

bool layers_equal_up_to_renaming(const LayerRepresentation& a, const LayerRepresentation& b) {
  return a.sizes() == b.sizes();
}

std::string format_layers(const LayerRepresentation& w) {
  std::string out = "(";
  for (std::size_t idx = 0; idx < w.layers.size(); ++idx) {
    if (idx) out += ", ";
    out += "{";
    bool first = true;
    for (PageId p : w.layers[idx]) {
      if (!first) out += ",";
      out += std::to_string(p);
      first = false;
    }
    out += "}";
  }
  return out + ")";
}

}  // namespace pagesmooth
