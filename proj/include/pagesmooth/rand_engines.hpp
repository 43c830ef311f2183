#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "pagesmooth/core.hpp"
#include "pagesmooth/rational.hpp"

namespace pagesmooth {

struct ExpectedMisses {
  Rational value{0};
  std::vector<Rational> per_request;

  void push(const Rational& p) {
    per_request.push_back(p);
    value += p;
  }
};

// index,page,miss_probability,miss_decimal
void write_expected_csv(std::ostream& out, const RequestSequence& s, const ExpectedMisses& e);

enum class RandPolicy { RANDOM, RANDOM_DEMAND, LRU_RANDOM, LRU_RANDOM_DEMAND, MARK, EOA };

std::string rand_policy_name(RandPolicy p);

inline constexpr std::size_t kDefaultStateCap = 1'000'000;

// Exact evolution of the state distribution of a randomized policy.
// States hold exactly k slots; kEmptySlot marks a free slot.
//   RANDOM*     : sorted slot multiset
//   LRU_RANDOM* : recency list, youngest first, free slots at the old end
//   MARK        : sorted slots, each encoded 2*page+marked
//   EOA         : sorted slot multiset
class ExactEngine {
 public:
  using State = std::vector<PageId>;

  ExactEngine(RandPolicy policy, const CacheConfig& cfg, std::size_t state_cap = kDefaultStateCap);

  // Serves p; returns its miss probability and advances the distribution.
  Rational request(PageId p);
  Rational absent_probability(PageId p) const;

  const std::map<State, Rational>& distribution() const { return dist_; }
  std::size_t state_count() const { return dist_.size(); }
  Rational total_mass() const;
  RandPolicy policy() const { return policy_; }
  int k() const { return k_; }

 private:
  bool state_has(const State& s, PageId p) const;
  void successors(const State& s, PageId p, const Rational& w, std::map<State, Rational>& out) const;

  RandPolicy policy_;
  int k_;
  std::size_t cap_;
  Rational hk_;
  std::map<State, Rational> dist_;
};

ExpectedMisses run_engine(RandPolicy policy, const CacheConfig& cfg, const RequestSequence& s,
                          std::size_t state_cap = kDefaultStateCap);

ExpectedMisses expected_random(const CacheConfig& cfg, const RequestSequence& s, bool demand = false);
ExpectedMisses expected_lru_random(const CacheConfig& cfg, const RequestSequence& s, bool demand = false);

// 1/(i*H_k) for i = 1 (oldest) .. k (youngest).
std::vector<Rational> lru_random_eviction_law(int k);

// Per-phase formula; marked 0, new 1, j-th old n_j/(k-j+1).
ExpectedMisses expected_mark(const CacheConfig& cfg, const RequestSequence& s);
ExpectedMisses mark_enumeration(const CacheConfig& cfg, const RequestSequence& s);

// Reuse distance: number of requests since the previous request to the page.
std::vector<std::optional<std::size_t>> reuse_distances(const RequestSequence& s);
ExpectedMisses expected_eoa(const CacheConfig& cfg, const RequestSequence& s);
ExpectedMisses eoa_enumeration(const CacheConfig& cfg, const RequestSequence& s);

// nullopt age means "never requested before".
Rational smoothed_lru_hit_prob(std::optional<std::size_t> age, const CacheConfig& cfg);
Rational step_lru_hit_prob(std::optional<std::size_t> age, const CacheConfig& cfg);

ExpectedMisses expected_smoothed_lru(const CacheConfig& cfg, const RequestSequence& s);
ExpectedMisses expected_step_lru(const CacheConfig& cfg, const RequestSequence& s);

// All size-i subsets of {k-i, ..., k+i-1}.
std::vector<std::set<int>> step_lru_age_sets(int k, int i);

// Uniform mixture over Det-Step-LRU_{k,i,D}.
ExpectedMisses step_lru_ensemble(const CacheConfig& cfg, const RequestSequence& s,
                                 std::size_t enum_cap = 100'000);
// Decomposition of Smoothed-LRU into Step-LRU_{k,0..i} ensembles.
ExpectedMisses smoothed_lru_ensemble(const CacheConfig& cfg, const RequestSequence& s,
                                     std::size_t enum_cap = 100'000);

struct McEstimate {
  double mean = 0;
  double stderr_ = 0;
  std::size_t trials = 0;
};

inline constexpr const char* kMcGenerator = "mt19937_64 seeded by splitmix64(seed, trial)";

std::vector<std::string> monte_carlo_policies();

// Tags: random, random-demand, lru-random, lru-random-demand, mark, eoa,
// smoothed-lru, step-lru.
McEstimate monte_carlo(const std::string& policy, const CacheConfig& cfg, const RequestSequence& s,
                       std::size_t trials, std::uint64_t seed);

struct LayerRepresentation {
  std::vector<std::set<PageId>> layers;

  static LayerRepresentation empty(int k) { return {std::vector<std::set<PageId>>(static_cast<std::size_t>(k))}; }
  std::vector<std::size_t> sizes() const;
  bool operator==(const LayerRepresentation&) const = default;
};

LayerRepresentation layer_update(const LayerRepresentation& w, PageId p);
bool layers_equal_up_to_renaming(const LayerRepresentation& a, const LayerRepresentation& b);
std::string format_layers(const LayerRepresentation& w);

}  // namespace pagesmooth
