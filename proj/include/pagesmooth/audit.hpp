#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pagesmooth/core.hpp"
#include "pagesmooth/det_policies.hpp"
#include "pagesmooth/rand_engines.hpp"
#include "pagesmooth/rational.hpp"

namespace pagesmooth {

using Evaluator = std::function<Rational(const RequestSequence&)>;

struct NamedEvaluator {
  std::string name;
  Evaluator eval;
};

// Tags: lru, fifo, fwf, belady (opt), random, random-demand, lru-random,
// lru-random-demand, mark, eoa, smoothed-lru, step-lru.
NamedEvaluator make_evaluator(const std::string& policy, const CacheConfig& cfg);
std::vector<std::string> evaluator_names();

struct BoundSpec {
  std::function<Rational(int)> alpha;
  std::function<Rational(int)> beta;
  std::string kind = "upper";
  std::string label;
};

// (1, delta * per_edit)
BoundSpec additive_bound(const Rational& per_edit, std::string label);

enum class Verdict { HOLDS, VIOLATED, TIGHT };
std::string verdict_name(Verdict v);

struct SmoothnessReport {
  std::string policy;
  int k = 0;
  int alphabet_size = 0;
  int max_len = 0;
  int delta = 0;
  Rational worst_increase{0};
  RequestSequence witness_good, witness_bad;
  Rational witness_good_misses{0}, witness_bad_misses{0};
  std::optional<Rational> worst_ratio;  // over pairs with A(good) > 0
  RequestSequence ratio_good, ratio_bad;
  std::optional<BoundSpec> bound;
  std::optional<Verdict> verdict;
  std::size_t sequences = 0;
  std::size_t pairs = 0;
};

struct AuditOptions {
  bool canonicalize = true;         // base sequences up to page renaming
  std::size_t pair_budget = 50'000'000;
};

SmoothnessReport exhaustive_smoothness(const NamedEvaluator& ev, int k, int alphabet, int max_len, int delta,
                                       std::optional<BoundSpec> bound = std::nullopt, AuditOptions opts = {});

struct CompetitiveViolation {
  RequestSequence seq;
  Rational misses;
  std::size_t opt = 0;
};

std::vector<CompetitiveViolation> check_competitive(const NamedEvaluator& ev, const Rational& c, const Rational& beta,
                                                    const std::vector<RequestSequence>& corpus, int k);

struct CompositionResult {
  bool holds = false;
  Rational worst_single{0};
  Rational worst_delta{0};
};

CompositionResult composition_check(const NamedEvaluator& ev, int k, int alphabet, int max_len, const Rational& beta1,
                                    int delta, AuditOptions opts = {});

// LRU-Random, k = 2. States are [mru lru].
using CacheState = std::vector<PageId>;

struct DistanceTable {
  // s is always [0 1]; keyed by the canonical partner s'
  std::map<CacheState, Rational> entries;
  std::size_t iterations = 0;
  bool exact_convergence = false;  // an iterate repeated exactly
  bool snapped = false;            // limit recovered as small rationals and verified as a fixpoint
  bool monotone = true;
  Rational last_change{0};

  Rational distance(const CacheState& s, const CacheState& t) const;
};

std::vector<CacheState> distance_table_keys();

DistanceTable lru_random_distance_fixpoint(int k = 2, const Rational& tolerance = Rational("1/1000000000000"),
                                           std::size_t iteration_cap = 10'000);

struct EditCase {
  std::string label;
  Rational bound;
};

struct EditBound {
  Rational value{0};
  std::vector<EditCase> cases;
};

EditBound lru_random_edit_bound(const DistanceTable& table);

struct ProbeRow {
  int k = 0;
  std::size_t samples = 0;
  Rational worst_increase{0};
  RequestSequence witness_good, witness_bad;
  double hk_squared = 0;
};

std::vector<ProbeRow> conjecture_probe(int k_min, int k_max, std::size_t samples, int length, std::uint64_t seed);

}  // namespace pagesmooth
