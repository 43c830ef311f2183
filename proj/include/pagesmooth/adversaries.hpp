#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pagesmooth/core.hpp"
#include "pagesmooth/det_policies.hpp"
#include "pagesmooth/rand_engines.hpp"
#include "pagesmooth/rational.hpp"

namespace pagesmooth {

struct Prediction {
  std::optional<Rational> good_misses;
  std::optional<Rational> bad_misses;
  bool bad_is_lower_bound = false;
  std::optional<Rational> difference;  // bad - good, exact or limit
  std::optional<Rational> epsilon;     // finite-size correction to `difference`
  std::map<std::string, Rational> extra;
};

struct SequencePair {
  std::string name;
  std::map<std::string, long> params;
  RequestSequence good;
  RequestSequence bad;
  std::size_t declared_distance = 0;
  std::optional<Prediction> predicted;
};

// Checks edit_distance(good, bad) == declared_distance; throws std::logic_error otherwise.
SequencePair make_pair(std::string name, std::map<std::string, long> params, RequestSequence good,
                       RequestSequence bad, std::size_t declared_distance,
                       std::optional<Prediction> predicted = std::nullopt);

// One JSON object per line: name, k, params, good, bad, declared_distance, predicted.
void write_pair_jsonl(std::ostream& out, const SequencePair& p);

SequencePair gen_det_demand_lower(const DetPolicyKind& kind, const CacheConfig& cfg, int delta);
SequencePair gen_opt_pair(int k, int delta);
SequencePair gen_fwf_pair(int k, int delta);

struct FifoConstruction {
  SequencePair pair;
  std::vector<PageId> good_config;  // last in first
  std::vector<PageId> bad_config;
  std::vector<std::string> log;     // per level: cases applied and orientation
};

FifoConstruction build_fifo_pair(int k);
SequencePair gen_fifo_pair(int k);
// Suffix of `rounds` extension rounds starting from the pair's final configurations.
RequestSequence gen_fifo_extension(int k, int rounds);

SequencePair gen_random_pair(int k, int delta, int n);
SequencePair gen_mark_pair(int k, int ell, int phases);
SequencePair gen_eoa_pair(int k, int m, int delta);
SequencePair gen_smoothed_lru_pair(int k, int i, int delta);

// Adaptive adversary against an exact demand-paging engine
// (RANDOM_DEMAND or LRU_RANDOM_DEMAND).
SequencePair gen_randomized_demand_lower(RandPolicy engine, int k, std::size_t iteration_cap = 100'000);

struct PartitionEquitableTrace {
  SequencePair pair;
  std::size_t good_prefix_len = 0;
  std::size_t bad_prefix_len = 0;
  std::size_t block_len = 0;
  // Layers after every request, starting from the empty representation.
  std::vector<LayerRepresentation> good_layers;
  std::vector<LayerRepresentation> bad_layers;
};

PartitionEquitableTrace gen_partition_equitable_pair(int k, int rounds = 1);

}  // namespace pagesmooth
