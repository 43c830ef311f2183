#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "pagesmooth/core.hpp"

namespace pagesmooth {

enum class DetPolicy { LRU, FIFO, FWF, BELADY, DET_STEP_LRU };

struct DetPolicyKind {
  DetPolicy policy = DetPolicy::LRU;
  std::set<int> D;  // cached ages in the band [k-i, k+i), DET_STEP_LRU only

  static DetPolicyKind lru() { return {DetPolicy::LRU, {}}; }
  static DetPolicyKind fifo() { return {DetPolicy::FIFO, {}}; }
  static DetPolicyKind fwf() { return {DetPolicy::FWF, {}}; }
  static DetPolicyKind belady() { return {DetPolicy::BELADY, {}}; }
  static DetPolicyKind det_step_lru(std::set<int> ages) { return {DetPolicy::DET_STEP_LRU, std::move(ages)}; }

  bool demand_paging() const { return policy == DetPolicy::LRU || policy == DetPolicy::FIFO || policy == DetPolicy::BELADY; }
  bool online() const { return policy != DetPolicy::BELADY; }
};

std::string policy_name(const DetPolicyKind& kind);
DetPolicyKind parse_det_policy(const std::string& name);

struct EvictionEvent {
  std::vector<PageId> pages;
  bool flush = false;
  bool operator==(const EvictionEvent&) const = default;
};

struct TraceResult {
  std::vector<bool> miss_flags;
  std::vector<std::optional<EvictionEvent>> evictions;
  std::size_t miss_count = 0;
  std::vector<PageId> final_state;
};

// Step-by-step simulator for the online policies; adaptive adversaries drive it.
class OnlineCache {
 public:
  virtual ~OnlineCache() = default;
  // Serves p; returns true on a miss and fills `ev` with what was evicted.
  virtual bool access(PageId p, std::optional<EvictionEvent>& ev) = 0;
  virtual std::vector<PageId> state() const = 0;
  virtual bool contains(PageId p) const = 0;
};

// Ages (stack positions) currently cached by a Det-Step-LRU instance.
std::set<int> det_step_cached_ages(const OnlineCache& cache);

std::unique_ptr<OnlineCache> make_online_cache(const DetPolicyKind& kind, const CacheConfig& cfg);

TraceResult simulate(const DetPolicyKind& kind, const CacheConfig& cfg, const RequestSequence& s);

inline std::size_t misses(const DetPolicyKind& kind, const CacheConfig& cfg, const RequestSequence& s) {
  return simulate(kind, cfg, s).miss_count;
}

inline constexpr std::size_t kDefaultOptNodeCap = 5'000'000;

std::size_t brute_force_opt(const CacheConfig& cfg, const RequestSequence& s,
                            std::size_t node_cap = kDefaultOptNodeCap);

std::optional<EvictionEvent> evicted_on_last(const TraceResult& t);

// index,page,miss,evicted
void write_trace_csv(std::ostream& out, const RequestSequence& s, const TraceResult& t);

// Ages in the LRU sense: distinct pages requested since the previous request.
// Returns nullopt for a first request. `cap` truncates the tracked stack;
// anything older reports nullopt too.
class AgeTracker {
 public:
  explicit AgeTracker(std::size_t cap = std::numeric_limits<std::size_t>::max()) : cap_(cap) {}
  std::optional<std::size_t> access(PageId p);
  std::optional<std::size_t> age_of(PageId p) const;
  const std::vector<PageId>& stack() const { return stack_; }

 private:
  std::size_t cap_;
  std::vector<PageId> stack_;  // youngest first
};

// Age of every request at the time it is served.
std::vector<std::optional<std::size_t>> request_ages(const RequestSequence& s);

}  // namespace pagesmooth
