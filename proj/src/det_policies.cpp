#include "pagesmooth/det_policies.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace pagesmooth {

namespace {

void check_user_page(PageId p) {
  if (p < 0 || p == kEmptySlot) throw std::invalid_argument("page ids must be non-negative: " + std::to_string(p));
}

class LruCache : public OnlineCache {
 public:
  explicit LruCache(int k) : k_(k) {}
  bool access(PageId p, std::optional<EvictionEvent>& ev) override {
    ev.reset();
    auto it = std::find(order_.begin(), order_.end(), p);
    bool miss = it == order_.end();
    if (!miss) {
      order_.erase(it);
    } else if (static_cast<int>(order_.size()) == k_) {
      ev = EvictionEvent{{order_.back()}, false};
      order_.pop_back();
    }
    order_.insert(order_.begin(), p);
    return miss;
  }
  std::vector<PageId> state() const override { return order_; }
  bool contains(PageId p) const override { return std::find(order_.begin(), order_.end(), p) != order_.end(); }

 private:
  int k_;
  std::vector<PageId> order_;  // most recent first
};

class FifoCache : public OnlineCache {
 public:
  explicit FifoCache(int k) : k_(k) {}
  bool access(PageId p, std::optional<EvictionEvent>& ev) override {
    ev.reset();
    if (contains(p)) return false;
    if (static_cast<int>(queue_.size()) == k_) {
      ev = EvictionEvent{{queue_.back()}, false};
      queue_.pop_back();
    }
    queue_.insert(queue_.begin(), p);
    return true;
  }
  std::vector<PageId> state() const override { return queue_; }
  bool contains(PageId p) const override { return std::find(queue_.begin(), queue_.end(), p) != queue_.end(); }

 private:
  int k_;
  std::vector<PageId> queue_;  // last in first
};

class FwfCache : public OnlineCache {
 public:
  explicit FwfCache(int k) : k_(k) {}
  bool access(PageId p, std::optional<EvictionEvent>& ev) override {
    ev.reset();
    if (contains(p)) return false;
    if (static_cast<int>(pages_.size()) == k_) {
      ev = EvictionEvent{pages_, true};
      pages_.clear();
    }
    pages_.insert(pages_.begin(), p);
    return true;
  }
  std::vector<PageId> state() const override { return pages_; }
  bool contains(PageId p) const override { return std::find(pages_.begin(), pages_.end(), p) != pages_.end(); }

 private:
  int k_;
  std::vector<PageId> pages_;
};

// Recency stack over the k+i youngest pages, seeded with dummies -1..-(k+i)
// at ages 0..k+i-1. Cached: the k-i youngest plus the ages in D.
class DetStepLruCache : public OnlineCache {
 public:
  DetStepLruCache(const CacheConfig& cfg, const std::set<int>& D) : k_(cfg.k), i_(cfg.i) {
    if (static_cast<int>(D.size()) != i_) throw std::invalid_argument("Det-Step-LRU: |D| must equal i");
    for (int a : D)
      if (a < k_ - i_ || a >= k_ + i_) throw std::invalid_argument("Det-Step-LRU: D must lie in [k-i, k+i)");
    for (int a = 0; a < k_ + i_; ++a) {
      PageId dummy = -(a + 1);
      stack_.push_back(dummy);
      if (a < k_ - i_ || D.count(a)) cached_.insert(dummy);
    }
  }
  bool access(PageId p, std::optional<EvictionEvent>& ev) override {
    ev.reset();
    if (p < 0) throw std::invalid_argument("Det-Step-LRU: dummy pages cannot be requested");
    auto it = std::find(stack_.begin(), stack_.end(), p);
    std::size_t window = static_cast<std::size_t>(k_ + i_);
    bool miss = !cached_.count(p);
    if (miss) {
      bool old = it == stack_.end();  // age >= k+i
      PageId victim = stack_[static_cast<std::size_t>(k_ - i_ - 1)];
      if (old && cached_.count(stack_[window - 1])) victim = stack_[window - 1];
      cached_.erase(victim);
      cached_.insert(p);
      ev = EvictionEvent{{victim}, false};
    }
    if (it != stack_.end()) stack_.erase(it);
    stack_.insert(stack_.begin(), p);
    if (stack_.size() > window) {
      if (cached_.count(stack_.back())) throw std::logic_error("Det-Step-LRU: cached page aged out of window");
      stack_.pop_back();
    }
    return miss;
  }
  std::vector<PageId> state() const override {
    std::vector<PageId> out;
    for (PageId q : stack_)
      if (cached_.count(q)) out.push_back(q);
    return out;
  }
  bool contains(PageId p) const override { return cached_.count(p) > 0; }

  std::set<int> cached_ages() const {
    std::set<int> ages;
    for (std::size_t a = 0; a < stack_.size(); ++a)
      if (cached_.count(stack_[a])) ages.insert(static_cast<int>(a));
    return ages;
  }

 private:
  int k_, i_;
  std::vector<PageId> stack_;
  std::set<PageId> cached_;
};

TraceResult simulate_belady(const CacheConfig& cfg, const RequestSequence& s) {
  TraceResult t;
  const std::size_t n = s.size();
  std::vector<std::size_t> next_use(n, n);
  std::unordered_map<PageId, std::size_t> last;
  for (std::size_t j = n; j-- > 0;) {
    auto it = last.find(s[j]);
    if (it != last.end()) next_use[j] = it->second;
    last[s[j]] = j;
  }
  std::map<PageId, std::size_t> cache;  // page -> next use index
  std::vector<PageId> order;            // last in first
  for (std::size_t j = 0; j < n; ++j) {
    PageId p = s[j];
    check_user_page(p);
    bool miss = !cache.count(p);
    std::optional<EvictionEvent> ev;
    if (miss && static_cast<int>(cache.size()) == cfg.k) {
      // farthest next use; map order makes the smallest id win ties
      auto victim = cache.begin();
      for (auto it = cache.begin(); it != cache.end(); ++it)
        if (it->second > victim->second) victim = it;
      ev = EvictionEvent{{victim->first}, false};
      order.erase(std::find(order.begin(), order.end(), victim->first));
      cache.erase(victim);
    }
    if (miss) order.insert(order.begin(), p);
    cache[p] = next_use[j];
    t.miss_flags.push_back(miss);
    t.evictions.push_back(ev);
    if (miss) ++t.miss_count;
  }
  t.final_state = order;
  return t;
}

}  // namespace

std::set<int> det_step_cached_ages(const OnlineCache& cache) {
  auto* c = dynamic_cast<const DetStepLruCache*>(&cache);
  if (!c) throw std::invalid_argument("not a Det-Step-LRU cache");
  return c->cached_ages();
}

std::string policy_name(const DetPolicyKind& kind) {
  switch (kind.policy) {
    case DetPolicy::LRU: return "lru";
    case DetPolicy::FIFO: return "fifo";
    case DetPolicy::FWF: return "fwf";
    case DetPolicy::BELADY: return "belady";
    case DetPolicy::DET_STEP_LRU: return "det-step-lru";
  }
  return "?";
}

DetPolicyKind parse_det_policy(const std::string& name) {
  if (name == "lru") return DetPolicyKind::lru();
  if (name == "fifo") return DetPolicyKind::fifo();
  if (name == "fwf") return DetPolicyKind::fwf();
  if (name == "belady" || name == "opt") return DetPolicyKind::belady();
  throw std::invalid_argument("unknown deterministic policy: " + name);
}

std::unique_ptr<OnlineCache> make_online_cache(const DetPolicyKind& kind, const CacheConfig& cfg) {
  cfg.validate();
  switch (kind.policy) {
    case DetPolicy::LRU: return std::make_unique<LruCache>(cfg.k);
    case DetPolicy::FIFO: return std::make_unique<FifoCache>(cfg.k);
    case DetPolicy::FWF: return std::make_unique<FwfCache>(cfg.k);
    case DetPolicy::DET_STEP_LRU: return std::make_unique<DetStepLruCache>(cfg, kind.D);
    case DetPolicy::BELADY: break;
  }
  throw std::invalid_argument("Belady is offline and has no step simulator");
}

TraceResult simulate(const DetPolicyKind& kind, const CacheConfig& cfg, const RequestSequence& s) {
  cfg.validate();
  if (kind.policy == DetPolicy::BELADY) return simulate_belady(cfg, s);
  auto cache = make_online_cache(kind, cfg);
  TraceResult t;
  t.miss_flags.reserve(s.size());
  t.evictions.reserve(s.size());
  for (PageId p : s) {
    if (kind.policy != DetPolicy::DET_STEP_LRU) check_user_page(p);
    std::optional<EvictionEvent> ev;
    bool miss = cache->access(p, ev);
    t.miss_flags.push_back(miss);
    t.evictions.push_back(ev);
    if (miss) ++t.miss_count;
  }
  t.final_state = cache->state();
  return t;
}

std::size_t brute_force_opt(const CacheConfig& cfg, const RequestSequence& s, std::size_t node_cap) {
  cfg.validate();
  std::map<std::pair<std::size_t, std::vector<PageId>>, std::size_t> memo;
  std::size_t nodes = 0;
  auto rec = [&](auto&& self, std::size_t j, std::vector<PageId> cache) -> std::size_t {
    while (j < s.size() && std::binary_search(cache.begin(), cache.end(), s[j])) ++j;
    if (j == s.size()) return 0;
    auto key = std::make_pair(j, cache);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (++nodes > node_cap) throw BudgetExceeded("brute_force_opt exceeds node cap");
    std::size_t best = std::numeric_limits<std::size_t>::max();
    if (static_cast<int>(cache.size()) < cfg.k) {
      auto next = cache;
      next.insert(std::lower_bound(next.begin(), next.end(), s[j]), s[j]);
      best = 1 + self(self, j + 1, std::move(next));
    } else {
      for (std::size_t v = 0; v < cache.size(); ++v) {
        auto next = cache;
        next.erase(next.begin() + static_cast<std::ptrdiff_t>(v));
        next.insert(std::lower_bound(next.begin(), next.end(), s[j]), s[j]);
        best = std::min(best, 1 + self(self, j + 1, std::move(next)));
      }
    }
    memo.emplace(std::move(key), best);
    return best;
  };
  for (PageId p : s) check_user_page(p);
  return rec(rec, 0, {});
}

std::optional<EvictionEvent> evicted_on_last(const TraceResult& t) {
  if (t.evictions.empty()) throw std::invalid_argument("evicted_on_last: empty trace");
  return t.evictions.back();
}

void write_trace_csv(std::ostream& out, const RequestSequence& s, const TraceResult& t) {
  out << "index,page,miss,evicted\n";
  for (std::size_t j = 0; j < s.size(); ++j) {
    out << j << ',' << s[j] << ',' << (t.miss_flags[j] ? 1 : 0) << ',';
    const auto& ev = t.evictions[j];
    if (ev) {
      if (ev->flush) out << "FLUSH";
      else out << ev->pages.front();
    }
    out << '\n';
  }
}

std::optional<std::size_t> AgeTracker::access(PageId p) {
  auto age = age_of(p);
  auto it = std::find(stack_.begin(), stack_.end(), p);
  if (it != stack_.end()) stack_.erase(it);
  stack_.insert(stack_.begin(), p);
  if (stack_.size() > cap_) stack_.pop_back();
  return age;
}

std::optional<std::size_t> AgeTracker::age_of(PageId p) const {
  auto it = std::find(stack_.begin(), stack_.end(), p);
  if (it == stack_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - stack_.begin());
}

std::vector<std::optional<std::size_t>> request_ages(const RequestSequence& s) {
  AgeTracker tr;
  std::vector<std::optional<std::size_t>> out;
  out.reserve(s.size());
  for (PageId p : s) out.push_back(tr.access(p));
  return out;
}

}  // namespace pagesmooth
