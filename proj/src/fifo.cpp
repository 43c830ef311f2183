#include <algorithm>

#include "pagesmooth/adversaries.hpp"

namespace pagesmooth {

namespace {

struct Fifo {
  int k;
  std::vector<PageId> q;  // last in first

  std::optional<PageId> access(PageId p) {
    if (std::find(q.begin(), q.end(), p) != q.end()) return std::nullopt;
    std::optional<PageId> out;
    if (static_cast<int>(q.size()) == k) {
      out = q.back();
      q.pop_back();
    }
    q.insert(q.begin(), p);
    return out;
  }
};

std::vector<int> range_labels(int from, int to) {
  std::vector<int> out;
  if (from <= to)
    for (int v = from; v <= to; ++v) out.push_back(v);
  else
    for (int v = from; v >= to; --v) out.push_back(v);
  return out;
}

// Q written in P's labels matches [k..j+1, i, j..i+1, i-1..1]?
std::optional<std::pair<int, int>> match_template(const std::vector<int>& q, int k) {
  for (int i = 1; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) {
      std::vector<int> t;
      if (j + 1 <= k) t = range_labels(k, j + 1);
      t.push_back(i);
      if (i + 1 <= j) {
        auto mid = range_labels(j, i + 1);
        t.insert(t.end(), mid.begin(), mid.end());
      }
      if (i - 1 >= 1) {
        auto low = range_labels(i - 1, 1);
        t.insert(t.end(), low.begin(), low.end());
      }
      if (t == q) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

struct Level {
  RequestSequence good, bad;
  Fifo cg, cb;
};

// Pad sigma_{k-1} with a new page x so that x stays cached in both runs.
Level pad(const RequestSequence& prev_good, int k, PageId x) {
  Level lv{{x}, {1, x}, Fifo{k, {}}, Fifo{k, {}}};
  lv.cb.access(1);
  lv.cg.access(x);
  lv.cb.access(x);
  for (PageId r : prev_good) {
    lv.good.push_back(r);
    lv.bad.push_back(r);
    auto eg = lv.cg.access(r);
    auto eb = lv.cb.access(r);
    if (eg == x || eb == x) {
      lv.good.push_back(x);
      lv.bad.push_back(x);
      lv.cg.access(x);
      lv.cb.access(x);
    }
  }
  return lv;
}

void validate(const Level& lv, int k) {
  auto tg = simulate(DetPolicyKind::fifo(), CacheConfig(k), lv.good);
  auto tb = simulate(DetPolicyKind::fifo(), CacheConfig(k), lv.bad);
  std::vector<PageId> rev(tg.final_state.rbegin(), tg.final_state.rend());
  if (tg.final_state != lv.cg.q || tb.final_state != lv.cb.q || tb.final_state != rev)
    throw std::logic_error("FIFO construction failed validation at k=" + std::to_string(k));
  RequestSequence shifted{1};
  shifted.insert(shifted.end(), lv.good.begin(), lv.good.end());
  if (shifted != lv.bad) throw std::logic_error("FIFO construction lost the single-edit shape");
}

}  // namespace

FifoConstruction build_fifo_pair(int k) {
  if (k < 2) throw std::invalid_argument("FIFO construction needs k >= 2");
  FifoConstruction out;
  Level lv;
  lv.good = {2, 1};
  lv.bad = {1, 2, 1};
  lv.cg = Fifo{2, {}};
  lv.cb = Fifo{2, {}};
  for (PageId p : lv.good) lv.cg.access(p);
  for (PageId p : lv.bad) lv.cb.access(p);
  validate(lv, 2);
  out.log.push_back("k=2: base pair");
  if (k >= 3) {
    lv.good = {2, 3, 1, 4, 2, 1, 5, 1, 4};
    lv.bad = lv.good;
    lv.bad.insert(lv.bad.begin(), 1);
    lv.cg = Fifo{3, {}};
    lv.cb = Fifo{3, {}};
    for (PageId p : lv.good) lv.cg.access(p);
    for (PageId p : lv.bad) lv.cb.access(p);
    validate(lv, 3);
    out.log.push_back("k=3: base pair");
  }
  for (int kk = 4; kk <= k; ++kk) {
    PageId x = *std::max_element(lv.bad.begin(), lv.bad.end()) + 1;
    PageId fresh = x;
    lv = pad(lv.good, kk, x);
    std::string entry = "k=" + std::to_string(kk) + ": pad with " + std::to_string(x);
    for (int step = 0;; ++step) {
      std::vector<PageId> rev(lv.cg.q.rbegin(), lv.cg.q.rend());
      if (lv.cb.q == rev) break;
      if (step > 4 * kk) throw std::logic_error("FIFO construction did not converge at k=" + std::to_string(kk));
      bool applied = false;
      for (int orient = 0; orient < 2 && !applied; ++orient) {
        // orient 0: bad config is the reference; 1: roles exchanged
        const auto& P = orient == 0 ? lv.cb.q : lv.cg.q;
        const auto& Q = orient == 0 ? lv.cg.q : lv.cb.q;
        std::vector<int> labels;
        for (PageId q : Q) labels.push_back(static_cast<int>(std::find(P.begin(), P.end(), q) - P.begin()) + 1);
        auto m = match_template(labels, kk);
        if (!m) continue;
        auto [i, j] = *m;
        int c = 0;
        if (1 < i && i < j && j < kk) c = 1;
        else if (i == 1 && j < kk - 1) c = 2;
        else if (i == 1 && j == kk - 1) c = 3;
        else if (i == 1 && j == kk) c = 5;
        if (c == 0) continue;
        const std::vector<PageId> Pc = P;
        auto L = [&](int label) { return Pc[static_cast<std::size_t>(label - 1)]; };
        auto F = [&]() { return ++fresh; };
        RequestSequence reqs;
        auto add_range = [&](int from, int to) {
          for (int v : range_labels(from, to)) reqs.push_back(L(v));
        };
        if (c == 1) {
          PageId v = F(), w = F();
          reqs.push_back(v);
          add_range(kk, i + 1);
          add_range(1, i - 1);
          reqs.push_back(w);
          add_range(i + 1, kk);
          reqs.push_back(v);
          if (i - 2 >= 1) add_range(1, i - 2);
        } else if (c == 2) {
          reqs.push_back(F());
          add_range(2, j);
          reqs.push_back(L(1));
          add_range(j + 1, kk - 1);
        } else if (c == 3) {
          PageId a = F(), b = F(), d = F();
          reqs.push_back(a);
          add_range(2, kk - 1);
          reqs.push_back(b);
          reqs.push_back(d);
          reqs.push_back(a);
          if (kk - 3 >= 1) add_range(1, kk - 3);
        } else {
          reqs.push_back(F());
          add_range(2, kk - 1);
        }
        for (PageId r : reqs) {
          lv.good.push_back(r);
          lv.bad.push_back(r);
          lv.cg.access(r);
          lv.cb.access(r);
        }
        entry += std::string("; ") + (orient == 0 ? "" : "exchanged ") + "case " + std::to_string(c) +
                 " (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")";
        applied = true;
      }
      if (!applied) throw std::logic_error("FIFO construction: no case applies at k=" + std::to_string(kk));
    }
    validate(lv, kk);
    out.log.push_back(entry);
  }
  out.good_config = lv.cg.q;
  out.bad_config = lv.cb.q;
  Prediction pr;
  pr.good_misses = Rational(static_cast<long>(misses(DetPolicyKind::fifo(), CacheConfig(k), lv.good)));
  pr.bad_misses = Rational(static_cast<long>(misses(DetPolicyKind::fifo(), CacheConfig(k), lv.bad)));
  out.pair = make_pair("fifo", {{"k", k}}, lv.good, lv.bad, 1, pr);
  return out;
}

SequencePair gen_fifo_pair(int k) { return build_fifo_pair(k).pair; }

RequestSequence gen_fifo_extension(int k, int rounds) {
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  auto fc = build_fifo_pair(k);
  std::vector<PageId> g = fc.good_config;
  PageId fresh = std::max(*std::max_element(fc.pair.bad.begin(), fc.pair.bad.end()),
                          *std::max_element(fc.pair.good.begin(), fc.pair.good.end())) + 1;
  RequestSequence out;
  for (int r = 0; r < rounds; ++r) {
    out.push_back(fresh);
    for (int j = 0; j + 1 < k; ++j) out.push_back(g[static_cast<std::size_t>(j)]);
    PageId gone = g.back();
    g.pop_back();
    g.insert(g.begin(), fresh);
    fresh = gone;
  }
  return out;
}

}  // namespace pagesmooth
