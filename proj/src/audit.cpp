#include "pagesmooth/audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pagesmooth {

std::vector<std::string> evaluator_names() {
  return {"lru", "fifo", "fwf", "belady", "random", "random-demand", "lru-random", "lru-random-demand",
          "mark", "eoa", "smoothed-lru", "step-lru"};
}

NamedEvaluator make_evaluator(const std::string& policy, const CacheConfig& cfg) {
  cfg.validate();
  auto det = [&](DetPolicyKind kind) {
    return NamedEvaluator{policy, [kind, cfg](const RequestSequence& s) {
                            return Rational(static_cast<long>(misses(kind, cfg, s)));
                          }};
  };
  if (policy == "lru") return det(DetPolicyKind::lru());
  if (policy == "fifo") return det(DetPolicyKind::fifo());
  if (policy == "fwf") return det(DetPolicyKind::fwf());
  if (policy == "belady" || policy == "opt") return det(DetPolicyKind::belady());
  auto wrap = [&](std::function<ExpectedMisses(const RequestSequence&)> f) {
    return NamedEvaluator{policy, [f](const RequestSequence& s) { return f(s).value; }};
  };
  if (policy == "random") return wrap([cfg](const RequestSequence& s) { return expected_random(cfg, s, false); });
  if (policy == "random-demand")
    return wrap([cfg](const RequestSequence& s) { return expected_random(cfg, s, true); });
  if (policy == "lru-random")
    return wrap([cfg](const RequestSequence& s) { return expected_lru_random(cfg, s, false); });
  if (policy == "lru-random-demand")
    return wrap([cfg](const RequestSequence& s) { return expected_lru_random(cfg, s, true); });
  if (policy == "mark") return wrap([cfg](const RequestSequence& s) { return expected_mark(cfg, s); });
  if (policy == "eoa") return wrap([cfg](const RequestSequence& s) { return expected_eoa(cfg, s); });
  if (policy == "smoothed-lru")
    return wrap([cfg](const RequestSequence& s) { return expected_smoothed_lru(cfg, s); });
  if (policy == "step-lru") return wrap([cfg](const RequestSequence& s) { return expected_step_lru(cfg, s); });
  throw std::invalid_argument("unknown policy: " + policy);
}

BoundSpec additive_bound(const Rational& per_edit, std::string label) {
  BoundSpec b;
  b.alpha = [](int) { return Rational(1); };
  b.beta = [per_edit](int delta) { return per_edit * delta; };
  b.label = std::move(label);
  return b;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::HOLDS: return "holds";
    case Verdict::VIOLATED: return "violated";
    case Verdict::TIGHT: return "tight";
  }
  return "?";
}

SmoothnessReport exhaustive_smoothness(const NamedEvaluator& ev, int k, int alphabet, int max_len, int delta,
                                       std::optional<BoundSpec> bound, AuditOptions opts) {
  if (alphabet < 1 || max_len < 0 || delta < 1) throw std::invalid_argument("bad audit space");
  SmoothnessReport r;
  r.policy = ev.name;
  r.k = k;
  r.alphabet_size = alphabet;
  r.max_len = max_len;
  r.delta = delta;
  r.bound = bound;
  double space = 0;
  for (int n = 0; n <= max_len; ++n) space += std::pow(static_cast<double>(alphabet), n);
  if (space > static_cast<double>(opts.pair_budget)) throw BudgetExceeded("audit space exceeds pair budget");
  auto sigma = make_alphabet(alphabet);
  std::map<RequestSequence, Rational> memo;
  auto A = [&](const RequestSequence& s) -> const Rational& {
    RequestSequence key = opts.canonicalize ? canonical_renaming(s) : s;
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, ev.eval(key)).first;
    return it->second;
  };
  bool first = true;
  std::optional<Rational> worst_slack;
  Rational alpha = bound ? bound->alpha(delta) : Rational(1);
  Rational beta = bound ? bound->beta(delta) : Rational(0);
  for (const auto& s : all_sequences(sigma, max_len)) {
    if (opts.canonicalize && s != canonical_renaming(s)) continue;
    ++r.sequences;
    Rational a = A(s);
    for (const auto& t : neighborhood(s, delta, sigma)) {
      if (++r.pairs > opts.pair_budget) throw BudgetExceeded("audit exceeds pair budget");
      Rational b = A(t);
      Rational inc = b - a;
      if (first || inc > r.worst_increase) {
        r.worst_increase = inc;
        r.witness_good = s;
        r.witness_bad = t;
        r.witness_good_misses = a;
        r.witness_bad_misses = b;
        first = false;
      }
      if (a > 0) {
        Rational ratio = b / a;
        if (!r.worst_ratio || ratio > *r.worst_ratio) {
          r.worst_ratio = ratio;
          r.ratio_good = s;
          r.ratio_bad = t;
        }
      }
      if (bound) {
        Rational slack = b - alpha * a - beta;
        if (!worst_slack || slack > *worst_slack) worst_slack = slack;
      }
    }
  }
  if (bound && worst_slack) {
    if (*worst_slack > 0) r.verdict = Verdict::VIOLATED;
    else if (*worst_slack == 0) r.verdict = Verdict::TIGHT;
    else r.verdict = Verdict::HOLDS;
  }
  return r;
}

std::vector<CompetitiveViolation> check_competitive(const NamedEvaluator& ev, const Rational& c, const Rational& beta,
                                                    const std::vector<RequestSequence>& corpus, int k) {
  std::vector<CompetitiveViolation> out;
  CacheConfig cfg(k);
  for (const auto& s : corpus) {
    std::size_t opt = misses(DetPolicyKind::belady(), cfg, s);
    Rational a = ev.eval(s);
    if (a > c * static_cast<long>(opt) + beta) out.push_back({s, a, opt});
  }
  return out;
}

CompositionResult composition_check(const NamedEvaluator& ev, int k, int alphabet, int max_len, const Rational& beta1,
                                    int delta, AuditOptions opts) {
  CompositionResult res;
  res.worst_single = exhaustive_smoothness(ev, k, alphabet, max_len, 1, std::nullopt, opts).worst_increase;
  if (res.worst_single > beta1)
    throw std::invalid_argument("composition_check: single-edit worst increase exceeds beta1");
  if (delta == 1) {
    res.worst_delta = res.worst_single;
    res.holds = true;
    return res;
  }
  res.worst_delta = exhaustive_smoothness(ev, k, alphabet, max_len, delta, std::nullopt, opts).worst_increase;
  res.holds = res.worst_delta <= beta1 * delta;
  return res;
}

namespace {

using Dist = std::vector<std::pair<CacheState, Rational>>;

// LRU-Random with k = 2 on a full cache.
Dist lrur_step(const CacheState& s, PageId p) {
  if (s[0] == p) return {{s, Rational(1)}};
  if (s[1] == p) return {{CacheState{p, s[0]}, Rational(1)}};
  return {{CacheState{p, s[0]}, Rational(2, 3)}, {CacheState{p, s[1]}, Rational(1, 3)}};
}

bool shares_page(const CacheState& a, const CacheState& b) {
  for (PageId p : a)
    if (std::find(b.begin(), b.end(), p) != b.end()) return true;
  return false;
}

// Rename so that s becomes [0 1]; the remaining page of t becomes 2.
CacheState canonical_partner(const CacheState& s, const CacheState& t) {
  CacheState out;
  for (PageId p : t) {
    if (p == s[0]) out.push_back(0);
    else if (p == s[1]) out.push_back(1);
    else out.push_back(2);
  }
  return out;
}

using Table = std::map<CacheState, Rational>;

std::optional<Rational> table_distance(const Table& d, const CacheState& s, const CacheState& t) {
  if (s == t) return Rational(0);
  if (!shares_page(s, t)) return std::nullopt;
  return d.at(canonical_partner(s, t));
}

// Minimum-cost transfer between distributions with supports of size <= 2.
std::optional<Rational> transfer(const Table& d, const Dist& A, const Dist& B) {
  auto cost = [&](const CacheState& a, const CacheState& b) { return table_distance(d, a, b); };
  if (A.size() == 1 || B.size() == 1) {
    Rational total(0);
    for (const auto& [a, wa] : A)
      for (const auto& [b, wb] : B) {
        auto c = cost(a, b);
        if (!c) return std::nullopt;
        total += wa * wb * *c;
      }
    return total;
  }
  const auto& [r1, a1] = A[0];
  const auto& [r2, a2] = A[1];
  const auto& [t1, b1] = B[0];
  const auto& [t2, b2] = B[1];
  std::optional<Rational> best;
  for (const Rational& x : {std::max(Rational(0), Rational(a1 - b2)), Rational(std::min(a1, b1))}) {
    Rational w11 = x, w12 = a1 - x, w21 = b1 - x, w22 = a2 - b1 + x;
    Rational total(0);
    bool ok = true;
    for (auto [w, a, b] : {std::tuple{w11, r1, t1}, std::tuple{w12, r1, t2}, std::tuple{w21, r2, t1},
                           std::tuple{w22, r2, t2}}) {
      if (w == 0) continue;
      auto c = cost(a, b);
      if (!c) {
        ok = false;
        break;
      }
      total += w * *c;
    }
    if (ok && (!best || total < *best)) best = total;
  }
  return best;
}

int fault(const CacheState& s, PageId p) { return std::find(s.begin(), s.end(), p) == s.end() ? 1 : 0; }

Rational one_step(const Table& d, const CacheState& s, const CacheState& t, const std::vector<PageId>& pages) {
  std::optional<Rational> best;
  for (PageId p : pages) {
    auto tr = transfer(d, lrur_step(s, p), lrur_step(t, p));
    if (!tr) throw std::logic_error("successor states share no page");
    Rational v = fault(t, p) - fault(s, p) + *tr;
    if (!best || v > *best) best = v;
  }
  return *best;
}

Table apply_operator(const Table& d) {
  Table next;
  const CacheState s{0, 1};
  for (const auto& [t, _] : d) next[t] = t == s ? Rational(0) : one_step(d, s, t, {0, 1, 2, 3});
  return next;
}

// Best approximation with denominator <= max_den via continued fractions.
Rational simplest_near(const Rational& x, long max_den) {
  mpz_class num = x.get_num(), den = x.get_den();
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Rational best = Rational(mpz_class(num / den));
  while (den != 0) {
    mpz_class a = num / den;
    if (num < 0 && a * den != num) a -= 1;
    mpz_class h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    best = Rational(h2, k2);
    best.canonicalize();
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    mpz_class rem = num - a * den;
    num = den;
    den = rem;
  }
  return best;
}

}  // namespace

std::vector<CacheState> distance_table_keys() { return {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}; }

Rational DistanceTable::distance(const CacheState& s, const CacheState& t) const {
  auto d = table_distance(entries, s, t);
  if (!d) throw std::invalid_argument("states share no page; not covered by the table");
  return *d;
}

DistanceTable lru_random_distance_fixpoint(int k, const Rational& tolerance, std::size_t iteration_cap) {
  if (k != 2) throw std::invalid_argument("distance fixpoint is only defined for k = 2");
  DistanceTable out;
  Table d;
  for (const auto& key : distance_table_keys()) d[key] = 0;
  for (std::size_t it = 1; it <= iteration_cap; ++it) {
    Table next = apply_operator(d);
    Rational change(0);
    for (const auto& [key, v] : next) {
      Rational diff = v - d[key];
      if (diff < 0) out.monotone = false;
      if (abs(diff) > change) change = abs(diff);
    }
    out.iterations = it;
    out.last_change = change;
    d = std::move(next);
    if (change == 0) {
      out.exact_convergence = true;
      break;
    }
    if (change <= tolerance) {
      Table snapped;
      for (const auto& [key, v] : d) snapped[key] = simplest_near(v, 1000);
      if (apply_operator(snapped) == snapped) {
        d = std::move(snapped);
        out.snapped = true;
      }
      break;
    }
    if (it == iteration_cap) throw BudgetExceeded("distance fixpoint did not converge");
  }
  out.entries = std::move(d);
  return out;
}

EditBound lru_random_edit_bound(const DistanceTable& table) {
  const Table& d = table.entries;
  const CacheState s0{0, 1};
  EditBound out;
  bool first = true;
  auto eval_case = [&](std::string label, std::optional<PageId> good_req, std::optional<PageId> bad_req) {
    Dist G = good_req ? lrur_step(s0, *good_req) : Dist{{s0, Rational(1)}};
    Dist B = bad_req ? lrur_step(s0, *bad_req) : Dist{{s0, Rational(1)}};
    Rational f = (bad_req ? fault(s0, *bad_req) : 0) - (good_req ? fault(s0, *good_req) : 0);
    std::vector<PageId> pages{0, 1, 2, 3, 4};
    // couplings: forced when one side is a point mass, else the two extreme assignments
    std::vector<std::vector<std::tuple<Rational, CacheState, CacheState>>> couplings;
    if (G.size() == 1 || B.size() == 1) {
      std::vector<std::tuple<Rational, CacheState, CacheState>> c;
      for (const auto& [g, wg] : G)
        for (const auto& [b, wb] : B) c.emplace_back(wg * wb, g, b);
      couplings.push_back(c);
    } else {
      const auto& [r1, a1] = G[0];
      const auto& [r2, a2] = G[1];
      const auto& [t1, b1] = B[0];
      const auto& [t2, b2] = B[1];
      for (const Rational& x : {std::max(Rational(0), Rational(a1 - b2)), Rational(std::min(a1, b1))}) {
        std::vector<std::tuple<Rational, CacheState, CacheState>> c;
        for (auto [w, g, b] : {std::tuple{x, r1, t1}, std::tuple{Rational(a1 - x), r1, t2},
                               std::tuple{Rational(b1 - x), r2, t1}, std::tuple{Rational(a2 - b1 + x), r2, t2}})
          if (w != 0) c.emplace_back(w, g, b);
        couplings.push_back(c);
      }
    }
    std::optional<Rational> best;
    for (const auto& c : couplings) {
      bool usable = true;
      Rational direct(0);
      for (const auto& [w, g, b] : c) {
        auto dd = table_distance(d, g, b);
        if (!dd) {
          usable = false;
          break;
        }
        direct += w * *dd;
      }
      if (!usable) continue;
      // one more request on both sides before falling back to the table
      std::optional<Rational> ahead;
      for (PageId p : pages) {
        Rational v(0);
        for (const auto& [w, g, b] : c) {
          auto tr = transfer(d, lrur_step(g, p), lrur_step(b, p));
          v += w * (fault(b, p) - fault(g, p) + *tr);
        }
        if (!ahead || v > *ahead) ahead = v;
      }
      Rational v = std::min(direct, *ahead);
      if (!best || v < *best) best = v;
    }
    Rational bound = f + *best;
    out.cases.push_back({std::move(label), bound});
    if (first || bound > out.value) out.value = bound;
    first = false;
  };
  for (PageId q = 0; q <= 3; ++q) {
    eval_case("insert " + std::to_string(q), std::nullopt, q);
    eval_case("delete " + std::to_string(q), q, std::nullopt);
    for (PageId r = 0; r <= 3; ++r)
      if (r != q) eval_case("substitute " + std::to_string(q) + "->" + std::to_string(r), q, r);
  }
  return out;
}

std::vector<ProbeRow> conjecture_probe(int k_min, int k_max, std::size_t samples, int length, std::uint64_t seed) {
  if (k_min < 1 || k_max > 4 || k_min > k_max) throw std::invalid_argument("conjecture_probe: need 1 <= k <= 4");
  std::vector<ProbeRow> rows;
  std::mt19937_64 rng(seed);
  for (int k = k_min; k <= k_max; ++k) {
    CacheConfig cfg(k);
    auto alphabet = make_alphabet(k + 2);
    ProbeRow row;
    row.k = k;
    row.samples = samples;
    double hk = to_double(harmonic(k));
    row.hk_squared = hk * hk;
    std::uniform_int_distribution<PageId> pick(0, k + 1);
    bool first = true;
    for (std::size_t n = 0; n < samples; ++n) {
      RequestSequence s;
      for (int j = 0; j < length; ++j) s.push_back(pick(rng));
      Rational a = expected_lru_random(cfg, s).value;
      for (const auto& t : neighborhood(s, 1, alphabet)) {
        Rational inc = expected_lru_random(cfg, t).value - a;
        if (first || inc > row.worst_increase) {
          row.worst_increase = inc;
          row.witness_good = s;
          row.witness_bad = t;
          first = false;
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pagesmooth
