// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "pagesmooth/adversaries.hpp"
#include "pagesmooth/audit.hpp"

using namespace pagesmooth;

namespace {

// pinned tolerances
constexpr double kBeladySeconds = 120;
constexpr double kAuditSeconds = 300;
constexpr double kFifoSlack = 0.1;
constexpr long kMcTrials = 100'000;
constexpr double kMcSigmas = 3;
constexpr double kRandomPairFloor = 3.9;

Rational R(long n, long d = 1) { return make_rational(n, d); }

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome belady_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  std::size_t checked = 0, mismatches = 0;
  for (const auto& s : all_sequences({1, 2, 3}, 8)) {
    ++checked;
    if (misses(DetPolicyKind::belady(), CacheConfig(2), s) != brute_force_opt(CacheConfig(2), s)) ++mismatches;
  }
  double sec = seconds_since(t0);
  std::ostringstream os;
  os << checked << " sequences, " << mismatches << " mismatches, " << std::fixed << std::setprecision(2) << sec << "s";
  return {mismatches == 0 && sec < kBeladySeconds, os.str()};
}

Outcome exhaustive_rows() {
  auto t0 = std::chrono::steady_clock::now();
  CacheConfig c(2);
  Rational lru = exhaustive_smoothness(make_evaluator("lru", c), 2, 3, 6, 1).worst_increase;
  Rational opt = exhaustive_smoothness(make_evaluator("belady", c), 2, 3, 6, 1).worst_increase;
  Rational fwf = exhaustive_smoothness(make_evaluator("fwf", c), 2, 3, 7, 1).worst_increase;
  double sec = seconds_since(t0);
  std::ostringstream os;
  os << "lru +" << lru << ", belady +" << opt << ", fwf +" << fwf << " (len<=7), " << std::fixed
     << std::setprecision(2) << sec << "s";
  return {lru == 3 && opt == 2 && fwf == 4 && sec < kAuditSeconds, os.str()};
}

Outcome fifo_construction() {
  const int rounds = 200;
  bool ok = true;
  std::ostringstream os;
  for (int k = 2; k <= 4; ++k) {
    auto f = build_fifo_pair(k);
    CacheConfig c(k);
    auto fifo = DetPolicyKind::fifo();
    bool dist = edit_distance(f.pair.good, f.pair.bad) == 1;
    auto gs = simulate(fifo, c, f.pair.good).final_state, bs = simulate(fifo, c, f.pair.bad).final_state;
    bool reversed = std::vector<PageId>(gs.rbegin(), gs.rend()) == bs;
    std::size_t g0 = misses(fifo, c, f.pair.good), b0 = misses(fifo, c, f.pair.bad);
    auto with_ext = [&](const RequestSequence& s, int r) {
      auto out = s;
      auto e = gen_fifo_extension(k, r);
      out.insert(out.end(), e.begin(), e.end());
      return misses(fifo, c, out);
    };
    std::size_t g = with_ext(f.pair.good, rounds), b = with_ext(f.pair.bad, rounds);
    double ext_ratio = static_cast<double>(b - b0) / static_cast<double>(g - g0);
    double whole = static_cast<double>(b) / static_cast<double>(g);
    // whole-sequence ratio (b0 + k r) / (g0 + r) first reaches k - slack at this many rounds
    long cross = 0;
    while (static_cast<double>(b0 + static_cast<std::size_t>(k * cross)) <
           (k - kFifoSlack) * static_cast<double>(g0 + static_cast<std::size_t>(cross)))
      ++cross;
    bool cross_ok = static_cast<double>(with_ext(f.pair.bad, static_cast<int>(cross))) >=
                    (k - kFifoSlack) * static_cast<double>(with_ext(f.pair.good, static_cast<int>(cross)));
    if (cross > 0)
      cross_ok = cross_ok && static_cast<double>(with_ext(f.pair.bad, static_cast<int>(cross - 1))) <
                                 (k - kFifoSlack) * static_cast<double>(with_ext(f.pair.good, static_cast<int>(cross - 1)));
    bool pass_k = dist && reversed && ext_ratio >= k - kFifoSlack && cross_ok;
    ok = ok && pass_k;
    os << "k=" << k << ": d=1 " << (dist ? "y" : "n") << ", reversed " << (reversed ? "y" : "n") << ", extension "
       << (b - b0) << "/" << (g - g0) << ", whole " << std::fixed << std::setprecision(3) << whole
       << ", whole>=k-0.1 from round " << cross << (cross_ok ? " (simulated)" : " (simulation disagrees)") << "; ";
  }
  return {ok, os.str()};
}

Rational phase_sum(const ExpectedMisses& e, const PhasePartition& p, int phase) {
  std::size_t a = p.boundaries[static_cast<std::size_t>(phase)];
  std::size_t z = phase + 1 < p.phase_count ? p.boundaries[static_cast<std::size_t>(phase + 1)] : e.per_request.size();
  Rational s(0);
  for (std::size_t j = a; j < z; ++j) s += e.per_request[j];
  return s;
}

Outcome mark_forms() {
  const int k = 8, ell = 3;
  auto p = gen_mark_pair(k, ell, 10);
  Rational bad_phase = ell * (1 + harmonic(k) - harmonic(ell));
  Rational good_phase = ell - 1 + harmonic(k) - harmonic(ell - 1);
  CacheConfig c(k);
  auto eb = expected_mark(c, p.bad), eg = expected_mark(c, p.good);
  auto pb = phase_partition(p.bad, k), pg = phase_partition(p.good, k);
  int bad_ok = 0, bad_n = 0, good_ok = 0, good_n = 0;
  for (int ph = 2; ph < pb.phase_count; ++ph, ++bad_n) bad_ok += phase_sum(eb, pb, ph) == bad_phase;
  for (int ph = 2; ph + 1 < pg.phase_count; ++ph, ++good_n) good_ok += phase_sum(eg, pg, ph) == good_phase;
  std::size_t enum_checked = 0, enum_bad = 0;
  for (const auto& s : all_sequences(make_alphabet(3), 7)) {
    ++enum_checked;
    if (expected_mark(CacheConfig(2), s).value != mark_enumeration(CacheConfig(2), s).value) ++enum_bad;
  }
  std::ostringstream os;
  os << "bad phases " << bad_ok << "/" << bad_n << " = " << bad_phase << ", good phases " << good_ok << "/" << good_n
     << " = " << good_phase << ", enumeration mismatches " << enum_bad << "/" << enum_checked;
  return {bad_n >= 8 && good_n >= 7 && bad_ok == bad_n && good_ok == good_n && enum_bad == 0, os.str()};
}

Outcome random_checks() {
  Rational abca = expected_random(CacheConfig(2), {0, 1, 2, 0}).value;
  auto mc = monte_carlo("random", CacheConfig(2), {0, 1, 2, 0}, kMcTrials, 20240601);
  bool mc_ok = std::abs(mc.mean - to_double(abca)) <= kMcSigmas * mc.stderr_;
  auto p = gen_random_pair(3, 1, 50);
  Rational diff = expected_random(CacheConfig(3), p.bad).value - expected_random(CacheConfig(3), p.good).value;
  Rational worst = exhaustive_smoothness(make_evaluator("random", CacheConfig(2)), 2, 3, 6, 1).worst_increase;
  std::ostringstream os;
  os << "[a,b,c,a] = " << abca << ", MC " << std::fixed << std::setprecision(4) << mc.mean << " +- " << mc.stderr_
     << ", pair diff " << std::setprecision(6) << to_double(diff) << ", audit worst +" << worst;
  return {abca == R(15, 4) && mc_ok && to_double(diff) >= kRandomPairFloor && worst <= 3, os.str()};
}

Outcome eoa_checks() {
  auto p = gen_eoa_pair(4, 20, 2);
  Rational diff = expected_eoa(CacheConfig(4), p.bad).value - expected_eoa(CacheConfig(4), p.good).value;
  Rational want = 2 * (1 + R(4, 7) * (1 - rpow(R(3, 4), 40)));
  Rational bound = 2 * (1 + R(4, 7));
  std::ostringstream os;
  os << "difference " << std::setprecision(15) << to_double(diff) << (diff == want ? " == " : " != ")
     << "closed form, bound " << to_double(bound);
  return {diff == want && diff < bound, os.str()};
}

Outcome smoothed_checks() {
  CacheConfig c(8, 4);
  bool table_ok = true;
  for (std::size_t a = 0; a <= 12; ++a) {
    Rational want = a < 4 ? R(1) : (a < 12 ? R(12 - static_cast<long>(a), 9) : R(0));
    table_ok = table_ok && smoothed_lru_hit_prob(a, c) == want;
  }
  bool at7 = smoothed_lru_hit_prob(7, c) == R(5, 9);
  std::mt19937_64 rng(77);
  int ens_ok = 0, ens_n = 0;
  for (int k = 3; k <= 6; ++k)
    for (int i = 1; i <= 2; ++i)
      for (int t = 0; t < 50; ++t) {
        RequestSequence s(20);
        std::uniform_int_distribution<PageId> pick(0, k + 3);
        for (auto& q : s) q = pick(rng);
        ++ens_n;
        ens_ok += smoothed_lru_ensemble(CacheConfig(k, i), s).value == expected_smoothed_lru(CacheConfig(k, i), s).value;
      }
  int pair_ok = 0, pair_n = 0;
  for (auto [k, i, d] : {std::tuple{8, 4, 1}, {8, 4, 3}, {4, 0, 2}, {5, 4, 2}, {6, 2, 1}}) {
    auto p = gen_smoothed_lru_pair(k, i, d);
    CacheConfig cc(k, i);
    Rational diff = expected_smoothed_lru(cc, p.bad).value - expected_smoothed_lru(cc, p.good).value;
    ++pair_n;
    pair_ok += diff == d * (R(k + i, 2 * i + 1) + 1);
  }
  std::ostringstream os;
  os << "hit table " << (table_ok ? "ok" : "mismatch") << " (age 7 -> 5/9 " << (at7 ? "y" : "n") << "), ensemble "
     << ens_ok << "/" << ens_n << " exact, pairs " << pair_ok << "/" << pair_n;
  return {table_ok && at7 && ens_ok == ens_n && pair_ok == pair_n, os.str()};
}

Outcome lru_random_checks() {
  auto t = lru_random_distance_fixpoint();
  std::vector<Rational> want{0, R(3, 2), R(1, 2), R(3, 2), 2, 2};
  std::vector<Rational> got;
  for (const auto& key : distance_table_keys()) got.push_back(t.entries.at(key));
  Rational eb = lru_random_edit_bound(t).value;
  auto ev = make_evaluator("lru-random", CacheConfig(2));
  Rational worst = exhaustive_smoothness(ev, 2, 3, 6, 1).worst_increase;
  auto viol = check_competitive(ev, R(2), R(0), all_sequences(make_alphabet(3), 6), 2);
  std::ostringstream os;
  os << "table {";
  for (std::size_t j = 0; j < got.size(); ++j) os << (j ? ", " : "") << got[j];
  os << "}, edit bound " << eb << ", audit worst +" << worst << ", competitive violations " << viol.size();
  return {got == want && eb == R(17, 6) && worst <= R(17, 6) && viol.empty(), os.str()};
}

Outcome randomized_adversary() {
  auto p = gen_randomized_demand_lower(RandPolicy::RANDOM_DEMAND, 2);
  Rational bad = expected_random(CacheConfig(2), p.bad, true).value;
  Rational good = expected_random(CacheConfig(2), p.good, true).value;
  std::size_t d = edit_distance(p.good, p.bad);
  std::ostringstream os;
  os << "bad " << bad << " (>= 4), good " << good << ", distance " << d;
  return {bad >= 4 && good == 2 && d == 1, os.str()};
}

Outcome layer_replication() {
  auto tr = gen_partition_equitable_pair(3);
  using L = LayerRepresentation;
  const PageId x = 3, y = 4;
  std::vector<L> bad_steps{L{{{x}, {0, 1}, {2}}}, L{{{0}, {x}, {1, 2}}}, L{{{y}, {0, x}, {1, 2}}},
                           L{{{2}, {y}, {0, x}}}, L{{{0}, {2}, {y}}}};
  std::vector<L> good_steps{L{{{x}, {0}, {1}}}, L{{{0}, {x}, {1}}}, L{{{y}, {0, x}, {1}}},
                            L{{{2}, {y, 0, x}, {1}}}, L{{{0}, {2}, {y, x, 1}}}};
  bool start = tr.good_layers[tr.good_prefix_len - 1] == L{{{0}, {1}, {2, x, y}}} &&
               tr.bad_layers[tr.bad_prefix_len - 1] == L{{{0}, {1}, {2}}};
  int steps = 0;
  for (std::size_t j = 0; j < 5 && j < tr.block_len; ++j)
    steps += (tr.bad_layers[tr.bad_prefix_len + j] == bad_steps[j]) +
             (tr.good_layers[tr.good_prefix_len + j] == good_steps[j]);
  bool cycle = layers_equal_up_to_renaming(tr.bad_layers.back(), tr.bad_layers[tr.bad_prefix_len - 1]) &&
               layers_equal_up_to_renaming(tr.good_layers.back(), tr.good_layers[tr.good_prefix_len - 1]);
  std::ostringstream os;
  os << "prefix layers " << (start ? "match" : "differ") << ", block steps " << steps << "/10, final = initial "
     << (cycle ? "y" : "n") << " (structural only)";
  return {start && steps == 10 && cycle, os.str()};
}

Outcome composition() {
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"lru", "belady"}) {
    auto ev = make_evaluator(name, CacheConfig(2));
    Rational one = exhaustive_smoothness(ev, 2, 3, 5, 1).worst_increase;
    Rational two = exhaustive_smoothness(ev, 2, 3, 5, 2).worst_increase;
    ok = ok && two <= 2 * one;
    os << name << ": delta=1 +" << one << ", delta=2 +" << two << "; ";
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"belady equals brute-force OPT", belady_oracle},
      {"exhaustive delta=1 LRU/OPT/FWF", exhaustive_rows},
      {"FIFO construction and extension", fifo_construction},
      {"Mark per-phase closed forms", mark_forms},
      {"Random exact, MC, pair, audit", random_checks},
      {"EOA pair closed form", eoa_checks},
      {"Smoothed-LRU table, ensemble, pair", smoothed_checks},
      {"LRU-Random fixpoint and 17/6", lru_random_checks},
      {"randomized demand-paging adversary", randomized_adversary},
      {"layer replication (k=3)", layer_replication},
      {"composition for LRU and Belady", composition}};
  int failed = 0;
  for (std::size_t j = 0; j < criteria.size(); ++j) {
    Outcome o{false, ""};
    try {
      o = criteria[j].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << std::setw(2) << j + 1 << " " << criteria[j].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
