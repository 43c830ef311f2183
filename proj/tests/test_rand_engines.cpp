#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pagesmooth/det_policies.hpp"
#include "pagesmooth/rand_engines.hpp"

using namespace pagesmooth;

namespace {

RequestSequence random_seq(std::mt19937_64& rng, int alphabet, int len) {
  std::uniform_int_distribution<PageId> pick(0, alphabet - 1);
  RequestSequence s(static_cast<std::size_t>(len));
  for (auto& p : s) p = pick(rng);
  return s;
}

Rational R(long n, long d = 1) { return make_rational(n, d); }

// Expected misses of non-demand Random by walking every branch of the
// slot lottery (k^misses leaves). Slots are positional here, unlike the
// engine's sorted multisets.
Rational random_paths(int k, const RequestSequence& s, std::size_t at, std::vector<PageId> slots) {
  if (at == s.size()) return 0;
  PageId p = s[at];
  if (std::find(slots.begin(), slots.end(), p) != slots.end()) return random_paths(k, s, at + 1, slots);
  Rational total(0);
  for (int j = 0; j < k; ++j) {
    auto next = slots;
    next[static_cast<std::size_t>(j)] = p;
    total += random_paths(k, s, at + 1, next);
  }
  return 1 + total / k;
}

// LRU-Random on a recency list with explicit branches, demand semantics
// when `demand` is set.
Rational lrur_paths(int k, const RequestSequence& s, std::size_t at, std::vector<PageId> l, bool demand) {
  if (at == s.size()) return 0;
  PageId p = s[at];
  auto it = std::find(l.begin(), l.end(), p);
  if (it != l.end()) {
    l.erase(it);
    l.insert(l.begin(), p);
    return lrur_paths(k, s, at + 1, l, demand);
  }
  Rational hk = harmonic(k);
  if (demand && static_cast<int>(l.size()) < k) {
    l.insert(l.begin(), p);
    return 1 + lrur_paths(k, s, at + 1, l, demand);
  }
  // pad with empties at the old end so positions follow the law
  while (static_cast<int>(l.size()) < k) l.push_back(kEmptySlot);
  Rational total(0);
  for (int pos = 1; pos <= k; ++pos) {  // pos-th oldest
    Rational w = 1 / (pos * hk);
    auto next = l;
    next.erase(next.begin() + (k - pos));
    next.insert(next.begin(), p);
    while (!next.empty() && next.back() == kEmptySlot) next.pop_back();
    total += w * lrur_paths(k, s, at + 1, next, demand);
  }
  return 1 + total;
}

}  // namespace

TEST_CASE("random examples") {
  CHECK(expected_random(CacheConfig(2), {0, 1, 2, 0}).value == R(15, 4));
  CHECK(expected_random(CacheConfig(2), {0, 0}).value == 1);
  CHECK(expected_random(CacheConfig(2), {0, 0}, true).value == 1);
}

TEST_CASE("random engine equals branch enumeration") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 40; ++t) {
    auto s = random_seq(rng, 4, 8);
    for (int k = 1; k <= 3; ++k)
      CHECK(expected_random(CacheConfig(k), s).value ==
            random_paths(k, s, 0, std::vector<PageId>(static_cast<std::size_t>(k), kEmptySlot)));
  }
}

TEST_CASE("lru-random eviction law") {
  auto law = lru_random_eviction_law(3);
  CHECK(law == std::vector<Rational>{R(6, 11), R(3, 11), R(2, 11)});
  Rational sum(0);
  for (const auto& w : lru_random_eviction_law(7)) sum += w;
  CHECK(sum == 1);
}

TEST_CASE("lru-random engine equals branch enumeration") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 30; ++t) {
    auto s = random_seq(rng, 4, 8);
    for (int k = 1; k <= 3; ++k) {
      CHECK(expected_lru_random(CacheConfig(k), s).value == lrur_paths(k, s, 0, {}, false));
      CHECK(expected_lru_random(CacheConfig(k), s, true).value == lrur_paths(k, s, 0, {}, true));
    }
  }
  CHECK(expected_lru_random(CacheConfig(2), {0, 0}).value == 1);
}

TEST_CASE("distributions keep unit mass and probabilities stay in range") {
  std::mt19937_64 rng(23);
  for (auto pol : {RandPolicy::RANDOM, RandPolicy::RANDOM_DEMAND, RandPolicy::LRU_RANDOM,
                   RandPolicy::LRU_RANDOM_DEMAND, RandPolicy::MARK, RandPolicy::EOA}) {
    for (int t = 0; t < 10; ++t) {
      auto s = random_seq(rng, 5, 12);
      ExactEngine e(pol, CacheConfig(3));
      std::set<PageId> seen;
      for (PageId p : s) {
        Rational q = e.request(p);
        CHECK(q >= 0);
        CHECK(q <= 1);
        if (!seen.count(p)) CHECK(q == 1);
        seen.insert(p);
        CHECK(e.total_mass() == 1);
        for (const auto& [st, w] : e.distribution()) CHECK(w > 0);
      }
    }
  }
}

TEST_CASE("mark examples") {
  CHECK(expected_mark(CacheConfig(2), {0, 1}).value == 2);
  CHECK(expected_mark(CacheConfig(2), {0, 1, 2, 0}).value == R(7, 2));
  CHECK(mark_enumeration(CacheConfig(2), {0, 1, 2, 0}).value == R(7, 2));
}

TEST_CASE("mark formula equals enumeration (k=2, alphabet 3, length <= 7)") {
  auto sigma = make_alphabet(3);
  for (const auto& s : all_sequences(sigma, 7)) {
    auto a = expected_mark(CacheConfig(2), s), b = mark_enumeration(CacheConfig(2), s);
    CHECK(a.per_request == b.per_request);
  }
}

TEST_CASE("mark formula equals enumeration (k=3, random)") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    auto s = random_seq(rng, 5, 14);
    CHECK(expected_mark(CacheConfig(3), s).value == mark_enumeration(CacheConfig(3), s).value);
  }
}

TEST_CASE("eoa examples") {
  CHECK(expected_eoa(CacheConfig(2), {0, 1, 0}).value == R(5, 2));
  auto e = expected_eoa(CacheConfig(3), {4, 5, 6});
  for (const auto& q : e.per_request) CHECK(q == 1);
  CHECK(reuse_distances({0, 1, 1, 0})[3] == std::optional<std::size_t>(2));
}

TEST_CASE("eoa closed form equals enumeration (k=2, alphabet 3, length <= 7)") {
  auto sigma = make_alphabet(3);
  for (const auto& s : all_sequences(sigma, 7))
    CHECK(expected_eoa(CacheConfig(2), s).per_request == eoa_enumeration(CacheConfig(2), s).per_request);
}

TEST_CASE("eoa closed form equals enumeration (k=3, random)") {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 60; ++t) {
    auto s = random_seq(rng, 5, 12);
    CHECK(expected_eoa(CacheConfig(3), s).value == eoa_enumeration(CacheConfig(3), s).value);
  }
}

TEST_CASE("smoothed-lru hit probabilities") {
  CacheConfig c(8, 4);
  auto at = [](std::size_t a) { return std::optional<std::size_t>(a); };
  CHECK(smoothed_lru_hit_prob(at(7), c) == R(5, 9));
  CHECK(smoothed_lru_hit_prob(at(3), c) == 1);
  CHECK(smoothed_lru_hit_prob(at(12), c) == 0);
  CHECK(smoothed_lru_hit_prob(std::nullopt, c) == 0);
  CHECK(step_lru_hit_prob(at(4), c) == R(1, 2));
  CHECK(step_lru_hit_prob(at(11), c) == R(1, 2));
  CHECK(step_lru_hit_prob(at(12), c) == 0);
  CHECK(step_lru_hit_prob(at(3), c) == 1);
}

TEST_CASE("smoothed-lru examples") {
  CHECK(expected_smoothed_lru(CacheConfig(2, 1), {1, 2, 3, 1}).value == R(11, 3));
  std::mt19937_64 rng(26);
  for (int t = 0; t < 50; ++t) {
    auto s = random_seq(rng, 6, 25);
    CHECK(expected_smoothed_lru(CacheConfig(3), s).value ==
          static_cast<long>(misses(DetPolicyKind::lru(), CacheConfig(3), s)));
  }
}

TEST_CASE("ensembles equal the analytic engines") {
  std::mt19937_64 rng(27);
  for (int k = 3; k <= 5; ++k)
    for (int i = 1; i <= 2; ++i)
      for (int t = 0; t < 8; ++t) {
        auto s = random_seq(rng, k + 3, 18);
        CacheConfig c(k, i);
        CHECK(smoothed_lru_ensemble(c, s).value == expected_smoothed_lru(c, s).value);
        auto ens = step_lru_ensemble(c, s);
        CHECK(ens.per_request == expected_step_lru(c, s).per_request);
        auto ages = request_ages(s);
        for (std::size_t j = 0; j < s.size(); ++j)
          if (ages[j] && *ages[j] >= static_cast<std::size_t>(k - i) && *ages[j] < static_cast<std::size_t>(k + i))
            CHECK(ens.per_request[j] == R(1, 2));
      }
  CHECK(step_lru_age_sets(5, 2).size() == 6);
}

TEST_CASE("monte carlo agrees with exact engines") {
  const RequestSequence abca{0, 1, 2, 0};
  auto r = monte_carlo("random", CacheConfig(2), abca, 100'000, 1);
  CHECK(std::abs(r.mean - 3.75) <= 3 * r.stderr_);
  auto m = monte_carlo("mark", CacheConfig(2), abca, 100'000, 2);
  CHECK(std::abs(m.mean - 3.5) <= 3 * m.stderr_);
  auto one = monte_carlo("random", CacheConfig(2), {5, 5, 5}, 1, 3);
  CHECK(one.mean == 1);

  std::mt19937_64 rng(28);
  std::size_t outside = 0, total = 0;
  for (int t = 0; t < 20; ++t) {
    int k = 2 + t % 2;
    auto s = random_seq(rng, k + 2, 12);
    for (auto [tag, exact] : {std::pair{"random", expected_random(CacheConfig(k), s).value},
                              std::pair{"lru-random", expected_lru_random(CacheConfig(k), s).value},
                              std::pair{"eoa", expected_eoa(CacheConfig(k), s).value}}) {
      auto mc = monte_carlo(tag, CacheConfig(k), s, 20'000, 100 + static_cast<std::uint64_t>(t));
      ++total;
      if (std::abs(mc.mean - to_double(exact)) > 3 * mc.stderr_ + 1e-12) ++outside;
    }
  }
  // 3-sigma misses are rare but not impossible across 60 draws
  CHECK(outside <= 2);
  CHECK(total == 60);
}

TEST_CASE("monte carlo is reproducible and rejects unknown tags") {
  RequestSequence s{0, 1, 2, 3, 0, 2};
  auto a = monte_carlo("lru-random", CacheConfig(2), s, 500, 9);
  auto b = monte_carlo("lru-random", CacheConfig(2), s, 500, 9);
  CHECK(a.mean == b.mean);
  CHECK_THROWS_AS(monte_carlo("clock", CacheConfig(2), s, 5, 1), std::invalid_argument);
}

TEST_CASE("layer update rules") {
  LayerRepresentation w{{{0}, {1}, {2}}};
  CHECK(layer_update(w, 3) == LayerRepresentation{{{3}, {0, 1}, {2}}});
  CHECK(layer_update(w, 2) == LayerRepresentation{{{2}, {0}, {1}}});
  CHECK(layer_update(w, 1) == LayerRepresentation{{{1}, {0}, {2}}});
  CHECK(layers_equal_up_to_renaming({{{0}, {1, 2}}}, {{{5}, {7, 9}}}));
  CHECK_FALSE(layers_equal_up_to_renaming({{{0}, {1, 2}}}, {{{0, 1}, {2}}}));
}

TEST_CASE("layer update keeps layers disjoint") {
  std::mt19937_64 rng(29);
  auto w = LayerRepresentation::empty(4);
  for (int t = 0; t < 500; ++t) {
    w = layer_update(w, std::uniform_int_distribution<PageId>(0, 7)(rng));
    REQUIRE(w.layers.size() == 4);
    std::set<PageId> all;
    std::size_t n = 0;
    for (const auto& l : w.layers) {
      all.insert(l.begin(), l.end());
      n += l.size();
    }
    CHECK(all.size() == n);
  }
}

TEST_CASE("expected csv") {
  std::ostringstream os;
  RequestSequence s{0, 1, 0};
  write_expected_csv(os, s, expected_eoa(CacheConfig(2), s));
  CHECK(os.str() == "index,page,miss_probability,miss_decimal\n0,0,1,1\n1,1,1,1\n2,0,1/2,0.5\n");
}

TEST_CASE("state cap") {
  CHECK_THROWS_AS(run_engine(RandPolicy::RANDOM, CacheConfig(4), {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 20), BudgetExceeded);
}
