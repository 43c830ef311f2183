#include "pagesmooth/adversaries.hpp"

#include <algorithm>
#include <json.hpp>
#include <unordered_map>

namespace pagesmooth {

SequencePair make_pair(std::string name, std::map<std::string, long> params, RequestSequence good,
                       RequestSequence bad, std::size_t declared_distance, std::optional<Prediction> predicted) {
  std::size_t d = edit_distance(good, bad);
  if (d != declared_distance)
    throw std::logic_error(name + ": declared distance " + std::to_string(declared_distance) + " but edit distance is " +
                           std::to_string(d));
  return SequencePair{std::move(name), std::move(params), std::move(good), std::move(bad), declared_distance,
                      std::move(predicted)};
}

void write_pair_jsonl(std::ostream& out, const SequencePair& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["k"] = p.params.count("k") ? p.params.at("k") : 0;
  j["params"] = p.params;
  j["good"] = p.good;
  j["bad"] = p.bad;
  j["declared_distance"] = p.declared_distance;
  if (p.predicted) {
    nlohmann::json pr = nlohmann::json::object();
    auto put = [&](const char* key, const std::optional<Rational>& r) {
      if (r) pr[key] = to_fraction(*r);
    };
    put("good_misses", p.predicted->good_misses);
    put("bad_misses", p.predicted->bad_misses);
    put("difference", p.predicted->difference);
    put("epsilon", p.predicted->epsilon);
    pr["bad_is_lower_bound"] = p.predicted->bad_is_lower_bound;
    for (const auto& [key, v] : p.predicted->extra) pr[key] = to_fraction(v);
    j["predicted"] = pr;
  } else {
    j["predicted"] = nullptr;
  }
  out << j.dump() << '\n';
}

SequencePair gen_det_demand_lower(const DetPolicyKind& kind, const CacheConfig& cfg, int delta) {
  cfg.validate();
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (!kind.demand_paging() || !kind.online())
    throw std::invalid_argument("gen_det_demand_lower needs an online demand-paging policy (lru, fifo)");
  const std::size_t len = static_cast<std::size_t>(cfg.k + delta * (cfg.k + 1));
  auto cache = make_online_cache(kind, cfg);
  RequestSequence bad;
  std::optional<EvictionEvent> ev;
  for (PageId p = 0; p <= cfg.k; ++p) {
    cache->access(p, ev);
    bad.push_back(p);
  }
  while (bad.size() < len) {
    PageId next = ev->pages.front();
    if (!cache->access(next, ev)) throw std::logic_error("adversary request was a hit");
    bad.push_back(next);
  }
  std::map<PageId, long> freq;
  for (PageId p = 0; p <= cfg.k; ++p) freq[p] = 0;
  for (PageId p : bad) ++freq[p];
  PageId rare = 0;
  for (const auto& [p, c] : freq)
    if (c < freq[rare]) rare = p;
  RequestSequence good;
  for (PageId p : bad)
    if (p != rare) good.push_back(p);
  Prediction pr;
  pr.good_misses = Rational(static_cast<long>(distinct_count(good)));
  pr.bad_misses = Rational(static_cast<long>(len));
  return make_pair("det-demand-lower-" + policy_name(kind), {{"k", cfg.k}, {"delta", delta}}, good, bad,
                   bad.size() - good.size(), pr);
}

SequencePair gen_opt_pair(int k, int delta) {
  CacheConfig(k).validate();
  if (delta < 0) throw std::invalid_argument("delta must be >= 0");
  RequestSequence block;
  for (int r = 0; r < 2; ++r)
    for (PageId p = 1; p <= k; ++p) block.push_back(p);
  const PageId x = k + 1;
  RequestSequence good, bad;
  for (int r = 0; r <= delta; ++r) good.insert(good.end(), block.begin(), block.end());
  for (int r = 0; r < delta; ++r) {
    bad.insert(bad.end(), block.begin(), block.end());
    bad.push_back(x);
  }
  bad.insert(bad.end(), block.begin(), block.end());
  Prediction pr;
  pr.good_misses = Rational(k);
  pr.bad_misses = Rational(k + 2 * delta);
  pr.bad_is_lower_bound = true;
  return make_pair("opt", {{"k", k}, {"delta", delta}}, good, bad, static_cast<std::size_t>(delta), pr);
}

SequencePair gen_fwf_pair(int k, int delta) {
  CacheConfig(k).validate();
  if (delta < 0) throw std::invalid_argument("delta must be >= 0");
  RequestSequence run;
  for (PageId p = 1; p <= k; ++p) run.push_back(p);
  RequestSequence good, bad(run);
  for (int r = 0; r < 2 * delta + 1; ++r) good.insert(good.end(), run.begin(), run.end());
  for (int r = 0; r < delta; ++r) {
    bad.push_back(k + 1);
    bad.insert(bad.end(), run.begin(), run.end());
    bad.insert(bad.end(), run.begin(), run.end());
  }
  Prediction pr;
  pr.good_misses = Rational(k);
  pr.bad_misses = Rational(k + 2 * delta * k);
  return make_pair("fwf", {{"k", k}, {"delta", delta}}, good, bad, static_cast<std::size_t>(delta), pr);
}

SequencePair gen_random_pair(int k, int delta, int n) {
  CacheConfig(k).validate();
  if (delta < 0 || n < 1) throw std::invalid_argument("need delta >= 0 and n >= 1");
  RequestSequence chunk;
  for (int r = 0; r < n; ++r)
    for (PageId p = 0; p < k; ++p) chunk.push_back(p);
  RequestSequence good(chunk), bad(chunk);
  for (int r = 0; r < delta; ++r) {
    good.insert(good.end(), chunk.begin(), chunk.end());
    bad.push_back(k + r);  // fresh y_r
    bad.insert(bad.end(), chunk.begin(), chunk.end());
  }
  Prediction pr;
  pr.difference = Rational(delta * (k + 1));  // limit as n grows
  return make_pair("random", {{"k", k}, {"delta", delta}, {"n", n}}, good, bad, static_cast<std::size_t>(delta),
                   pr);
}

SequencePair gen_mark_pair(int k, int ell, int phases) {
  CacheConfig(k).validate();
  if (ell < 2 || ell > k) throw std::invalid_argument("gen_mark_pair: need 2 <= ell <= k");
  if (phases < 1) throw std::invalid_argument("gen_mark_pair: phases must be >= 1");
  auto xi = [](int j) { return static_cast<PageId>(j); };
  auto yi = [k](int j) { return static_cast<PageId>(k + j); };

  // body = good; bad = x_0 . body
  RequestSequence body;
  for (int j = 1; j <= k; ++j) body.push_back(xi(j));
  PageId q_page;
  std::set<PageId> prev_good;  // pages of the good phase preceding the current bad phase
  if (ell < k) {
    for (int j = 1; j <= ell - 1; ++j) body.push_back(xi(j));
    body.push_back(yi(1));
    body.push_back(xi(1));
    for (int j = 2; j <= k - ell; ++j) body.push_back(yi(j));
    q_page = xi(1);
    prev_good = {xi(1)};
    for (int j = 1; j <= k - 1; ++j) prev_good.insert(yi(j));
  } else {
    // no old pages to interleave; a fresh page closes the second bad phase
    for (int j = 1; j <= k - 2; ++j) body.push_back(xi(j));
    PageId z = 2 * k + 1;
    body.push_back(z);
    q_page = z;
    prev_good = {z};
    for (int j = 1; j <= k - 1; ++j) prev_good.insert(yi(j));
  }
  // third bad phase: ell new y's, then k-ell old y's
  std::vector<PageId> news, olds;
  for (int j = k - ell + 1; j <= k; ++j) news.push_back(yi(j));
  for (int j = 1; j <= k - ell; ++j) olds.push_back(yi(j));
  body.insert(body.end(), news.begin(), news.end());
  body.insert(body.end(), olds.begin(), olds.end());

  for (int h = 1; h < phases; ++h) {
    // good phase h: news.back(), olds, q, then ell-2 new pages; the next bad
    // phase is q followed by ell-1 new pages
    std::set<PageId> bad_phase(news.begin(), news.end());
    bad_phase.insert(olds.begin(), olds.end());
    std::set<PageId> good_phase{news.back(), q_page};
    good_phase.insert(olds.begin(), olds.end());
    std::set<PageId> forbidden = bad_phase;
    forbidden.insert(prev_good.begin(), prev_good.end());
    forbidden.insert(good_phase.begin(), good_phase.end());
    forbidden.insert(0);
    std::vector<PageId> next_news{q_page};
    for (PageId cand = 1; static_cast<int>(next_news.size()) < ell; ++cand)
      if (!forbidden.count(cand)) next_news.push_back(cand);
    for (std::size_t j = 1; j + 1 < next_news.size(); ++j) good_phase.insert(next_news[j]);
    PageId next_q = news.back();
    body.insert(body.end(), next_news.begin(), next_news.end());
    body.insert(body.end(), olds.begin(), olds.end());
    prev_good = std::move(good_phase);
    news = std::move(next_news);
    q_page = next_q;
  }

  RequestSequence bad{xi(0)};
  bad.insert(bad.end(), body.begin(), body.end());
  Prediction pr;
  Rational hk = harmonic(k);
  pr.extra["bad_phase"] = ell * (1 + hk - harmonic(ell));
  pr.extra["good_phase"] = (ell - 1) + hk - harmonic(ell - 1);
  // setup cost is measured, not predicted: expected misses of the first two phases
  auto setup = [k](const RequestSequence& s) {
    auto e = expected_mark(CacheConfig(k), s);
    auto part = phase_partition(s, k);
    std::size_t end = part.phase_count > 2 ? part.boundaries[2] : s.size();
    Rational sum(0);
    for (std::size_t j = 0; j < end; ++j) sum += e.per_request[j];
    return sum;
  };
  pr.extra["setup_bad"] = setup(bad);
  pr.extra["setup_good"] = setup(body);
  return make_pair("mark", {{"k", k}, {"ell", ell}, {"phases", phases}}, body, bad, 1, pr);
}

SequencePair gen_eoa_pair(int k, int m, int delta) {
  CacheConfig(k).validate();
  if (m < 1 || delta < 0) throw std::invalid_argument("need m >= 1 and delta >= 0");
  RequestSequence rho, rho_rev;
  for (PageId p = 0; p < m; ++p) rho.push_back(p);
  rho_rev.assign(rho.rbegin(), rho.rend());
  RequestSequence good, bad;
  for (int r = 0; r < delta; ++r) {
    good.insert(good.end(), rho.begin(), rho.end());
    good.insert(good.end(), rho_rev.begin(), rho_rev.end());
    bad.insert(bad.end(), rho.begin(), rho.end());
    bad.push_back(m + r);  // fresh x per repetition
    bad.insert(bad.end(), rho_rev.begin(), rho_rev.end());
  }
  Rational c = make_rational(k - 1, k);
  Prediction pr;
  pr.difference = delta * (1 + make_rational(k, 2 * k - 1) * (1 - rpow(c, static_cast<unsigned>(2 * m))));
  pr.extra["limit"] = delta * (1 + make_rational(k, 2 * k - 1));
  return make_pair("eoa", {{"k", k}, {"m", m}, {"delta", delta}}, good, bad, static_cast<std::size_t>(delta), pr);
}

SequencePair gen_smoothed_lru_pair(int k, int i, int delta) {
  CacheConfig(k, i).validate();
  if (delta < 0) throw std::invalid_argument("delta must be >= 0");
  const PageId x = k + i + 1, y = k + i + 2;
  RequestSequence run;
  for (PageId p = 1; p <= k + i; ++p) run.push_back(p);
  RequestSequence g, b;
  g.insert(g.end(), run.begin(), run.end());
  g.insert(g.end(), run.begin(), run.end());
  g.push_back(y);
  b.insert(b.end(), run.begin(), run.end());
  b.push_back(x);
  b.insert(b.end(), run.begin(), run.end());
  b.push_back(y);
  RequestSequence good, bad;
  for (int r = 0; r < delta; ++r) {
    good.insert(good.end(), g.begin(), g.end());
    bad.insert(bad.end(), b.begin(), b.end());
  }
  Prediction pr;
  pr.difference = delta * (make_rational(k + i, 2 * i + 1) + 1);
  return make_pair("smoothed-lru", {{"k", k}, {"i", i}, {"delta", delta}}, good, bad,
                   static_cast<std::size_t>(delta), pr);
}

SequencePair gen_randomized_demand_lower(RandPolicy engine_kind, int k, std::size_t iteration_cap) {
  CacheConfig cfg(k);
  if (engine_kind != RandPolicy::RANDOM_DEMAND && engine_kind != RandPolicy::LRU_RANDOM_DEMAND)
    throw std::invalid_argument("engine must be demand-paging Random or LRU-Random");
  ExactEngine engine(engine_kind, cfg);
  RequestSequence bad;
  auto request = [&](PageId p) {
    bad.push_back(p);
    return engine.request(p);
  };
  const PageId n = k + 1;
  for (PageId p = 0; p < n; ++p) request(p);

  auto argmax = [&](const std::set<PageId>& pool) {
    PageId best = *pool.begin();
    Rational bp = engine.absent_probability(best);
    for (PageId p : pool) {
      Rational q = engine.absent_probability(p);
      if (q > bp) {
        best = p;
        bp = q;
      }
    }
    return best;
  };
  std::set<PageId> all;
  for (PageId p = 0; p < n; ++p) all.insert(p);
  PageId m = argmax(all);
  if (engine.absent_probability(m) < Rational(1, k)) throw std::logic_error("no page with p_i >= 1/k");
  request(m);

  std::set<PageId> marked{m};
  std::size_t iterations = 0;
  for (int j = 1; j <= k - 1; ++j) {
    std::set<PageId> unmarked;
    for (PageId p : all)
      if (!marked.count(p)) unmarked.insert(p);
    Rational target(1, static_cast<long>(unmarked.size()));
    target.canonicalize();
    Rational pm(0);
    for (PageId p : marked) pm += engine.absent_probability(p);
    if (pm > 0) {
      PageId l = argmax(marked);
      Rational eps = engine.absent_probability(l);
      Rational faults = request(l);
      while (true) {
        pm = 0;
        for (PageId p : marked) pm += engine.absent_probability(p);
        if (!(faults < target && pm > eps)) break;
        if (++iterations > iteration_cap) throw BudgetExceeded("randomized adversary exceeded iteration cap");
        faults += request(argmax(marked));
      }
    }
    PageId u = argmax(unmarked);
    request(u);
    marked.insert(u);
  }
  PageId left = -1;
  for (PageId p : all)
    if (!marked.count(p)) left = p;
  RequestSequence good;
  for (PageId p : bad)
    if (p != left) good.push_back(p);
  Prediction pr;
  pr.good_misses = Rational(k);
  pr.bad_misses = k + harmonic(k) + Rational(1, k);
  pr.bad_is_lower_bound = true;
  return make_pair("randomized-demand-lower-" + rand_policy_name(engine_kind), {{"k", k}}, good, bad, 1, pr);
}

namespace {

std::vector<LayerRepresentation> replay_layers(int k, const RequestSequence& s) {
  std::vector<LayerRepresentation> out;
  LayerRepresentation w = LayerRepresentation::empty(k);
  for (PageId p : s) {
    w = layer_update(w, p);
    out.push_back(w);
  }
  return out;
}

std::map<PageId, std::pair<int, int>> layer_signatures(const LayerRepresentation& a, const LayerRepresentation& b) {
  std::map<PageId, std::pair<int, int>> sig;
  for (std::size_t j = 0; j < a.layers.size(); ++j)
    for (PageId p : a.layers[j]) sig[p] = {static_cast<int>(j), -1};
  for (std::size_t j = 0; j < b.layers.size(); ++j)
    for (PageId p : b.layers[j]) {
      auto it = sig.find(p);
      if (it == sig.end()) sig[p] = {-1, static_cast<int>(j)};
      else it->second.second = static_cast<int>(j);
    }
  return sig;
}

}  // namespace

PartitionEquitableTrace gen_partition_equitable_pair(int k, int rounds) {
  if (k < 2) throw std::invalid_argument("gen_partition_equitable_pair: k must be >= 2");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  RequestSequence good, bad, block;
  if (k == 2) {
    bad = {4, 3, 2, 1, 0};
    good = {3, 2, 1, 0};
    block = {4, 5, 6, 7, 1, 4, 7, 0, 2};
  } else {
    const PageId x = k, y = k + 1;
    RequestSequence head{y, x};
    for (PageId p = k - 1; p >= 0; --p) head.push_back(p);
    good = head;
    bad = head;
    for (PageId p = k - 2; p >= 0; --p) good.push_back(p);
    for (PageId p = k - 1; p >= 0; --p) bad.push_back(p);
    block.push_back(x);
    for (PageId p = 0; p <= k - 3; ++p) block.push_back(p);
    block.push_back(y);
    block.push_back(k - 1);
    for (PageId p = k - 3; p >= 0; --p) block.push_back(p);
  }
  PartitionEquitableTrace tr;
  tr.good_prefix_len = good.size();
  tr.bad_prefix_len = bad.size();
  tr.block_len = block.size();

  const auto good_start = replay_layers(k, good).back();
  const auto bad_start = replay_layers(k, bad).back();
  // template page -> joint (bad layer, good layer) signature at the start
  const auto tmpl_sig = layer_signatures(bad_start, good_start);
  std::set<PageId> block_pages(block.begin(), block.end());

  std::map<PageId, PageId> rename;  // template page -> actual page
  for (PageId p : block_pages) rename[p] = p;
  for (int r = 0; r < rounds; ++r) {
    if (r > 0) {
      auto good_now = replay_layers(k, good).back();
      auto bad_now = replay_layers(k, bad).back();
      if (!layers_equal_up_to_renaming(good_now, good_start) || !layers_equal_up_to_renaming(bad_now, bad_start))
        throw std::logic_error("extension block did not restore the layer shape");
      auto now_sig = layer_signatures(bad_now, good_now);
      std::map<std::pair<int, int>, std::vector<PageId>> pool;
      for (const auto& [p, s] : now_sig) pool[s].push_back(p);
      rename.clear();
      for (const auto& [p, s] : tmpl_sig) {
        auto& v = pool[s];
        if (v.empty()) throw std::logic_error("layer signatures do not match up to renaming");
        rename[p] = v.front();
        v.erase(v.begin());
      }
      for (const auto& [s, v] : pool)
        if (!v.empty()) throw std::logic_error("layer signatures do not match up to renaming");
      std::set<PageId> used;
      for (const auto& kv : now_sig) used.insert(kv.first);
      PageId fresh = 0;
      for (PageId p : block_pages) {
        if (rename.count(p)) continue;
        while (used.count(fresh)) ++fresh;
        rename[p] = fresh;
        used.insert(fresh);
      }
    }
    for (PageId p : block) {
      good.push_back(rename.at(p));
      bad.push_back(rename.at(p));
    }
  }
  tr.good_layers = replay_layers(k, good);
  tr.bad_layers = replay_layers(k, bad);
  tr.pair = make_pair("partition-equitable", {{"k", k}, {"rounds", rounds}}, good, bad, 1);
  return tr;
}

}  // namespace pagesmooth
