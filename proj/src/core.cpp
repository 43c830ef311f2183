#include "pagesmooth/core.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace pagesmooth {

void CacheConfig::validate() const {
  if (k < 1) throw std::invalid_argument("cache size k must be >= 1");
  if (i < 0 || i >= k) throw std::invalid_argument("smoothing parameter i must satisfy 0 <= i < k");
}

std::size_t edit_distance(const RequestSequence& a, const RequestSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

void single_edits(const RequestSequence& s, const std::vector<PageId>& alphabet,
                  std::set<RequestSequence>& out) {
  for (std::size_t pos = 0; pos <= s.size(); ++pos) {
    for (PageId p : alphabet) {
      RequestSequence t(s);
      t.insert(t.begin() + static_cast<std::ptrdiff_t>(pos), p);
      out.insert(std::move(t));
    }
  }
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    RequestSequence t(s);
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(std::move(t));
    for (PageId p : alphabet) {
      if (p == s[pos]) continue;
      RequestSequence u(s);
      u[pos] = p;
      out.insert(std::move(u));
    }
  }
}

}  // namespace

std::set<RequestSequence> neighborhood(const RequestSequence& s, int delta,
                                       const std::vector<PageId>& alphabet, std::size_t cap) {
  if (alphabet.empty()) throw std::invalid_argument("neighborhood: alphabet must be non-empty");
  if (delta < 1) throw std::invalid_argument("neighborhood: delta must be >= 1");
  std::set<RequestSequence> all{s};
  std::set<RequestSequence> frontier{s};
  for (int step = 0; step < delta; ++step) {
    std::set<RequestSequence> next;
    for (const auto& t : frontier) {
      std::set<RequestSequence> edits;
      single_edits(t, alphabet, edits);
      for (auto& e : edits) {
        if (all.insert(e).second) next.insert(e);
        if (all.size() > cap) throw BudgetExceeded("neighborhood exceeds cap");
      }
    }
    frontier = std::move(next);
  }
  for (const auto& t : all) {
    if (edit_distance(s, t) > static_cast<std::size_t>(delta))
      throw std::logic_error("neighborhood produced a sequence beyond delta");
  }
  return all;
}

PhasePartition phase_partition(const RequestSequence& s, int k) {
  if (k < 1) throw std::invalid_argument("phase_partition: k must be >= 1");
  PhasePartition pp;
  if (s.empty()) return pp;
  std::unordered_set<PageId> seen;
  pp.boundaries.push_back(0);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!seen.count(s[j]) && seen.size() == static_cast<std::size_t>(k)) {
      seen.clear();
      pp.boundaries.push_back(j);
    }
    seen.insert(s[j]);
  }
  pp.phase_count = static_cast<int>(pp.boundaries.size());
  pp.last_phase_distinct = static_cast<int>(seen.size());
  return pp;
}

std::vector<PageId> make_alphabet(int n) {
  std::vector<PageId> a;
  for (int j = 0; j < n; ++j) a.push_back(j);
  return a;
}

std::vector<RequestSequence> all_sequences(const std::vector<PageId>& alphabet, int max_len) {
  std::vector<RequestSequence> out{RequestSequence{}};
  std::size_t layer_begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t layer_end = out.size();
    for (std::size_t idx = layer_begin; idx < layer_end; ++idx) {
      for (PageId p : alphabet) {
        RequestSequence t = out[idx];
        t.push_back(p);
        out.push_back(std::move(t));
      }
    }
    layer_begin = layer_end;
  }
  return out;
}

RequestSequence canonical_renaming(const RequestSequence& s) {
  std::map<PageId, PageId> m;
  RequestSequence out;
  out.reserve(s.size());
  for (PageId p : s) {
    auto it = m.find(p);
    if (it == m.end()) it = m.emplace(p, static_cast<PageId>(m.size())).first;
    out.push_back(it->second);
  }
  return out;
}

std::size_t distinct_count(const RequestSequence& s) {
  return std::unordered_set<PageId>(s.begin(), s.end()).size();
}

std::string format_sequence(const RequestSequence& s) {
  std::string out;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(s[j]);
  }
  return out;
}

RequestSequence parse_sequence(const std::string& line) {
  RequestSequence s;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto b = tok.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
      if (s.empty() && ss.eof()) break;
      throw std::invalid_argument("empty token in sequence");
    }
    auto e = tok.find_last_not_of(" \t\r");
    tok = tok.substr(b, e - b + 1);
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size() || v < 0) throw std::invalid_argument("bad page id: " + tok);
    s.push_back(v);
  }
  return s;
}

std::vector<RequestSequence> read_corpus(std::istream& in) {
  std::vector<RequestSequence> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(parse_sequence(line));
  return out;
}

void write_corpus(std::ostream& out, const std::vector<RequestSequence>& corpus) {
  for (const auto& s : corpus) out << format_sequence(s) << '\n';
}

}  // namespace pagesmooth
