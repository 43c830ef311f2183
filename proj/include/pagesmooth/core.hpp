#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pagesmooth {

using PageId = std::int64_t;
using RequestSequence = std::vector<PageId>;

// Slot filler for caches that are not full. Sorts after every real page.
inline constexpr PageId kEmptySlot = std::numeric_limits<PageId>::max();

// Thrown when an enumeration or search would exceed its configured cap.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CacheConfig {
  int k = 1;
  int i = 0;

  CacheConfig() = default;
  CacheConfig(int k_, int i_ = 0) : k(k_), i(i_) { validate(); }
  void validate() const;
};

struct PhasePartition {
  std::vector<std::size_t> boundaries;  // start index of each phase
  int phase_count = 0;                  // Phi
  int last_phase_distinct = 0;          // ell
};

std::size_t edit_distance(const RequestSequence& a, const RequestSequence& b);

inline constexpr std::size_t kDefaultNeighborhoodCap = 2'000'000;

std::set<RequestSequence> neighborhood(const RequestSequence& s, int delta,
                                       const std::vector<PageId>& alphabet,
                                       std::size_t cap = kDefaultNeighborhoodCap);

PhasePartition phase_partition(const RequestSequence& s, int k);

// Default audit alphabet {0,...,n-1}.
std::vector<PageId> make_alphabet(int n);

// All sequences over the alphabet with length <= max_len (including empty).
std::vector<RequestSequence> all_sequences(const std::vector<PageId>& alphabet, int max_len);

// Rename pages by order of first occurrence (0,1,2,...).
RequestSequence canonical_renaming(const RequestSequence& s);

std::size_t distinct_count(const RequestSequence& s);

std::string format_sequence(const RequestSequence& s);
RequestSequence parse_sequence(const std::string& line);
std::vector<RequestSequence> read_corpus(std::istream& in);
void write_corpus(std::ostream& out, const std::vector<RequestSequence>& corpus);

}  // namespace pagesmooth
