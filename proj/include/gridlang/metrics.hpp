#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "gridlang/agent.hpp"
#include "gridlang/corpus.hpp"
#include "gridlang/grammar.hpp"

namespace gridlang {

// Empirical distribution over phrase-order templates.
struct OrderHistogram {
  std::map<OrderTemplate, int64_t> counts;
  int64_t total = 0;

  void add(const OrderTemplate& t, int64_t n = 1);
  int64_t support_size() const { return static_cast<int64_t>(counts.size()); }
};

// Shannon entropy in nats over template frequencies. Requires total > 0.
double order_entropy(const OrderHistogram& hist);

// 1 = most frequent; ties break by template order; templates outside the
// support rank support_size() + 1.
int64_t order_rank(const OrderHistogram& hist, const OrderTemplate& t);

// Templates one adjacent transposition away (the phrase in slot i swaps
// with slot i+1, element orders travelling with their phrases).
std::vector<OrderTemplate> adjacent_transpositions(const OrderTemplate& t);

struct NeighborProfile {
  OrderTemplate extremum;
  int64_t count = 0;
  std::vector<std::pair<OrderTemplate, int64_t>> neighbors;  // with histogram counts
};

struct NeighborReport {
  NeighborProfile most_frequent;
  NeighborProfile least_frequent;
};

NeighborReport neighbor_profile(const OrderHistogram& hist);

// Total marker tokens (first..fifth) across the utterances.
int64_t marker_count(const std::vector<Utterance>& utterances);

struct SplitFractionReport {
  int64_t local = 0;
  int64_t long_distance = 0;
  int64_t unparseable = 0;  // counted separately, not in the fraction

  double fraction() const {
    const int64_t parsed = local + long_distance;
    return parsed > 0 ? static_cast<double>(long_distance) / parsed : 0.0;
  }
};

SplitFractionReport long_distance_fraction(const std::vector<Utterance>& utterances,
                                           const LanguageSpec& spec);

// "template,count" rows in canonical template order.
void write_histogram_csv(const std::filesystem::path& path, const OrderHistogram& hist);

// --- Communication accuracy ------------------------------------------------

inline constexpr int kTrainSplit = 0;
inline constexpr int kDevSplit = 1;
inline constexpr int kTestSplit = 2;

// Listener: exact action-sequence match of the greedy decode, per pair.
// Speaker: per distinct trajectory of the split, hit iff the greedy decode
// is one of M samples from the ground-truth P(u|t); M = 0 uses the full
// enumerated support (deterministic, and an upper bound for any sampled M).
double communication_accuracy(const AgentParams& agent, const SplitCorpus& corpus, int split,
                              RoleDirection role, int m_samples = 0, Rng* rng = nullptr,
                              int max_len = 40);

// Accuracy of guessing a uniformly random interpretation of each utterance:
// the structural chance floor a listener cannot exceed on ambiguous
// languages.
double listener_chance_estimate(const SplitCorpus& corpus, int split, Rng& rng,
                                int draws_per_pair = 8);

}  // namespace gridlang
