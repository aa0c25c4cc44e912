#include "gridlang/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace gridlang {

void OrderHistogram::add(const OrderTemplate& t, int64_t n) {
  counts[t] += n;
  total += n;
}

double order_entropy(const OrderHistogram& hist) {
  if (hist.total <= 0) throw std::invalid_argument("entropy of an empty histogram");
  double entropy = 0.0;
  for (const auto& [t, count] : hist.counts) {
    if (count <= 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(hist.total);
    entropy -= p * std::log(p);
  }
  return entropy;
}

int64_t order_rank(const OrderHistogram& hist, const OrderTemplate& t) {
  const auto it = hist.counts.find(t);
  if (it == hist.counts.end() || it->second <= 0) return hist.support_size() + 1;
  int64_t rank = 1;
  for (const auto& [other, count] : hist.counts) {
    if (count > it->second || (count == it->second && other < t)) ++rank;
  }
  return rank;
}

std::vector<OrderTemplate> adjacent_transpositions(const OrderTemplate& t) {
  std::vector<OrderTemplate> out;
  for (int i = 0; i + 1 < t.num_phrases(); ++i) {
    OrderTemplate n = t;
    std::swap(n.permutation[i], n.permutation[i + 1]);
    const bool qf = n.quantifier_first[i];
    n.quantifier_first[i] = n.quantifier_first[i + 1];
    n.quantifier_first[i + 1] = qf;
    if (n.split.has_value()) {
      // Keep only neighbors where the host still follows the split phrase.
      bool ok = false;
      for (int j = 0; j + 1 < n.num_phrases(); ++j) {
        if (n.permutation[j] == n.split->split_phrase &&
            n.permutation[j + 1] == n.split->host_phrase) {
          ok = true;
        }
      }
      if (!ok) continue;
    }
    out.push_back(std::move(n));
  }
  return out;
}

namespace {

NeighborProfile profile_for(const OrderHistogram& hist, const OrderTemplate& t, int64_t count) {
  NeighborProfile profile;
  profile.extremum = t;
  profile.count = count;
  for (const auto& neighbor : adjacent_transpositions(t)) {
    const auto it = hist.counts.find(neighbor);
    profile.neighbors.emplace_back(neighbor, it == hist.counts.end() ? 0 : it->second);
  }
  return profile;
}

}  // namespace

NeighborReport neighbor_profile(const OrderHistogram& hist) {
  if (hist.total <= 0) throw std::invalid_argument("neighbor profile of an empty histogram");
  auto best = hist.counts.begin();
  auto worst = hist.counts.begin();
  for (auto it = hist.counts.begin(); it != hist.counts.end(); ++it) {
    if (it->second > best->second) best = it;
    if (it->second < worst->second) worst = it;
  }
  NeighborReport report;
  report.most_frequent = profile_for(hist, best->first, best->second);
  report.least_frequent = profile_for(hist, worst->first, worst->second);
  return report;
}

int64_t marker_count(const std::vector<Utterance>& utterances) {
  int64_t count = 0;
  for (const auto& u : utterances) {
    for (Word w : u) {
      if (is_marker(w)) ++count;
    }
  }
  return count;
}

SplitFractionReport long_distance_fraction(const std::vector<Utterance>& utterances,
                                           const LanguageSpec& spec) {
  SplitFractionReport report;
  for (const auto& u : utterances) {
    const auto locality = classify_utterance(spec, u);
    if (!locality.has_value()) {
      ++report.unparseable;
    } else if (*locality == Locality::LongDistance) {
      ++report.long_distance;
    } else {
      ++report.local;
    }
  }
  return report;
}

void write_histogram_csv(const std::filesystem::path& path, const OrderHistogram& hist) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "template,count\n";
  for (const auto& [t, count] : hist.counts) {
    out << canonical(t) << ',' << count << '\n';
  }
}

double communication_accuracy(const AgentParams& agent, const SplitCorpus& corpus, int split,
                              RoleDirection role, int m_samples, Rng* rng, int max_len) {
  const Vocabulary& vocab = Vocabulary::instance();
  const auto& pairs = corpus.split(split);
  if (pairs.empty()) return 0.0;
  if (role == RoleDirection::Listener) {
    int64_t hits = 0;
    for (const auto& [traj_idx, utterance] : pairs) {
      const auto input = encode_utterance(utterance, vocab);
      const auto actions = to_actions(corpus.trajectories[traj_idx]);
      const DecodeResult result = greedy_decode(agent, input, max_len);
      if (result.truncated || result.ids.size() != actions.size()) continue;
      bool match = true;
      for (size_t i = 0; i < actions.size(); ++i) {
        if (result.ids[i] != vocab.action_id(actions[i])) match = false;
      }
      hits += match ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
  }

  // Speaker: one greedy production per distinct trajectory.
  std::set<int32_t> unique;
  for (const auto& [traj_idx, utterance] : pairs) unique.insert(traj_idx);
  if (m_samples > 0 && rng == nullptr) {
    throw std::invalid_argument("sampled speaker evaluation needs an rng");
  }
  int64_t hits = 0;
  for (const int32_t traj_idx : unique) {
    const auto input = encode_trajectory(corpus.trajectories[traj_idx], vocab);
    const DecodeResult result = greedy_decode(agent, input, max_len);
    if (result.truncated) continue;
    const auto support = utterances_for(corpus.spec, corpus.trajectories[traj_idx]);
    std::vector<const Utterance*> accepted;
    if (m_samples > 0) {
      for (int s = 0; s < m_samples; ++s) {
        accepted.push_back(&support[rng->index(support.size())]);
      }
    } else {
      for (const auto& u : support) accepted.push_back(&u);
    }
    for (const Utterance* u : accepted) {
      if (u->size() != result.ids.size()) continue;
      bool match = true;
      for (size_t i = 0; i < u->size(); ++i) {
        if (vocab.word_id((*u)[i]) != result.ids[i]) match = false;
      }
      if (match) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(unique.size());
}

double listener_chance_estimate(const SplitCorpus& corpus, int split, Rng& rng,
                                int draws_per_pair) {
  const auto& pairs = corpus.split(split);
  if (pairs.empty() || draws_per_pair < 1) return 0.0;
  std::map<Utterance, std::vector<Trajectory>> cache;
  int64_t hits = 0;
  int64_t draws = 0;
  for (const auto& [traj_idx, utterance] : pairs) {
    auto it = cache.find(utterance);
    if (it == cache.end()) {
      Interpretation r = interpret(corpus.spec, utterance);
      it = cache.emplace(utterance, std::move(r.trajectories)).first;
    }
    const auto& candidates = it->second;
    for (int d = 0; d < draws_per_pair; ++d) {
      ++draws;
      if (candidates.empty()) continue;
      if (candidates[rng.index(candidates.size())] == corpus.trajectories[traj_idx]) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace gridlang
