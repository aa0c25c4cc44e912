#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridlang/grammar.hpp"
#include "gridlang/gridworld.hpp"
#include "gridlang/rng.hpp"

namespace gridlang {

// Joint token inventory: control symbols, then words, then actions.
// Input and output vocabularies are identical; word and action symbols are
// disjoint.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kSos = 1;
  static constexpr int kEos = 2;

  Vocabulary();

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const;
  int id_of(std::string_view token) const;  // throws std::out_of_range

  int word_id(Word w) const;
  int action_id(Direction d) const;
  bool is_word_id(int id) const;
  bool is_action_id(int id) const;
  Word word_of(int id) const;       // throws if not a word id
  Direction action_of(int id) const;  // throws if not an action id

  uint64_t hash() const;  // FNV-1a over the token list

  static const Vocabulary& instance();

 private:
  std::vector<std::string> tokens_;
};

// Encoding appends EOS; decoding stops at EOS and skips PAD.
std::vector<int> encode_utterance(const Utterance& u, const Vocabulary& vocab);
std::vector<int> encode_actions(const std::vector<Direction>& actions, const Vocabulary& vocab);
std::vector<int> encode_trajectory(const Trajectory& t, const Vocabulary& vocab);
// nullopt if any non-word (or non-action) token appears before EOS.
std::optional<Utterance> decode_utterance(const std::vector<int>& ids, const Vocabulary& vocab);
std::optional<std::vector<Direction>> decode_actions(const std::vector<int>& ids,
                                                     const Vocabulary& vocab);

// One meaning with its full ground-truth support.
struct Example {
  Trajectory trajectory;
  std::vector<Utterance> targets;  // = utterances_for(spec, trajectory)
};

struct CorpusOptions {
  // Keep only trajectories with exactly max_segments segments (the strict
  // reading of the 3-segment environment); default keeps 1..max_segments.
  bool exact_segments = false;
  // Seeded down-sampling knobs for desk-scale runs; 0 disables.
  int max_trajectories = 0;
  int pairs_per_trajectory = 0;
};

// All distinct (trajectory, utterance) pairs, shuffled and split 80/10/10.
struct SplitCorpus {
  LanguageSpec spec;
  uint64_t seed = 0;
  CorpusOptions options;
  std::vector<Trajectory> trajectories;  // the (possibly down-sampled) domain
  // Pairs reference trajectories by index.
  std::vector<std::pair<int32_t, Utterance>> train, dev, test;

  size_t total_pairs() const { return train.size() + dev.size() + test.size(); }
  const std::vector<std::pair<int32_t, Utterance>>& split(int which) const;
  Example example_for(int32_t trajectory_index) const;
};

SplitCorpus build_corpus(const LanguageSpec& spec, uint64_t seed,
                         const CorpusOptions& options = {});

// Uniform sample without replacement when the support exceeds n; the full
// support otherwise.
std::vector<Utterance> sample_targets(const Example& example, int n, Rng& rng);

// All local utterances plus an equal number of sampled split utterances.
// Defined for long-distance (AllowSplit) languages only.
std::vector<Utterance> balanced_split_sample(const Example& example, const LanguageSpec& spec,
                                             Rng& rng);

// One pair per line: "<trajectory actions>\t<utterance>".
void export_pairs_tsv(const std::filesystem::path& path, const SplitCorpus& corpus, int which);
void export_corpus(const std::filesystem::path& dir, const SplitCorpus& corpus);

}  // namespace gridlang
