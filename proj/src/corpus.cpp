#include "gridlang/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace gridlang {

Vocabulary::Vocabulary() {
  tokens_ = {"PAD", "SOS", "EOS"};
  for (int w = 0; w < kNumWords; ++w) {
    tokens_.push_back(std::string(to_string(static_cast<Word>(w))));
  }
  for (int d = 0; d < kNumDirections; ++d) {
    tokens_.push_back(std::string(to_string(static_cast<Direction>(d))));
  }
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("token id out of range");
  return tokens_[id];
}

int Vocabulary::id_of(std::string_view token) const {
  for (int i = 0; i < size(); ++i) {
    if (tokens_[i] == token) return i;
  }
  throw std::out_of_range("unknown token: '" + std::string(token) + "'");
}

int Vocabulary::word_id(Word w) const { return 3 + static_cast<int>(w); }

int Vocabulary::action_id(Direction d) const { return 3 + kNumWords + static_cast<int>(d); }

bool Vocabulary::is_word_id(int id) const { return id >= 3 && id < 3 + kNumWords; }

bool Vocabulary::is_action_id(int id) const {
  return id >= 3 + kNumWords && id < 3 + kNumWords + kNumDirections;
}

Word Vocabulary::word_of(int id) const {
  if (!is_word_id(id)) throw std::out_of_range("not a word id");
  return static_cast<Word>(id - 3);
}

Direction Vocabulary::action_of(int id) const {
  if (!is_action_id(id)) throw std::out_of_range("not an action id");
  return static_cast<Direction>(id - 3 - kNumWords);
}

uint64_t Vocabulary::hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& token : tokens_) {
    for (char c : token) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  return h;
}

const Vocabulary& Vocabulary::instance() {
  static const Vocabulary vocab;
  return vocab;
}

std::vector<int> encode_utterance(const Utterance& u, const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(u.size() + 1);
  for (Word w : u) ids.push_back(vocab.word_id(w));
  ids.push_back(Vocabulary::kEos);
  return ids;
}

std::vector<int> encode_actions(const std::vector<Direction>& actions, const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(actions.size() + 1);
  for (Direction d : actions) ids.push_back(vocab.action_id(d));
  ids.push_back(Vocabulary::kEos);
  return ids;
}

std::vector<int> encode_trajectory(const Trajectory& t, const Vocabulary& vocab) {
  return encode_actions(to_actions(t), vocab);
}

std::optional<Utterance> decode_utterance(const std::vector<int>& ids, const Vocabulary& vocab) {
  Utterance u;
  for (int id : ids) {
    if (id == Vocabulary::kEos) break;
    if (id == Vocabulary::kPad) continue;
    if (!vocab.is_word_id(id)) return std::nullopt;
    u.push_back(vocab.word_of(id));
  }
  return u;
}

std::optional<std::vector<Direction>> decode_actions(const std::vector<int>& ids,
                                                     const Vocabulary& vocab) {
  std::vector<Direction> actions;
  for (int id : ids) {
    if (id == Vocabulary::kEos) break;
    if (id == Vocabulary::kPad) continue;
    if (!vocab.is_action_id(id)) return std::nullopt;
    actions.push_back(vocab.action_of(id));
  }
  return actions;
}

const std::vector<std::pair<int32_t, Utterance>>& SplitCorpus::split(int which) const {
  switch (which) {
    case 0: return train;
    case 1: return dev;
    default: return test;
  }
}

Example SplitCorpus::example_for(int32_t trajectory_index) const {
  const Trajectory& t = trajectories.at(trajectory_index);
  return Example{t, utterances_for(spec, t)};
}

SplitCorpus build_corpus(const LanguageSpec& spec, uint64_t seed, const CorpusOptions& options) {
  validate(spec);
  SplitCorpus corpus;
  corpus.spec = spec;
  corpus.seed = seed;
  corpus.options = options;
  corpus.trajectories = options.exact_segments
                            ? enumerate_trajectories_exact(spec.max_segments)
                            : enumerate_trajectories(spec.max_segments);
  if (options.max_trajectories > 0 &&
      options.max_trajectories < static_cast<int>(corpus.trajectories.size())) {
    Rng domain_rng(mix_seed(seed, 0x646f6d61696eULL));  // "domain"
    auto keep = domain_rng.sample_indices(corpus.trajectories.size(),
                                          static_cast<size_t>(options.max_trajectories));
    std::sort(keep.begin(), keep.end());
    std::vector<Trajectory> kept;
    kept.reserve(keep.size());
    for (size_t i : keep) kept.push_back(std::move(corpus.trajectories[i]));
    corpus.trajectories = std::move(kept);
  }

  std::vector<std::pair<int32_t, Utterance>> pairs;
  Rng pair_rng(mix_seed(seed, 0x7061697273ULL));  // "pairs"
  for (int32_t i = 0; i < static_cast<int32_t>(corpus.trajectories.size()); ++i) {
    auto support = utterances_for(spec, corpus.trajectories[i]);
    if (options.pairs_per_trajectory > 0 &&
        options.pairs_per_trajectory < static_cast<int>(support.size())) {
      for (size_t j : pair_rng.sample_indices(support.size(),
                                              static_cast<size_t>(options.pairs_per_trajectory))) {
        pairs.emplace_back(i, support[j]);
      }
    } else {
      for (auto& u : support) pairs.emplace_back(i, std::move(u));
    }
  }

  Rng shuffle_rng(mix_seed(seed, 0x73687566666cULL));  // "shuffl"
  shuffle_rng.shuffle(pairs);
  const size_t n = pairs.size();
  const size_t n_dev = n / 10;
  const size_t n_test = n / 10;
  const size_t n_train = n - n_dev - n_test;
  corpus.train.assign(pairs.begin(), pairs.begin() + n_train);
  corpus.dev.assign(pairs.begin() + n_train, pairs.begin() + n_train + n_dev);
  corpus.test.assign(pairs.begin() + n_train + n_dev, pairs.end());
  return corpus;
}

std::vector<Utterance> sample_targets(const Example& example, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  const int n_j = static_cast<int>(example.targets.size());
  if (n_j <= n) return example.targets;
  std::vector<Utterance> out;
  out.reserve(n);
  for (size_t i : rng.sample_indices(example.targets.size(), static_cast<size_t>(n))) {
    out.push_back(example.targets[i]);
  }
  return out;
}

std::vector<Utterance> balanced_split_sample(const Example& example, const LanguageSpec& spec,
                                             Rng& rng) {
  if (spec.split_policy != SplitPolicy::AllowSplit) {
    throw std::invalid_argument("balanced sampling needs a long-distance language");
  }
  std::vector<const Utterance*> locals, splits;
  for (const Utterance& u : example.targets) {
    auto locality = classify_utterance(spec, u);
    if (!locality.has_value()) {
      throw std::invalid_argument("target not parseable under the language");
    }
    (*locality == Locality::Local ? locals : splits).push_back(&u);
  }
  std::vector<Utterance> out;
  out.reserve(2 * locals.size());
  for (const Utterance* u : locals) out.push_back(*u);
  const size_t take = std::min(locals.size(), splits.size());
  for (size_t i : rng.sample_indices(splits.size(), take)) out.push_back(*splits[i]);
  return out;
}

void export_pairs_tsv(const std::filesystem::path& path, const SplitCorpus& corpus, int which) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const auto& [traj_idx, utterance] : corpus.split(which)) {
    out << to_text(corpus.trajectories[traj_idx]) << '\t' << to_text(utterance) << '\n';
  }
}

void export_corpus(const std::filesystem::path& dir, const SplitCorpus& corpus) {
  std::filesystem::create_directories(dir);
  export_pairs_tsv(dir / "train.tsv", corpus, 0);
  export_pairs_tsv(dir / "dev.tsv", corpus, 1);
  export_pairs_tsv(dir / "test.tsv", corpus, 2);
  std::ofstream lang(dir / "language.txt");
  lang << serialize(corpus.spec);
}

}  // namespace gridlang
