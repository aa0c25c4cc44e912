#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridlang/gridworld.hpp"

namespace gridlang {

// The form space: miniature languages mapping trajectories to token
// sequences. Word symbols are disjoint from action symbols ("left" is a
// word, "LEFT" an action).

enum class Word : uint8_t {
  Left = 0,
  Right,
  Up,
  Down,  // commands
  One,
  Two,
  Three,  // quantifiers
  First,
  Second,
  Third,
  Fourth,
  Fifth,  // ordinal markers, bound to segment indices
};

constexpr int kNumWords = 12;

using Utterance = std::vector<Word>;

bool is_command(Word w);
bool is_quantifier(Word w);
bool is_marker(Word w);

Word command_for(Direction d);
Direction direction_for(Word command);  // throws if not a command
Word quantifier_for(int steps);         // steps in [1,3]
int steps_for(Word quantifier);         // throws if not a quantifier
Word marker_for(int segment_index);     // 1-based, in [1,5]
int segment_index_for(Word marker);     // throws if not a marker

std::string_view to_string(Word w);
Word word_from_string(std::string_view s);  // throws std::invalid_argument
std::string to_text(const Utterance& u);    // space-separated lowercase tokens
Utterance utterance_from_text(std::string_view text);  // throws

// One long-distance wrap: the two elements of `split_phrase` enclose the
// whole of `host_phrase`. In the surface permutation the host immediately
// follows the split phrase.
struct SplitSpec {
  int split_phrase = 0;  // 1-based segment index
  int host_phrase = 0;   // 1-based segment index, != split_phrase

  auto operator<=>(const SplitSpec&) const = default;
};

// A phrase-order template. `permutation` lists segment indices in surface
// order (by first token of each phrase); `quantifier_first[i]` gives the
// element order of the phrase in surface slot i (meaningful only for
// languages with free order within a phrase).
struct OrderTemplate {
  std::vector<int> permutation;
  std::vector<bool> quantifier_first;
  std::optional<SplitSpec> split;

  int num_phrases() const { return static_cast<int>(permutation.size()); }
  auto operator<=>(const OrderTemplate&) const = default;
};

OrderTemplate identity_template(int num_phrases);

// Canonical string, e.g. "2-3-1", "1c-2q-3c", "1-2c-3q|split:C1@2".
// Split slots appear bare; the split part carries their element order.
std::string canonical(const OrderTemplate& t);
OrderTemplate template_from_canonical(std::string_view s);  // throws

enum class MarkerPolicy : uint8_t { None = 0, PhrasePrefix, ElementPrefix };
enum class SplitPolicy : uint8_t { LocalOnly = 0, AllowSplit };

// Declarative description of one miniature language.
struct LanguageSpec {
  std::string name;
  // Permutation of 1..5 inducing orders for shorter lengths by filtering;
  // nullopt means free order.
  std::optional<std::array<int, 5>> fixed_order;
  MarkerPolicy marker_policy = MarkerPolicy::None;
  bool within_phrase_free = false;
  SplitPolicy split_policy = SplitPolicy::LocalOnly;
  // Control languages: fixed sampled template subsets per segment count.
  std::map<int, std::vector<OrderTemplate>> template_subsets;
  int max_segments = kMaxSegments;

  bool is_fixed_order() const { return fixed_order.has_value(); }
  bool operator==(const LanguageSpec&) const = default;
};

void validate(const LanguageSpec& spec);  // throws on inconsistent fields

// Plain-text key-value serialization (reproducible experiment records).
std::string serialize(const LanguageSpec& spec);
LanguageSpec language_from_text(std::string_view text);  // throws

// --- Language families ------------------------------------------------

LanguageSpec forward_iconic(bool markers);
LanguageSpec backward_iconic(bool markers);
// Uniform over permutations of 1..5 excluding identity and full reversal;
// the same seed yields the same permutation with or without markers.
LanguageSpec sample_noniconic(uint64_t seed, bool markers);
LanguageSpec free_order(bool markers);
// Element-prefixed markers, free order within phrases, 3-segment domain.
LanguageSpec local_language();
LanguageSpec long_distance_language();
// Control language: per-segment-count template subsets sampled from `base`
// (24 for 3 segments, 4 for 2, 2 for 1; the long-distance control keeps the
// base language's local/split proportion).
LanguageSpec sample_control(const LanguageSpec& base, uint64_t seed);

// --- Generation -------------------------------------------------------

// All templates the language licenses for trajectories of `num_segments`
// segments, deterministically ordered.
std::vector<OrderTemplate> templates_for(const LanguageSpec& spec, int num_segments);

// Surface form of one template applied to a trajectory.
Utterance realize(const OrderTemplate& tmpl, const LanguageSpec& spec, const Trajectory& t);

// Ground-truth support of P(u|t): exhaustive, duplicate-free, deterministic.
// Throws if the trajectory exceeds spec.max_segments.
std::vector<Utterance> utterances_for(const LanguageSpec& spec, const Trajectory& t);

// --- Interpretation ---------------------------------------------------

struct ParseError {
  int token_index = 0;  // first offending token
  std::string message;
};

struct Interpretation {
  // All trajectories t with u in utterances_for(spec, t), sorted.
  std::vector<Trajectory> trajectories;
  // Realized template for marker languages; identity for marker-free ones.
  std::optional<OrderTemplate> order;
  std::optional<ParseError> error;

  bool ok() const { return !error.has_value() && !trajectories.empty(); }
};

Interpretation interpret(const LanguageSpec& spec, const Utterance& u);

// Realized phrase-order template of a parseable utterance. Marker-free
// languages are positional: the identity template is returned.
std::optional<OrderTemplate> phrase_order_of(const LanguageSpec& spec, const Utterance& u);

enum class Locality : uint8_t { Local = 0, LongDistance };

// LongDistance iff the utterance realizes a split; nullopt if unparseable.
std::optional<Locality> classify_utterance(const LanguageSpec& spec, const Utterance& u);

}  // namespace gridlang
