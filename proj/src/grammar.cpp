#include "gridlang/grammar.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gridlang/rng.hpp"

namespace gridlang {

namespace {

constexpr std::string_view kWordNames[kNumWords] = {
    "left", "right", "up",    "down",  "1",     "2",
    "3",    "first", "second", "third", "fourth", "fifth"};

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

int word_index(Word w) { return static_cast<int>(w); }

}  // namespace

bool is_command(Word w) { return word_index(w) < 4; }
bool is_quantifier(Word w) { return word_index(w) >= 4 && word_index(w) < 7; }
bool is_marker(Word w) { return word_index(w) >= 7; }

Word command_for(Direction d) { return static_cast<Word>(static_cast<int>(d)); }

Direction direction_for(Word command) {
  if (!is_command(command)) fail("not a command word");
  return static_cast<Direction>(word_index(command));
}

Word quantifier_for(int steps) {
  if (steps < 1 || steps > kMaxStepsPerSegment) fail("step count out of [1,3]");
  return static_cast<Word>(3 + steps);
}

int steps_for(Word quantifier) {
  if (!is_quantifier(quantifier)) fail("not a quantifier word");
  return word_index(quantifier) - 3;
}

Word marker_for(int segment_index) {
  if (segment_index < 1 || segment_index > kMaxSegments) fail("marker index out of [1,5]");
  return static_cast<Word>(6 + segment_index);
}

int segment_index_for(Word marker) {
  if (!is_marker(marker)) fail("not a marker word");
  return word_index(marker) - 6;
}

std::string_view to_string(Word w) { return kWordNames[word_index(w)]; }

Word word_from_string(std::string_view s) {
  for (int i = 0; i < kNumWords; ++i) {
    if (s == kWordNames[i]) return static_cast<Word>(i);
  }
  fail("unknown word: '" + std::string(s) + "'");
}

std::string to_text(const Utterance& u) {
  std::string out;
  for (size_t i = 0; i < u.size(); ++i) {
    if (i > 0) out += ' ';
    out += to_string(u[i]);
  }
  return out;
}

Utterance utterance_from_text(std::string_view text) {
  Utterance u;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) u.push_back(word_from_string(token));
  return u;
}

// --- Templates ----------------------------------------------------------

OrderTemplate identity_template(int num_phrases) {
  OrderTemplate t;
  for (int i = 1; i <= num_phrases; ++i) t.permutation.push_back(i);
  t.quantifier_first.assign(num_phrases, false);
  return t;
}

std::string canonical(const OrderTemplate& t) {
  std::string out;
  for (int i = 0; i < t.num_phrases(); ++i) {
    if (i > 0) out += '-';
    out += std::to_string(t.permutation[i]);
    const bool is_split_slot =
        t.split.has_value() && t.permutation[i] == t.split->split_phrase;
    if (t.quantifier_first[i] && !is_split_slot) out += 'q';
  }
  if (t.split.has_value()) {
    int split_slot = -1;
    for (int i = 0; i < t.num_phrases(); ++i) {
      if (t.permutation[i] == t.split->split_phrase) split_slot = i;
    }
    out += "|split:";
    out += (split_slot >= 0 && t.quantifier_first[split_slot]) ? 'Q' : 'C';
    out += std::to_string(t.split->split_phrase);
    out += '@';
    out += std::to_string(t.split->host_phrase);
  }
  return out;
}

OrderTemplate template_from_canonical(std::string_view s) {
  OrderTemplate t;
  std::string_view perm_part = s;
  std::string_view split_part;
  if (const size_t bar = s.find('|'); bar != std::string_view::npos) {
    perm_part = s.substr(0, bar);
    split_part = s.substr(bar + 1);
  }
  size_t pos = 0;
  while (pos < perm_part.size()) {
    size_t end = perm_part.find('-', pos);
    if (end == std::string_view::npos) end = perm_part.size();
    std::string_view entry = perm_part.substr(pos, end - pos);
    bool qf = false;
    if (!entry.empty() && entry.back() == 'q') {
      qf = true;
      entry.remove_suffix(1);
    }
    int idx = 0;
    auto res = std::from_chars(entry.data(), entry.data() + entry.size(), idx);
    if (res.ec != std::errc{} || res.ptr != entry.data() + entry.size() || idx < 1) {
      fail("bad template entry: '" + std::string(entry) + "'");
    }
    t.permutation.push_back(idx);
    t.quantifier_first.push_back(qf);
    pos = end + 1;
  }
  if (!split_part.empty()) {
    if (split_part.substr(0, 6) != "split:" || split_part.size() < 10) {
      fail("bad split descriptor: '" + std::string(split_part) + "'");
    }
    const char order = split_part[6];
    if (order != 'C' && order != 'Q') fail("split order must be C or Q");
    const size_t at = split_part.find('@');
    if (at == std::string_view::npos) fail("split descriptor missing '@'");
    const int split_phrase = std::stoi(std::string(split_part.substr(7, at - 7)));
    const int host_phrase = std::stoi(std::string(split_part.substr(at + 1)));
    t.split = SplitSpec{split_phrase, host_phrase};
    for (int i = 0; i < t.num_phrases(); ++i) {
      if (t.permutation[i] == split_phrase) t.quantifier_first[i] = (order == 'Q');
    }
  }
  return t;
}

namespace {

bool is_permutation_of_prefix(const std::vector<int>& perm) {
  const int k = static_cast<int>(perm.size());
  std::vector<bool> seen(k, false);
  for (int v : perm) {
    if (v < 1 || v > k || seen[v - 1]) return false;
    seen[v - 1] = true;
  }
  return true;
}

// Valid template for k-segment trajectories under this spec's structure.
bool template_well_formed(const OrderTemplate& t, const LanguageSpec& spec) {
  const int k = t.num_phrases();
  if (k < 1 || k > spec.max_segments) return false;
  if (!is_permutation_of_prefix(t.permutation)) return false;
  if (static_cast<int>(t.quantifier_first.size()) != k) return false;
  if (!spec.within_phrase_free) {
    for (bool qf : t.quantifier_first) {
      if (qf) return false;
    }
  }
  if (t.split.has_value()) {
    if (spec.split_policy != SplitPolicy::AllowSplit) return false;
    if (spec.marker_policy != MarkerPolicy::ElementPrefix) return false;
    const auto& s = *t.split;
    if (s.split_phrase < 1 || s.split_phrase > k) return false;
    if (s.host_phrase < 1 || s.host_phrase > k) return false;
    if (s.split_phrase == s.host_phrase) return false;
    // Host immediately follows the split phrase in the permutation.
    for (int i = 0; i < k; ++i) {
      if (t.permutation[i] == s.split_phrase) {
        return i + 1 < k && t.permutation[i + 1] == s.host_phrase;
      }
    }
    return false;
  }
  return true;
}

std::vector<int> induced_order(const std::array<int, 5>& full, int k) {
  std::vector<int> order;
  for (int v : full) {
    if (v <= k) order.push_back(v);
  }
  return order;
}

// The full template set for k segments, ignoring control subsets.
std::vector<OrderTemplate> full_templates(const LanguageSpec& spec, int k) {
  std::vector<std::vector<int>> perms;
  if (spec.fixed_order.has_value()) {
    perms.push_back(induced_order(*spec.fixed_order, k));
  } else {
    std::vector<int> p;
    for (int i = 1; i <= k; ++i) p.push_back(i);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  const int num_masks = spec.within_phrase_free ? (1 << k) : 1;
  std::vector<OrderTemplate> out;
  for (const auto& perm : perms) {
    for (int mask = 0; mask < num_masks; ++mask) {
      OrderTemplate t;
      t.permutation = perm;
      t.quantifier_first.resize(k);
      for (int i = 0; i < k; ++i) t.quantifier_first[i] = (mask >> i) & 1;
      out.push_back(std::move(t));
    }
  }
  if (spec.split_policy == SplitPolicy::AllowSplit) {
    for (const auto& perm : perms) {
      for (int sp = 0; sp + 1 < k; ++sp) {
        for (int mask = 0; mask < num_masks; ++mask) {
          OrderTemplate t;
          t.permutation = perm;
          t.quantifier_first.resize(k);
          for (int i = 0; i < k; ++i) t.quantifier_first[i] = (mask >> i) & 1;
          t.split = SplitSpec{perm[sp], perm[sp + 1]};
          out.push_back(std::move(t));
        }
      }
    }
  }
  return out;
}

}  // namespace

// --- Language spec ------------------------------------------------------

void validate(const LanguageSpec& spec) {
  if (spec.max_segments != 3 && spec.max_segments != kMaxSegments) {
    fail("max_segments must be 3 or 5");
  }
  if (spec.fixed_order.has_value()) {
    std::array<int, 5> sorted = *spec.fixed_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 5>{1, 2, 3, 4, 5}) {
      fail("fixed order must be a permutation of 1..5");
    }
  }
  const bool element_family = spec.marker_policy == MarkerPolicy::ElementPrefix;
  if (element_family != spec.within_phrase_free) {
    fail("within-phrase freedom goes with element-prefixed markers");
  }
  if (element_family) {
    if (spec.max_segments != 3) fail("element-marked languages use max_segments=3");
    if (spec.fixed_order.has_value()) fail("element-marked languages are free-order");
  }
  if (spec.split_policy == SplitPolicy::AllowSplit && !element_family) {
    fail("split constructions require element-prefixed markers");
  }
  for (const auto& [k, templates] : spec.template_subsets) {
    if (k < 1 || k > spec.max_segments) fail("template subset for invalid segment count");
    if (templates.empty()) fail("empty template subset");
    auto full = full_templates(spec, k);
    for (const auto& t : templates) {
      if (!template_well_formed(t, spec) ||
          std::find(full.begin(), full.end(), t) == full.end()) {
        fail("template subset entry not licensed by the base language: " + canonical(t));
      }
    }
  }
}

std::string serialize(const LanguageSpec& spec) {
  std::ostringstream out;
  out << "name = " << spec.name << "\n";
  if (spec.fixed_order.has_value()) {
    out << "order = fixed ";
    for (int i = 0; i < 5; ++i) {
      if (i > 0) out << ',';
      out << (*spec.fixed_order)[i];
    }
    out << "\n";
  } else {
    out << "order = free\n";
  }
  out << "markers = ";
  switch (spec.marker_policy) {
    case MarkerPolicy::None: out << "none"; break;
    case MarkerPolicy::PhrasePrefix: out << "phrase"; break;
    case MarkerPolicy::ElementPrefix: out << "element"; break;
  }
  out << "\n";
  out << "within_phrase_free = " << (spec.within_phrase_free ? 1 : 0) << "\n";
  out << "split = " << (spec.split_policy == SplitPolicy::AllowSplit ? "allow" : "local") << "\n";
  out << "max_segments = " << spec.max_segments << "\n";
  for (const auto& [k, templates] : spec.template_subsets) {
    out << "template_subset " << k << " = ";
    for (size_t i = 0; i < templates.size(); ++i) {
      if (i > 0) out << ';';
      out << canonical(templates[i]);
    }
    out << "\n";
  }
  return out.str();
}

LanguageSpec language_from_text(std::string_view text) {
  LanguageSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (const size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (key == "name") {
      spec.name = value;
    } else if (key == "order") {
      if (value == "free") {
        spec.fixed_order.reset();
      } else if (value.rfind("fixed", 0) == 0) {
        std::array<int, 5> order{};
        std::string list = trim(value.substr(5));
        std::replace(list.begin(), list.end(), ',', ' ');
        std::istringstream nums(list);
        for (int i = 0; i < 5; ++i) {
          if (!(nums >> order[i])) fail("fixed order needs 5 entries");
        }
        spec.fixed_order = order;
      } else {
        fail("order must be 'free' or 'fixed i,j,k,l,m'");
      }
    } else if (key == "markers") {
      if (value == "none") spec.marker_policy = MarkerPolicy::None;
      else if (value == "phrase") spec.marker_policy = MarkerPolicy::PhrasePrefix;
      else if (value == "element") spec.marker_policy = MarkerPolicy::ElementPrefix;
      else fail("markers must be none|phrase|element");
    } else if (key == "within_phrase_free") {
      spec.within_phrase_free = (value == "1" || value == "true");
    } else if (key == "split") {
      if (value == "local") spec.split_policy = SplitPolicy::LocalOnly;
      else if (value == "allow") spec.split_policy = SplitPolicy::AllowSplit;
      else fail("split must be local|allow");
    } else if (key == "max_segments") {
      spec.max_segments = std::stoi(value);
    } else if (key.rfind("template_subset", 0) == 0) {
      const int k = std::stoi(key.substr(15));
      std::vector<OrderTemplate> templates;
      size_t pos = 0;
      while (pos <= value.size()) {
        size_t end = value.find(';', pos);
        if (end == std::string::npos) end = value.size();
        if (end > pos) templates.push_back(template_from_canonical(
            std::string_view(value).substr(pos, end - pos)));
        pos = end + 1;
      }
      spec.template_subsets[k] = std::move(templates);
    } else {
      fail("unknown language key: '" + key + "'");
    }
  }
  validate(spec);
  return spec;
}

// --- Families -----------------------------------------------------------

LanguageSpec forward_iconic(bool markers) {
  LanguageSpec spec;
  spec.name = markers ? "forward-iconic-markers" : "forward-iconic";
  spec.fixed_order = std::array<int, 5>{1, 2, 3, 4, 5};
  spec.marker_policy = markers ? MarkerPolicy::PhrasePrefix : MarkerPolicy::None;
  return spec;
}

LanguageSpec backward_iconic(bool markers) {
  LanguageSpec spec;
  spec.name = markers ? "backward-iconic-markers" : "backward-iconic";
  spec.fixed_order = std::array<int, 5>{5, 4, 3, 2, 1};
  spec.marker_policy = markers ? MarkerPolicy::PhrasePrefix : MarkerPolicy::None;
  return spec;
}

LanguageSpec sample_noniconic(uint64_t seed, bool markers) {
  Rng rng(mix_seed(seed, 0x6e6f6e69636f6eULL));  // "noniconic"
  std::vector<int> perm{1, 2, 3, 4, 5};
  const std::vector<int> identity = perm;
  const std::vector<int> reversal{5, 4, 3, 2, 1};
  do {
    rng.shuffle(perm);
  } while (perm == identity || perm == reversal);
  LanguageSpec spec;
  spec.name = "non-iconic-" + std::to_string(seed) + (markers ? "-markers" : "");
  std::array<int, 5> order{};
  std::copy(perm.begin(), perm.end(), order.begin());
  spec.fixed_order = order;
  spec.marker_policy = markers ? MarkerPolicy::PhrasePrefix : MarkerPolicy::None;
  return spec;
}

LanguageSpec free_order(bool markers) {
  LanguageSpec spec;
  spec.name = markers ? "free-markers" : "free";
  spec.marker_policy = markers ? MarkerPolicy::PhrasePrefix : MarkerPolicy::None;
  return spec;
}

LanguageSpec local_language() {
  LanguageSpec spec;
  spec.name = "local";
  spec.marker_policy = MarkerPolicy::ElementPrefix;
  spec.within_phrase_free = true;
  spec.split_policy = SplitPolicy::LocalOnly;
  spec.max_segments = 3;
  return spec;
}

LanguageSpec long_distance_language() {
  LanguageSpec spec = local_language();
  spec.name = "long-distance";
  spec.split_policy = SplitPolicy::AllowSplit;
  return spec;
}

LanguageSpec sample_control(const LanguageSpec& base, uint64_t seed) {
  validate(base);
  if (base.marker_policy != MarkerPolicy::ElementPrefix) {
    fail("controls are defined for the local / long-distance family");
  }
  LanguageSpec spec = base;
  spec.name = base.name + "-control-" + std::to_string(seed);
  spec.template_subsets.clear();
  Rng rng(mix_seed(seed, 0x636f6e74726f6cULL));  // "control"
  for (int k = 1; k <= base.max_segments; ++k) {
    const auto full = full_templates(base, k);
    const size_t target = k == 3 ? 24 : (k == 2 ? 4 : 2);
    const size_t m = std::min(target, full.size());
    std::vector<OrderTemplate> chosen;
    if (base.split_policy == SplitPolicy::AllowSplit) {
      std::vector<OrderTemplate> locals, splits;
      for (const auto& t : full) {
        (t.split.has_value() ? splits : locals).push_back(t);
      }
      // Keep the base language's local/split proportion (2/3 split at k=3).
      const size_t m_split =
          (m * splits.size() + full.size() / 2) / full.size();
      const size_t m_local = m - m_split;
      for (size_t i : rng.sample_indices(locals.size(), m_local)) chosen.push_back(locals[i]);
      for (size_t i : rng.sample_indices(splits.size(), m_split)) chosen.push_back(splits[i]);
    } else {
      for (size_t i : rng.sample_indices(full.size(), m)) chosen.push_back(full[i]);
    }
    std::sort(chosen.begin(), chosen.end());
    spec.template_subsets[k] = std::move(chosen);
  }
  validate(spec);
  return spec;
}

// --- Generation ----------------------------------------------------------

std::vector<OrderTemplate> templates_for(const LanguageSpec& spec, int num_segments) {
  if (num_segments < 1 || num_segments > spec.max_segments) {
    fail("segment count outside the language's domain");
  }
  if (auto it = spec.template_subsets.find(num_segments); it != spec.template_subsets.end()) {
    return it->second;
  }
  return full_templates(spec, num_segments);
}

namespace {

void emit_phrase(const LanguageSpec& spec, const Trajectory& t, int phrase, bool qf,
                 Utterance& out) {
  const Segment& seg = t.segments[phrase - 1];
  const Word cmd = command_for(seg.direction);
  const Word qty = quantifier_for(seg.steps);
  const Word first_elem = qf ? qty : cmd;
  const Word second_elem = qf ? cmd : qty;
  switch (spec.marker_policy) {
    case MarkerPolicy::None:
      out.push_back(first_elem);
      out.push_back(second_elem);
      break;
    case MarkerPolicy::PhrasePrefix:
      out.push_back(marker_for(phrase));
      out.push_back(first_elem);
      out.push_back(second_elem);
      break;
    case MarkerPolicy::ElementPrefix:
      out.push_back(marker_for(phrase));
      out.push_back(first_elem);
      out.push_back(marker_for(phrase));
      out.push_back(second_elem);
      break;
  }
}

}  // namespace

Utterance realize(const OrderTemplate& tmpl, const LanguageSpec& spec, const Trajectory& t) {
  validate(t);
  const int k = t.num_segments();
  if (tmpl.num_phrases() != k || static_cast<int>(tmpl.quantifier_first.size()) != k ||
      !is_permutation_of_prefix(tmpl.permutation)) {
    fail("template does not cover the trajectory's segments");
  }
  if (tmpl.split.has_value() && spec.marker_policy != MarkerPolicy::ElementPrefix) {
    fail("split templates require element-prefixed markers");
  }
  Utterance out;
  for (int i = 0; i < k; ++i) {
    const int phrase = tmpl.permutation[i];
    if (tmpl.split.has_value() && phrase == tmpl.split->host_phrase) {
      continue;  // emitted inside the wrap
    }
    if (tmpl.split.has_value() && phrase == tmpl.split->split_phrase) {
      const Segment& seg = t.segments[phrase - 1];
      const Word cmd = command_for(seg.direction);
      const Word qty = quantifier_for(seg.steps);
      const bool qf = tmpl.quantifier_first[i];
      out.push_back(marker_for(phrase));
      out.push_back(qf ? qty : cmd);
      // the host phrase, whole, between the two wrapped elements
      const int host = tmpl.split->host_phrase;
      int host_slot = -1;
      for (int j = 0; j < k; ++j) {
        if (tmpl.permutation[j] == host) host_slot = j;
      }
      if (host_slot != i + 1) fail("split host must follow the split phrase");
      emit_phrase(spec, t, host, tmpl.quantifier_first[host_slot], out);
      out.push_back(marker_for(phrase));
      out.push_back(qf ? cmd : qty);
    } else {
      emit_phrase(spec, t, phrase, tmpl.quantifier_first[i], out);
    }
  }
  return out;
}

std::vector<Utterance> utterances_for(const LanguageSpec& spec, const Trajectory& t) {
  validate(t);
  if (t.num_segments() > spec.max_segments) {
    fail("trajectory longer than the language's max_segments");
  }
  const auto templates = templates_for(spec, t.num_segments());
  std::vector<Utterance> out;
  out.reserve(templates.size());
  std::set<Utterance> seen;
  for (const auto& tmpl : templates) {
    Utterance u = realize(tmpl, spec, t);
    if (seen.insert(u).second) out.push_back(std::move(u));
  }
  return out;
}

// --- Interpretation -------------------------------------------------------

namespace {

Interpretation parse_failure(int token_index, std::string message) {
  Interpretation r;
  r.error = ParseError{token_index, std::move(message)};
  return r;
}

std::optional<Trajectory> segments_to_trajectory(const std::vector<Segment>& segments) {
  Trajectory t{segments};
  if (!is_valid(t)) return std::nullopt;
  return t;
}

Interpretation interpret_unmarked(const LanguageSpec& spec, const Utterance& u) {
  std::vector<Segment> phrases;
  for (size_t i = 0; i < u.size(); i += 2) {
    if (!is_command(u[i])) {
      return parse_failure(static_cast<int>(i), "expected a command word");
    }
    if (i + 1 >= u.size() || !is_quantifier(u[i + 1])) {
      return parse_failure(static_cast<int>(i + 1), "expected a quantifier word");
    }
    phrases.push_back(Segment{direction_for(u[i]), steps_for(u[i + 1])});
  }
  const int k = static_cast<int>(phrases.size());
  if (k > spec.max_segments) {
    return parse_failure(2 * spec.max_segments, "too many phrases");
  }
  Interpretation result;
  result.order = identity_template(k);
  if (spec.fixed_order.has_value()) {
    const auto order = induced_order(*spec.fixed_order, k);
    std::vector<Segment> segments(k);
    for (int i = 0; i < k; ++i) segments[order[i] - 1] = phrases[i];
    auto t = segments_to_trajectory(segments);
    if (!t.has_value()) {
      return parse_failure(0, "phrase sequence denotes no valid trajectory");
    }
    result.trajectories.push_back(std::move(*t));
  } else {
    // Free order without markers: every assignment of phrases to segment
    // slots is a candidate; keep the valid, distinct ones.
    std::vector<int> slots;
    for (int i = 0; i < k; ++i) slots.push_back(i);
    std::set<Trajectory> found;
    do {
      std::vector<Segment> segments(k);
      for (int i = 0; i < k; ++i) segments[i] = phrases[slots[i]];
      if (auto t = segments_to_trajectory(segments); t.has_value()) {
        found.insert(std::move(*t));
      }
    } while (std::next_permutation(slots.begin(), slots.end()));
    if (found.empty()) {
      return parse_failure(0, "phrase multiset denotes no valid trajectory");
    }
    result.trajectories.assign(found.begin(), found.end());
  }
  return result;
}

Interpretation interpret_phrase_marked(const LanguageSpec& spec, const Utterance& u) {
  std::vector<int> marker_of_slot;
  std::vector<Segment> phrase_of_slot;
  for (size_t i = 0; i < u.size(); i += 3) {
    if (!is_marker(u[i])) {
      return parse_failure(static_cast<int>(i), "expected an ordinal marker");
    }
    if (i + 1 >= u.size() || !is_command(u[i + 1])) {
      return parse_failure(static_cast<int>(i + 1), "expected a command word");
    }
    if (i + 2 >= u.size() || !is_quantifier(u[i + 2])) {
      return parse_failure(static_cast<int>(i + 2), "expected a quantifier word");
    }
    marker_of_slot.push_back(segment_index_for(u[i]));
    phrase_of_slot.push_back(Segment{direction_for(u[i + 1]), steps_for(u[i + 2])});
  }
  const int k = static_cast<int>(marker_of_slot.size());
  if (k > spec.max_segments) {
    return parse_failure(3 * spec.max_segments, "too many phrases");
  }
  std::vector<bool> seen(k, false);
  for (int i = 0; i < k; ++i) {
    const int idx = marker_of_slot[i];
    if (idx > k || seen[idx - 1]) {
      return parse_failure(3 * i, "marker indices must cover 1..k exactly once");
    }
    seen[idx - 1] = true;
  }
  OrderTemplate tmpl;
  tmpl.permutation = marker_of_slot;
  tmpl.quantifier_first.assign(k, false);
  std::vector<Segment> segments(k);
  for (int i = 0; i < k; ++i) segments[marker_of_slot[i] - 1] = phrase_of_slot[i];
  auto t = segments_to_trajectory(segments);
  if (!t.has_value()) {
    return parse_failure(0, "marked phrases denote no valid trajectory");
  }
  // Licensing: the realized order must be one the language generates.
  if (spec.fixed_order.has_value()) {
    if (tmpl.permutation != induced_order(*spec.fixed_order, k)) {
      return parse_failure(0, "phrase order not licensed by the fixed-order language");
    }
  }
  if (auto it = spec.template_subsets.find(k); it != spec.template_subsets.end()) {
    if (std::find(it->second.begin(), it->second.end(), tmpl) == it->second.end()) {
      return parse_failure(0, "phrase order not in the control language's template set");
    }
  }
  Interpretation result;
  result.order = std::move(tmpl);
  result.trajectories.push_back(std::move(*t));
  return result;
}

Interpretation interpret_element_marked(const LanguageSpec& spec, const Utterance& u) {
  struct ElementSlot {
    int index;   // segment index from the marker
    Word elem;   // command or quantifier
  };
  std::vector<ElementSlot> slots;
  for (size_t i = 0; i < u.size(); i += 2) {
    if (!is_marker(u[i])) {
      return parse_failure(static_cast<int>(i), "expected an ordinal marker");
    }
    if (i + 1 >= u.size() || is_marker(u[i + 1])) {
      return parse_failure(static_cast<int>(i + 1), "expected a command or quantifier");
    }
    slots.push_back(ElementSlot{segment_index_for(u[i]), u[i + 1]});
  }
  const int m = static_cast<int>(slots.size());
  // Collect per-index command/quantifier slots.
  std::array<int, kMaxSegments> cmd_slot{}, qty_slot{};
  cmd_slot.fill(-1);
  qty_slot.fill(-1);
  int k = 0;
  for (int i = 0; i < m; ++i) {
    const int idx = slots[i].index;
    if (idx > spec.max_segments) {
      return parse_failure(2 * i, "marker index beyond the language's max segments");
    }
    int& slot = is_command(slots[i].elem) ? cmd_slot[idx - 1] : qty_slot[idx - 1];
    if (slot != -1) {
      return parse_failure(2 * i, "duplicate element for one phrase");
    }
    slot = i;
    k = std::max(k, idx);
  }
  if (m != 2 * k) {
    return parse_failure(0, "marker indices must cover 1..k with one command and one quantifier");
  }
  std::vector<Segment> segments(k);
  for (int idx = 1; idx <= k; ++idx) {
    if (cmd_slot[idx - 1] < 0 || qty_slot[idx - 1] < 0) {
      return parse_failure(0, "phrase missing its command or quantifier");
    }
    segments[idx - 1] = Segment{direction_for(slots[cmd_slot[idx - 1]].elem),
                                steps_for(slots[qty_slot[idx - 1]].elem)};
  }
  // Recover the template: contiguity, element order, at most one split.
  std::optional<SplitSpec> split;
  std::vector<std::pair<int, int>> first_slot_and_index;  // (first slot, segment index)
  std::vector<bool> qf_of_index(k, false);
  for (int idx = 1; idx <= k; ++idx) {
    const int a = cmd_slot[idx - 1];
    const int b = qty_slot[idx - 1];
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    qf_of_index[idx - 1] = b < a;
    first_slot_and_index.push_back({lo, idx});
    if (hi - lo == 1) continue;  // contiguous phrase
    if (split.has_value()) {
      return parse_failure(2 * lo, "only one split is allowed per utterance");
    }
    if (hi - lo != 3) {
      return parse_failure(2 * lo, "split must wrap exactly one whole phrase");
    }
    // The two slots inside the gap must be one complete other phrase.
    const int inner_a = lo + 1;
    const int inner_b = lo + 2;
    if (slots[inner_a].index != slots[inner_b].index || slots[inner_a].index == idx) {
      return parse_failure(2 * inner_a, "split must wrap exactly one whole phrase");
    }
    split = SplitSpec{idx, slots[inner_a].index};
  }
  if (split.has_value() && spec.split_policy != SplitPolicy::AllowSplit) {
    return parse_failure(0, "long-distance split not licensed by this language");
  }
  std::sort(first_slot_and_index.begin(), first_slot_and_index.end());
  OrderTemplate tmpl;
  for (const auto& [slot, idx] : first_slot_and_index) {
    tmpl.permutation.push_back(idx);
    tmpl.quantifier_first.push_back(qf_of_index[idx - 1]);
  }
  tmpl.split = split;
  auto t = segments_to_trajectory(segments);
  if (!t.has_value()) {
    return parse_failure(0, "marked elements denote no valid trajectory");
  }
  if (auto it = spec.template_subsets.find(k); it != spec.template_subsets.end()) {
    if (std::find(it->second.begin(), it->second.end(), tmpl) == it->second.end()) {
      return parse_failure(0, "phrase order not in the control language's template set");
    }
  }
  // Exactness: the recovered template must reproduce the input.
  if (realize(tmpl, spec, *t) != u) {
    return parse_failure(0, "utterance does not match any licensed construction");
  }
  Interpretation result;
  result.order = std::move(tmpl);
  result.trajectories.push_back(std::move(*t));
  return result;
}

}  // namespace

Interpretation interpret(const LanguageSpec& spec, const Utterance& u) {
  if (u.empty()) return parse_failure(0, "empty utterance");
  switch (spec.marker_policy) {
    case MarkerPolicy::None:
      return interpret_unmarked(spec, u);
    case MarkerPolicy::PhrasePrefix:
      return interpret_phrase_marked(spec, u);
    case MarkerPolicy::ElementPrefix:
      return interpret_element_marked(spec, u);
  }
  return parse_failure(0, "unreachable");
}

std::optional<OrderTemplate> phrase_order_of(const LanguageSpec& spec, const Utterance& u) {
  Interpretation r = interpret(spec, u);
  if (!r.ok()) return std::nullopt;
  return r.order;
}

std::optional<Locality> classify_utterance(const LanguageSpec& spec, const Utterance& u) {
  Interpretation r = interpret(spec, u);
  if (!r.ok()) return std::nullopt;
  return (r.order.has_value() && r.order->split.has_value()) ? Locality::LongDistance
                                                             : Locality::Local;
}

}  // namespace gridlang
