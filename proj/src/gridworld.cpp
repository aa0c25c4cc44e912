#include "gridlang/gridworld.hpp"

#include <sstream>
#include <stdexcept>

namespace gridlang {

namespace {

constexpr std::string_view kDirectionNames[kNumDirections] = {"LEFT", "RIGHT", "UP", "DOWN"};

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

std::string_view to_string(Direction d) {
  return kDirectionNames[static_cast<int>(d)];
}

Direction direction_from_string(std::string_view s) {
  for (int i = 0; i < kNumDirections; ++i) {
    if (s == kDirectionNames[i]) return static_cast<Direction>(i);
  }
  fail("unknown direction: '" + std::string(s) + "'");
}

bool is_valid(const Trajectory& t) {
  const int n = t.num_segments();
  if (n < 1 || n > kMaxSegments) return false;
  for (int i = 0; i < n; ++i) {
    const Segment& s = t.segments[i];
    if (s.steps < 1 || s.steps > kMaxStepsPerSegment) return false;
    if (i > 0 && s.direction == t.segments[i - 1].direction) return false;
  }
  return true;
}

void validate(const Trajectory& t) {
  const int n = t.num_segments();
  if (n < 1) fail("trajectory has no segments");
  if (n > kMaxSegments) fail("trajectory has more than 5 segments");
  for (int i = 0; i < n; ++i) {
    const Segment& s = t.segments[i];
    if (s.steps < 1 || s.steps > kMaxStepsPerSegment) {
      fail("segment step count out of [1,3]");
    }
    if (i > 0 && s.direction == t.segments[i - 1].direction) {
      fail("adjacent segments share a direction; segments must be maximal runs");
    }
  }
}

std::vector<Trajectory> enumerate_trajectories(int max_segments) {
  if (max_segments < 1 || max_segments > kMaxSegments) {
    fail("max_segments must be in [1,5]");
  }
  std::vector<Trajectory> out;
  out.reserve(static_cast<size_t>(trajectory_count(max_segments)));
  for (int n = 1; n <= max_segments; ++n) {
    auto exact = enumerate_trajectories_exact(n);
    out.insert(out.end(), exact.begin(), exact.end());
  }
  return out;
}

std::vector<Trajectory> enumerate_trajectories_exact(int num_segments) {
  if (num_segments < 1 || num_segments > kMaxSegments) {
    fail("num_segments must be in [1,5]");
  }
  std::vector<Trajectory> out;
  Trajectory current;
  current.segments.reserve(num_segments);
  // Depth-first in (direction, steps) order yields the lexicographic list.
  auto extend = [&](auto&& self, int depth) -> void {
    if (depth == num_segments) {
      out.push_back(current);
      return;
    }
    for (int d = 0; d < kNumDirections; ++d) {
      const Direction dir = static_cast<Direction>(d);
      if (depth > 0 && dir == current.segments.back().direction) continue;
      for (int steps = 1; steps <= kMaxStepsPerSegment; ++steps) {
        current.segments.push_back(Segment{dir, steps});
        self(self, depth + 1);
        current.segments.pop_back();
      }
    }
  };
  extend(extend, 0);
  return out;
}

int64_t trajectory_count(int max_segments) {
  if (max_segments < 1 || max_segments > kMaxSegments) {
    fail("max_segments must be in [1,5]");
  }
  int64_t total = 0;
  int64_t per_length = 12;
  for (int n = 1; n <= max_segments; ++n) {
    total += per_length;
    per_length *= 9;
  }
  return total;
}

std::vector<Direction> to_actions(const Trajectory& t) {
  validate(t);
  std::vector<Direction> actions;
  for (const Segment& s : t.segments) {
    for (int i = 0; i < s.steps; ++i) actions.push_back(s.direction);
  }
  return actions;
}

Trajectory from_actions(const std::vector<Direction>& actions) {
  if (actions.empty()) fail("empty action sequence");
  Trajectory t;
  for (const Direction d : actions) {
    if (!t.segments.empty() && t.segments.back().direction == d) {
      if (++t.segments.back().steps > kMaxStepsPerSegment) {
        fail("run longer than 3 steps in one direction");
      }
    } else {
      if (t.num_segments() == kMaxSegments) fail("more than 5 segments");
      t.segments.push_back(Segment{d, 1});
    }
  }
  return t;
}

std::string format_actions(const std::vector<Direction>& actions) {
  std::string out;
  for (size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) out += ' ';
    out += to_string(actions[i]);
  }
  return out;
}

std::vector<Direction> parse_actions(std::string_view text) {
  std::vector<Direction> actions;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) actions.push_back(direction_from_string(token));
  return actions;
}

std::string to_text(const Trajectory& t) { return format_actions(to_actions(t)); }

Trajectory trajectory_from_text(std::string_view text) {
  return from_actions(parse_actions(text));
}

}  // namespace gridlang
