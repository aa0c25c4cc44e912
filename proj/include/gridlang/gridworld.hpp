#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gridlang {

// The meaning space: unbounded relative paths on a 2D grid, stored as
// maximal same-direction runs.

enum class Direction : uint8_t { Left = 0, Right = 1, Up = 2, Down = 3 };

constexpr int kNumDirections = 4;
constexpr int kMaxStepsPerSegment = 3;
constexpr int kMaxSegments = 5;

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);  // throws std::invalid_argument

struct Segment {
  Direction direction = Direction::Left;
  int steps = 1;  // in [1, kMaxStepsPerSegment]

  auto operator<=>(const Segment&) const = default;
};

struct Trajectory {
  std::vector<Segment> segments;

  int num_segments() const { return static_cast<int>(segments.size()); }
  auto operator<=>(const Trajectory&) const = default;
};

// 1..max segments, steps in range, adjacent segments in distinct directions.
bool is_valid(const Trajectory& t);
void validate(const Trajectory& t);  // throws std::invalid_argument with reason

// All trajectories with 1..max_segments segments, lexicographic by
// (segment count, then per-segment (direction, steps)). Deterministic.
std::vector<Trajectory> enumerate_trajectories(int max_segments);

// Only trajectories with exactly num_segments segments, same ordering.
std::vector<Trajectory> enumerate_trajectories_exact(int num_segments);

// Closed form for |enumerate_trajectories(k)|: sum_{i=1..k} 12 * 9^(i-1).
int64_t trajectory_count(int max_segments);

// Flattened step sequence: each segment's direction repeated `steps` times.
std::vector<Direction> to_actions(const Trajectory& t);

// Inverse of to_actions: maximal-run segmentation. Throws on empty input,
// runs longer than kMaxStepsPerSegment, or more than kMaxSegments runs.
Trajectory from_actions(const std::vector<Direction>& actions);

// Textual encoding for files and logs: "LEFT LEFT RIGHT UP UP UP".
std::string format_actions(const std::vector<Direction>& actions);
std::vector<Direction> parse_actions(std::string_view text);  // throws
std::string to_text(const Trajectory& t);
Trajectory trajectory_from_text(std::string_view text);  // throws

}  // namespace gridlang
