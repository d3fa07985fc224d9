#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "neb/common.hpp"
#include "neb/rng.hpp"

namespace neb::arena {

struct Segment {
    Vec2 a, b;
};

struct Arena {
    std::array<double, 4> bounds{0, 0, 1, 1};  // x0 y0 x1 y1
    Vec2 start;
    double start_heading = 0.0;
    std::optional<Vec2> food;
    std::vector<Segment> walls;   // interior walls; the bounds box acts as four more
    std::vector<Vec2> stones;     // route order
    std::optional<double> solved_threshold;

    double width() const { return bounds[2] - bounds[0]; }
    double height() const { return bounds[3] - bounds[1]; }
    // Interior walls plus the four bounding-box segments.
    std::vector<Segment> all_walls() const;
};

// Line-oriented text format: bounds x0 y0 x1 y1 / start x y theta /
// food x y / wall x0 y0 x1 y1 / stone x y / solved v, with '#' comments.
// Throws ParseError (with line number) or ValidationError (naming the rule).
Arena load_arena(const std::string& text);
std::string save_arena(const Arena& arena);
Arena load_arena_file(const std::string& path);

double point_segment_distance(const Vec2& p, const Segment& s);

// Distance from origin along a unit direction to the nearest wall, capped
// at max_range.
double ray_distance(const Vec2& origin, const Vec2& dir, std::span<const Segment> walls,
                    double max_range);

// 90-degree pie-slice sensors at bearings E, N, W, S relative to heading.
// A target exactly on a sector boundary belongs to the counter-clockwise
// sector. Occlusion is ignored.
int pie_slice_sector(const Vec2& from, double heading, const Vec2& target);
int pie_slice(const Vec2& from, double heading, const Vec2& target, int sector);

struct RobotState {
    Vec2 pos;
    double heading = 0.0;
    double radius = 0.15;
};

// Holonomic kinematics: displacement = dt*vmax*(aE-aW, aN-aS), each axis
// clipped to dt*vmax. Collision is resolved per axis (x first), sliding
// along walls; the robot centre always stays at least its radius from
// every wall.
RobotState step_robot(const RobotState& state, std::span<const double> actions,
                      std::span<const Segment> walls, double dt, double vmax);

double reward_deceptive(const Vec2& prev_pos, const Vec2& new_pos, const Vec2& food, double d0);
double reward_locomotion(const Vec2& prev_pos, const Vec2& new_pos, double dt);

struct StoneProgress {
    int crossed = 0;          // stones crossed in order; stones+1 once food is reached
    bool food_bonus_paid = false;
};

// Per-step stepping-stones reward: crossed count plus progress towards the
// active target (next stone, then the food), the progress term normalized
// by that leg's spacing and clamped to [0,1]. Touching the food (< 0.1)
// pays a one-time bonus of 1000; after all stones are crossed the food
// counts as a final crossing.
std::pair<double, StoneProgress> reward_stones(const Vec2& pos, StoneProgress progress,
                                               std::span<const Vec2> stones, const Vec2& food,
                                               std::span<const double> leg_refs,
                                               const Vec2& start);
std::vector<double> stone_leg_refs(const Vec2& start, std::span<const Vec2> stones,
                                   const Vec2& food);

enum class TaskKind { Locomotion, Deceptive, SteppingStones };
const char* task_kind_name(TaskKind k);

struct EnvConfig {
    double dt = 0.05;
    double vmax = 2.0;
    double radius = 0.15;
    double sensor_range = 5.0;
    int episode_steps = 1000;
};

constexpr double kCrossingRadius = 0.1;
constexpr double kFoodBonus = 1000.0;

// Episode state machine over an arena. Observations are
// [5 rangefinders (normalized), 4 pie-slice food sensors,
//  bounds-normalized x, y]. Deceptive episodes end early on food contact;
// locomotion and stepping-stones episodes always run episode_steps.
class Env {
public:
    Env(Arena arena, TaskKind kind, EnvConfig cfg = {});

    std::vector<double> reset();
    struct Step {
        std::vector<double> observation;
        double reward = 0.0;
        bool done = false;
    };
    Step step(std::span<const double> actions);

    int obs_size() const { return 11; }
    int action_size() const { return 4; }
    const RobotState& robot() const { return robot_; }
    int steps_done() const { return t_; }
    int stones_crossed() const { return progress_.crossed; }
    const Arena& arena() const { return arena_; }
    TaskKind kind() const { return kind_; }
    const EnvConfig& config() const { return cfg_; }
    // Final (or current) position normalized to [0,1]^2 by the bounds.
    std::array<double, 2> descriptor() const;

    std::vector<double> observe() const;

private:
    Arena arena_;
    TaskKind kind_;
    EnvConfig cfg_;
    std::vector<Segment> walls_;
    std::vector<double> leg_refs_;
    RobotState robot_;
    StoneProgress progress_;
    double d0_ = 1.0;
    int t_ = 0;
    bool done_ = true;
};

// Bearings of the five rangefinders relative to heading, in radians.
std::array<double, 5> rangefinder_bearings();

}  // namespace neb::arena
