#include "neb/arena_env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace neb::arena {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

std::vector<Segment> Arena::all_walls() const {
    std::vector<Segment> w = walls;
    Vec2 bl{bounds[0], bounds[1]}, br{bounds[2], bounds[1]};
    Vec2 tl{bounds[0], bounds[3]}, tr{bounds[2], bounds[3]};
    w.push_back({bl, br});
    w.push_back({br, tr});
    w.push_back({tr, tl});
    w.push_back({tl, bl});
    return w;
}

double point_segment_distance(const Vec2& p, const Segment& s) {
    Vec2 d = s.b - s.a;
    double len2 = d.x * d.x + d.y * d.y;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - s.a.x) * d.x + (p.y - s.a.y) * d.y) / len2;
        t = std::min(1.0, std::max(0.0, t));
    }
    Vec2 q{s.a.x + t * d.x, s.a.y + t * d.y};
    return dist(p, q);
}

double ray_distance(const Vec2& origin, const Vec2& dir, std::span<const Segment> walls,
                    double max_range) {
    double best = max_range;
    for (const Segment& s : walls) {
        Vec2 e = s.b - s.a;
        double denom = dir.x * e.y - dir.y * e.x;
        if (std::fabs(denom) < 1e-15) continue;  // parallel
        Vec2 ao = s.a - origin;
        double t = (ao.x * e.y - ao.y * e.x) / denom;          // along the ray
        double u = (ao.x * dir.y - ao.y * dir.x) / denom;      // along the segment
        if (t >= 0.0 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
    }
    return best;
}

int pie_slice_sector(const Vec2& from, double heading, const Vec2& target) {
    double angle = std::atan2(target.y - from.y, target.x - from.x) - heading;
    // Normalize to [0, 2pi), then shift so sector k covers
    // [k*90 - 45, k*90 + 45) degrees; a boundary angle rounds up (CCW).
    double shifted = angle + kPi / 4.0;
    shifted -= 2.0 * kPi * std::floor(shifted / (2.0 * kPi));
    int k = static_cast<int>(std::floor(shifted / (kPi / 2.0)));
    return std::min(k, 3);
}

int pie_slice(const Vec2& from, double heading, const Vec2& target, int sector) {
    return pie_slice_sector(from, heading, target) == sector ? 1 : 0;
}

namespace {

bool position_clear(const Vec2& p, double radius, std::span<const Segment> walls) {
    for (const Segment& s : walls)
        if (point_segment_distance(p, s) < radius) return false;
    return true;
}

// Largest fraction of the move along one axis that keeps the robot clear.
Vec2 slide_axis(const Vec2& from, const Vec2& delta, double radius,
                std::span<const Segment> walls) {
    Vec2 target = from + delta;
    if (position_clear(target, radius, walls)) return target;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        if (position_clear(from + delta * mid, radius, walls))
            lo = mid;
        else
            hi = mid;
    }
    return from + delta * lo;
}

}  // namespace

RobotState step_robot(const RobotState& state, std::span<const double> actions,
                      std::span<const Segment> walls, double dt, double vmax) {
    if (actions.size() != 4) throw DimensionError("step_robot: expected 4 actions");
    double limit = dt * vmax;
    double dx = limit * (actions[0] - actions[2]);
    double dy = limit * (actions[1] - actions[3]);
    dx = std::min(limit, std::max(-limit, dx));
    dy = std::min(limit, std::max(-limit, dy));

    RobotState next = state;
    next.pos = slide_axis(next.pos, {dx, 0.0}, state.radius, walls);
    next.pos = slide_axis(next.pos, {0.0, dy}, state.radius, walls);
    return next;
}

double reward_deceptive(const Vec2& prev_pos, const Vec2& new_pos, const Vec2& food, double d0) {
    return (dist(prev_pos, food) - dist(new_pos, food)) / d0;
}

double reward_locomotion(const Vec2& prev_pos, const Vec2& new_pos, double dt) {
    return (new_pos.x - prev_pos.x) / dt;
}

std::vector<double> stone_leg_refs(const Vec2& start, std::span<const Vec2> stones,
                                   const Vec2& food) {
    std::vector<double> refs;
    Vec2 prev = start;
    for (const Vec2& s : stones) {
        refs.push_back(dist(prev, s));
        prev = s;
    }
    refs.push_back(dist(prev, food));
    return refs;
}

std::pair<double, StoneProgress> reward_stones(const Vec2& pos, StoneProgress progress,
                                               std::span<const Vec2> stones, const Vec2& food,
                                               std::span<const double> leg_refs,
                                               const Vec2& start) {
    (void)start;
    const int n = static_cast<int>(stones.size());
    double bonus = 0.0;

    // Ordered crossing: only the active stone can be crossed. Arena
    // validation keeps stones > 2*kCrossingRadius apart, so at most one
    // crossing per step.
    if (progress.crossed < n && dist(pos, stones[progress.crossed]) < kCrossingRadius)
        progress.crossed += 1;

    if (dist(pos, food) < kCrossingRadius) {
        if (!progress.food_bonus_paid) {
            progress.food_bonus_paid = true;
            bonus = kFoodBonus;
        }
        if (progress.crossed == n) progress.crossed = n + 1;  // food is the final crossing
    }

    Vec2 target = progress.crossed < n ? stones[progress.crossed] : food;
    double ref = leg_refs[std::min<size_t>(progress.crossed, leg_refs.size() - 1)];
    double prog = ref > 0.0 ? clamp01(1.0 - dist(pos, target) / ref) : 1.0;
    double reward = static_cast<double>(progress.crossed) + prog + bonus;
    return {reward, progress};
}

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::Locomotion: return "locomotion";
        case TaskKind::Deceptive: return "deceptive";
        case TaskKind::SteppingStones: return "stones";
    }
    return "locomotion";
}

// ---------------------------------------------------------------------------
// Arena file format

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream is(line);
    std::string t;
    while (is >> t) {
        if (t[0] == '#') break;
        toks.push_back(t);
    }
    return toks;
}

double parse_num(const std::string& tok, int line_no) {
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("arena line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    }
}

void validate_arena(const Arena& a) {
    if (a.bounds[2] <= a.bounds[0] || a.bounds[3] <= a.bounds[1])
        throw ValidationError("arena bounds must have positive extent");
    const double margin = 0.15;  // default robot radius
    auto inside = [&](const Vec2& p) {
        return p.x >= a.bounds[0] + margin && p.x <= a.bounds[2] - margin &&
               p.y >= a.bounds[1] + margin && p.y <= a.bounds[3] - margin;
    };
    auto clear_of_walls = [&](const Vec2& p) {
        for (const Segment& s : a.walls)
            if (point_segment_distance(p, s) < margin) return false;
        return true;
    };
    if (!inside(a.start)) throw ValidationError("start must lie inside bounds");
    if (!clear_of_walls(a.start)) throw ValidationError("start too close to a wall");
    if (a.food) {
        if (!inside(*a.food)) throw ValidationError("food must lie inside bounds");
        if (!clear_of_walls(*a.food)) throw ValidationError("food too close to a wall");
    }
    for (size_t i = 0; i < a.stones.size(); ++i) {
        if (!inside(a.stones[i]))
            throw ValidationError("stone " + std::to_string(i) + " must lie inside bounds");
        if (!clear_of_walls(a.stones[i]))
            throw ValidationError("stone " + std::to_string(i) + " too close to a wall");
        for (size_t j = i + 1; j < a.stones.size(); ++j)
            if (dist(a.stones[i], a.stones[j]) < 0.3)
                throw ValidationError("stones " + std::to_string(i) + " and " +
                                      std::to_string(j) + " closer than 0.3");
    }
    if (!a.stones.empty() && !a.food)
        throw ValidationError("stones require a food target");
}

}  // namespace

Arena load_arena(const std::string& text) {
    Arena a;
    bool have_bounds = false, have_start = false;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::vector<std::string> toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        auto need = [&](size_t n) {
            if (toks.size() != n + 1)
                throw ParseError("arena line " + std::to_string(line_no) + ": '" + key +
                                 "' expects " + std::to_string(n) + " values");
        };
        if (key == "bounds") {
            need(4);
            for (int i = 0; i < 4; ++i) a.bounds[i] = parse_num(toks[i + 1], line_no);
            have_bounds = true;
        } else if (key == "start") {
            need(3);
            a.start = {parse_num(toks[1], line_no), parse_num(toks[2], line_no)};
            a.start_heading = parse_num(toks[3], line_no);
            have_start = true;
        } else if (key == "food") {
            need(2);
            a.food = Vec2{parse_num(toks[1], line_no), parse_num(toks[2], line_no)};
        } else if (key == "wall") {
            need(4);
            a.walls.push_back({{parse_num(toks[1], line_no), parse_num(toks[2], line_no)},
                               {parse_num(toks[3], line_no), parse_num(toks[4], line_no)}});
        } else if (key == "stone") {
            need(2);
            a.stones.push_back({parse_num(toks[1], line_no), parse_num(toks[2], line_no)});
        } else if (key == "solved") {
            need(1);
            a.solved_threshold = parse_num(toks[1], line_no);
        } else {
            throw ParseError("arena line " + std::to_string(line_no) + ": unknown key '" + key +
                             "'");
        }
    }
    if (!have_bounds) throw ParseError("arena: missing 'bounds' line");
    if (!have_start) throw ParseError("arena: missing 'start' line");
    validate_arena(a);
    return a;
}

std::string save_arena(const Arena& a) {
    std::ostringstream os;
    os.precision(17);
    os << "bounds " << a.bounds[0] << " " << a.bounds[1] << " " << a.bounds[2] << " "
       << a.bounds[3] << "\n";
    os << "start " << a.start.x << " " << a.start.y << " " << a.start_heading << "\n";
    if (a.food) os << "food " << a.food->x << " " << a.food->y << "\n";
    for (const Segment& w : a.walls)
        os << "wall " << w.a.x << " " << w.a.y << " " << w.b.x << " " << w.b.y << "\n";
    for (const Vec2& s : a.stones) os << "stone " << s.x << " " << s.y << "\n";
    if (a.solved_threshold) os << "solved " << *a.solved_threshold << "\n";
    return os.str();
}

Arena load_arena_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open arena file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_arena(ss.str());
}

// ---------------------------------------------------------------------------
// Episode machine

std::array<double, 5> rangefinder_bearings() {
    return {-kPi / 2.0, -kPi / 4.0, 0.0, kPi / 4.0, kPi / 2.0};
}

Env::Env(Arena arena, TaskKind kind, EnvConfig cfg)
    : arena_(std::move(arena)), kind_(kind), cfg_(cfg) {
    walls_ = arena_.all_walls();
    if (kind_ != TaskKind::Locomotion && !arena_.food)
        throw ValidationError(std::string(task_kind_name(kind_)) + " task needs a food target");
    if (kind_ == TaskKind::SteppingStones) {
        if (arena_.stones.empty())
            throw ValidationError("stepping-stones task needs at least one stone");
        leg_refs_ = stone_leg_refs(arena_.start, arena_.stones, *arena_.food);
    }
}

std::vector<double> Env::reset() {
    robot_ = RobotState{arena_.start, arena_.start_heading, cfg_.radius};
    progress_ = StoneProgress{};
    t_ = 0;
    done_ = false;
    if (arena_.food) d0_ = dist(arena_.start, *arena_.food);
    return observe();
}

std::vector<double> Env::observe() const {
    std::vector<double> obs;
    obs.reserve(11);
    for (double bearing : rangefinder_bearings()) {
        double angle = robot_.heading + bearing;
        Vec2 dir{std::cos(angle), std::sin(angle)};
        obs.push_back(ray_distance(robot_.pos, dir, walls_, cfg_.sensor_range) /
                      cfg_.sensor_range);
    }
    for (int sector = 0; sector < 4; ++sector)
        obs.push_back(arena_.food ? pie_slice(robot_.pos, robot_.heading, *arena_.food, sector)
                                  : 0.0);
    obs.push_back((robot_.pos.x - arena_.bounds[0]) / arena_.width());
    obs.push_back((robot_.pos.y - arena_.bounds[1]) / arena_.height());
    return obs;
}

Env::Step Env::step(std::span<const double> actions) {
    if (done_) throw PreconditionError("arena env: step after episode end");
    Vec2 prev = robot_.pos;
    robot_ = step_robot(robot_, actions, walls_, cfg_.dt, cfg_.vmax);
    t_ += 1;

    Step out;
    switch (kind_) {
        case TaskKind::Locomotion:
            out.reward = reward_locomotion(prev, robot_.pos, cfg_.dt);
            break;
        case TaskKind::Deceptive:
            out.reward = reward_deceptive(prev, robot_.pos, *arena_.food, d0_);
            if (dist(robot_.pos, *arena_.food) < kCrossingRadius) done_ = true;
            break;
        case TaskKind::SteppingStones: {
            auto [r, p] = reward_stones(robot_.pos, progress_, arena_.stones, *arena_.food,
                                        leg_refs_, arena_.start);
            out.reward = r;
            progress_ = p;
            break;
        }
    }
    if (t_ >= cfg_.episode_steps) done_ = true;
    out.done = done_;
    out.observation = observe();
    return out;
}

std::array<double, 2> Env::descriptor() const {
    double nx = (robot_.pos.x - arena_.bounds[0]) / arena_.width();
    double ny = (robot_.pos.y - arena_.bounds[1]) / arena_.height();
    return {clamp01(nx), clamp01(ny)};
}

}  // namespace neb::arena
