#include "neb/common.hpp"

#include <cmath>
#include <cstdint>

namespace neb {

double norm(const Vec2& v) { return std::sqrt(v.x * v.x + v.y * v.y); }

double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace neb
