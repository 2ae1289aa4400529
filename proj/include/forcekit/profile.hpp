#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

namespace forcekit {

// 1-periodic shear profiles.
enum class Profile {
    sine,           // sin(2 pi t)
    raised_cosine,  // (1 - cos(2 pi t)) / 2
};

inline double evaluate(Profile p, double t) {
    const double angle = 2 * std::numbers::pi * t;
    switch (p) {
        case Profile::sine: return std::sin(angle);
        case Profile::raised_cosine: return 0.5 * (1 - std::cos(angle));
    }
    return 0;
}

Profile parse_profile(std::string_view name);
std::string to_string(Profile p);

}  // namespace forcekit
