#pragma once

#include <cmath>

namespace fpkit {

constexpr double kPi = 3.14159265358979323846;

// Wrap into [0, pi). Ridge orientations are undirected.
inline double wrap_pi(double a) {
    a = std::fmod(a, kPi);
    if (a < 0.0) a += kPi;
    if (a >= kPi) a -= kPi;  // fmod can round up to pi exactly
    return a;
}

// Wrap into [0, 2*pi).
inline double wrap_two_pi(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    if (a >= 2.0 * kPi) a -= 2.0 * kPi;
    return a;
}

// Smallest difference between two undirected orientations, in [0, pi/2].
inline double orientation_diff(double a, double b) {
    double d = std::fabs(wrap_pi(a) - wrap_pi(b));
    return std::min(d, kPi - d);
}

// Wrap a directed angle difference into (-180, 180] degrees.
inline double wrap_deg_180(double deg) {
    deg = std::fmod(deg, 360.0);
    if (deg <= -180.0) deg += 360.0;
    if (deg > 180.0) deg -= 360.0;
    return deg;
}

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace fpkit
