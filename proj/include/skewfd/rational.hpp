#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <numeric>
#include <string>

namespace skewfd {

/// Exact coefficient type used throughout tensor construction.
/// Floating point enters only at evaluation time.
using Rat = boost::rational<long long>;

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rat& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

} // namespace skewfd
