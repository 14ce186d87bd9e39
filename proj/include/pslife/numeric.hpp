#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pslife {

// Neumaier-compensated accumulator. Month/age aggregation has to conserve
// totals to ~1e-12 relative, which naive summation does not guarantee once
// exposures span several orders of magnitude.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + comp; }
};

// Shortest decimal string that round-trips to the same double. Used by every
// writer so that re-running a command produces byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, res.ptr);
}

}  // namespace pslife
