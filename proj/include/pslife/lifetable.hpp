#pragma once

#include <array>
#include <vector>

#include "pslife/core.hpp"

namespace pslife {

// Average person-years lived in the interval by those dying in it.
//   Midpoint:   ax = n/2 in every closed interval.
//   InfantAdjusted: ax = 0.07 + 1.7*M0 for age 0, 1.5 for ages 1-4, n/2 above
//   (the usual low-mortality abridged-table adjustment for infant deaths
//   clustering near birth).
enum class AxConvention { Midpoint, InfantAdjusted };

struct LifeTable {
    std::array<double, kAgeGroupCount> Mx{};  // central death rate, per person-year
    std::array<double, kAgeGroupCount> ax{};  // years (open-ended slot unused)
    std::array<double, kAgeGroupCount> qx{};  // death probability, capped at 1
    std::array<double, kAgeGroupCount> lx{};  // survivors, radix 100000
    std::array<double, kAgeGroupCount> dx{};  // deaths
    std::array<double, kAgeGroupCount> Lx{};  // person-years in interval
    std::array<double, kAgeGroupCount> Tx{};  // person-years above interval start
    std::array<double, kAgeGroupCount> ex{};  // remaining life expectancy, years

    double e0() const { return ex[0]; }
};

inline constexpr double kRadix = 100000.0;

// Central death rates deaths/exposure for one (season, sex).
std::array<double, kAgeGroupCount> death_rates(const MortalitySurface& surface,
                                               const Pseudoseason& season, Sex sex);

// Abridged life table over the 22-group grid. qx = n*Mx / (1 + (n-ax)*Mx),
// capped at 1 (and forced to 1 if the denominator is not positive); the
// open-ended group closes with Lx = lx / Mx, which requires Mx > 0 there.
// All rates must be finite and non-negative.
LifeTable build_life_table(const std::array<double, kAgeGroupCount>& Mx,
                           AxConvention convention = AxConvention::InfantAdjusted);

struct E0Point {
    Pseudoseason season;
    Sex sex = Sex::Female;
    double e0 = 0.0;
};

// e(0) for every (season, sex) on the surface, chronological within sex order
// (all seasons for F, then all for M).
std::vector<E0Point> e0_series(const MortalitySurface& surface,
                               AxConvention convention = AxConvention::InfantAdjusted);

struct GapPoint {
    int year = 0;  // summer's label year; paired winter is labelled year-1
    Sex sex = Sex::Female;
    double summer_e0 = 0.0;
    double winter_e0 = 0.0;
    double gap = 0.0;  // summer_e0 - winter_e0
};

struct GapSummary {
    Sex sex = Sex::Female;
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample SD (n-1); 0 when n == 1
};

struct SeasonalGapSeries {
    std::vector<GapPoint> points;     // ordered by (sex, year)
    std::vector<GapSummary> summary;  // one row per sex present
};

// Pairs each Summer(Y) with the preceding Winter(Y-1) wherever both e(0)
// values exist. Throws if no such pair exists at all.
SeasonalGapSeries seasonal_gap(const std::vector<E0Point>& series);

}  // namespace pslife
