#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pslife/core.hpp"

namespace pslife {

// Which summer a winter is compared against in per-year estimates.
// Winter(Y) runs Nov Y - Apr Y+1; its preceding summer is Summer(Y) and the
// following one is Summer(Y+1).
enum class Pairing { PrevSummer, NextSummer };

inline constexpr int kDefaultAgeFloor = 45;

struct ProportionalHazardResult {
    double P = 0.0;    // winter:summer hazard ratio
    double R2 = 0.0;   // fit quality of the constant-ratio model on log rates
    int n_ages = 0;    // age groups entering the estimate
    int n_years = 1;   // season pairs pooled (1 for a single-year estimate)
    Sex sex = Sex::Female;
    std::optional<int> year;  // winter's label year; empty for pooled
};

// Constant-ratio estimate for one winter/summer pair: P is the geometric mean
// of the age-specific rate ratios over groups with lower bound >= age_floor
// (the open-ended group included). R2 compares the residual sum of squares of
// log(winter) - log(P * summer) against the spread of log(winter); an exact
// fit reports R2 = 1 even when the winter rates have zero spread. Requires at
// least two included groups and strictly positive rates in all of them
// (errors identify the offending age group).
ProportionalHazardResult estimate_ph_pair(
    const std::array<double, kAgeGroupCount>& winter_mx,
    const std::array<double, kAgeGroupCount>& summer_mx, Sex sex, int year,
    int age_floor = kDefaultAgeFloor);

// One estimate per winter on the surface that has its paired summer, keyed by
// the winter's label year, ascending.
std::vector<ProportionalHazardResult> per_year_ph(const MortalitySurface& surface,
                                                  Sex sex,
                                                  int age_floor = kDefaultAgeFloor,
                                                  Pairing pairing = Pairing::PrevSummer);

// Single P over all (pair, age group) cells: geometric mean of every ratio,
// with R2 computed over the same pooled cells. Throws if no pair exists.
ProportionalHazardResult estimate_ph_pooled(const MortalitySurface& surface,
                                            Sex sex,
                                            int age_floor = kDefaultAgeFloor,
                                            Pairing pairing = Pairing::PrevSummer);

struct RatioCell {
    int year = 0;       // summer's label year; winter is Winter(year-1)
    int age_group = 0;  // 0..21
    double winter_mx = 0.0;
    double summer_mx = 0.0;
    double ratio = 0.0;   // NaN when flagged
    bool flagged = false; // a zero rate made the ratio undefined
};

struct RatioMatrix {
    Sex sex = Sex::Female;
    std::vector<RatioCell> cells;  // ordered by (year, age_group)
};

// Winter(Y-1):Summer(Y) rate ratio for every age group and every year where
// both seasons exist — the same pairing the e(0) gap uses, covering all 22
// groups so juvenile anomalies stay visible. Zero rates flag the cell rather
// than failing the whole matrix.
RatioMatrix ratio_matrix(const MortalitySurface& surface, Sex sex);

}  // namespace pslife
