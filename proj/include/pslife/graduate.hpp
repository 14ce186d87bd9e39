#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pslife/core.hpp"
#include "pslife/ingest.hpp"

namespace pslife {

// Gregorian calendar helpers.
bool is_leap_year(int year);
int days_in_month(int year, int month);  // throws on month outside 1..12
int days_in_year(int year);              // 365 or 366

struct MonthSex {
    MonthKey month;
    Sex sex = Sex::Female;
    auto operator<=>(const MonthSex&) const = default;
};

using MonthlyGroupExposure = std::map<MonthSex, std::array<double, kAgeGroupCount>>;

// Spreads each annual exposure over the year's months in proportion to month
// length (so February carries 29/366 of a leap year). The twelve monthly
// values sum back to the annual input to ~1e-12 relative. Annual exposures
// must be strictly positive.
MonthlyGroupExposure graduate_to_months(const AnnualGroupExposure& annual);

// Sums monthly exposure over each season's six months. A requested season
// whose months are not all present is an error naming the season and the
// first missing month.
std::map<SeasonSex, std::array<double, kAgeGroupCount>> bin_exposure(
    const MonthlyGroupExposure& monthly, const std::vector<Pseudoseason>& seasons);

// Sums monthly death counts over each season's six months. Every month of a
// requested season must appear in the records (a zero-death month must be
// present as explicit zero rows); cells absent within a covered month count
// as zero.
std::map<SeasonSex, std::array<std::int64_t, kAgeGroupCount>> bin_deaths(
    const std::vector<DeathsRecord>& records,
    const std::vector<Pseudoseason>& seasons);

struct SurfaceBuild {
    MortalitySurface surface;
    SpanResult span;                 // season bookkeeping over the record span
    // Seasons from span.seasons that had to be dropped anyway (missing months
    // in the deaths records, or missing exposure years), with the reason.
    std::vector<std::pair<Pseudoseason, std::string>> skipped;
};

// Full assembly: determine the usable seasons from the deaths records' span,
// graduate exposures, bin both, and populate the surface. Records and
// exposures must not be empty.
SurfaceBuild build_surface(const std::vector<DeathsRecord>& records,
                           const AnnualExposureTable& exposures);

}  // namespace pslife
