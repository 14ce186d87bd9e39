#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "pslife/core.hpp"

namespace pslife {

// ---------------------------------------------------------------------------
// Monthly death counts
// ---------------------------------------------------------------------------

// One row of the monthly deaths file: counts already aggregated to the
// 22-group age grid. Zero-count cells must be present explicitly; a missing
// (year, month) is treated as missing data, not as zero deaths.
struct DeathsRecord {
    int year = 0;
    int month = 0;      // 1..12
    Sex sex = Sex::Female;
    int age_group = 0;  // 0..21
    std::int64_t deaths = 0;

    auto operator<=>(const DeathsRecord&) const = default;
};

// Parses a CSV with header "year,month,sex,age_group,deaths". Errors carry
// the 1-based line number ("line 17: month out of range"); duplicate
// (year, month, sex, age_group) keys name both offending lines. Records are
// returned in canonical (year, month, sex, age_group) order regardless of
// input order.
std::vector<DeathsRecord> parse_deaths(const std::filesystem::path& path);
std::vector<DeathsRecord> parse_deaths_text(const std::string& text,
                                            const std::string& origin);

// Canonical serialization: sorted, one record per line, LF endings. Parsing
// its own output reproduces the records byte for byte.
void write_deaths_csv(std::ostream& out, std::vector<DeathsRecord> records);

// ---------------------------------------------------------------------------
// Annual single-age exposures (HMD Exposures_1x1 layout)
// ---------------------------------------------------------------------------

// Person-years by (year, single age 0..110, sex). "110+" in the source is
// stored as age 110.
class AnnualExposureTable {
public:
    void set(int year, int age, Sex sex, double person_years);
    bool has_year(int year) const;
    double at(int year, int age, Sex sex) const;  // throws if absent
    std::vector<int> years() const;               // ascending
    bool empty() const { return rows_.empty(); }

private:
    struct YearRow {
        std::array<std::array<double, kMaxSingleAge + 1>, 2> by_sex{};
        std::array<std::array<bool, kMaxSingleAge + 1>, 2> present{};
    };
    std::map<int, YearRow> rows_;
};

// Parses whitespace-separated "Year Age Female Male Total" rows, skipping any
// preamble lines before the first data row (the HMD text files carry a title
// line and a blank line). Each year must supply all 111 ages exactly once;
// exposure values must be numeric and strictly positive.
AnnualExposureTable parse_exposures(const std::filesystem::path& path);
AnnualExposureTable parse_exposures_text(const std::string& text,
                                         const std::string& origin);

// ---------------------------------------------------------------------------
// Single ages -> 22-group grid
// ---------------------------------------------------------------------------

struct YearSex {
    int year = 0;
    Sex sex = Sex::Female;
    auto operator<=>(const YearSex&) const = default;
};

using AnnualGroupExposure = std::map<YearSex, std::array<double, kAgeGroupCount>>;

// Sums single ages into the grouped grid with compensated summation: the
// grouped total per (year, sex) matches the single-age total to ~1e-12
// relative.
AnnualGroupExposure aggregate_ages(const AnnualExposureTable& table);

}  // namespace pslife
