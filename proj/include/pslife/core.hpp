#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pslife {

// ---------------------------------------------------------------------------
// Sex
// ---------------------------------------------------------------------------

enum class Sex { Female, Male };

inline constexpr std::array<Sex, 2> kSexes{Sex::Female, Sex::Male};

char sex_code(Sex sex);           // 'F' / 'M'
Sex sex_from_code(char code);     // throws std::invalid_argument on anything else

// ---------------------------------------------------------------------------
// Age grid: 0, 1-4, 5-9, ..., 95-99, 100+  (22 groups)
// ---------------------------------------------------------------------------

inline constexpr int kAgeGroupCount = 22;
inline constexpr int kOpenGroupIndex = kAgeGroupCount - 1;
inline constexpr double kOpenGroupMidpoint = 102.5;
inline constexpr int kMaxSingleAge = 110;  // top single-year age in exposure input

struct AgeGroup {
    int index;        // 0..21
    double lower;     // years
    double width;     // 1, 4 or 5 years; +inf for the open-ended group
    bool open_ended;

    // Midpoint used as the fitting abscissa. The open-ended group gets a
    // fixed nominal midpoint and is excluded from parametric fits anyway.
    double midpoint() const;
    std::string label() const;  // "0", "1-4", "45-49", "100+"
};

const std::array<AgeGroup, kAgeGroupCount>& age_groups();
int age_group_of(int single_age);  // throws if single_age < 0

// ---------------------------------------------------------------------------
// Months and pseudoseasons
// ---------------------------------------------------------------------------

struct MonthKey {
    int year = 0;
    int month = 0;  // 1..12

    auto operator<=>(const MonthKey&) const = default;

    int index() const { return year * 12 + (month - 1); }
    static MonthKey from_index(int idx);
    MonthKey next() const { return from_index(index() + 1); }
    std::string id() const;  // "1960-07"
};

// Half-year seasons: Summer(Y) = May..Oct of Y; Winter(Y) = Nov Y .. Apr Y+1.
// A winter is labelled by the year its November falls in.
enum class SeasonKind { Summer, Winter };

struct Pseudoseason {
    int label_year = 0;
    SeasonKind kind = SeasonKind::Summer;

    static Pseudoseason summer(int year) { return {year, SeasonKind::Summer}; }
    static Pseudoseason winter(int year) { return {year, SeasonKind::Winter}; }

    MonthKey first_month() const;
    MonthKey last_month() const;
    std::array<MonthKey, 6> months() const;
    std::string id() const;  // "S1960" / "W1960"

    bool operator==(const Pseudoseason&) const = default;
    // Chronological order (Summer(Y) starts May, Winter(Y) starts Nov).
    bool operator<(const Pseudoseason& o) const {
        return first_month() < o.first_month();
    }
};

// Season containing calendar month (year, month). Note Jan-Apr of year Y
// belong to Winter(Y-1).
Pseudoseason pseudoseason_of(int year, int month);

// ---------------------------------------------------------------------------
// Span accounting
// ---------------------------------------------------------------------------

struct SpanResult {
    std::vector<Pseudoseason> seasons;          // retained, chronological
    std::vector<Pseudoseason> incomplete;       // touched but not fully covered
    std::optional<Pseudoseason> burn_in_winter; // earliest complete winter, dropped
};

// Keeps every season whose six months all lie inside [first, last], then
// drops the earliest complete winter: the analysis pairs each winter with the
// preceding summer, so the first winter in any span has no usable partner and
// would otherwise skew season counts.  A span of N whole years beginning in
// May therefore yields N summers and N-1 winters.
SpanResult complete_span(MonthKey first, MonthKey last);

// ---------------------------------------------------------------------------
// Mortality surface: deaths + exposure per (season, sex, age group)
// ---------------------------------------------------------------------------

struct SeasonSex {
    Pseudoseason season;
    Sex sex;

    bool operator==(const SeasonSex&) const = default;
    bool operator<(const SeasonSex& o) const {
        if (season == o.season) return sex < o.sex;
        return season < o.season;
    }
};

class MortalitySurface {
public:
    struct Slice {
        std::array<std::int64_t, kAgeGroupCount> deaths{};
        std::array<double, kAgeGroupCount> exposure{};  // person-years
    };

    // Validates deaths >= 0 and exposure > 0 in every age group and rejects
    // duplicate (season, sex) cells.
    void add(const Pseudoseason& season, Sex sex, Slice slice);

    bool contains(const Pseudoseason& season, Sex sex) const;
    const Slice& slice(const Pseudoseason& season, Sex sex) const;  // throws if absent

    // Distinct seasons present (for either sex), chronological.
    std::vector<Pseudoseason> seasons() const;
    const std::map<SeasonSex, Slice>& cells() const { return cells_; }
    bool empty() const { return cells_.empty(); }

private:
    std::map<SeasonSex, Slice> cells_;
};

}  // namespace pslife
