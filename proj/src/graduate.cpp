#include "pslife/graduate.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "pslife/numeric.hpp"

namespace pslife {

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> days{31, 28, 31, 30, 31, 30,
                                              31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) {
        throw std::invalid_argument("days_in_month: month out of range: " +
                                    std::to_string(month));
    }
    if (month == 2 && is_leap_year(year)) return 29;
    return days[month - 1];
}

int days_in_year(int year) { return is_leap_year(year) ? 366 : 365; }

MonthlyGroupExposure graduate_to_months(const AnnualGroupExposure& annual) {
    MonthlyGroupExposure out;
    for (const auto& [key, groups] : annual) {
        for (int g = 0; g < kAgeGroupCount; ++g) {
            if (!(groups[g] > 0.0)) {
                throw std::invalid_argument(
                    "graduate_to_months: non-positive annual exposure for year " +
                    std::to_string(key.year) + "/" + sex_code(key.sex) +
                    " age group " + age_groups()[g].label());
            }
        }
        const double year_days = days_in_year(key.year);
        for (int m = 1; m <= 12; ++m) {
            const double share = days_in_month(key.year, m) / year_days;
            auto& slot = out[MonthSex{{key.year, m}, key.sex}];
            for (int g = 0; g < kAgeGroupCount; ++g) slot[g] = groups[g] * share;
        }
    }
    return out;
}

std::map<SeasonSex, std::array<double, kAgeGroupCount>> bin_exposure(
    const MonthlyGroupExposure& monthly, const std::vector<Pseudoseason>& seasons) {
    std::map<SeasonSex, std::array<double, kAgeGroupCount>> out;
    for (const auto& season : seasons) {
        for (Sex sex : kSexes) {
            std::array<CompensatedSum, kAgeGroupCount> sums;
            for (const MonthKey& m : season.months()) {
                auto it = monthly.find(MonthSex{m, sex});
                if (it == monthly.end()) {
                    throw std::runtime_error("bin_exposure: season " + season.id() +
                                             " is missing exposure for month " +
                                             m.id());
                }
                for (int g = 0; g < kAgeGroupCount; ++g) sums[g].add(it->second[g]);
            }
            auto& slot = out[SeasonSex{season, sex}];
            for (int g = 0; g < kAgeGroupCount; ++g) slot[g] = sums[g].value();
        }
    }
    return out;
}

std::map<SeasonSex, std::array<std::int64_t, kAgeGroupCount>> bin_deaths(
    const std::vector<DeathsRecord>& records,
    const std::vector<Pseudoseason>& seasons) {
    // Months covered by the records, and per-cell totals.
    std::set<MonthKey> months_present;
    std::map<MonthSex, std::array<std::int64_t, kAgeGroupCount>> by_month;
    for (const auto& r : records) {
        months_present.insert(MonthKey{r.year, r.month});
        by_month[MonthSex{{r.year, r.month}, r.sex}][r.age_group] += r.deaths;
    }

    std::map<SeasonSex, std::array<std::int64_t, kAgeGroupCount>> out;
    for (const auto& season : seasons) {
        std::array<std::array<std::int64_t, kAgeGroupCount>, 2> sums{};
        for (const MonthKey& m : season.months()) {
            if (!months_present.count(m)) {
                throw std::runtime_error("bin_deaths: season " + season.id() +
                                         " is missing deaths for month " + m.id());
            }
            for (Sex sex : kSexes) {
                auto it = by_month.find(MonthSex{m, sex});
                if (it == by_month.end()) continue;  // month covered, cell zero
                auto& acc = sums[sex == Sex::Female ? 0 : 1];
                for (int g = 0; g < kAgeGroupCount; ++g) acc[g] += it->second[g];
            }
        }
        out[SeasonSex{season, Sex::Female}] = sums[0];
        out[SeasonSex{season, Sex::Male}] = sums[1];
    }
    return out;
}

SurfaceBuild build_surface(const std::vector<DeathsRecord>& records,
                           const AnnualExposureTable& exposures) {
    if (records.empty()) {
        throw std::invalid_argument("build_surface: no death records");
    }
    if (exposures.empty()) {
        throw std::invalid_argument("build_surface: no exposure data");
    }

    std::set<MonthKey> months_present;
    for (const auto& r : records) months_present.insert(MonthKey{r.year, r.month});

    SurfaceBuild build;
    build.span = complete_span(*months_present.begin(), *months_present.rbegin());

    // Drop seasons whose months are not all backed by deaths records and
    // exposure years; keep the reason for diagnostics.
    std::vector<Pseudoseason> usable;
    for (const auto& season : build.span.seasons) {
        std::string reason;
        for (const MonthKey& m : season.months()) {
            if (!months_present.count(m)) {
                reason = "no death records for month " + m.id();
                break;
            }
            if (!exposures.has_year(m.year)) {
                reason = "no exposure data for year " + std::to_string(m.year);
                break;
            }
        }
        if (reason.empty()) {
            usable.push_back(season);
        } else {
            build.skipped.emplace_back(season, reason);
        }
    }

    if (usable.empty()) {
        build.span.seasons.clear();
        return build;
    }

    // Graduate only the years the usable seasons touch.
    std::set<int> years_needed;
    for (const auto& season : usable) {
        for (const MonthKey& m : season.months()) years_needed.insert(m.year);
    }
    AnnualGroupExposure annual = aggregate_ages(exposures);
    AnnualGroupExposure needed;
    for (const auto& [key, groups] : annual) {
        if (years_needed.count(key.year)) needed.emplace(key, groups);
    }

    auto exposure_bins = bin_exposure(graduate_to_months(needed), usable);
    auto death_bins = bin_deaths(records, usable);

    for (const auto& season : usable) {
        for (Sex sex : kSexes) {
            MortalitySurface::Slice slice;
            slice.deaths = death_bins.at(SeasonSex{season, sex});
            slice.exposure = exposure_bins.at(SeasonSex{season, sex});
            build.surface.add(season, sex, std::move(slice));
        }
    }
    build.span.seasons = usable;
    return build;
}

}  // namespace pslife
