#include "pslife/hazard.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pslife/lifetable.hpp"

namespace pslife {

namespace {

std::vector<int> included_groups(int age_floor) {
    std::vector<int> out;
    for (const auto& g : age_groups()) {
        if (g.lower >= static_cast<double>(age_floor)) out.push_back(g.index);
    }
    return out;
}

struct LogRatioCell {
    double log_winter;
    double log_summer;
};

// Geometric-mean ratio and log-scale R2 over the collected cells.
ProportionalHazardResult solve_cells(const std::vector<LogRatioCell>& cells) {
    double sum_diff = 0.0;
    double sum_w = 0.0;
    for (const auto& c : cells) {
        sum_diff += c.log_winter - c.log_summer;
        sum_w += c.log_winter;
    }
    const double n = static_cast<double>(cells.size());
    const double log_p = sum_diff / n;
    const double mean_w = sum_w / n;

    double rss = 0.0;
    double tss = 0.0;
    for (const auto& c : cells) {
        const double resid = c.log_winter - (log_p + c.log_summer);
        rss += resid * resid;
        tss += (c.log_winter - mean_w) * (c.log_winter - mean_w);
    }

    ProportionalHazardResult result;
    result.P = std::exp(log_p);
    // An exact fit is a perfect fit regardless of spread; otherwise rss/tss
    // with tss == 0 correctly lands at -inf.
    result.R2 = rss == 0.0 ? 1.0 : 1.0 - rss / tss;
    return result;
}

void collect_pair(const std::array<double, kAgeGroupCount>& winter_mx,
                  const std::array<double, kAgeGroupCount>& summer_mx,
                  const std::vector<int>& groups, int year,
                  std::vector<LogRatioCell>& cells) {
    for (int g : groups) {
        if (!(winter_mx[g] > 0.0) || !(summer_mx[g] > 0.0)) {
            throw std::runtime_error(
                "proportional hazard: zero death rate in year " +
                std::to_string(year) + ", age group " + age_groups()[g].label() +
                "; cannot take log ratios");
        }
        cells.push_back({std::log(winter_mx[g]), std::log(summer_mx[g])});
    }
}

Pseudoseason paired_summer(int winter_year, Pairing pairing) {
    return Pseudoseason::summer(pairing == Pairing::PrevSummer ? winter_year
                                                               : winter_year + 1);
}

}  // namespace

ProportionalHazardResult estimate_ph_pair(
    const std::array<double, kAgeGroupCount>& winter_mx,
    const std::array<double, kAgeGroupCount>& summer_mx, Sex sex, int year,
    int age_floor) {
    const auto groups = included_groups(age_floor);
    if (groups.size() < 2) {
        throw std::invalid_argument(
            "proportional hazard: age floor " + std::to_string(age_floor) +
            " leaves fewer than two age groups");
    }
    std::vector<LogRatioCell> cells;
    collect_pair(winter_mx, summer_mx, groups, year, cells);
    auto result = solve_cells(cells);
    result.n_ages = static_cast<int>(groups.size());
    result.n_years = 1;
    result.sex = sex;
    result.year = year;
    return result;
}

std::vector<ProportionalHazardResult> per_year_ph(const MortalitySurface& surface,
                                                  Sex sex, int age_floor,
                                                  Pairing pairing) {
    std::vector<ProportionalHazardResult> out;
    for (const auto& season : surface.seasons()) {
        if (season.kind != SeasonKind::Winter || !surface.contains(season, sex)) {
            continue;
        }
        const auto summer = paired_summer(season.label_year, pairing);
        if (!surface.contains(summer, sex)) continue;
        out.push_back(estimate_ph_pair(death_rates(surface, season, sex),
                                       death_rates(surface, summer, sex), sex,
                                       season.label_year, age_floor));
    }
    return out;
}

ProportionalHazardResult estimate_ph_pooled(const MortalitySurface& surface,
                                            Sex sex, int age_floor,
                                            Pairing pairing) {
    const auto groups = included_groups(age_floor);
    if (groups.size() < 2) {
        throw std::invalid_argument(
            "proportional hazard: age floor " + std::to_string(age_floor) +
            " leaves fewer than two age groups");
    }

    std::vector<LogRatioCell> cells;
    int n_years = 0;
    for (const auto& season : surface.seasons()) {
        if (season.kind != SeasonKind::Winter || !surface.contains(season, sex)) {
            continue;
        }
        const auto summer = paired_summer(season.label_year, pairing);
        if (!surface.contains(summer, sex)) continue;
        collect_pair(death_rates(surface, season, sex),
                     death_rates(surface, summer, sex), groups,
                     season.label_year, cells);
        ++n_years;
    }
    if (n_years == 0) {
        throw std::runtime_error(
            "proportional hazard: no winter/summer pair on the surface");
    }

    auto result = solve_cells(cells);
    result.n_ages = static_cast<int>(groups.size());
    result.n_years = n_years;
    result.sex = sex;
    result.year.reset();
    return result;
}

RatioMatrix ratio_matrix(const MortalitySurface& surface, Sex sex) {
    RatioMatrix out;
    out.sex = sex;
    for (const auto& season : surface.seasons()) {
        if (season.kind != SeasonKind::Summer || !surface.contains(season, sex)) {
            continue;
        }
        const int year = season.label_year;
        const auto winter = Pseudoseason::winter(year - 1);
        if (!surface.contains(winter, sex)) continue;

        const auto wmx = death_rates(surface, winter, sex);
        const auto smx = death_rates(surface, season, sex);
        for (int g = 0; g < kAgeGroupCount; ++g) {
            RatioCell cell;
            cell.year = year;
            cell.age_group = g;
            cell.winter_mx = wmx[g];
            cell.summer_mx = smx[g];
            if (wmx[g] > 0.0 && smx[g] > 0.0) {
                cell.ratio = wmx[g] / smx[g];
            } else {
                cell.ratio = std::numeric_limits<double>::quiet_NaN();
                cell.flagged = true;
            }
            out.cells.push_back(cell);
        }
    }
    return out;
}

}  // namespace pslife
