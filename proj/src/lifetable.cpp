#include "pslife/lifetable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pslife {

std::array<double, kAgeGroupCount> death_rates(const MortalitySurface& surface,
                                               const Pseudoseason& season, Sex sex) {
    const auto& slice = surface.slice(season, sex);
    std::array<double, kAgeGroupCount> mx{};
    for (int g = 0; g < kAgeGroupCount; ++g) {
        if (!(slice.exposure[g] > 0.0)) {
            throw std::runtime_error("death_rates: zero exposure in " + season.id() +
                                     "/" + sex_code(sex) + " age group " +
                                     age_groups()[g].label());
        }
        mx[g] = static_cast<double>(slice.deaths[g]) / slice.exposure[g];
    }
    return mx;
}

LifeTable build_life_table(const std::array<double, kAgeGroupCount>& Mx,
                           AxConvention convention) {
    for (int g = 0; g < kAgeGroupCount; ++g) {
        if (!std::isfinite(Mx[g]) || Mx[g] < 0.0) {
            throw std::invalid_argument("build_life_table: invalid rate in age group " +
                                        age_groups()[g].label());
        }
    }
    if (!(Mx[kOpenGroupIndex] > 0.0)) {
        throw std::invalid_argument(
            "build_life_table: open-ended age group needs a positive rate to "
            "close the table");
    }

    LifeTable t;
    t.Mx = Mx;
    const auto& grid = age_groups();

    for (int g = 0; g < kOpenGroupIndex; ++g) {
        const double n = grid[g].width;
        double a = n / 2.0;
        if (convention == AxConvention::InfantAdjusted) {
            if (g == 0) a = 0.07 + 1.7 * Mx[0];
            else if (g == 1) a = 1.5;
        }
        t.ax[g] = a;
        const double denom = 1.0 + (n - a) * Mx[g];
        double q = denom > 0.0 ? n * Mx[g] / denom : 1.0;
        t.qx[g] = std::min(q, 1.0);
    }
    t.ax[kOpenGroupIndex] = 0.0;  // not used; the open group closes via Lx = lx/Mx
    t.qx[kOpenGroupIndex] = 1.0;

    t.lx[0] = kRadix;
    for (int g = 0; g < kOpenGroupIndex; ++g) {
        t.dx[g] = t.lx[g] * t.qx[g];
        t.lx[g + 1] = t.lx[g] - t.dx[g];
        t.Lx[g] = grid[g].width * t.lx[g + 1] + t.ax[g] * t.dx[g];
    }
    t.dx[kOpenGroupIndex] = t.lx[kOpenGroupIndex];
    t.Lx[kOpenGroupIndex] = t.lx[kOpenGroupIndex] / Mx[kOpenGroupIndex];

    double cum = 0.0;
    for (int g = kAgeGroupCount - 1; g >= 0; --g) {
        cum += t.Lx[g];
        t.Tx[g] = cum;
        t.ex[g] = t.lx[g] > 0.0 ? t.Tx[g] / t.lx[g] : 0.0;
    }
    return t;
}

std::vector<E0Point> e0_series(const MortalitySurface& surface,
                               AxConvention convention) {
    std::vector<E0Point> out;
    const auto seasons = surface.seasons();
    for (Sex sex : kSexes) {
        for (const auto& season : seasons) {
            if (!surface.contains(season, sex)) continue;
            auto mx = death_rates(surface, season, sex);
            out.push_back({season, sex, build_life_table(mx, convention).e0()});
        }
    }
    return out;
}

SeasonalGapSeries seasonal_gap(const std::vector<E0Point>& series) {
    std::map<SeasonSex, double> e0;
    for (const auto& p : series) e0[SeasonSex{p.season, p.sex}] = p.e0;

    SeasonalGapSeries out;
    for (Sex sex : kSexes) {
        std::vector<GapPoint> points;
        for (const auto& [key, value] : e0) {
            if (key.sex != sex || key.season.kind != SeasonKind::Summer) continue;
            const int year = key.season.label_year;
            auto winter = e0.find(SeasonSex{Pseudoseason::winter(year - 1), sex});
            if (winter == e0.end()) continue;
            points.push_back({year, sex, value, winter->second,
                              value - winter->second});
        }
        if (points.empty()) continue;

        double sum = 0.0;
        for (const auto& p : points) sum += p.gap;
        const double mean = sum / static_cast<double>(points.size());
        double ss = 0.0;
        for (const auto& p : points) ss += (p.gap - mean) * (p.gap - mean);
        const double sd = points.size() > 1
                              ? std::sqrt(ss / static_cast<double>(points.size() - 1))
                              : 0.0;

        out.summary.push_back({sex, static_cast<int>(points.size()), mean, sd});
        out.points.insert(out.points.end(), points.begin(), points.end());
    }

    if (out.points.empty()) {
        throw std::invalid_argument(
            "seasonal_gap: no winter with a following summer in the series");
    }
    return out;
}

}  // namespace pslife
