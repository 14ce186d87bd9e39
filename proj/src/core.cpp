#include "pslife/core.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pslife {

char sex_code(Sex sex) { return sex == Sex::Female ? 'F' : 'M'; }

Sex sex_from_code(char code) {
    if (code == 'F') return Sex::Female;
    if (code == 'M') return Sex::Male;
    throw std::invalid_argument(std::string("unknown sex code '") + code +
                                "', expected F or M");
}

double AgeGroup::midpoint() const {
    if (open_ended) return kOpenGroupMidpoint;
    return lower + width / 2.0;
}

std::string AgeGroup::label() const {
    if (open_ended) return std::to_string(static_cast<int>(lower)) + "+";
    if (width == 1.0) return std::to_string(static_cast<int>(lower));
    return std::to_string(static_cast<int>(lower)) + "-" +
           std::to_string(static_cast<int>(lower + width) - 1);
}

const std::array<AgeGroup, kAgeGroupCount>& age_groups() {
    static const std::array<AgeGroup, kAgeGroupCount> grid = [] {
        std::array<AgeGroup, kAgeGroupCount> g{};
        g[0] = {0, 0.0, 1.0, false};
        g[1] = {1, 1.0, 4.0, false};
        for (int i = 2; i < kOpenGroupIndex; ++i) {
            g[i] = {i, 5.0 * (i - 1), 5.0, false};
        }
        g[kOpenGroupIndex] = {kOpenGroupIndex, 100.0,
                              std::numeric_limits<double>::infinity(), true};
        return g;
    }();
    return grid;
}

int age_group_of(int single_age) {
    if (single_age < 0) {
        throw std::invalid_argument("age_group_of: negative age " +
                                    std::to_string(single_age));
    }
    if (single_age == 0) return 0;
    if (single_age < 5) return 1;
    if (single_age >= 100) return kOpenGroupIndex;
    return single_age / 5 + 1;
}

MonthKey MonthKey::from_index(int idx) {
    int year = idx >= 0 ? idx / 12 : (idx - 11) / 12;  // floor division
    return {year, idx - year * 12 + 1};
}

std::string MonthKey::id() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

MonthKey Pseudoseason::first_month() const {
    return kind == SeasonKind::Summer ? MonthKey{label_year, 5}
                                      : MonthKey{label_year, 11};
}

MonthKey Pseudoseason::last_month() const {
    return kind == SeasonKind::Summer ? MonthKey{label_year, 10}
                                      : MonthKey{label_year + 1, 4};
}

std::array<MonthKey, 6> Pseudoseason::months() const {
    std::array<MonthKey, 6> out;
    MonthKey m = first_month();
    for (auto& slot : out) {
        slot = m;
        m = m.next();
    }
    return out;
}

std::string Pseudoseason::id() const {
    return (kind == SeasonKind::Summer ? "S" : "W") + std::to_string(label_year);
}

Pseudoseason pseudoseason_of(int year, int month) {
    if (month < 1 || month > 12) {
        throw std::invalid_argument("pseudoseason_of: month out of range: " +
                                    std::to_string(month));
    }
    if (month >= 5 && month <= 10) return Pseudoseason::summer(year);
    if (month >= 11) return Pseudoseason::winter(year);
    return Pseudoseason::winter(year - 1);  // Jan-Apr belong to last year's winter
}

namespace {

Pseudoseason next_season(const Pseudoseason& s) {
    if (s.kind == SeasonKind::Summer) return Pseudoseason::winter(s.label_year);
    return Pseudoseason::summer(s.label_year + 1);
}

}  // namespace

SpanResult complete_span(MonthKey first, MonthKey last) {
    if (first.month < 1 || first.month > 12 || last.month < 1 || last.month > 12) {
        throw std::invalid_argument("complete_span: month out of range");
    }
    if (last < first) {
        throw std::invalid_argument("complete_span: last month " + last.id() +
                                    " precedes first month " + first.id());
    }

    SpanResult result;
    Pseudoseason season = pseudoseason_of(first.year, first.month);
    const Pseudoseason stop = pseudoseason_of(last.year, last.month);
    while (true) {
        bool covered = !(season.first_month() < first) &&
                       !(last < season.last_month());
        if (covered) {
            result.seasons.push_back(season);
        } else {
            result.incomplete.push_back(season);
        }
        if (season == stop) break;
        season = next_season(season);
    }

    auto first_winter = std::find_if(
        result.seasons.begin(), result.seasons.end(),
        [](const Pseudoseason& s) { return s.kind == SeasonKind::Winter; });
    if (first_winter != result.seasons.end()) {
        result.burn_in_winter = *first_winter;
        result.seasons.erase(first_winter);
    }
    return result;
}

void MortalitySurface::add(const Pseudoseason& season, Sex sex, Slice slice) {
    SeasonSex key{season, sex};
    if (cells_.count(key)) {
        throw std::invalid_argument("MortalitySurface: duplicate cell " +
                                    season.id() + "/" + sex_code(sex));
    }
    for (int g = 0; g < kAgeGroupCount; ++g) {
        if (slice.deaths[g] < 0) {
            throw std::invalid_argument(
                "MortalitySurface: negative deaths in " + season.id() + "/" +
                sex_code(sex) + " age group " + age_groups()[g].label());
        }
        if (!(slice.exposure[g] > 0.0)) {
            throw std::invalid_argument(
                "MortalitySurface: non-positive exposure in " + season.id() +
                "/" + sex_code(sex) + " age group " + age_groups()[g].label());
        }
    }
    cells_.emplace(key, std::move(slice));
}

bool MortalitySurface::contains(const Pseudoseason& season, Sex sex) const {
    return cells_.count(SeasonSex{season, sex}) > 0;
}

const MortalitySurface::Slice& MortalitySurface::slice(const Pseudoseason& season,
                                                       Sex sex) const {
    auto it = cells_.find(SeasonSex{season, sex});
    if (it == cells_.end()) {
        throw std::out_of_range("MortalitySurface: no cell " + season.id() +
                                "/" + sex_code(sex));
    }
    return it->second;
}

std::vector<Pseudoseason> MortalitySurface::seasons() const {
    std::vector<Pseudoseason> out;
    for (const auto& [key, _] : cells_) {
        if (out.empty() || !(out.back() == key.season)) out.push_back(key.season);
    }
    return out;
}

}  // namespace pslife
