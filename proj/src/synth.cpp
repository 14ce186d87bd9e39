#include "pslife/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pslife/graduate.hpp"
#include "pslife/numeric.hpp"
#include "pslife/rng.hpp"

namespace pslife {

namespace {

constexpr int kWinterAgeFloor = 45;
constexpr int kYouthLow = 15;
constexpr int kYouthHigh = 34;

bool is_winter_month(int month) { return month >= 11 || month <= 4; }

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

MonthKey parse_month_key(const std::string& tok) {
    int year, month;
    if (std::sscanf(tok.c_str(), "%d-%d", &year, &month) != 2 || month < 1 ||
        month > 12) {
        throw std::invalid_argument("bad month '" + tok + "', expected YYYY-MM");
    }
    return {year, month};
}

double parse_double_tok(const std::string& tok) {
    double v;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw std::invalid_argument("bad number '" + tok + "'");
    }
    return v;
}

std::uint64_t parse_u64_tok(const std::string& tok) {
    std::uint64_t v;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw std::invalid_argument("bad unsigned integer '" + tok + "'");
    }
    return v;
}

}  // namespace

void Scenario::validate() const {
    if (last_month < first_month) {
        throw std::invalid_argument("scenario: last_month precedes first_month");
    }
    if (!(population > 0.0)) {
        throw std::invalid_argument("scenario: population must be positive");
    }
    if (!(winter_multiplier > 0.0) || !(youth_summer_multiplier > 0.0)) {
        throw std::invalid_argument("scenario: multipliers must be positive");
    }
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path.string());
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    Scenario s;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(origin + " line " + std::to_string(line_no) +
                                     ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "seed") s.seed = parse_u64_tok(value);
            else if (key == "first_month") s.first_month = parse_month_key(value);
            else if (key == "last_month") s.last_month = parse_month_key(value);
            else if (key == "alpha_female") s.alpha_female = parse_double_tok(value);
            else if (key == "beta_female") s.beta_female = parse_double_tok(value);
            else if (key == "alpha_male") s.alpha_male = parse_double_tok(value);
            else if (key == "beta_male") s.beta_male = parse_double_tok(value);
            else if (key == "winter_multiplier") s.winter_multiplier = parse_double_tok(value);
            else if (key == "youth_summer_multiplier") s.youth_summer_multiplier = parse_double_tok(value);
            else if (key == "population") s.population = parse_double_tok(value);
            else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(origin + " line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
    }
    s.validate();
    return s;
}

double scenario_hazard(const Scenario& scenario, Sex sex, int single_age,
                       int month) {
    const double alpha =
        sex == Sex::Female ? scenario.alpha_female : scenario.alpha_male;
    const double beta =
        sex == Sex::Female ? scenario.beta_female : scenario.beta_male;
    double h = std::exp(alpha + beta * static_cast<double>(single_age));
    if (is_winter_month(month) && single_age >= kWinterAgeFloor) {
        h *= scenario.winter_multiplier;
    }
    if (!is_winter_month(month) && single_age >= kYouthLow &&
        single_age <= kYouthHigh) {
        h *= scenario.youth_summer_multiplier;
    }
    return h;
}

SynthOutput generate(const Scenario& scenario) {
    scenario.validate();
    SynthOutput out;

    // Exposures: one stationary row set per calendar year the span touches.
    std::ostringstream exp_text;
    exp_text << "Synthetic exposures, stationary population (period 1x1)\n\n";
    exp_text << "  Year          Age             Female            Male           Total\n";
    const std::string pop_str = format_double(scenario.population);
    const std::string total_str = format_double(scenario.population * 2.0);
    for (int year = scenario.first_month.year; year <= scenario.last_month.year;
         ++year) {
        for (int age = 0; age <= kMaxSingleAge; ++age) {
            char age_buf[8];
            if (age == kMaxSingleAge) {
                std::snprintf(age_buf, sizeof(age_buf), "110+");
            } else {
                std::snprintf(age_buf, sizeof(age_buf), "%d", age);
            }
            char line[160];
            std::snprintf(line, sizeof(line), "  %4d %12s %16s %16s %16s\n", year,
                          age_buf, pop_str.c_str(), pop_str.c_str(),
                          total_str.c_str());
            exp_text << line;
        }
    }
    out.exposures_text = exp_text.str();

    // Deaths: one independent stream per (year, sex) block.
    for (int year = scenario.first_month.year; year <= scenario.last_month.year;
         ++year) {
        const double year_days = days_in_year(year);
        for (Sex sex : kSexes) {
            SplitMix64 rng(mix_seed(scenario.seed, static_cast<std::uint64_t>(year),
                                    sex == Sex::Female ? 0 : 1));
            for (int month = 1; month <= 12; ++month) {
                const MonthKey key{year, month};
                if (key < scenario.first_month || scenario.last_month < key) {
                    continue;
                }
                const double share = days_in_month(year, month) / year_days;
                std::array<std::int64_t, kAgeGroupCount> groups{};
                for (int age = 0; age <= kMaxSingleAge; ++age) {
                    const double mean = scenario.population *
                                        scenario_hazard(scenario, sex, age, month) *
                                        share;
                    groups[age_group_of(age)] += rpoisson(rng, mean);
                }
                for (int g = 0; g < kAgeGroupCount; ++g) {
                    out.deaths.push_back({year, month, sex, g, groups[g]});
                }
            }
        }
    }
    std::sort(out.deaths.begin(), out.deaths.end());
    return out;
}

MicroSimRate micro_sim_rate(const Scenario& scenario, const Pseudoseason& season,
                            Sex sex, int age_group, int persons_per_age,
                            std::uint64_t stream) {
    if (age_group < 0 || age_group >= kAgeGroupCount) {
        throw std::invalid_argument("micro_sim_rate: bad age group");
    }
    if (persons_per_age <= 0) {
        throw std::invalid_argument("micro_sim_rate: need a positive cohort size");
    }

    const auto& group = age_groups()[age_group];
    const int age_lo = static_cast<int>(group.lower);
    const int age_hi = group.open_ended
                           ? kMaxSingleAge
                           : static_cast<int>(group.lower + group.width) - 1;

    std::int64_t deaths = 0;
    CompensatedSum person_days_scaled;  // in years: each day divided by year length

    for (int age = age_lo; age <= age_hi; ++age) {
        SplitMix64 rng(mix_seed(scenario.seed ^ 0x6f7261636c65ull,  // oracle stream
                                mix_seed(stream, static_cast<std::uint64_t>(age),
                                         sex == Sex::Female ? 0 : 1),
                                static_cast<std::uint64_t>(
                                    season.first_month().index())));
        std::int64_t alive = persons_per_age;
        for (const MonthKey& m : season.months()) {
            const double year_days = days_in_year(m.year);
            const double hazard = scenario_hazard(scenario, sex, age, m.month);
            const double q_day = -std::expm1(-hazard / year_days);
            for (int day = 0; day < days_in_month(m.year, m.month); ++day) {
                std::int64_t died_today = 0;
                for (std::int64_t i = 0; i < alive; ++i) {
                    if (runif01(rng) < q_day) ++died_today;
                }
                alive -= died_today;
                // Survivors live the whole day; decedents half of it.
                person_days_scaled.add(
                    (static_cast<double>(alive) + 0.5 * static_cast<double>(died_today)) /
                    year_days);
                deaths += died_today;
            }
        }
    }

    MicroSimRate out;
    out.deaths = static_cast<double>(deaths);
    out.person_years = person_days_scaled.value();
    if (!(out.person_years > 0.0)) {
        throw std::runtime_error("micro_sim_rate: cohort fully depleted");
    }
    out.rate = out.deaths / out.person_years;
    return out;
}

}  // namespace pslife
