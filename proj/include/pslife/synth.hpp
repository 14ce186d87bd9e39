#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pslife/core.hpp"
#include "pslife/ingest.hpp"

namespace pslife {

// Synthetic-cohort description: a stationary population with `population`
// person-years of exposure at every single age and sex, dying at a Gompertz
// baseline hazard with optional seasonal distortions.
struct Scenario {
    std::uint64_t seed = 1;
    MonthKey first_month{1960, 1};
    MonthKey last_month{1964, 12};
    double alpha_female = -10.2;
    double beta_female = 0.09;
    double alpha_male = -9.8;
    double beta_male = 0.09;
    // Hazard multiplier in Nov-Apr at single ages >= 45.
    double winter_multiplier = 1.0;
    // Hazard multiplier in May-Oct at single ages 15-34.
    double youth_summer_multiplier = 1.0;
    double population = 10000.0;  // persons per (single age, sex)

    void validate() const;  // throws std::invalid_argument on nonsense
};

// "key = value" text, '#' comments, unknown keys rejected. Months are
// "YYYY-MM". Every key is optional; omitted keys keep their defaults.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin);

// Annual hazard (per person-year) for one single age in one calendar month.
double scenario_hazard(const Scenario& scenario, Sex sex, int single_age,
                       int month);

struct SynthOutput {
    std::vector<DeathsRecord> deaths;  // canonical order, zero cells included
    std::string exposures_text;        // annual single-age table, parseable
};

// Draws monthly deaths per (year, sex) block: block streams are seeded
// independently from (seed, year, sex), so output does not depend on block
// evaluation order. Within a block, months then single ages are drawn in a
// fixed order; single-age counts are Poisson with mean
// population * hazard * days_in_month / days_in_year, then summed into the
// 22-group grid.
SynthOutput generate(const Scenario& scenario);

struct MicroSimRate {
    double deaths = 0.0;
    double person_years = 0.0;
    double rate = 0.0;  // deaths / person_years
};

// Day-by-day individual-level simulation of one (season, sex, age group):
// each of `persons_per_age` individuals per single age faces daily death
// probability 1 - exp(-hazard/days_in_year); survivors contribute a full day
// of exposure, decedents half a day. Independent implementation used as an
// oracle for the count-based pipeline; `stream` decouples its randomness from
// generate().
MicroSimRate micro_sim_rate(const Scenario& scenario, const Pseudoseason& season,
                            Sex sex, int age_group, int persons_per_age,
                            std::uint64_t stream = 0);

}  // namespace pslife
