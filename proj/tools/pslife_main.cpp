#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pslife/cli.hpp"

namespace {

using pslife::RunConfig;

void add_input_options(CLI::App* sub, RunConfig& config) {
    sub->add_option("--deaths", config.deaths_path,
                    "monthly deaths CSV (year,month,sex,age_group,deaths)")
        ->required();
    sub->add_option("--exposures", config.exposures_path,
                    "annual single-age exposures (Year Age Female Male Total)")
        ->required();
}

void add_output_options(CLI::App* sub, RunConfig& config) {
    sub->add_option("--out", config.out_dir, "output directory (created if absent)");
    sub->add_option("--format", config.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void add_sex_option(CLI::App* sub, RunConfig& config) {
    sub->add_option("--sex", config.sex, "restrict to one sex: F, M or both")
        ->check(CLI::IsMember({"F", "M", "both"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pslife: pseudoseasonal life tables and winter/summer mortality "
        "comparison from monthly deaths and annual exposures"};
    app.require_subcommand(1);

    RunConfig config;
    std::string ax_name = "infant-adjusted";
    std::string pairing_name = "prev-summer";
    std::vector<int> both_years;
    std::uint64_t seed_value = 0;

    auto* ingest = app.add_subcommand(
        "ingest-check", "validate inputs and report the usable season span");
    add_input_options(ingest, config);

    auto* lifetable = app.add_subcommand(
        "lifetable", "pseudoseasonal life tables, e(0) series and seasonal gaps");
    add_input_options(lifetable, config);
    add_output_options(lifetable, config);
    add_sex_option(lifetable, config);
    lifetable
        ->add_option("--ax", ax_name,
                     "person-years convention for interval deaths: "
                     "infant-adjusted or midpoint")
        ->check(CLI::IsMember({"infant-adjusted", "midpoint"}));

    auto* ph = app.add_subcommand(
        "ph", "winter:summer proportional hazard ratios and rate-ratio matrix");
    add_input_options(ph, config);
    add_output_options(ph, config);
    add_sex_option(ph, config);
    ph->add_option("--age-floor", config.age_floor,
                   "lowest age-group bound entering the ratio (years)");
    ph->add_option("--pairing", pairing_name,
                   "summer paired with each winter: prev-summer or next-summer")
        ->check(CLI::IsMember({"prev-summer", "next-summer"}));

    auto* gompertz = app.add_subcommand(
        "gompertz", "log-linear hazard fits and equivalent-age tables");
    gompertz->add_option("--deaths", config.deaths_path,
                         "monthly deaths CSV (year,month,sex,age_group,deaths)");
    gompertz->add_option("--exposures", config.exposures_path,
                         "annual single-age exposures (Year Age Female Male Total)");
    add_output_options(gompertz, config);
    add_sex_option(gompertz, config);
    gompertz->add_option("--age-floor", config.age_floor,
                         "lowest age-group bound entering the fit (years)");
    gompertz->add_option("--summer-year", config.summer_years,
                         "fit Summer(Y) (repeatable)");
    gompertz->add_option("--winter-year", config.winter_years,
                         "fit Winter(Y) = Nov Y .. Apr Y+1 (repeatable)");
    gompertz->add_option("--year", both_years,
                         "shorthand for --summer-year Y --winter-year Y");
    gompertz->add_option("--ages", config.ages,
                         "reference ages for the equivalence table");
    gompertz->add_option(
        "--coefficients-from-file", config.coefficients_path,
        "skip fitting; read sex,season,alpha,beta rows and emit equivalence "
        "tables only");
    gompertz->add_flag("--display", config.display,
                       "print a rounded equivalence table to stdout");

    auto* synth = app.add_subcommand(
        "synth", "generate a synthetic deaths/exposures pair from a scenario");
    synth->add_option("--scenario", config.scenario_path,
                      "scenario file (key = value); defaults used when omitted");
    synth->add_option("--out", config.out_dir,
                      "output directory (created if absent)");
    auto* seed_opt =
        synth->add_option("--seed", seed_value, "override the scenario seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return pslife::kExitInputError;
    }

    if (gompertz->parsed() && config.coefficients_path.empty() &&
        (config.deaths_path.empty() || config.exposures_path.empty())) {
        std::cerr << "error: gompertz needs --deaths/--exposures or "
                     "--coefficients-from-file\n";
        return pslife::kExitInputError;
    }
    for (int y : both_years) {
        config.summer_years.push_back(y);
        config.winter_years.push_back(y);
    }
    if (seed_opt->count() > 0) config.seed_override = seed_value;
    config.ax = ax_name == "midpoint" ? pslife::AxConvention::Midpoint
                                      : pslife::AxConvention::InfantAdjusted;
    config.pairing = pairing_name == "next-summer" ? pslife::Pairing::NextSummer
                                                   : pslife::Pairing::PrevSummer;

    if (ingest->parsed()) return cmd_ingest_check(config, std::cout, std::cerr);
    if (lifetable->parsed()) return cmd_lifetable(config, std::cerr);
    if (ph->parsed()) return cmd_ph(config, std::cerr);
    if (gompertz->parsed()) return cmd_gompertz(config, std::cout, std::cerr);
    if (synth->parsed()) return cmd_synth(config, std::cerr);
    return pslife::kExitInputError;  // unreachable: a subcommand is required
}
