#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pslife/hazard.hpp"
#include "pslife/lifetable.hpp"

namespace pslife {

// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;             // all requested outputs produced
inline constexpr int kExitInputError = 1;     // unreadable/invalid inputs or flags
inline constexpr int kExitNumericalError = 2; // an iterative fit failed to converge
inline constexpr int kExitPartialOutput = 3;  // some outputs produced, some skipped

// Everything a subcommand needs, filled in by the argument parser. Defaults
// here are the single source of truth for flag defaults.
struct RunConfig {
    std::filesystem::path deaths_path;
    std::filesystem::path exposures_path;
    std::filesystem::path out_dir = ".";
    std::filesystem::path coefficients_path;  // gompertz: skip fitting, use these
    std::filesystem::path scenario_path;      // synth
    std::string format = "csv";               // csv | json
    std::string sex = "both";                 // F | M | both
    int age_floor = kDefaultAgeFloor;
    AxConvention ax = AxConvention::InfantAdjusted;
    Pairing pairing = Pairing::PrevSummer;
    std::vector<int> summer_years;            // gompertz season selection
    std::vector<int> winter_years;
    std::vector<double> ages{50, 60, 70, 80, 90};  // equivalence-table ages
    bool display = false;                     // print a rounded table to stdout
    std::optional<std::uint64_t> seed_override;    // synth --seed
};

// Subcommand drivers. Diagnostics go to `diag` (stderr in the binary); data
// destined for pipes goes to `out`. Return values are the exit codes above.
int cmd_ingest_check(const RunConfig& config, std::ostream& out, std::ostream& diag);
int cmd_lifetable(const RunConfig& config, std::ostream& diag);
int cmd_ph(const RunConfig& config, std::ostream& diag);
int cmd_gompertz(const RunConfig& config, std::ostream& out, std::ostream& diag);
int cmd_synth(const RunConfig& config, std::ostream& diag);

}  // namespace pslife
