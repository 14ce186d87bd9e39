// Exercises the installed binary the way a user would: real argv, real files,
// real exit codes. The binary path is injected by the build as PSLIFE_CLI_PATH.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int checks_failed = 0;

void check(bool ok, const std::string& label) {
    if (!ok) ++checks_failed;
    std::cout << (ok ? "ok - " : "FAIL - ") << label << "\n";
}

fs::path g_dir;  // scratch root for the whole run

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    const fs::path out_file = g_dir / "stdout.txt";
    const fs::path err_file = g_dir / "stderr.txt";
    const std::string cmd = q(PSLIFE_CLI_PATH) + " " + args + " > " +
                            q(out_file) + " 2> " + q(err_file);
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out_file), slurp(err_file)};
}

int count_lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

int count_files(const fs::path& dir, const std::string& needle) {
    int n = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().filename().string().find(needle) != std::string::npos) {
            ++n;
        }
    }
    return n;
}

// field(s, i): i-th comma-separated field of a CSV line.
std::string field(const std::string& line, int index) {
    std::istringstream ss(line);
    std::string cell;
    for (int i = 0; i <= index; ++i) std::getline(ss, cell, ',');
    return cell;
}

std::string line_at(const std::string& text, int index) {
    std::istringstream ss(text);
    std::string line;
    for (int i = 0; i <= index; ++i) std::getline(ss, line);
    return line;
}

}  // namespace

int main() {
    g_dir = fs::temp_directory_path() /
            ("pslife_it_" + std::to_string(::getpid()));
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    // --- argument surface -------------------------------------------------
    check(run_cli("--help").exit_code == 0, "--help exits 0");
    check(run_cli("--help").out.find("ingest-check") != std::string::npos,
          "--help lists subcommands");
    check(run_cli("").exit_code == 1, "no subcommand exits 1");
    check(run_cli("lifetable --bogus").exit_code == 1, "unknown flag exits 1");
    {
        auto r = run_cli("gompertz --out " + q(g_dir / "x"));
        check(r.exit_code == 1, "gompertz without inputs exits 1");
        check(r.err.find("--coefficients-from-file") != std::string::npos,
              "gompertz input error names the alternative flag");
    }

    // --- synth: deterministic inputs for everything below ------------------
    write_file(g_dir / "scenario.txt",
               "seed = 20140\n"
               "first_month = 1960-05\n"
               "last_month = 1965-04\n"
               "population = 60000\n"
               "winter_multiplier = 1.12\n");
    const std::string scenario = " --scenario " + q(g_dir / "scenario.txt");
    const fs::path synth_a = g_dir / "synth_a";
    const fs::path synth_b = g_dir / "synth_b";
    check(run_cli("synth" + scenario + " --out " + q(synth_a)).exit_code == 0,
          "synth exits 0");
    check(fs::exists(synth_a / "deaths.csv") &&
              fs::exists(synth_a / "exposures.txt"),
          "synth writes deaths.csv and exposures.txt");
    run_cli("synth" + scenario + " --out " + q(synth_b));
    check(slurp(synth_a / "deaths.csv") == slurp(synth_b / "deaths.csv") &&
              slurp(synth_a / "exposures.txt") ==
                  slurp(synth_b / "exposures.txt"),
          "synth reruns are byte-identical");
    run_cli("synth" + scenario + " --seed 7 --out " + q(g_dir / "synth_c"));
    check(slurp(g_dir / "synth_c" / "deaths.csv") !=
              slurp(synth_a / "deaths.csv"),
          "synth --seed overrides the scenario seed");
    check(run_cli("synth --scenario " + q(g_dir / "nope.txt") + " --out " +
                  q(g_dir / "synth_d"))
                  .exit_code == 1,
          "synth with missing scenario exits 1");

    const std::string inputs = " --deaths " + q(synth_a / "deaths.csv") +
                               " --exposures " + q(synth_a / "exposures.txt");

    // --- ingest-check -------------------------------------------------------
    {
        auto r = run_cli("ingest-check" + inputs);
        check(r.exit_code == 0, "ingest-check exits 0");
        check(r.out.find("seasons retained: 9 (5 summers, 4 winters)") !=
                  std::string::npos,
              "ingest-check reports the season span");
        check(r.out.find("burn-in winter excluded: W1960") != std::string::npos,
              "ingest-check reports the burn-in winter");
    }
    check(run_cli("ingest-check --deaths " + q(g_dir / "nope.csv") +
                  " --exposures " + q(synth_a / "exposures.txt"))
                  .exit_code == 1,
          "ingest-check with missing deaths exits 1");

    // --- lifetable ----------------------------------------------------------
    const fs::path lt = g_dir / "lt";
    check(run_cli("lifetable" + inputs + " --out " + q(lt)).exit_code == 0,
          "lifetable exits 0");
    check(count_files(lt, "lifetable_") == 18,
          "lifetable writes 18 per-season tables (9 seasons x 2 sexes)");
    check(count_lines(slurp(lt / "e0_series.csv")) == 1 + 18,
          "e0_series.csv has one row per season and sex");
    check(count_lines(slurp(lt / "gap_series.csv")) == 1 + 6,
          "gap_series.csv has 3 pair-years x 2 sexes");
    check(count_lines(slurp(lt / "gap_summary.csv")) == 1 + 2,
          "gap_summary.csv has one row per sex");

    const fs::path lt_rerun = g_dir / "lt_rerun";
    run_cli("lifetable" + inputs + " --out " + q(lt_rerun));
    check(slurp(lt / "e0_series.csv") == slurp(lt_rerun / "e0_series.csv") &&
              slurp(lt / "lifetable_S1960_F.csv") ==
                  slurp(lt_rerun / "lifetable_S1960_F.csv"),
          "lifetable reruns are byte-identical");

    const fs::path lt_f = g_dir / "lt_f";
    run_cli("lifetable" + inputs + " --sex F --out " + q(lt_f));
    check(count_files(lt_f, "lifetable_") == 9 &&
              count_files(lt_f, "_M.csv") == 0,
          "lifetable --sex F writes only female tables");

    const fs::path lt_mid = g_dir / "lt_mid";
    run_cli("lifetable" + inputs + " --ax midpoint --out " + q(lt_mid));
    check(slurp(lt_mid / "e0_series.csv") != slurp(lt / "e0_series.csv"),
          "lifetable --ax midpoint changes e(0)");

    const fs::path lt_json = g_dir / "lt_json";
    run_cli("lifetable" + inputs + " --format json --out " + q(lt_json));
    check(count_files(lt_json, ".csv") == 0, "json mode writes no csv files");
    {
        bool ok = false;
        try {
            auto doc = nlohmann::json::parse(slurp(lt_json / "e0_series.json"));
            ok = doc.contains("meta") && doc.contains("rows") &&
                 doc["rows"].size() == 18;
        } catch (...) {
        }
        check(ok, "e0_series.json parses with 18 rows");
    }

    // --- ph -----------------------------------------------------------------
    const fs::path ph = g_dir / "ph";
    check(run_cli("ph" + inputs + " --out " + q(ph)).exit_code == 0,
          "ph exits 0");
    const auto by_year = slurp(ph / "ph_by_year.csv");
    check(count_lines(by_year) == 1 + 8,
          "ph_by_year.csv has 4 winters x 2 sexes under prev-summer pairing");
    const auto pooled = slurp(ph / "ph_pooled.csv");
    check(count_lines(pooled) == 1 + 2, "ph_pooled.csv has one row per sex");
    {
        // Scenario multiplies winter hazards above the age floor by 1.12; the
        // pooled ratio should land near that, both sexes.
        bool near = true;
        for (int row = 1; row <= 2; ++row) {
            const double p = std::stod(field(line_at(pooled, row), 1));
            near = near && std::abs(p - 1.12) < 0.03;
        }
        check(near, "pooled P is close to the planted winter multiplier 1.12");
    }
    check(count_lines(slurp(ph / "ratio_matrix_F.csv")) == 1 + 3 * 22,
          "ratio_matrix_F.csv covers 3 pair-years x 22 age groups");

    const fs::path ph_ns = g_dir / "ph_ns";
    run_cli("ph" + inputs + " --pairing next-summer --out " + q(ph_ns));
    check(count_lines(slurp(ph_ns / "ph_by_year.csv")) == 1 + 6,
          "next-summer pairing drops the final winter (3 pairs x 2 sexes)");

    const fs::path ph_floor = g_dir / "ph_floor";
    run_cli("ph" + inputs + " --age-floor 95 --out " + q(ph_floor));
    check(field(line_at(slurp(ph_floor / "ph_pooled.csv"), 1), 3) == "2",
          "--age-floor 95 leaves 2 age groups in the ratio");

    // --- gompertz: fit mode --------------------------------------------------
    const fs::path gz = g_dir / "gz";
    check(run_cli("gompertz" + inputs + " --year 1962 --out " + q(gz))
                  .exit_code == 0,
          "gompertz fit mode exits 0");
    const auto fits = slurp(gz / "gompertz_fits.csv");
    check(count_lines(fits) == 1 + 4,
          "gompertz_fits.csv has S1962 and W1962 for both sexes");
    check(fs::exists(gz / "equivalence_F.csv") &&
              fs::exists(gz / "equivalence_M.csv"),
          "gompertz writes equivalence tables per sex");
    check(count_lines(slurp(gz / "equivalence_F.csv")) == 1 + 5,
          "equivalence table has one row per requested age");
    {
        auto r = run_cli("gompertz" + inputs +
                         " --year 1962 --summer-year 1999 --out " +
                         q(g_dir / "gz_missing"));
        check(r.exit_code == 3, "requesting an absent season exits 3");
        check(r.err.find("S1999") != std::string::npos,
              "the absent season is named on stderr");
    }

    // --- gompertz: coefficients mode ------------------------------------------
    write_file(g_dir / "coeffs.csv",
               "sex,season,alpha,beta\n"
               "F,summer,-10.94,0.0975\n"
               "F,winter,-10.95,0.0989\n"
               "M,summer,-9.80,0.0869\n"
               "M,winter,-9.85,0.0888\n");
    {
        auto r = run_cli("gompertz --coefficients-from-file " +
                         q(g_dir / "coeffs.csv") + " --display --out " +
                         q(g_dir / "gz_coeffs"));
        check(r.exit_code == 0, "gompertz coefficients mode exits 0");
        check(r.out.find("Equivalent ages (women)") != std::string::npos &&
                  r.out.find("Equivalent ages (men)") != std::string::npos,
              "--display prints a table per sex");
        check(fs::exists(g_dir / "gz_coeffs" / "equivalence_F.csv"),
              "coefficients mode writes equivalence tables");
    }

    // --- partial inputs --------------------------------------------------------
    {
        // Drop exposure year 1965: W1964 (Jan-Apr 1965) becomes unusable.
        std::istringstream all(slurp(synth_a / "exposures.txt"));
        std::ostringstream trimmed;
        std::string line;
        while (std::getline(all, line)) {
            if (line.rfind("  1965", 0) == 0) continue;
            trimmed << line << "\n";
        }
        write_file(g_dir / "exposures_trimmed.txt", trimmed.str());
        auto r = run_cli("lifetable --deaths " + q(synth_a / "deaths.csv") +
                         " --exposures " + q(g_dir / "exposures_trimmed.txt") +
                         " --out " + q(g_dir / "lt_partial"));
        check(r.exit_code == 3, "missing exposure year exits 3");
        check(count_files(g_dir / "lt_partial", "lifetable_") == 16,
              "remaining 8 seasons still produce tables");
        check(r.err.find("W1964") != std::string::npos,
              "the skipped season is named on stderr");
    }

    std::cout << (checks_failed == 0 ? "all checks passed\n"
                                     : "some checks FAILED\n");
    fs::remove_all(g_dir);
    return checks_failed == 0 ? 0 : 1;
}
