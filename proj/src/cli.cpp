#include "pslife/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <json.hpp>

#include "pslife/gompertz.hpp"
#include "pslife/graduate.hpp"
#include "pslife/ingest.hpp"
#include "pslife/numeric.hpp"
#include "pslife/synth.hpp"

namespace pslife {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Generic table emission (CSV or JSON, chosen by RunConfig::format)
// ---------------------------------------------------------------------------

// monostate = empty cell (CSV: empty field, JSON: null)
using Cell = std::variant<std::monostate, std::string, double, std::int64_t>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string csv_cell(const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return "";
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return std::to_string(std::get<std::int64_t>(cell));
}

ordered_json json_cell(const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return nullptr;
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* d = std::get_if<double>(&cell)) return *d;
    return std::get<std::int64_t>(cell);
}

std::ofstream open_output(const std::filesystem::path& dir,
                          const std::string& filename) {
    std::filesystem::create_directories(dir);
    const auto path = dir / filename;
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) {
        throw std::runtime_error("cannot write output file: " + path.string());
    }
    return out;
}

// Writes <stem>.csv or <stem>.json under config.out_dir and returns the name.
std::string write_table(const RunConfig& config, const std::string& stem,
                        const Table& table, ordered_json meta) {
    if (config.format == "csv") {
        auto out = open_output(config.out_dir, stem + ".csv");
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            out << (c ? "," : "") << table.columns[c];
        }
        out << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << (c ? "," : "") << csv_cell(row[c]);
            }
            out << "\n";
        }
        return stem + ".csv";
    }
    if (config.format == "json") {
        ordered_json doc;
        meta["artifact"] = stem;
        doc["meta"] = std::move(meta);
        ordered_json rows = ordered_json::array();
        for (const auto& row : table.rows) {
            ordered_json obj;
            for (std::size_t c = 0; c < row.size(); ++c) {
                obj[table.columns[c]] = json_cell(row[c]);
            }
            rows.push_back(std::move(obj));
        }
        doc["rows"] = std::move(rows);
        auto out = open_output(config.out_dir, stem + ".json");
        out << doc.dump(2) << "\n";
        return stem + ".json";
    }
    throw std::runtime_error("unknown output format '" + config.format +
                             "', expected csv or json");
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

std::vector<Sex> selected_sexes(const RunConfig& config) {
    if (config.sex == "both") return {Sex::Female, Sex::Male};
    if (config.sex == "F") return {Sex::Female};
    if (config.sex == "M") return {Sex::Male};
    throw std::runtime_error("bad --sex value '" + config.sex +
                             "', expected F, M or both");
}

std::string sex_str(Sex sex) { return std::string(1, sex_code(sex)); }

std::string kind_str(SeasonKind kind) {
    return kind == SeasonKind::Summer ? "summer" : "winter";
}

std::string ax_str(AxConvention ax) {
    return ax == AxConvention::Midpoint ? "midpoint" : "infant-adjusted";
}

std::string pairing_str(Pairing pairing) {
    return pairing == Pairing::PrevSummer ? "prev-summer" : "next-summer";
}

SurfaceBuild load_surface(const RunConfig& config, std::ostream& diag) {
    auto records = parse_deaths(config.deaths_path);
    auto exposures = parse_exposures(config.exposures_path);
    auto build = build_surface(records, exposures);

    int summers = 0, winters = 0;
    for (const auto& s : build.span.seasons) {
        (s.kind == SeasonKind::Summer ? summers : winters)++;
    }
    diag << "seasons retained: " << build.span.seasons.size() << " (" << summers
         << " summers, " << winters << " winters)";
    if (!build.span.seasons.empty()) {
        diag << ", " << build.span.seasons.front().id() << " .. "
             << build.span.seasons.back().id();
    }
    diag << "\n";
    if (build.span.burn_in_winter) {
        diag << "burn-in winter excluded: " << build.span.burn_in_winter->id()
             << " (no preceding summer to pair with)\n";
    }
    for (const auto& s : build.span.incomplete) {
        diag << "boundary season discarded (not fully covered): " << s.id() << "\n";
    }
    for (const auto& [season, reason] : build.skipped) {
        diag << "season skipped: " << season.id() << " (" << reason << ")\n";
    }
    return build;
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// 12345.6 -> "12,345.6", for the rounded display table only.
std::string group_thousands(const std::string& fixed) {
    auto dot = fixed.find('.');
    std::string intpart = dot == std::string::npos ? fixed : fixed.substr(0, dot);
    std::string rest = dot == std::string::npos ? "" : fixed.substr(dot);
    std::string sign;
    if (!intpart.empty() && intpart[0] == '-') {
        sign = "-";
        intpart.erase(0, 1);
    }
    std::string grouped;
    int count = 0;
    for (auto it = intpart.rbegin(); it != intpart.rend(); ++it) {
        if (count && count % 3 == 0) grouped.push_back(',');
        grouped.push_back(*it);
        ++count;
    }
    std::reverse(grouped.begin(), grouped.end());
    return sign + grouped + rest;
}

}  // namespace

// ---------------------------------------------------------------------------
// ingest-check
// ---------------------------------------------------------------------------

int cmd_ingest_check(const RunConfig& config, std::ostream& out, std::ostream& diag) {
    try {
        auto records = parse_deaths(config.deaths_path);
        auto exposures = parse_exposures(config.exposures_path);
        if (records.empty()) {
            diag << "error: deaths file has no data rows\n";
            return kExitInputError;
        }

        out << "deaths records: " << records.size() << " ("
            << MonthKey{records.front().year, records.front().month}.id() << " .. "
            << MonthKey{records.back().year, records.back().month}.id() << ")\n";
        auto years = exposures.years();
        out << "exposure years: " << years.size() << " (" << years.front() << " .. "
            << years.back() << ")\n";

        std::ostringstream span_report;
        auto build = load_surface(config, span_report);
        out << span_report.str();

        if (build.surface.empty()) {
            diag << "error: no usable pseudoseason in the input span\n";
            return kExitInputError;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// ---------------------------------------------------------------------------
// lifetable
// ---------------------------------------------------------------------------

namespace {

Table life_table_as_table(const LifeTable& t) {
    Table table;
    table.columns = {"age_group", "age_label", "age_lower_years", "mx_per_py",
                     "ax_years",  "qx",        "lx",              "dx",
                     "Lx_py",     "Tx_py",     "ex_years"};
    for (const auto& g : age_groups()) {
        const int i = g.index;
        table.rows.push_back({static_cast<std::int64_t>(i), g.label(), g.lower,
                              t.Mx[i], t.ax[i], t.qx[i], t.lx[i], t.dx[i], t.Lx[i],
                              t.Tx[i], t.ex[i]});
    }
    return table;
}

}  // namespace

int cmd_lifetable(const RunConfig& config, std::ostream& diag) {
    SurfaceBuild build;
    std::vector<Sex> sexes;
    try {
        sexes = selected_sexes(config);
        build = load_surface(config, diag);
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    if (build.surface.empty()) {
        diag << "error: no usable pseudoseason in the input span\n";
        return kExitInputError;
    }

    bool partial = !build.skipped.empty();
    int written = 0;
    std::vector<E0Point> e0_points;

    for (Sex sex : sexes) {
        for (const auto& season : build.surface.seasons()) {
            if (!build.surface.contains(season, sex)) continue;
            try {
                auto mx = death_rates(build.surface, season, sex);
                auto table = build_life_table(mx, config.ax);
                ordered_json meta{{"season", season.id()},
                                  {"sex", sex_str(sex)},
                                  {"ax_convention", ax_str(config.ax)}};
                write_table(config, "lifetable_" + season.id() + "_" + sex_str(sex),
                            life_table_as_table(table), std::move(meta));
                e0_points.push_back({season, sex, table.e0()});
                ++written;
            } catch (const std::exception& e) {
                diag << "life table skipped for " << season.id() << "/"
                     << sex_str(sex) << ": " << e.what() << "\n";
                partial = true;
            }
        }
    }
    if (written == 0) {
        diag << "error: no life table could be produced\n";
        return kExitInputError;
    }

    Table e0_table;
    e0_table.columns = {"season", "kind", "label_year", "sex", "e0_years"};
    for (const auto& p : e0_points) {
        e0_table.rows.push_back({p.season.id(), kind_str(p.season.kind),
                                 static_cast<std::int64_t>(p.season.label_year),
                                 sex_str(p.sex), p.e0});
    }
    write_table(config, "e0_series", e0_table,
                ordered_json{{"ax_convention", ax_str(config.ax)}});

    try {
        auto gaps = seasonal_gap(e0_points);
        Table series;
        series.columns = {"year", "sex", "summer_e0_years", "winter_e0_years",
                          "gap_years"};
        for (const auto& p : gaps.points) {
            series.rows.push_back({static_cast<std::int64_t>(p.year), sex_str(p.sex),
                                   p.summer_e0, p.winter_e0, p.gap});
        }
        write_table(config, "gap_series", series,
                    ordered_json{{"ax_convention", ax_str(config.ax)}});

        Table summary;
        summary.columns = {"sex", "n_pairs", "mean_gap_years", "sd_gap_years"};
        for (const auto& s : gaps.summary) {
            summary.rows.push_back({sex_str(s.sex), static_cast<std::int64_t>(s.n),
                                    s.mean, s.sd});
        }
        write_table(config, "gap_summary", summary,
                    ordered_json{{"ax_convention", ax_str(config.ax)}});
    } catch (const std::invalid_argument& e) {
        diag << "gap outputs not produced: " << e.what() << "\n";
    }

    return partial ? kExitPartialOutput : kExitOk;
}

// ---------------------------------------------------------------------------
// ph
// ---------------------------------------------------------------------------

int cmd_ph(const RunConfig& config, std::ostream& diag) {
    SurfaceBuild build;
    std::vector<Sex> sexes;
    try {
        sexes = selected_sexes(config);
        build = load_surface(config, diag);
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    if (build.surface.empty()) {
        diag << "error: no usable pseudoseason in the input span\n";
        return kExitInputError;
    }

    bool partial = !build.skipped.empty();
    std::vector<ProportionalHazardResult> by_year;
    std::vector<ProportionalHazardResult> pooled;
    std::vector<RatioMatrix> matrices;

    for (Sex sex : sexes) {
        try {
            auto rows = per_year_ph(build.surface, sex, config.age_floor,
                                    config.pairing);
            auto pool = estimate_ph_pooled(build.surface, sex, config.age_floor,
                                           config.pairing);
            matrices.push_back(ratio_matrix(build.surface, sex));
            by_year.insert(by_year.end(), rows.begin(), rows.end());
            pooled.push_back(pool);
        } catch (const std::exception& e) {
            diag << "hazard ratio skipped for sex " << sex_str(sex) << ": "
                 << e.what() << "\n";
            partial = true;
        }
    }
    if (pooled.empty()) {
        diag << "error: no hazard ratio could be estimated\n";
        return kExitInputError;
    }

    const ordered_json meta{{"age_floor", config.age_floor},
                            {"pairing", pairing_str(config.pairing)}};

    Table year_table;
    year_table.columns = {"year", "sex", "P", "R2", "n_ages"};
    for (const auto& r : by_year) {
        year_table.rows.push_back({static_cast<std::int64_t>(*r.year),
                                   sex_str(r.sex), r.P, r.R2,
                                   static_cast<std::int64_t>(r.n_ages)});
    }
    write_table(config, "ph_by_year", year_table, meta);

    Table pooled_table;
    pooled_table.columns = {"sex", "P", "R2", "n_ages", "n_years"};
    for (const auto& r : pooled) {
        pooled_table.rows.push_back({sex_str(r.sex), r.P, r.R2,
                                     static_cast<std::int64_t>(r.n_ages),
                                     static_cast<std::int64_t>(r.n_years)});
    }
    write_table(config, "ph_pooled", pooled_table, meta);

    for (const auto& matrix : matrices) {
        Table t;
        t.columns = {"year",        "age_group",    "age_label", "winter_mx_per_py",
                     "summer_mx_per_py", "ratio",   "flagged"};
        for (const auto& c : matrix.cells) {
            Cell ratio = c.flagged ? Cell{std::monostate{}} : Cell{c.ratio};
            t.rows.push_back({static_cast<std::int64_t>(c.year),
                              static_cast<std::int64_t>(c.age_group),
                              age_groups()[c.age_group].label(), c.winter_mx,
                              c.summer_mx, ratio,
                              static_cast<std::int64_t>(c.flagged ? 1 : 0)});
        }
        write_table(config, "ratio_matrix_" + sex_str(matrix.sex), t,
                    ordered_json{{"sex", sex_str(matrix.sex)}});
    }

    return partial ? kExitPartialOutput : kExitOk;
}

// ---------------------------------------------------------------------------
// gompertz
// ---------------------------------------------------------------------------

namespace {

struct SeasonFit {
    Pseudoseason season;
    Sex sex;
    GompertzFit fit;
};

// "sex,season,alpha,beta" rows, e.g. "F,winter,-10.95,0.0989".
std::map<std::pair<char, SeasonKind>, GompertzFit> parse_coefficients(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open coefficients file: " + path.string());
    }
    std::map<std::pair<char, SeasonKind>, GompertzFit> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "sex,season,alpha,beta") {
                throw std::runtime_error(path.string() +
                                         ": bad header, expected sex,season,alpha,beta");
            }
            continue;
        }
        std::istringstream iss(line);
        std::string sex_tok, season_tok, alpha_tok, beta_tok;
        if (!std::getline(iss, sex_tok, ',') || !std::getline(iss, season_tok, ',') ||
            !std::getline(iss, alpha_tok, ',') || !std::getline(iss, beta_tok)) {
            throw std::runtime_error(path.string() + " line " +
                                     std::to_string(line_no) + ": expected 4 fields");
        }
        if (sex_tok.size() != 1 || (sex_tok != "F" && sex_tok != "M")) {
            throw std::runtime_error(path.string() + " line " +
                                     std::to_string(line_no) + ": bad sex");
        }
        SeasonKind kind;
        if (season_tok == "summer") kind = SeasonKind::Summer;
        else if (season_tok == "winter") kind = SeasonKind::Winter;
        else {
            throw std::runtime_error(path.string() + " line " +
                                     std::to_string(line_no) +
                                     ": bad season, expected summer or winter");
        }
        GompertzFit fit;
        try {
            fit.alpha = std::stod(alpha_tok);
            fit.beta = std::stod(beta_tok);
        } catch (const std::exception&) {
            throw std::runtime_error(path.string() + " line " +
                                     std::to_string(line_no) + ": bad number");
        }
        fit.converged = true;
        if (!out.emplace(std::make_pair(sex_tok[0], kind), fit).second) {
            throw std::runtime_error(path.string() + " line " +
                                     std::to_string(line_no) + ": duplicate row");
        }
    }
    return out;
}

Table equivalence_as_table(const std::vector<EquivalenceRow>& rows) {
    Table t;
    t.columns = {"age_years", "summer_mx_per_100k", "winter_equivalent_age_years",
                 "winter_mx_per_100k", "summer_equivalent_age_years"};
    for (const auto& r : rows) {
        t.rows.push_back({r.age, r.summer_mx * 1e5, r.winter_equiv_age,
                          r.winter_mx * 1e5, r.summer_equiv_age});
    }
    return t;
}

void display_equivalence(std::ostream& out, Sex sex,
                         const std::vector<EquivalenceRow>& rows) {
    out << "Equivalent ages (" << (sex == Sex::Female ? "women" : "men") << ")\n";
    char header[160];
    std::snprintf(header, sizeof(header), "%6s %20s %22s %20s %22s\n", "age",
                  "summer mx /100k", "winter equiv. age", "winter mx /100k",
                  "summer equiv. age");
    out << header;
    for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%6s %20s %22s %20s %22s\n",
                      format_fixed(r.age, 0).c_str(),
                      group_thousands(format_fixed(r.summer_mx * 1e5, 1)).c_str(),
                      format_fixed(r.winter_equiv_age, 2).c_str(),
                      group_thousands(format_fixed(r.winter_mx * 1e5, 1)).c_str(),
                      format_fixed(r.summer_equiv_age, 2).c_str());
        out << line;
    }
}

}  // namespace

int cmd_gompertz(const RunConfig& config, std::ostream& out, std::ostream& diag) {
    std::vector<Sex> sexes;
    try {
        sexes = selected_sexes(config);
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    // Coefficients mode: no fitting, just the equivalence tables.
    if (!config.coefficients_path.empty()) {
        try {
            auto coeffs = parse_coefficients(config.coefficients_path);
            for (Sex sex : sexes) {
                auto summer = coeffs.find({sex_code(sex), SeasonKind::Summer});
                auto winter = coeffs.find({sex_code(sex), SeasonKind::Winter});
                if (summer == coeffs.end() || winter == coeffs.end()) {
                    throw std::runtime_error(
                        "coefficients file lacks summer+winter rows for sex " +
                        sex_str(sex));
                }
                auto rows = equivalence_table(summer->second, winter->second,
                                              config.ages);
                write_table(config, "equivalence_" + sex_str(sex),
                            equivalence_as_table(rows),
                            ordered_json{{"sex", sex_str(sex)},
                                         {"source", "coefficients-file"}});
                if (config.display) display_equivalence(out, sex, rows);
            }
            return kExitOk;
        } catch (const std::exception& e) {
            diag << "error: " << e.what() << "\n";
            return kExitInputError;
        }
    }

    SurfaceBuild build;
    try {
        build = load_surface(config, diag);
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    if (build.surface.empty()) {
        diag << "error: no usable pseudoseason in the input span\n";
        return kExitInputError;
    }

    std::vector<Pseudoseason> wanted;
    for (int y : config.summer_years) wanted.push_back(Pseudoseason::summer(y));
    for (int y : config.winter_years) wanted.push_back(Pseudoseason::winter(y));
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    if (wanted.empty()) wanted = build.surface.seasons();

    bool partial = !build.skipped.empty();
    bool nonconvergence = false;
    std::vector<SeasonFit> fits;

    for (Sex sex : sexes) {
        for (const auto& season : wanted) {
            if (!build.surface.contains(season, sex)) {
                diag << "fit skipped: season " << season.id()
                     << " not on the data surface\n";
                partial = true;
                continue;
            }
            try {
                auto data = gompertz_cells(build.surface, season, sex,
                                           config.age_floor);
                fits.push_back({season, sex, fit_gompertz(data)});
            } catch (const FitNonConvergence& e) {
                diag << "fit failed for " << season.id() << "/" << sex_str(sex)
                     << ": " << e.what() << "\n";
                diag << "  deviance trace (last 5):";
                const auto& tr = e.deviance_trace;
                for (std::size_t i = tr.size() > 5 ? tr.size() - 5 : 0;
                     i < tr.size(); ++i) {
                    diag << " " << tr[i];
                }
                diag << "\n";
                nonconvergence = true;
            } catch (const std::exception& e) {
                diag << "fit skipped for " << season.id() << "/" << sex_str(sex)
                     << ": " << e.what() << "\n";
                partial = true;
            }
        }
    }
    if (fits.empty()) {
        diag << "error: no season could be fitted\n";
        return nonconvergence ? kExitNumericalError : kExitInputError;
    }

    Table fit_table;
    fit_table.columns = {"season", "kind", "label_year", "sex",
                         "alpha",  "beta", "deviance",   "iterations"};
    for (const auto& f : fits) {
        fit_table.rows.push_back(
            {f.season.id(), kind_str(f.season.kind),
             static_cast<std::int64_t>(f.season.label_year), sex_str(f.sex),
             f.fit.alpha, f.fit.beta, f.fit.deviance,
             static_cast<std::int64_t>(f.fit.iterations)});
    }
    write_table(config, "gompertz_fits", fit_table,
                ordered_json{{"age_floor", config.age_floor}});

    // Equivalence table per sex when the request singles out one summer and
    // one winter fit.
    for (Sex sex : sexes) {
        std::vector<const SeasonFit*> summer, winter;
        for (const auto& f : fits) {
            if (f.sex != sex) continue;
            (f.season.kind == SeasonKind::Summer ? summer : winter).push_back(&f);
        }
        if (summer.size() != 1 || winter.size() != 1) {
            diag << "equivalence table for sex " << sex_str(sex)
                 << " not produced (need exactly one summer and one winter fit, have "
                 << summer.size() << "+" << winter.size() << ")\n";
            continue;
        }
        auto rows = equivalence_table(summer[0]->fit, winter[0]->fit, config.ages);
        write_table(config, "equivalence_" + sex_str(sex),
                    equivalence_as_table(rows),
                    ordered_json{{"sex", sex_str(sex)},
                                 {"summer", summer[0]->season.id()},
                                 {"winter", winter[0]->season.id()}});
        if (config.display) display_equivalence(out, sex, rows);
    }

    if (nonconvergence) return kExitNumericalError;
    return partial ? kExitPartialOutput : kExitOk;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const RunConfig& config, std::ostream& diag) {
    try {
        Scenario scenario;
        if (!config.scenario_path.empty()) {
            scenario = parse_scenario(config.scenario_path);
        }
        if (config.seed_override) scenario.seed = *config.seed_override;
        scenario.validate();

        auto output = generate(scenario);

        {
            auto out = open_output(config.out_dir, "deaths.csv");
            write_deaths_csv(out, output.deaths);
        }
        {
            auto out = open_output(config.out_dir, "exposures.txt");
            out << output.exposures_text;
        }

        diag << "wrote " << (config.out_dir / "deaths.csv").string() << " ("
             << output.deaths.size() << " records) and "
             << (config.out_dir / "exposures.txt").string() << " (seed "
             << scenario.seed << ")\n";
        return kExitOk;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace pslife
