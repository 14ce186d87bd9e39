#include "pslife/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "pslife/numeric.hpp"

namespace pslife {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Splits into lines on LF, tolerating a trailing CR per line.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            if (pos < text.size()) lines.push_back(text.substr(pos));
            break;
        }
        std::string line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

[[noreturn]] void fail_at(const std::string& origin, std::size_t line_no,
                          const std::string& what) {
    throw std::runtime_error(origin + " line " + std::to_string(line_no) +
                             ": " + what);
}

// Whole-token integer parse; rejects stray characters and empty fields.
bool parse_int(const std::string& tok, long long& out) {
    if (tok.empty()) return false;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

bool parse_num(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

constexpr const char* kDeathsHeader = "year,month,sex,age_group,deaths";

}  // namespace

std::vector<DeathsRecord> parse_deaths(const std::filesystem::path& path) {
    return parse_deaths_text(read_file(path), path.string());
}

std::vector<DeathsRecord> parse_deaths_text(const std::string& text,
                                            const std::string& origin) {
    auto lines = split_lines(text);
    if (lines.empty()) {
        throw std::runtime_error(origin + ": empty deaths file");
    }
    if (lines[0] != kDeathsHeader) {
        fail_at(origin, 1,
                "bad header, expected \"" + std::string(kDeathsHeader) + "\"");
    }

    std::vector<DeathsRecord> records;
    // (year, month, sex, group) -> first line number, for duplicate reporting
    std::map<std::tuple<int, int, Sex, int>, std::size_t> seen;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string& line = lines[i];
        if (line.empty()) continue;  // ignore trailing blank lines

        auto fields = split_csv(line);
        if (fields.size() != 5) {
            fail_at(origin, line_no,
                    "expected 5 fields, got " + std::to_string(fields.size()));
        }

        long long year, month, group, deaths;
        if (!parse_int(fields[0], year)) fail_at(origin, line_no, "bad year '" + fields[0] + "'");
        if (!parse_int(fields[1], month)) fail_at(origin, line_no, "bad month '" + fields[1] + "'");
        if (month < 1 || month > 12) fail_at(origin, line_no, "month out of range");
        if (fields[2].size() != 1) fail_at(origin, line_no, "bad sex '" + fields[2] + "'");
        Sex sex;
        try {
            sex = sex_from_code(fields[2][0]);
        } catch (const std::invalid_argument&) {
            fail_at(origin, line_no, "bad sex '" + fields[2] + "'");
        }
        if (!parse_int(fields[3], group)) fail_at(origin, line_no, "bad age_group '" + fields[3] + "'");
        if (group < 0 || group >= kAgeGroupCount) {
            fail_at(origin, line_no, "age_group out of range (0-" +
                                         std::to_string(kAgeGroupCount - 1) + ")");
        }
        if (!parse_int(fields[4], deaths)) fail_at(origin, line_no, "bad deaths '" + fields[4] + "'");
        if (deaths < 0) fail_at(origin, line_no, "negative deaths");

        auto key = std::make_tuple(static_cast<int>(year), static_cast<int>(month),
                                   sex, static_cast<int>(group));
        auto [it, inserted] = seen.emplace(key, line_no);
        if (!inserted) {
            fail_at(origin, line_no,
                    "duplicate record for " + std::to_string(year) + "-" +
                        std::to_string(month) + "/" + sex_code(sex) +
                        "/age_group " + std::to_string(group) +
                        " (first seen at line " + std::to_string(it->second) + ")");
        }

        records.push_back({static_cast<int>(year), static_cast<int>(month), sex,
                           static_cast<int>(group), deaths});
    }

    std::sort(records.begin(), records.end());
    return records;
}

void write_deaths_csv(std::ostream& out, std::vector<DeathsRecord> records) {
    std::sort(records.begin(), records.end());
    out << kDeathsHeader << "\n";
    for (const auto& r : records) {
        out << r.year << ',' << r.month << ',' << sex_code(r.sex) << ','
            << r.age_group << ',' << r.deaths << "\n";
    }
}

void AnnualExposureTable::set(int year, int age, Sex sex, double person_years) {
    if (age < 0 || age > kMaxSingleAge) {
        throw std::invalid_argument("exposure age out of range: " +
                                    std::to_string(age));
    }
    auto& row = rows_[year];
    int s = sex == Sex::Female ? 0 : 1;
    row.by_sex[s][age] = person_years;
    row.present[s][age] = true;
}

bool AnnualExposureTable::has_year(int year) const { return rows_.count(year) > 0; }

double AnnualExposureTable::at(int year, int age, Sex sex) const {
    auto it = rows_.find(year);
    if (it == rows_.end() || age < 0 || age > kMaxSingleAge ||
        !it->second.present[sex == Sex::Female ? 0 : 1][age]) {
        throw std::out_of_range("no exposure for year " + std::to_string(year) +
                                ", age " + std::to_string(age));
    }
    return it->second.by_sex[sex == Sex::Female ? 0 : 1][age];
}

std::vector<int> AnnualExposureTable::years() const {
    std::vector<int> out;
    out.reserve(rows_.size());
    for (const auto& [year, _] : rows_) out.push_back(year);
    return out;
}

AnnualExposureTable parse_exposures(const std::filesystem::path& path) {
    return parse_exposures_text(read_file(path), path.string());
}

AnnualExposureTable parse_exposures_text(const std::string& text,
                                         const std::string& origin) {
    auto lines = split_lines(text);
    AnnualExposureTable table;
    // (year, age) seen counts for duplicate/completeness checks
    std::map<int, std::array<int, kMaxSingleAge + 1>> seen;
    bool in_data = false;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::istringstream iss(lines[i]);
        std::vector<std::string> toks;
        std::string tok;
        while (iss >> tok) toks.push_back(tok);
        if (toks.empty()) {
            if (!in_data) continue;  // blank preamble line
            continue;                // stray blank line; harmless
        }

        long long year;
        if (!parse_int(toks[0], year)) {
            if (!in_data) continue;  // title / column-header preamble
            fail_at(origin, line_no, "bad year '" + toks[0] + "'");
        }
        in_data = true;

        if (toks.size() != 5) {
            fail_at(origin, line_no,
                    "expected 5 columns (Year Age Female Male Total), got " +
                        std::to_string(toks.size()));
        }

        long long age;
        if (toks[1] == std::to_string(kMaxSingleAge) + "+") {
            age = kMaxSingleAge;
        } else if (!parse_int(toks[1], age) || age < 0 || age > kMaxSingleAge) {
            fail_at(origin, line_no, "bad age '" + toks[1] + "'");
        }

        double female, male, total;
        if (!parse_num(toks[2], female)) fail_at(origin, line_no, "non-numeric exposure '" + toks[2] + "'");
        if (!parse_num(toks[3], male)) fail_at(origin, line_no, "non-numeric exposure '" + toks[3] + "'");
        if (!parse_num(toks[4], total)) fail_at(origin, line_no, "non-numeric exposure '" + toks[4] + "'");
        (void)total;  // column is required but its value is not used
        if (!(female > 0.0) || !(male > 0.0)) {
            fail_at(origin, line_no, "non-positive exposure");
        }

        auto& counts = seen.try_emplace(static_cast<int>(year)).first->second;
        if (++counts[age] > 1) {
            fail_at(origin, line_no,
                    "duplicate age " + toks[1] + " for year " + toks[0]);
        }

        table.set(static_cast<int>(year), static_cast<int>(age), Sex::Female, female);
        table.set(static_cast<int>(year), static_cast<int>(age), Sex::Male, male);
    }

    if (!in_data) {
        throw std::runtime_error(origin + ": no exposure data rows found");
    }
    for (const auto& [year, counts] : seen) {
        int n = 0;
        for (int c : counts) n += c;
        if (n != kMaxSingleAge + 1) {
            throw std::runtime_error(
                origin + ": year " + std::to_string(year) + " has " +
                std::to_string(n) + " of " + std::to_string(kMaxSingleAge + 1) +
                " age rows");
        }
    }
    return table;
}

AnnualGroupExposure aggregate_ages(const AnnualExposureTable& table) {
    AnnualGroupExposure out;
    for (int year : table.years()) {
        for (Sex sex : kSexes) {
            std::array<CompensatedSum, kAgeGroupCount> sums;
            for (int age = 0; age <= kMaxSingleAge; ++age) {
                sums[age_group_of(age)].add(table.at(year, age, sex));
            }
            auto& groups = out[YearSex{year, sex}];
            for (int g = 0; g < kAgeGroupCount; ++g) groups[g] = sums[g].value();
        }
    }
    return out;
}

}  // namespace pslife
