#include "truncens/dataio.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace truncens {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw std::runtime_error("parse error at line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& field, std::size_t line) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        parse_fail(line, "malformed number '" + field + "'");
    }
    return value;
}

int parse_indicator(const std::string& field, std::size_t line, const char* name) {
    const double v = parse_number(field, line);
    if (v != 0.0 && v != 1.0) {
        parse_fail(line, std::string(name) + " must be 0 or 1, got '" + field + "'");
    }
    return static_cast<int>(v);
}

}  // namespace

std::vector<ObservedRecord> parse_records(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw std::runtime_error("parse error: empty input");
    }
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    const bool has_weight = line == "y,l,r,weight";
    if (!has_weight && line != "y,l,r") {
        parse_fail(lineno, "expected header 'y,l,r,weight' or 'y,l,r'");
    }

    std::vector<ObservedRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != (has_weight ? 4u : 3u)) {
            parse_fail(lineno, "expected " + std::to_string(has_weight ? 4 : 3) +
                                   " fields, got " + std::to_string(fields.size()));
        }
        ObservedRecord rec;
        rec.triple.y = parse_number(fields[0], lineno);
        rec.triple.l = parse_indicator(fields[1], lineno, "l");
        rec.triple.r = parse_indicator(fields[2], lineno, "r");
        rec.weight = has_weight ? parse_number(fields[3], lineno) : 1.0;
        if (rec.triple.l == 1 && rec.triple.r == 1) {
            parse_fail(lineno, "(l,r) = (1,1) is unobservable");
        }
        if (rec.weight < 0.0) {
            parse_fail(lineno, "negative weight");
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<ObservedRecord> parse_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return parse_records(in);
}

void write_records(std::ostream& out, std::span<const ObservedRecord> records) {
    out << "y,l,r,weight\n";
    char buf[64];
    for (const ObservedRecord& rec : records) {
        const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, rec.triple.y);
        out.write(buf, p - buf);
        out << ',' << rec.triple.l << ',' << rec.triple.r << ',';
        const auto [q, ec2] = std::to_chars(buf, buf + sizeof buf, rec.weight);
        out.write(buf, q - buf);
        out << '\n';
    }
}

AnnualCountsTable AnnualCountsTable::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    AnnualCountsTable t;
    t.study_years = j.at("study_years").get<std::vector<int>>();
    for (const auto& c : j.value("closures_founded_in_study", json::array())) {
        t.closures_founded_in_study.push_back(
            {c.at("founded").get<int>(), c.at("closed").get<int>(),
             c.at("count").get<double>()});
    }
    for (const auto& c : j.value("closures_founded_before", json::array())) {
        t.closures_founded_before.push_back(
            {c.at("closed").get<int>(), c.at("count").get<double>()});
    }
    for (const auto& c : j.value("foundations", json::array())) {
        t.foundations.push_back(
            {c.at("founded").get<int>(), c.at("count").get<double>()});
    }
    t.censored_foundations_include_uncensored =
        j.value("censored_foundations_include_uncensored", true);
    return t;
}

AnnualCountsTable AnnualCountsTable::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::vector<ObservedRecord> expand_annual_counts(const AnnualCountsTable& table,
                                                 const StudyWindow& w) {
    const std::size_t ns = table.study_years.size();
    if (ns == 0) {
        throw std::invalid_argument("annual counts: no study years");
    }
    for (std::size_t i = 1; i < ns; ++i) {
        if (table.study_years[i] != table.study_years[i - 1] + 1) {
            throw std::invalid_argument("annual counts: study years must be contiguous");
        }
    }
    if (static_cast<double>(ns) != w.s) {
        throw std::invalid_argument(
            "annual counts: s must equal the number of study years");
    }
    const int first_year = table.study_years.front();
    const auto year_index = [&](int year) {  // 1-based study-year index
        const int k = year - first_year + 1;
        if (k < 1 || k > static_cast<int>(ns)) {
            throw std::invalid_argument("annual counts: year " + std::to_string(year) +
                                        " outside the study");
        }
        return k;
    };

    std::vector<ObservedRecord> records;
    for (const InStudyClosure& c : table.closures_founded_in_study) {
        if (c.count < 0.0) throw std::invalid_argument("annual counts: negative count");
        const int kf = year_index(c.founded);
        const int kc = year_index(c.closed);
        if (kc < kf) {
            throw std::invalid_argument("annual counts: closure before foundation");
        }
        if (c.count == 0.0) continue;
        records.push_back({{static_cast<double>(kc - kf), 0, 0}, c.count});
    }
    for (const YearCount& c : table.closures_founded_before) {
        if (c.count < 0.0) throw std::invalid_argument("annual counts: negative count");
        if (c.count == 0.0) continue;
        const int k = year_index(c.year);
        records.push_back({{k - 0.5, 1, 0}, c.count});
    }
    for (const YearCount& c : table.foundations) {
        if (c.count < 0.0) throw std::invalid_argument("annual counts: negative count");
        const int k = year_index(c.year);
        double count = c.count;
        if (table.censored_foundations_include_uncensored) {
            for (const InStudyClosure& u : table.closures_founded_in_study) {
                if (u.founded == c.year) count -= u.count;
            }
        }
        if (count < 0.0) {
            throw std::invalid_argument(
                "annual counts: censored count for year " + std::to_string(c.year) +
                " is negative after excluding uncensored closures");
        }
        if (count == 0.0) continue;
        records.push_back({{w.s - k + 0.5, 0, 1}, count});
    }
    if (records.empty()) {
        throw std::invalid_argument("annual counts: table contains no observations");
    }
    return records;
}

const AnnualCountsTable& enterprise_table() {
    static const AnnualCountsTable table = [] {
        AnnualCountsTable t;
        t.study_years = {2018, 2019};
        t.closures_founded_in_study = {{2018, 2019, 50432}};
        t.closures_founded_before = {{2018, 246004}, {2019, 315320}};
        t.foundations = {{2018, 219417}, {2019, 248020}};
        t.censored_foundations_include_uncensored = true;
        return t;
    }();
    return table;
}

}  // namespace truncens
