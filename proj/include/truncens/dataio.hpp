#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "truncens/estimator.hpp"

namespace truncens {

// CSV record files: header "y,l,r,weight", weight column optional
// (defaults to 1).
std::vector<ObservedRecord> parse_records(std::istream& in);
std::vector<ObservedRecord> parse_records_file(const std::string& path);
void write_records(std::ostream& out, std::span<const ObservedRecord> records);

// Annual aggregated counts in the layout of the enterprise survey:
// closures split by whether the founding year falls inside the study,
// plus foundation counts whose units survive the study end.
struct InStudyClosure {
    int founded = 0;  // calendar year
    int closed = 0;
    double count = 0.0;
};
struct YearCount {
    int year = 0;
    double count = 0.0;
};

struct AnnualCountsTable {
    std::vector<int> study_years;                    // contiguous; length = s
    std::vector<InStudyClosure> closures_founded_in_study;
    std::vector<YearCount> closures_founded_before;  // keyed by closure year
    std::vector<YearCount> foundations;              // keyed by founding year
    // Raw foundation counts may already contain the units that also closed
    // within the study; when set, those are subtracted before emitting
    // censored records.
    bool censored_foundations_include_uncensored = true;

    static AnnualCountsTable from_json_file(const std::string& path);
    static AnnualCountsTable from_json_text(const std::string& text);
};

// Apply the midpoint-of-year conventions and emit weighted records:
//   founded j / closed k in study   -> (y = k - j,            l=0, r=0)
//   founded before, closed in year k-th study year
//                                   -> (y = k - 0.5,          l=1, r=0)
//   founded in k-th study year, open at study end
//                                   -> (y = s - k + 0.5,      l=0, r=1)
// Zero-count cells are dropped.  Throws when a censored count turns
// negative after the exclusion subtraction or no observation remains.
std::vector<ObservedRecord> expand_annual_counts(const AnnualCountsTable& table,
                                                 const StudyWindow& w);

// The bundled enterprise survey table (two study years).
const AnnualCountsTable& enterprise_table();

}  // namespace truncens
