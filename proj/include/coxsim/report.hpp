#pragma once

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace coxsim {

// One audited comparison: PASS iff the estimate (less its allowance) sits
// within the bound.
struct Margin {
    std::string label;
    double estimate = 0.0;
    double standard_error = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct KnRow {
    double kn = 0.0;
    double ks = 0.0;
    double dkw_99 = 0.0;
};

struct Report {
    std::string experiment;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<KnRow> per_kn;
    std::vector<Margin> margins;
    bool pass = false;
    // Negative controls are expected to FAIL.
    bool expect_fail = false;

    std::string verdict() const { return pass ? "PASS" : "FAIL"; }
    bool as_expected() const { return pass != expect_fail; }
};

nlohmann::ordered_json to_json(const Report& r);
std::string to_json_text(const Report& r);

/// Per-kn table "kn,ks,dkw_99" when the report has one, otherwise the margins
/// as "label,estimate,standard_error,bound,pass".
void write_csv(const Report& r, std::ostream& out);

}  // namespace coxsim
