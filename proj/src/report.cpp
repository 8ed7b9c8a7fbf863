#include "coxsim/report.hpp"

#include "coxsim/format.hpp"

namespace coxsim {

namespace {

// JSON has no inf/nan; keep them as strings rather than silently nulling.
nlohmann::ordered_json number(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

nlohmann::ordered_json to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["parameters"] = r.parameters;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.per_kn)
        rows.push_back({{"kn", number(row.kn)}, {"ks", number(row.ks)}, {"dkw_99", number(row.dkw_99)}});
    j["per-kn"] = rows;
    j["verdict"] = r.verdict();
    if (r.expect_fail) j["expected_verdict"] = "FAIL";
    auto margins = nlohmann::ordered_json::array();
    for (const auto& m : r.margins)
        margins.push_back({{"label", m.label},
                           {"estimate", number(m.estimate)},
                           {"standard_error", number(m.standard_error)},
                           {"bound", number(m.bound)},
                           {"pass", m.pass}});
    j["margins"] = margins;
    return j;
}

std::string to_json_text(const Report& r) { return to_json(r).dump(2) + "\n"; }

void write_csv(const Report& r, std::ostream& out) {
    if (!r.per_kn.empty()) {
        out << "kn,ks,dkw_99\n";
        for (const auto& row : r.per_kn)
            out << format_number(row.kn) << ',' << format_number(row.ks) << ',' << format_number(row.dkw_99) << '\n';
        return;
    }
    out << "label,estimate,standard_error,bound,pass\n";
    for (const auto& m : r.margins)
        out << csv_field(m.label) << ',' << format_number(m.estimate) << ',' << format_number(m.standard_error)
            << ',' << format_number(m.bound) << ',' << (m.pass ? "true" : "false") << '\n';
}

}  // namespace coxsim
