#include "seqkern/table_io.hpp"

#include <charconv>
#include <cmath>

namespace seqkern {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

static std::string row_fields(const RiskRow& r, bool json) {
    const char* q = json ? "\"" : "";
    std::string s;
    auto field = [&](const char* name, const std::string& value, bool quoted, bool last) {
        if (json) {
            s += "\"";
            s += name;
            s += "\": ";
            if (quoted) s += q;
            s += value;
            if (quoted) s += q;
        } else {
            s += quoted ? csv_escape(value) : value;
        }
        if (!last) s += json ? ", " : ",";
    };
    field("n", std::to_string(r.n), false, false);
    field("estimator", to_string(r.estimator), true, false);
    field("noise", to_string(r.noise), true, false);
    field("M", std::to_string(r.M), false, false);
    field("risk", format_double(r.risk), false, false);
    field("std_error", format_double(r.std_error), false, false);
    field("miss_rate", format_double(r.miss_rate), false, false);
    // JSON has no NaN literal; emit it as a string there.
    field("mean_tau_over_H", format_double(r.mean_tau_over_H),
          json && std::isnan(r.mean_tau_over_H), false);
    field("seed", std::to_string(r.seed), false, true);
    return s;
}

std::string to_csv(const RiskTable& table) {
    std::string out = "n,estimator,noise,M,risk,std_error,miss_rate,mean_tau_over_H,seed\n";
    for (const auto& r : table.rows) {
        out += row_fields(r, /*json=*/false);
        out += "\n";
    }
    return out;
}

std::string to_json(const RiskTable& table) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out += "  {";
        out += row_fields(table.rows[i], /*json=*/true);
        out += "}";
        if (i + 1 < table.rows.size()) out += ",";
        out += "\n";
    }
    out += "]\n";
    return out;
}

}  // namespace seqkern
