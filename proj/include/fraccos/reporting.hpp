#pragma once

// Deterministic plain-text output.  All floating-point values are printed
// through one snprintf path at 17 significant digits, so identical inputs
// produce byte-identical report files.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace fraccos {

inline std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

// One line-delimited record; fields appear in insertion order.
class JsonlRecord {
public:
    JsonlRecord& field(const std::string& key, const std::string& text) {
        append(key, json_quote(text));
        return *this;
    }
    JsonlRecord& field(const std::string& key, double value) {
        append(key, format_g17(value));
        return *this;
    }
    JsonlRecord& field(const std::string& key, int value) {
        append(key, std::to_string(value));
        return *this;
    }
    JsonlRecord& field(const std::string& key, bool value) {
        append(key, value ? "true" : "false");
        return *this;
    }

    std::string str() const { return "{" + body_ + "}"; }

private:
    void append(const std::string& key, const std::string& encoded) {
        if (!body_.empty()) body_ += ",";
        body_ += json_quote(key) + ":" + encoded;
    }
    std::string body_;
};

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

}  // namespace fraccos
