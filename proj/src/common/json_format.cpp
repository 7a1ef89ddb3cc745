// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/json_format.hpp"

#include <cmath>
#include <cstdio>
#include <string_view>

namespace heact {

std::string format_fixed(double v, int decimals) {
    if (!std::isfinite(v)) return "null";
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string s(buf);
    // "-0.000000" and "0.000000" must not differ between runs.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

namespace {

void write(std::string& out, const nlohmann::json& j, int decimals, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent <= 0) return;
        out.push_back('\n');
        out.append(static_cast<std::size_t>(d * indent), ' ');
    };
    switch (j.type()) {
        case nlohmann::json::value_t::number_float:
            out += format_fixed(j.get<double>(), decimals);
            break;
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out.push_back('{');
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out.push_back(',');
                first = false;
                newline(depth + 1);
                out += nlohmann::json(key).dump();
                out += indent > 0 ? ": " : ":";
                write(out, value, decimals, indent, depth + 1);
            }
            newline(depth);
            out.push_back('}');
            break;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            // Flat numeric arrays stay on one line.
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && v.is_primitive();
            out.push_back('[');
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += scalars && indent > 0 ? ", " : ",";
                first = false;
                if (!scalars) newline(depth + 1);
                write(out, v, decimals, indent, depth + 1);
            }
            if (!scalars) newline(depth);
            out.push_back(']');
            break;
        }
        default:
            out += j.dump();
            break;
    }
}

}  // namespace

std::string dump_fixed(const nlohmann::json& j, int decimals, int indent) {
    std::string out;
    write(out, j, decimals, indent, 0);
    out.push_back('\n');
    return out;
}

}  // namespace heact
