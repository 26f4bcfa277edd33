#include "airq/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>

#include "airq/errors.hpp"

namespace airq::csv {

std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string quote_field(const std::string& field) {
    bool needs = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n') needs = true;
    }
    if (!field.empty() && (field.front() == ' ' || field.back() == ' ')) needs = true;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string join_record(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += quote_field(fields[i]);
    }
    return out;
}

std::vector<std::vector<std::string>> read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_record(line));
    }
    return rows;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoError("double formatting failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    if (s.empty()) throw ParseError("empty numeric field");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ParseError("bad numeric field: '" + s + "'");
    }
    return v;
}

long long parse_int(const std::string& s) {
    if (s.empty()) throw ParseError("empty integer field");
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ParseError("bad integer field: '" + s + "'");
    }
    return v;
}

unsigned long long parse_uint(const std::string& s) {
    if (s.empty() || s[0] == '-') throw ParseError("bad unsigned field: '" + s + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ParseError("bad unsigned field: '" + s + "'");
    }
    return v;
}

}  // namespace airq::csv
