#include "pcnsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pcnsim/types.hpp"

namespace pcnsim {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        while (true) {
            const auto comma = line.find(',');
            fields.emplace_back(trim(line.substr(0, comma)));
            if (comma == std::string_view::npos) {
                break;
            }
            line = line.substr(comma + 1);
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string format_double(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << contents;
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

} // namespace pcnsim
