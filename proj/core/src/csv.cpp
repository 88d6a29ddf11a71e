#include "stressmodel/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "stressmodel/errors.hpp"

namespace stressmodel {

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

CsvTable parse_csv_text(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (table.header.empty()) {
            table.header = split_fields(line);
            continue;
        }
        CsvRow row{lineno, split_fields(line)};
        if (row.fields.size() != table.header.size())
            throw MalformedInput("line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(table.header.size()) + " fields, got " +
                                 std::to_string(row.fields.size()));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw MalformedInput("missing header row");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_csv_text(buf.str());
    } catch (const MalformedInput& e) {
        throw MalformedInput(path + ": " + e.what());
    }
}

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    // from_chars accepts "inf"/"nan" spellings; thousands separators and
    // trailing junk are rejected.
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw MissingFile("cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) throw MalformedInput("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace stressmodel
