#pragma once

#include <optional>
#include <string>
#include <vector>

namespace stressmodel {

// Minimal CSV support for the file formats this toolkit exchanges:
// UTF-8, header row required, comma separator, no quoting or escapes,
// '.' decimal point. Blank lines are skipped.

struct CsvRow {
    int line = 0;  // 1-based physical line in the file
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    // Index of a header column, case-sensitive; nullopt if absent.
    std::optional<std::size_t> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);           // throws MissingFile, MalformedInput
CsvTable parse_csv_text(const std::string& text);     // same validation, in-memory

std::optional<double> parse_double(const std::string& s);

// Fixed-format numeric field: shortest round-trip representation.
std::string format_double(double v);

// Write-temp-then-rename so partially written artifacts are never observed.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace stressmodel
