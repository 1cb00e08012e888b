#include "forkbound/csv.hpp"

#include <cstdio>

namespace forkbound {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_csv(const CsvTable& table, std::ostream& out) {
    out << "# " << kToolVersion << "\n";
    for (const auto& line : table.meta) out << "# " << line << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << "\n";
    }
}

}  // namespace forkbound
