#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace forkbound {

inline constexpr const char* kToolVersion = "forkbound 0.1.0";

// Fixed-width-free, locale-independent float formatting shared by every CSV
// writer so outputs stay byte-identical for a given configuration.
std::string format_double(double value);

struct CsvTable {
    std::string name;                // file stem, e.g. "fig4"
    std::vector<std::string> meta;   // emitted as '# ...' header lines
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_csv(const CsvTable& table, std::ostream& out);

}  // namespace forkbound
