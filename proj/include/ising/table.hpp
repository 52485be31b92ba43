#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ising {

enum class TableFormat { csv, tsv };

TableFormat parse_table_format(std::string_view text);

/// Sentinel for cells that are undefined because a(n) >= 0.
inline constexpr std::string_view kOutOfRegime = "oor";

/// Shortest round-trip form limited to 17 significant digits, '.' decimal,
/// independent of the locale. Throws std::domain_error on non-finite input.
std::string format_real(double v);

/// Header first, one record per line.
class TableWriter {
public:
    TableWriter(std::ostream& out, TableFormat format) : out_(&out), format_(format) {}

    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

private:
    void write(const std::vector<std::string>& cells);

    std::ostream* out_;
    TableFormat format_;
    std::size_t columns_ = 0;
};

}  // namespace ising
