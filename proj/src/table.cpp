#include "ising/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ising {

TableFormat parse_table_format(std::string_view text)
{
    if (text == "csv") {
        return TableFormat::csv;
    }
    if (text == "tsv") {
        return TableFormat::tsv;
    }
    throw std::invalid_argument("unknown output format '" + std::string(text) + "' (csv or tsv)");
}

std::string format_real(double v)
{
    if (!std::isfinite(v)) {
        throw std::domain_error("non-finite value in numeric output");
    }
    if (v == 0.0) {
        return "0";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) {
        throw std::runtime_error("number formatting failed");
    }
    return {buf, end};
}

void TableWriter::header(const std::vector<std::string>& names)
{
    columns_ = names.size();
    write(names);
}

void TableWriter::row(const std::vector<std::string>& cells)
{
    if (columns_ != 0 && cells.size() != columns_) {
        throw std::logic_error("table row width does not match the header");
    }
    write(cells);
}

void TableWriter::write(const std::vector<std::string>& cells)
{
    const char sep = format_ == TableFormat::csv ? ',' : '\t';
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            *out_ << sep;
        }
        const auto& c = cells[i];
        if (format_ == TableFormat::csv && c.find_first_of(",\"\n") != std::string::npos) {
            *out_ << '"';
            for (char ch : c) {
                if (ch == '"') {
                    *out_ << '"';
                }
                *out_ << ch;
            }
            *out_ << '"';
        } else if (format_ == TableFormat::tsv) {
            for (char ch : c) {
                *out_ << (ch == '\t' || ch == '\n' ? ' ' : ch);
            }
        } else {
            *out_ << c;
        }
    }
    *out_ << '\n';
}

}  // namespace ising
