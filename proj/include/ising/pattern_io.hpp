#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "ising/patterns.hpp"

namespace ising {

class PatternFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Header line `d p rho r` (p an integer or `inf`), then one positive offset
/// per line. `#` starts a comment; blank lines are skipped.
LocalPattern read_pattern(std::istream& in, const std::string& source = "<input>");
LocalPattern load_pattern(const std::filesystem::path& path);

void write_pattern(std::ostream& out, const LocalPattern& pattern);

}  // namespace ising
