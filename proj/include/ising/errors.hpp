#pragma once

#include <stdexcept>
#include <string>

namespace ising {

/// Raised when an exhaustive enumeration would exceed its hard size guard.
class SizeGuardError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Maximum number of free binary sites any enumeration may range over (2^24 states).
inline constexpr int kMaxEnumerationBits = 24;

inline void require_enumerable(std::size_t bits, const char* what)
{
    if (bits > static_cast<std::size_t>(kMaxEnumerationBits)) {
        throw SizeGuardError(std::string(what) + ": 2^" + std::to_string(bits) +
                             " states exceeds the 2^" + std::to_string(kMaxEnumerationBits) +
                             " enumeration guard");
    }
}

}  // namespace ising
