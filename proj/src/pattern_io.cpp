#include "ising/pattern_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ising {

namespace {

std::string strip_comment(const std::string& line)
{
    auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> tokens(const std::string& line)
{
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) {
        out.push_back(t);
    }
    return out;
}

int parse_int(const std::string& token, const std::string& where)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || token.empty()) {
        throw PatternFormatError(where + ": expected an integer, got '" + token + "'");
    }
    return v;
}

}  // namespace

LocalPattern read_pattern(std::istream& in, const std::string& source)
{
    bool have_header = false;
    LatticeShape shape;
    int radius = 0;
    std::vector<Offset> positives;

    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        auto tok = tokens(strip_comment(line));
        if (tok.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(lineno);
        if (!have_header) {
            if (tok.size() != 4) {
                throw PatternFormatError(where + ": header must be 'd p rho r'");
            }
            shape.d = parse_int(tok[0], where);
            try {
                shape.p = NormOrder::parse(tok[1]);
            } catch (const std::invalid_argument& e) {
                throw PatternFormatError(where + ": " + e.what());
            }
            shape.rho = parse_int(tok[2], where);
            radius = parse_int(tok[3], where);
            if (shape.d < 1 || shape.rho < 1 || radius < 0) {
                throw PatternFormatError(where + ": need d >= 1, rho >= 1, r >= 0");
            }
            have_header = true;
            continue;
        }
        if (static_cast<int>(tok.size()) != shape.d) {
            throw PatternFormatError(where + ": offset needs " + std::to_string(shape.d) + " coordinates");
        }
        Offset o;
        for (const auto& t : tok) {
            o.push_back(parse_int(t, where));
        }
        positives.push_back(std::move(o));
    }
    if (!have_header) {
        throw PatternFormatError(source + ": missing header line");
    }
    try {
        return LocalPattern(shape, radius, std::move(positives));
    } catch (const std::invalid_argument& e) {
        throw PatternFormatError(source + ": " + e.what());
    }
}

LocalPattern load_pattern(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw PatternFormatError("cannot open pattern file " + path.string());
    }
    return read_pattern(in, path.string());
}

void write_pattern(std::ostream& out, const LocalPattern& pattern)
{
    const auto& s = pattern.shape();
    out << s.d << ' ' << s.p.to_string() << ' ' << s.rho << ' ' << pattern.radius() << '\n';
    for (const auto& o : pattern.positives()) {
        for (std::size_t i = 0; i < o.size(); ++i) {
            out << (i ? " " : "") << o[i];
        }
        out << '\n';
    }
}

}  // namespace ising
