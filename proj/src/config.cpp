#include "htc/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "htc/error.hpp"
#include "htc/imageio.hpp"

namespace htc {

std::string RunConfig::to_line() const {
    char key_hex[17];
    std::snprintf(key_hex, sizeof key_hex, "%016llx", (unsigned long long)key);
    std::ostringstream out;
    out << "key=" << key_hex << " n=" << layout.n << " k=" << layout.k << " f=" << layout.f
        << " R=" << layout.R << " N=" << state_bits << " rot=" << rotation << " shift="
        << shift_dx << ',' << shift_dy;
    return out.str();
}

RunConfig RunConfig::from_line(const std::string& line) {
    RunConfig cfg;
    bool seen_key = false, seen_n = false, seen_k = false, seen_f = false, seen_R = false;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        size_t eq = token.find('=');
        if (eq == std::string::npos)
            fail(errc::parse_error, "config token '" + token + "' is not key=value");
        std::string name = token.substr(0, eq);
        std::string value = token.substr(eq + 1);
        try {
            if (name == "key") {
                cfg.key = std::stoull(value, nullptr, 16);
                seen_key = true;
            } else if (name == "n") {
                cfg.layout.n = std::stoi(value);
                seen_n = true;
            } else if (name == "k") {
                cfg.layout.k = std::stoi(value);
                seen_k = true;
            } else if (name == "f") {
                cfg.layout.f = std::stoi(value);
                seen_f = true;
            } else if (name == "R") {
                cfg.layout.R = std::stoi(value);
                seen_R = true;
            } else if (name == "N") {
                cfg.state_bits = std::stoi(value);
            } else if (name == "rot") {
                cfg.rotation = std::stoi(value);
            } else if (name == "shift") {
                size_t comma = value.find(',');
                if (comma == std::string::npos)
                    fail(errc::parse_error, "shift must be dx,dy");
                cfg.shift_dx = std::stoi(value.substr(0, comma));
                cfg.shift_dy = std::stoi(value.substr(comma + 1));
            } else {
                fail(errc::parse_error, "unknown config field '" + name + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            fail(errc::parse_error, "bad value for config field '" + name + "'");
        }
    }
    if (!seen_key || !seen_n || !seen_k || !seen_f || !seen_R)
        fail(errc::parse_error, "config needs at least key=, n=, k=, f= and R=");
    cfg.layout.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    std::string text(bytes.begin(), bytes.end());
    // single logical line; trailing newline tolerated
    size_t end = text.find('\n');
    if (end != std::string::npos && text.find_first_not_of(" \t\r\n", end) != std::string::npos)
        fail(errc::parse_error, "config file must contain a single line");
    return from_line(text.substr(0, end));
}

void RunConfig::save(const std::string& path) const {
    std::string line = to_line() + "\n";
    write_file(path, std::vector<uint8_t>(line.begin(), line.end()));
}

Codec RunConfig::make_codec() const { return Codec(key, layout, state_bits, rotation); }

Ordering RunConfig::make_ordering(int width, int height) const {
    return build_ordering(width, height, shift_dx, shift_dy);
}

} // namespace htc
