#include "novlab/field_io.hpp"

#include "novlab/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace novlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field_csv(const Field& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    for (std::int64_t i = 0; i < u.grid.n; ++i)
        out << format_double(u.grid.x(i)) << ',' << format_double(u[static_cast<std::size_t>(i)])
            << '\n';
    if (!out) throw Error("write failed: " + path);
}

Field read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("malformed field CSV line: " + line);
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 3) throw Error("field CSV too short: " + path);
    Grid g;
    g.x_left = xs.front();
    g.dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    g.n = static_cast<std::int64_t>(xs.size());
    g.validate();
    Field u(g);
    u.values = std::move(vs);
    return u;
}

namespace {

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffull) << (8 * (7 - i));
        return r;
    }
    return v;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    const std::uint64_t le = to_le(v);
    out.write(reinterpret_cast<const char*>(&le), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return to_le(v);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

} // namespace

void write_field_binary(const Field& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    put_f64(out, u.grid.x_left);
    put_f64(out, u.grid.dx);
    put_u64(out, static_cast<std::uint64_t>(u.grid.n));
    for (double v : u.values) put_f64(out, v);
    if (!out) throw Error("write failed: " + path);
}

Field read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    Grid g;
    g.x_left = get_f64(in);
    g.dx = get_f64(in);
    g.n = static_cast<std::int64_t>(get_u64(in));
    if (!in || g.n < 3 || g.n > (1ll << 32)) throw Error("malformed field file: " + path);
    g.validate();
    Field u(g);
    for (double& v : u.values) v = get_f64(in);
    if (!in) throw Error("truncated field file: " + path);
    return u;
}

} // namespace novlab
