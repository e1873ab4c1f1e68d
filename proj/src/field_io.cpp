#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "sigma2/geometry.hpp"

namespace sigma2 {

namespace {

constexpr char kMagic[4] = {'S', '2', 'F', '1'};

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

template <typename T>
void put(std::ofstream& os, T v) {
    v = to_little(v);
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is, const std::string& path) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw IoError("read_field_binary: truncated file " + path);
    }
    return to_little(v);
}

} // namespace

void write_field_binary(const ScalarField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_field_binary: cannot open " + path);
    os.write(kMagic, 4);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.res()));
    for (Eigen::Index p = 0; p < f.samples.size(); ++p) put<double>(os, f.samples[p]);
    if (!os) throw IoError("write_field_binary: write failed for " + path);
}

ScalarField read_field_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_field_binary: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("read_field_binary: bad magic in " + path);
    }
    const auto n = get<std::uint32_t>(is, path);
    const auto res = get<std::uint32_t>(is, path);
    const TorusGrid grid(static_cast<int>(n), static_cast<int>(res));
    Eigen::VectorXd v(grid.size());
    for (Eigen::Index p = 0; p < v.size(); ++p) v[p] = get<double>(is, path);
    if (is.peek() != std::char_traits<char>::eof()) {
        throw IoError("read_field_binary: trailing bytes in " + path);
    }
    return ScalarField(grid, std::move(v));
}

void write_field_csv(const ScalarField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("write_field_csv: cannot open " + path);
    const auto& g = f.grid;
    for (int a = 0; a < g.dim(); ++a) os << 'x' << a + 1 << ',';
    os << "value\n" << std::setprecision(17);
    for (Eigen::Index p = 0; p < g.size(); ++p) {
        const Eigen::VectorXd x = g.position(p);
        for (int a = 0; a < g.dim(); ++a) os << x[a] << ',';
        os << f.samples[p] << '\n';
    }
    if (!os) throw IoError("write_field_csv: write failed for " + path);
}

} // namespace sigma2
