#include "hjac/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hjac/errors.hpp"

namespace hjac {

namespace {

constexpr std::array<char, 4> kMagic{'G', 'J', 'H', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<unsigned char, 4> b{};
    for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    out.write(reinterpret_cast<const char*>(b.data()), b.size());
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<unsigned char, 8> b{};
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
    out.write(reinterpret_cast<const char*>(b.data()), b.size());
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) throw IoError("GJH1: truncated header");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t{b[k]} << (8 * k);
    return v;
}

}  // namespace

void write_gjh(std::ostream& out, const DenseMatrix& m, std::uint32_t p) {
    if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
        m.cols() > std::numeric_limits<std::uint32_t>::max())
        throw ShapeError("GJH1: dimensions exceed 32 bits");
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    put_u32(out, p);
    for (double v : m.data()) put_f64(out, v);
    if (!out) throw IoError("GJH1: write failed");
}

GjhRecord read_gjh(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("GJH1: bad magic");
    const std::uint32_t n = get_u32(in);
    const std::uint32_t r = get_u32(in);
    const std::uint32_t p = get_u32(in);
    const std::size_t count = std::size_t{n} * r;
    std::vector<unsigned char> raw(count * 8);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw IoError("GJH1: truncated payload");
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) bits |= std::uint64_t{raw[i * 8 + k]} << (8 * k);
        values[i] = std::bit_cast<double>(bits);
    }
    return {DenseMatrix(n, r, std::move(values)), p};
}

void write_gjh(const std::filesystem::path& path, const DenseMatrix& m, std::uint32_t p) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_gjh(out, m, p);
}

GjhRecord read_gjh(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    try {
        return read_gjh(in);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_csv(std::ostream& out, const DenseMatrix& m) {
    std::array<char, 32> buf{};
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), m(i, j));
            out.write(buf.data(), end - buf.data());
        }
        out << '\n';
    }
    if (!out) throw IoError("CSV: write failed");
}

DenseMatrix read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const char* b = cell.data();
            const char* e = cell.data() + cell.size();
            while (b < e && *b == ' ') ++b;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(b, e, v);
            if (ec != std::errc{} || ptr != e) throw IoError("CSV: bad number '" + cell + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("CSV: ragged row " + std::to_string(rows.size() + 1));
        rows.push_back(std::move(row));
    }
    const std::size_t nr = rows.size();
    const std::size_t nc = nr ? rows.front().size() : 0;
    DenseMatrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows[i][j];
    return m;
}

void write_csv(const std::filesystem::path& path, const DenseMatrix& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_csv(out, m);
}

DenseMatrix read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    try {
        return read_csv(in);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace hjac
