#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "hjac/matrix.hpp"

namespace hjac {

/// Contents of a GJH1 file: an n x r matrix plus the count p of positive
/// signs. For a factor this is the signature's leading block (p <= r); for an
/// n x 1 vector of eigenvalues it is the number of positive entries.
struct GjhRecord {
    DenseMatrix matrix;
    std::uint32_t p = 0;
};

// GJH1 layout: "GJH1", u32le n, u32le r, u32le p, then n*r f64le column-major.
void write_gjh(std::ostream& out, const DenseMatrix& m, std::uint32_t p);
GjhRecord read_gjh(std::istream& in);

void write_gjh(const std::filesystem::path& path, const DenseMatrix& m, std::uint32_t p);
GjhRecord read_gjh(const std::filesystem::path& path);

/// Plain CSV, one matrix row per line, values printed round-trip exact.
void write_csv(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_csv(std::istream& in);

void write_csv(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_csv(const std::filesystem::path& path);

}  // namespace hjac
