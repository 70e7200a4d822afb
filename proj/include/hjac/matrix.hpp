#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace hjac {

/// Unit roundoff of binary64 under the "smallest x with fl(1 + x) > 1" reading.
inline constexpr double kEps = 0x1p-52;

/// Default width of the lane-strided dot-product reduction.
inline constexpr std::size_t kDefaultChunk = 32;

using Column = std::span<double>;
using ConstColumn = std::span<const double>;

/// Column-major dense matrix of doubles. Columns are contiguous, so a column
/// view is a plain span into the storage.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major);

    static DenseMatrix identity(std::size_t n);
    /// Row-major nested initializer, convenient for small literals in tests.
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

    Column col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
    ConstColumn col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool all_finite() const noexcept;

    DenseMatrix transposed() const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Diagonal of +1/-1 entries with all positive signs leading.
class SignatureVector {
public:
    SignatureVector() = default;
    /// r entries, the first p of which are +1.
    SignatureVector(std::size_t r, std::size_t p);
    /// Validates the separation invariant; throws DomainError otherwise.
    explicit SignatureVector(std::vector<std::int8_t> signs);

    std::size_t size() const noexcept { return signs_.size(); }
    std::size_t positives() const noexcept { return p_; }
    int operator[](std::size_t i) const noexcept { return signs_[i]; }
    std::span<const std::int8_t> signs() const noexcept { return signs_; }

    friend bool operator==(const SignatureVector&, const SignatureVector&) = default;

private:
    std::vector<std::int8_t> signs_;
    std::size_t p_ = 0;
};

/// Dot product with a fixed reduction order: `chunk` lanes, lane l accumulating
/// x[l], x[l + chunk], ... with one FMA per element, then a fixed pairwise tree
/// over the lanes. Bitwise reproducible for fixed length and chunk.
double dot_chunked(ConstColumn x, ConstColumn y, std::size_t chunk = kDefaultChunk);

inline double squared_norm(ConstColumn x, std::size_t chunk = kDefaultChunk) {
    return dot_chunked(x, x, chunk);
}

/// In-place pair update x <- (x + s*t*y)*c, y <- (t*x + y)*c with the bracketed
/// part under FMA. Returns the fresh squared norms of the updated columns.
std::pair<double, double> fused_pair_update(Column x, Column y, double t, double c, int s,
                                            std::size_t chunk = kDefaultChunk);

/// ||I - U^T U||_F.
double orthonormality_distance(const DenseMatrix& u);

double frobenius_norm(const DenseMatrix& a);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// G * J * G^T for a signature acting on the columns of G.
DenseMatrix congruence_with_signature(const DenseMatrix& g, const SignatureVector& j);

}  // namespace hjac
