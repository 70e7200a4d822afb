#include "hjac/matrix.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hjac/errors.hpp"

namespace hjac {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) + " != " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t nr = rows.size();
    const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
    DenseMatrix m(nr, nc);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != nc) throw ShapeError("ragged row literal");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

bool DenseMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
}

SignatureVector::SignatureVector(std::size_t r, std::size_t p) : signs_(r, -1), p_(p) {
    if (p > r) throw ShapeError("signature p=" + std::to_string(p) + " exceeds r=" + std::to_string(r));
    std::fill_n(signs_.begin(), p, std::int8_t{1});
}

SignatureVector::SignatureVector(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
    bool seen_negative = false;
    for (auto s : signs_) {
        if (s == 1) {
            if (seen_negative) throw DomainError("signature: +1 entry after a -1 entry");
            ++p_;
        } else if (s == -1) {
            seen_negative = true;
        } else {
            throw DomainError("signature entries must be +1 or -1");
        }
    }
}

namespace {

// Fixed pairwise tree: halve the active width (rounding up) until one lane is left.
template <typename Lanes>
double tree_reduce(Lanes& acc, std::size_t width) {
    while (width > 1) {
        const std::size_t half = (width + 1) / 2;
        for (std::size_t l = 0; l + half < width; ++l) acc[l] += acc[l + half];
        width = half;
    }
    return acc[0];
}

template <std::size_t W>
double dot_lanes_fixed(const double* x, const double* y, std::size_t n) {
    std::array<double, W> acc{};
    std::size_t base = 0;
    for (; base + W <= n; base += W)
        for (std::size_t l = 0; l < W; ++l) acc[l] = std::fma(x[base + l], y[base + l], acc[l]);
    for (std::size_t l = 0; base + l < n; ++l) acc[l] = std::fma(x[base + l], y[base + l], acc[l]);
    return tree_reduce(acc, W);
}

double dot_lanes_dynamic(const double* x, const double* y, std::size_t n, std::size_t w) {
    std::vector<double> acc(w, 0.0);
    for (std::size_t i = 0; i < n; ++i) acc[i % w] = std::fma(x[i], y[i], acc[i % w]);
    return tree_reduce(acc, w);
}

}  // namespace

double dot_chunked(ConstColumn x, ConstColumn y, std::size_t chunk) {
    if (x.size() != y.size())
        throw ShapeError("dot_chunked: length mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
    if (chunk == 0) throw ShapeError("dot_chunked: chunk must be >= 1");
    if (chunk == kDefaultChunk) return dot_lanes_fixed<kDefaultChunk>(x.data(), y.data(), x.size());
    return dot_lanes_dynamic(x.data(), y.data(), x.size(), chunk);
}

std::pair<double, double> fused_pair_update(Column x, Column y, double t, double c, int s,
                                            std::size_t chunk) {
    if (x.size() != y.size())
        throw ShapeError("fused_pair_update: length mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
    const double st = s < 0 ? -t : t;
    const std::size_t n = x.size();
    double* xp = x.data();
    double* yp = y.data();
    for (std::size_t k = 0; k < n; ++k) {
        const double xk = xp[k];
        const double yk = yp[k];
        xp[k] = std::fma(st, yk, xk) * c;
        yp[k] = std::fma(t, xk, yk) * c;
    }
    return {dot_chunked(x, x, chunk), dot_chunked(y, y, chunk)};
}

double orthonormality_distance(const DenseMatrix& u) {
    const std::size_t r = u.cols();
    double sum = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            const double g = dot_chunked(u.col(i), u.col(j));
            const double e = (i == j ? 1.0 : 0.0) - g;
            sum += e * e;
        }
    }
    return std::sqrt(sum);
}

double frobenius_norm(const DenseMatrix& a) {
    // Scaled accumulation so tiny and huge entries do not under/overflow.
    double scale = 0.0;
    double ssq = 1.0;
    for (double v : a.data()) {
        if (v == 0.0) continue;
        const double av = std::fabs(v);
        if (scale < av) {
            ssq = 1.0 + ssq * (scale / av) * (scale / av);
            scale = av;
        } else {
            ssq += (av / scale) * (av / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("multiply: inner dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
        }
    return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("subtract: shape mismatch");
    DenseMatrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k) cd[k] -= bd[k];
    return c;
}

DenseMatrix congruence_with_signature(const DenseMatrix& g, const SignatureVector& j) {
    if (g.cols() != j.size()) throw ShapeError("congruence: signature length != columns");
    const std::size_t n = g.rows();
    DenseMatrix m(n, n);
    for (std::size_t k = 0; k < g.cols(); ++k) {
        const double s = j[k];
        for (std::size_t c = 0; c < n; ++c) {
            const double gck = s * g(c, k);
            if (gck == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) m(i, c) += g(i, k) * gck;
        }
    }
    return m;
}

}  // namespace hjac
