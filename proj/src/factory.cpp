#include "hjac/factory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "double_double.hpp"
#include "hjac/errors.hpp"

namespace hjac {

using detail::DoubleDouble;

namespace {

// Bit-level helpers over mt19937_64 (whose output sequence is fixed by the
// standard) so generated instances do not depend on the library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

    double normal() {
        // Box-Muller on (0, 1] x [0, 1).
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

// Dense symmetric n x n matrix of double-doubles, column-major.
class DdMatrix {
public:
    explicit DdMatrix(std::size_t n) : n_(n), a_(n * n) {}
    std::size_t size() const { return n_; }
    DoubleDouble& operator()(std::size_t i, std::size_t j) { return a_[j * n_ + i]; }
    const DoubleDouble& operator()(std::size_t i, std::size_t j) const { return a_[j * n_ + i]; }

    void swap_symmetric(std::size_t p, std::size_t q) {
        if (p == q) return;
        for (std::size_t k = 0; k < n_; ++k) std::swap((*this)(p, k), (*this)(q, k));
        for (std::size_t k = 0; k < n_; ++k) std::swap((*this)(k, p), (*this)(k, q));
    }

private:
    std::size_t n_;
    std::vector<DoubleDouble> a_;
};

void apply_reflector(DdMatrix& a, std::span<const double> v) {
    const std::size_t n = a.size();
    const std::size_t m = v.size();
    const std::size_t off = n - m;

    DoubleDouble vv;
    for (double x : v) vv += detail::two_prod(x, x);
    const DoubleDouble tau = DoubleDouble(2.0) / vv;

    // y = tau * A v ; w = y - (tau/2)(y^T v) v ; A <- A - v w^T - w v^T
    std::vector<DoubleDouble> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        DoubleDouble s;
        for (std::size_t j = 0; j < m; ++j) s += a(off + i, off + j) * DoubleDouble(v[j]);
        y[i] = tau * s;
    }
    DoubleDouble yv;
    for (std::size_t i = 0; i < m; ++i) yv += y[i] * DoubleDouble(v[i]);
    const DoubleDouble alpha = -(tau * DoubleDouble(0.5)) * yv;
    std::vector<DoubleDouble> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = y[i] + alpha * DoubleDouble(v[i]);

    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = j; i < m; ++i) {
            auto& e = a(off + i, off + j);
            e = e - DoubleDouble(v[i]) * w[j] - w[i] * DoubleDouble(v[j]);
            a(off + j, off + i) = e;
        }
    }
}

DdMatrix assemble_dd(std::span<const double> lambda, std::span<const std::vector<double>> reflectors) {
    const std::size_t n = lambda.size();
    DdMatrix a(n);
    for (std::size_t k = 0; k < n; ++k) a(k, k) = lambda[k];
    for (const auto& v : reflectors) {
        if (v.size() < 1 || v.size() > n) throw ShapeError("reflector length out of range");
        apply_reflector(a, v);
    }
    return a;
}

std::vector<std::vector<double>> draw_reflectors(std::size_t n, Rng& rng) {
    // Lengths 2, 3, ..., n: the trailing block grows as reflectors are applied.
    std::vector<std::vector<double>> out;
    out.reserve(n > 1 ? n - 1 : 0);
    for (std::size_t m = 2; m <= n; ++m) {
        std::vector<double> v(m);
        for (auto& x : v) x = rng.normal();
        out.push_back(std::move(v));
    }
    return out;
}

DenseMatrix round_to_double(const DdMatrix& a) {
    const std::size_t n = a.size();
    DenseMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = static_cast<double>(a(i, j));
    return m;
}

double frobenius_dd(const DdMatrix& a) {
    DoubleDouble s;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < a.size(); ++i) s += a(i, j) * a(i, j);
    return static_cast<double>(detail::sqrt(s));
}

FactorPair factor_dd(DdMatrix a) {
    const std::size_t n = a.size();
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    const double tol = static_cast<double>(n) * kEps * frobenius_dd(a);

    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < n; ++k) perm[k] = k;
    DdMatrix l(n);
    for (std::size_t k = 0; k < n; ++k) l(k, k) = 1.0;

    // Block-diagonal factor after diagonalization: per column its eigen-sign and
    // |lambda|^(1/2), and per 2x2 block the rotation applied to the L columns.
    std::vector<DoubleDouble> root(n);
    std::vector<int> sign(n);

    // Swap positions p, q of the trailing problem; L rows swap in the finished columns.
    auto swap_pos = [&](std::size_t p, std::size_t q, std::size_t k) {
        if (p == q) return;
        a.swap_symmetric(p, q);
        for (std::size_t c = 0; c < k; ++c) std::swap(l(p, c), l(q, c));
        std::swap(perm[p], perm[q]);
    };

    std::size_t k = 0;
    while (k < n) {
        DoubleDouble g0, g1;
        std::size_t i0 = k, i1 = k, j1 = k;
        for (std::size_t j = k; j < n; ++j) {
            const auto dj = detail::abs(a(j, j));
            if (dj > g0) {
                g0 = dj;
                i0 = j;
            }
            for (std::size_t i = j + 1; i < n; ++i) {
                const auto v = detail::abs(a(i, j));
                if (v > g1) {
                    g1 = v;
                    i1 = i;
                    j1 = j;
                }
            }
        }
        if (g0.hi == 0.0 && g1.hi == 0.0)
            throw NumericalSingularityError("factor: trailing block at " + std::to_string(k) + " is zero");

        if (g0.hi >= alpha * g1.hi || k + 1 == n) {
            swap_pos(k, i0, k);
            const DoubleDouble d = a(k, k);
            if (std::fabs(d.hi) < tol)
                throw NumericalSingularityError("factor: 1x1 pivot " + std::to_string(d.hi) + " at step " +
                                                std::to_string(k) + " below " + std::to_string(tol));
            for (std::size_t i = k + 1; i < n; ++i) l(i, k) = a(i, k) / d;
            for (std::size_t j = k + 1; j < n; ++j) {
                const DoubleDouble ajk = a(j, k);
                for (std::size_t i = j; i < n; ++i) {
                    auto& e = a(i, j);
                    e = e - l(i, k) * ajk;
                    a(j, i) = e;
                }
            }
            root[k] = detail::sqrt(detail::abs(d));
            sign[k] = d.hi > 0.0 ? 1 : -1;
            k += 1;
            continue;
        }

        // 2x2 pivot on the largest off-diagonal entry (i1 > j1).
        swap_pos(k, j1, k);
        if (i1 == k) i1 = j1;
        swap_pos(k + 1, i1, k);

        const DoubleDouble e11 = a(k, k), e21 = a(k + 1, k), e22 = a(k + 1, k + 1);
        const DoubleDouble det = e11 * e22 - e21 * e21;
        for (std::size_t i = k + 2; i < n; ++i) {
            const DoubleDouble x = a(i, k), y = a(i, k + 1);
            l(i, k) = (x * e22 - y * e21) / det;
            l(i, k + 1) = (y * e11 - x * e21) / det;
        }
        for (std::size_t j = k + 2; j < n; ++j) {
            const DoubleDouble ajk = a(j, k), ajk1 = a(j, k + 1);
            for (std::size_t i = j; i < n; ++i) {
                auto& e = a(i, j);
                e = e - l(i, k) * ajk - l(i, k + 1) * ajk1;
                a(j, i) = e;
            }
        }

        // Diagonalize E by a Jacobi rotation T = c [[1, t], [-t, 1]] and fold T
        // into columns k, k+1 of L.
        DoubleDouble t;
        if (e21.hi != 0.0) {
            const DoubleDouble zeta = (e22 - e11) / (DoubleDouble(2.0) * e21);
            const DoubleDouble az = detail::abs(zeta);
            const DoubleDouble mag = DoubleDouble(1.0) / (az + detail::sqrt(DoubleDouble(1.0) + az * az));
            t = zeta.hi < 0.0 ? -mag : mag;
        }
        const DoubleDouble c = DoubleDouble(1.0) / detail::sqrt(DoubleDouble(1.0) + t * t);
        const DoubleDouble lam1 = e11 - t * e21;
        const DoubleDouble lam2 = e22 + t * e21;
        for (std::size_t i = k; i < n; ++i) {
            const DoubleDouble x = l(i, k), y = l(i, k + 1);
            l(i, k) = c * (x - t * y);
            l(i, k + 1) = c * (y + t * x);
        }
        const DoubleDouble lmin = detail::abs(lam1) < detail::abs(lam2) ? lam1 : lam2;
        if (std::fabs(lmin.hi) < tol)
            throw NumericalSingularityError("factor: 2x2 pivot eigenvalue " + std::to_string(lmin.hi) +
                                            " at step " + std::to_string(k) + " below " + std::to_string(tol));
        root[k] = detail::sqrt(detail::abs(lam1));
        root[k + 1] = detail::sqrt(detail::abs(lam2));
        sign[k] = lam1.hi > 0.0 ? 1 : -1;
        sign[k + 1] = lam2.hi > 0.0 ? 1 : -1;
        k += 2;
    }

    // Column order: positive signs first, stable.
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t c = 0; c < n; ++c)
        if (sign[c] > 0) order.push_back(c);
    const std::size_t p = order.size();
    for (std::size_t c = 0; c < n; ++c)
        if (sign[c] < 0) order.push_back(c);

    FactorPair out{DenseMatrix(n, n), SignatureVector(n, p), perm};
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        for (std::size_t i = 0; i < n; ++i)
            out.g(perm[i], c) = static_cast<double>(l(i, src) * root[src]);
    }
    return out;
}

}  // namespace

double scale_for_order(std::size_t n) {
    if (n <= 3168) return 20.0;
    if (n <= 6368) return 30.0;
    if (n <= 9568) return 40.0;
    return 50.0;
}

std::vector<double> draw_spectrum(const SpectrumSpec& spec) {
    if (spec.n < 1) throw ShapeError("spectrum: n must be >= 1");
    if (!(spec.a > 0.0)) throw DomainError("spectrum: a must be positive");
    if (spec.positives && *spec.positives > spec.n) throw DomainError("spectrum: positives exceeds n");
    Rng rng(spec.seed);
    const double lo = spec.a * 1e-5;
    const double width = spec.a - lo;
    std::vector<double> lambda(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k) {
        const double mag = std::min(lo + width * rng.uniform(), spec.a);
        const bool negative = rng.uniform() < 0.5;
        const bool positive = spec.positives ? k < *spec.positives : !negative;
        lambda[k] = positive ? mag : -mag;
    }
    return lambda;
}

DenseMatrix assemble_symmetric(std::span<const double> lambda,
                               std::span<const std::vector<double>> reflectors) {
    return round_to_double(assemble_dd(lambda, reflectors));
}

namespace {

std::pair<DdMatrix, std::vector<double>> generate_dd(const SpectrumSpec& spec) {
    if (spec.n < 2) throw ShapeError("generate: n must be >= 2");
    auto lambda = draw_spectrum(spec);
    // Reflectors come from a stream independent of the spectrum draw.
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto reflectors = draw_reflectors(spec.n, rng);
    auto a = assemble_dd(lambda, reflectors);
    std::sort(lambda.begin(), lambda.end());
    return {std::move(a), std::move(lambda)};
}

}  // namespace

SymmetricSample generate_symmetric(const SpectrumSpec& spec) {
    auto [a, lambda] = generate_dd(spec);
    return {round_to_double(a), std::move(lambda)};
}

FactorPair bunch_parlett_factor(const DenseMatrix& m) {
    const std::size_t n = m.rows();
    if (m.cols() != n) throw ShapeError("factor: matrix must be square");
    if (n == 0) throw ShapeError("factor: empty matrix");
    DdMatrix a(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            if (m(i, j) != m(j, i)) throw DomainError("factor: matrix is not symmetric");
            a(i, j) = m(i, j);
        }
    return factor_dd(std::move(a));
}

TestInstance generate_instance(const SpectrumSpec& spec) {
    auto [a, lambda] = generate_dd(spec);
    TestInstance inst;
    inst.spec = spec;
    inst.m = round_to_double(a);
    inst.lambda_true = std::move(lambda);
    inst.factor = factor_dd(std::move(a));
    return inst;
}

QrFactors qr_shorten(const DenseMatrix& g) {
    const std::size_t n = g.rows();
    const std::size_t r = g.cols();
    if (n < r) throw ShapeError("qr_shorten: need n >= r");
    const double tol = static_cast<double>(n) * kEps * frobenius_norm(g);

    DenseMatrix a = g;
    std::vector<std::vector<double>> vs;
    std::vector<double> taus;
    for (std::size_t k = 0; k < r; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) norm2 += a(i, k) * a(i, k);
        const double norm = std::sqrt(norm2);
        if (!(norm > tol))
            throw RankDeficiencyError("qr_shorten: column " + std::to_string(k) + " is numerically dependent");
        const double alpha = a(k, k) >= 0.0 ? -norm : norm;
        std::vector<double> v(n - k);
        for (std::size_t i = k; i < n; ++i) v[i - k] = a(i, k);
        v[0] -= alpha;
        double vv = 0.0;
        for (double x : v) vv += x * x;
        const double tau = vv > 0.0 ? 2.0 / vv : 0.0;
        for (std::size_t c = k; c < r; ++c) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += v[i - k] * a(i, c);
            s *= tau;
            for (std::size_t i = k; i < n; ++i) a(i, c) -= s * v[i - k];
        }
        a(k, k) = alpha;
        for (std::size_t i = k + 1; i < n; ++i) a(i, k) = 0.0;
        vs.push_back(std::move(v));
        taus.push_back(tau);
    }

    QrFactors out{DenseMatrix(r, r), DenseMatrix(n, r)};
    for (std::size_t c = 0; c < r; ++c)
        for (std::size_t i = 0; i <= c; ++i) out.r(i, c) = a(i, c);
    for (std::size_t c = 0; c < r; ++c) out.q(c, c) = 1.0;
    for (std::size_t kk = r; kk-- > 0;) {
        const auto& v = vs[kk];
        for (std::size_t c = 0; c < r; ++c) {
            double s = 0.0;
            for (std::size_t i = kk; i < n; ++i) s += v[i - kk] * out.q(i, c);
            s *= taus[kk];
            for (std::size_t i = kk; i < n; ++i) out.q(i, c) -= s * v[i - kk];
        }
    }
    for (std::size_t k = 0; k < r; ++k) {
        if (out.r(k, k) < 0.0) {
            for (std::size_t c = k; c < r; ++c) out.r(k, c) = -out.r(k, c);
            for (std::size_t i = 0; i < n; ++i) out.q(i, k) = -out.q(i, k);
        }
    }
    return out;
}

}  // namespace hjac
