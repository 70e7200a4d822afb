#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hjac/matrix.hpp"

namespace hjac {

/// Random spectrum with eigenvalues uniform on [-a, -a*1e-5] U [a*1e-5, a].
struct SpectrumSpec {
    std::size_t n = 0;
    double a = 20.0;
    std::uint64_t seed = 1;
    /// Force exactly this many positive eigenvalues (signs otherwise fair coin flips).
    std::optional<std::size_t> positives;
};

/// Scale parameter by matrix order used for the reference test corpus.
double scale_for_order(std::size_t n);

struct SymmetricSample {
    DenseMatrix m;
    std::vector<double> lambda_true;  ///< ascending
};

struct FactorPair {
    DenseMatrix g;
    SignatureVector j;
    std::vector<std::size_t> perm;  ///< symmetric pivoting: row k of P^T M P is row perm[k] of M
};

/// One generated problem: M, its exact spectrum, and the factor pair M = G J G^T.
struct TestInstance {
    SpectrumSpec spec;
    DenseMatrix m;
    std::vector<double> lambda_true;
    FactorPair factor;
};

/// Eigenvalues in draw order (unsorted), deterministic in the seed.
std::vector<double> draw_spectrum(const SpectrumSpec& spec);

/// M = Q diag(lambda) Q^T where Q is the product of the Householder reflectors
/// I - 2 v v^T / v^T v, reflector k acting on trailing indices n - len(v_k) ... n-1.
/// An empty reflector list gives diag(lambda). Accumulated in double-double.
DenseMatrix assemble_symmetric(std::span<const double> lambda,
                               std::span<const std::vector<double>> reflectors);

SymmetricSample generate_symmetric(const SpectrumSpec& spec);

/// Complete-pivoting (Bunch-Parlett) symmetric indefinite factorization with
/// 2x2 blocks diagonalized, giving M = G J G^T with positive signs leading.
/// Throws NumericalSingularityError on a pivot below n*eps*||M||_F.
FactorPair bunch_parlett_factor(const DenseMatrix& m);

/// generate_symmetric + bunch_parlett_factor without rounding M in between.
TestInstance generate_instance(const SpectrumSpec& spec);

struct QrFactors {
    DenseMatrix r;  ///< r x r upper triangular, positive diagonal
    DenseMatrix q;  ///< n x r with orthonormal columns
};

/// Householder QR of a tall factor. Throws RankDeficiencyError on a
/// (numerically) zero diagonal of R.
QrFactors qr_shorten(const DenseMatrix& g);

}  // namespace hjac
