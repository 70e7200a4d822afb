#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "hjac/matrix.hpp"

namespace hjac {

/// Threshold on |t| below which a rotation counts as "quadratically small":
/// sqrt(eps)/2 = 2^-27.
inline constexpr double kTangentThreshold = 0x1p-27;

/// The 2x2 Gram block [a_ii a_ij; a_ij a_jj] of a pivot column pair.
struct PivotGram {
    double a_ii = 0.0;
    double a_jj = 0.0;
    double a_ij = 0.0;
};

enum class RotationKind : std::uint8_t { trigonometric, hyperbolic };

/// One plane rotation in (t, c) form. `hyp` is -1 for trigonometric and +1 for
/// hyperbolic; it is the sign s fed to fused_pair_update.
struct Rotation {
    RotationKind kind = RotationKind::trigonometric;
    int hyp = -1;
    double t = 0.0;
    double c = 1.0;
    bool skipped = true;
};

/// 2-bit per-block convergence code.
enum class ConvergenceCode : std::uint8_t {
    none = 0b00,       ///< no rotation applied
    quadratic = 0b01,  ///< only rotations with |t| <= threshold
    active = 0b11,     ///< at least one rotation with |t| > threshold
};

constexpr ConvergenceCode operator|(ConvergenceCode a, ConvergenceCode b) noexcept {
    return static_cast<ConvergenceCode>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}

/// |a_ij| < eps * sqrt(a_ii * a_jj).
bool relatively_orthogonal(const PivotGram& g, double eps = kEps);

/// Rotation that annihilates a_ij. hyp = -1 selects the trigonometric case
/// (equal signs in J), hyp = +1 the hyperbolic one. Throws DefinitenessLostError
/// when the hyperbolic case has |tanh 2phi| >= 1. a_ij == 0 gives a skipped
/// identity rotation.
Rotation compute_rotation(const PivotGram& g, int hyp);

/// Updated Gram diagonal implied by the rotation, (a_ii + hyp*t*a_ij, a_jj + t*a_ij).
std::pair<double, double> diagonal_update_predicted(const PivotGram& g, const Rotation& rot);

ConvergenceCode convergence_code(ConvergenceCode prev, bool rotated, double t,
                                 double teps = kTangentThreshold);

}  // namespace hjac
