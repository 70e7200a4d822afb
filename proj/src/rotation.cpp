#include "hjac/rotation.hpp"

#include <cmath>
#include <sstream>

#include "hjac/errors.hpp"

namespace hjac {

bool relatively_orthogonal(const PivotGram& g, double eps) {
    return std::fabs(g.a_ij) < eps * std::sqrt(g.a_ii * g.a_jj);
}

Rotation compute_rotation(const PivotGram& g, int hyp) {
    Rotation rot;
    rot.hyp = hyp < 0 ? -1 : 1;
    rot.kind = hyp < 0 ? RotationKind::trigonometric : RotationKind::hyperbolic;
    if (g.a_ij == 0.0) return rot;

    rot.skipped = false;
    if (rot.kind == RotationKind::trigonometric) {
        // a_ij (1 - t^2) + t (a_ii - a_jj) = 0, smaller root via cot 2phi.
        const double zeta = (g.a_jj - g.a_ii) / (2.0 * g.a_ij);
        const double sign = zeta < 0.0 ? -1.0 : 1.0;
        const double az = std::fabs(zeta);
        // For huge |zeta|, sqrt(1 + zeta^2) ~ |zeta|; hypot avoids the overflow.
        rot.t = sign / (az + std::hypot(1.0, az));
        rot.c = 1.0 / std::sqrt(std::fma(rot.t, rot.t, 1.0));
    } else {
        // tanh 2phi = theta = -2 a_ij / (a_ii + a_jj). Near |theta| = 1 the
        // factors 1 -+ theta cancel, so they are formed from the inputs instead:
        // tr (1 -+ theta) = tr +- 2 a_ij, with tr = s + e held exactly.
        const double s = g.a_ii + g.a_jj;
        const double bb = s - g.a_ii;
        const double e = (g.a_ii - (s - bb)) + (g.a_jj - bb);
        const double two_a = 2.0 * g.a_ij;
        const double u = (s + two_a) + e;  // tr (1 - theta)
        const double v = (s - two_a) + e;  // tr (1 + theta)
        if (!(u > 0.0 && v > 0.0)) {
            std::ostringstream msg;
            msg << "hyperbolic rotation with |tanh 2phi| = " << std::fabs(two_a / s)
                << " >= 1: the pair (A, J) is not definite";
            throw DefinitenessLostError(msg.str());
        }
        // w = tr sqrt(1 - theta^2); t = theta / (1 + sqrt(1 - theta^2)) and
        // c^2 = 1 / (1 - t^2) = (tr + w) / (2 w).
        const double w = std::sqrt(u) * std::sqrt(v);
        rot.t = -two_a / (s + w);
        rot.c = std::sqrt((s + w) / (2.0 * w));
    }
    return rot;
}

std::pair<double, double> diagonal_update_predicted(const PivotGram& g, const Rotation& rot) {
    if (rot.skipped) return {g.a_ii, g.a_jj};
    const double ta = rot.t * g.a_ij;
    return {g.a_ii + rot.hyp * ta, g.a_jj + ta};
}

ConvergenceCode convergence_code(ConvergenceCode prev, bool rotated, double t, double teps) {
    if (!rotated) return prev;
    if (std::fabs(t) > teps) return ConvergenceCode::active;
    return ConvergenceCode::quadratic | prev;
}

}  // namespace hjac
