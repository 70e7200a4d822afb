#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hjac/matrix.hpp"
#include "hjac/rotation.hpp"
#include "hjac/strategy.hpp"

namespace hjac {

/// Squared column norm, the column it belongs to, and that column's sign in J.
/// Sorting moves packages; columns of G are never moved.
struct DiagonalPackage {
    double d = 0.0;
    std::uint32_t rho = 0;
    std::int8_t sign = 1;

    friend bool operator==(const DiagonalPackage&, const DiagonalPackage&) = default;
};

using DiagonalPackageVector = std::vector<DiagonalPackage>;

enum class Schedule : std::uint8_t {
    modulus,     ///< step-parallel modified modulus, r/2 pairs per step
    row_cyclic,  ///< sequential reference, one pair per step
};

enum class StopReason : std::uint8_t { orthogonal, quadratic, max_sweeps };

std::string_view to_string(StopReason r) noexcept;
std::string_view to_string(Schedule s) noexcept;

struct SolverConfig {
    std::size_t max_sweeps = 30;
    double eps = kEps;
    double teps = kTangentThreshold;
    bool accumulate_v = true;
    bool use_rel_orth_skip = true;
    bool sort = true;
    std::size_t chunk = kDefaultChunk;
    std::size_t workers = 1;
    Schedule schedule = Schedule::modulus;
};

struct SweepTelemetry {
    std::size_t sweep = 0;
    std::size_t rotations = 0;
    std::size_t skips = 0;
    double max_abs_t = 0.0;
    ConvergenceCode code = ConvergenceCode::none;
};

void write_telemetry_csv(std::ostream& out, std::span<const SweepTelemetry> rows);

struct HsvdResult {
    std::vector<double> sigma;   ///< original column order
    DenseMatrix u;               ///< n x r, unit columns, original column order
    std::optional<DenseMatrix> vinv_t;
    std::vector<double> lambda;  ///< sigma^2 * J, original column order
    std::size_t sweeps_used = 0;
    StopReason stop_reason = StopReason::max_sweeps;
    std::vector<SweepTelemetry> telemetry;
};

/// Mutable state of a run: the factor (becoming U*Sigma), the optional
/// accumulated V^{-T}, and the diagonal packages.
struct SolverWorkspace {
    DenseMatrix g;
    std::optional<DenseMatrix> vinv_t;
    DiagonalPackageVector diag;
};

/// d_k = ||g_k||^2, rho = identity, signs from J. Throws RankDeficiencyError on a
/// zero column.
DiagonalPackageVector precompute(const DenseMatrix& g, const SignatureVector& j,
                                 std::size_t chunk = kDefaultChunk);

/// Positions [0, p) sorted by d descending, [p, r) ascending; stable.
void sort_diagonal(DiagonalPackageVector& d, std::size_t p);

struct BlockStats {
    std::size_t rotations = 0;
    std::size_t skips = 0;
    double max_abs_t = 0.0;
};

/// Orthogonalize the columns behind diagonal positions i < j.
void rotate_pivot_pair(SolverWorkspace& ws, std::size_t i, std::size_t j, ConvergenceCode& code,
                       const SolverConfig& cfg, BlockStats& stats, std::size_t block = 0);

/// One step: every block rotates its current pair, then every block advances.
/// Blocks touch disjoint columns, so the order of processing does not matter.
void jacobi_step(SolverWorkspace& ws, StepperState& stepper, std::span<ConvergenceCode> codes,
                 const SolverConfig& cfg, std::span<BlockStats> stats = {});

enum class ConvergenceDecision : std::uint8_t { stop_orthogonal, stop_quadratic, proceed };

ConvergenceDecision check_convergence(std::span<const ConvergenceCode> codes);

/// Called after each quasi-sweep, before sorting.
using SweepObserver = std::function<void(const SweepTelemetry&, const SolverWorkspace&)>;

/// One-sided hyperbolic Jacobi on G (n x r, r even for the modulus schedule,
/// n >= r) with signature J.
HsvdResult drive(const DenseMatrix& g, const SignatureVector& j, const SolverConfig& cfg = {},
                 const SweepObserver& observer = {});

/// V = J * V^{-T} * J.
DenseMatrix recover_v(const DenseMatrix& vinv_t, const SignatureVector& j);

struct BorderInfo {
    std::size_t orig_rows = 0;
    std::size_t orig_cols = 0;
    std::optional<std::size_t> synthetic_column;
};

struct BorderedFactor {
    DenseMatrix g;
    SignatureVector j;
    BorderInfo info;
};

/// Embed G top-left in a target_n x target_r matrix. When target_r = r + 1 a
/// unit column (single 1 in row orig_rows) is inserted at column p with sign +1.
BorderedFactor border(const DenseMatrix& g, const SignatureVector& j, std::size_t target_r,
                      std::size_t target_n);

/// Drop the synthetic column and the padding rows from a bordered run.
HsvdResult strip_border(HsvdResult result, const BorderInfo& info);

/// drive(), bordering first when r is odd.
HsvdResult drive_bordered(const DenseMatrix& g, const SignatureVector& j, const SolverConfig& cfg = {});

}  // namespace hjac
