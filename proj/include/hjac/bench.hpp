#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjac/factory.hpp"
#include "hjac/hsvd.hpp"

namespace hjac {

/// One measured solver run.
struct RunRecord {
    std::size_t n = 0;
    std::size_t r = 0;
    std::size_t p = 0;
    std::size_t sweeps = 0;
    StopReason stop_reason = StopReason::max_sweeps;
    double wall_time = 0.0;  ///< seconds, around the solver only
    std::optional<double> max_rel_eig_err;
    double d_u = 0.0;
    std::size_t rotations = 0;
    std::size_t skips = 0;
    bool sorting_enabled = true;
    Schedule schedule = Schedule::modulus;
    std::size_t workers = 1;
};

void write_run_record_header(std::ostream& out);
void write_run_record(std::ostream& out, const RunRecord& rec);

/// max_i |lambda_i - lambda'_i| / |lambda_i| after sorting both ascending.
double max_relative_eigen_error(std::span<const double> computed, std::span<const double> truth);

/// Problem files on disk: G.gjh (with p), optionally M.gjh, lambda.gjh and
/// manifest.csv ("seed,n,a,p").
struct Bundle {
    DenseMatrix g;
    SignatureVector j;
    std::optional<DenseMatrix> m;
    std::optional<std::vector<double>> lambda_true;
    std::optional<std::uint64_t> seed;
    std::optional<double> a;
};

void write_bundle(const std::filesystem::path& dir, const TestInstance& inst);
/// `path` is a bundle directory or a single GJH1 factor file.
Bundle read_bundle(const std::filesystem::path& path);

struct SolveOutcome {
    HsvdResult result;
    RunRecord record;
};

/// Run the solver on a bundle, timing only the solve. Borders odd r when
/// `allow_border` is set.
SolveOutcome run_solver(const Bundle& bundle, const SolverConfig& cfg, bool allow_border = false);

struct BenchOptions {
    std::vector<std::size_t> orders{160};
    std::vector<std::string> signs{"0", "small", "half"};
    std::size_t repeats = 1;
    std::uint64_t seed = 1;
    std::optional<double> a;
    SolverConfig base;
};

/// Positive-sign count for a sign token: an integer, "small" (max(1, n/64)),
/// "half" (n/2) or "all" (n).
std::size_t resolve_sign_count(const std::string& token, std::size_t n);

/// Sweeps/time/accuracy rows for every order x sign count x sorting on/off x repeat.
std::vector<RunRecord> run_bench(const BenchOptions& opts);

}  // namespace hjac
