#include "hjac/hsvd.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "hjac/errors.hpp"

namespace hjac {

std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::orthogonal: return "orthogonal";
        case StopReason::quadratic: return "quadratic";
        case StopReason::max_sweeps: return "max_sweeps";
    }
    return "?";
}

std::string_view to_string(Schedule s) noexcept {
    return s == Schedule::modulus ? "modulus" : "row-cyclic";
}

void write_telemetry_csv(std::ostream& out, std::span<const SweepTelemetry> rows) {
    out << "sweep,rotations,skips,max_abs_t,code\n";
    const auto old = out.precision(17);
    for (const auto& t : rows)
        out << t.sweep << ',' << t.rotations << ',' << t.skips << ',' << t.max_abs_t << ','
            << static_cast<int>(t.code) << '\n';
    out.precision(old);
}

DiagonalPackageVector precompute(const DenseMatrix& g, const SignatureVector& j, std::size_t chunk) {
    const std::size_t r = g.cols();
    if (j.size() != r)
        throw ShapeError("precompute: signature length " + std::to_string(j.size()) + " != r=" +
                         std::to_string(r));
    DiagonalPackageVector d(r);
    for (std::size_t k = 0; k < r; ++k) {
        const double nrm = squared_norm(g.col(k), chunk);
        if (!(nrm > 0.0)) throw RankDeficiencyError("precompute: column " + std::to_string(k) + " is zero");
        d[k] = {nrm, static_cast<std::uint32_t>(k), static_cast<std::int8_t>(j[k])};
    }
    return d;
}

void sort_diagonal(DiagonalPackageVector& d, std::size_t p) {
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(std::min(p, d.size()));
    std::stable_sort(d.begin(), mid, [](const auto& a, const auto& b) { return a.d > b.d; });
    std::stable_sort(mid, d.end(), [](const auto& a, const auto& b) { return a.d < b.d; });
}

void rotate_pivot_pair(SolverWorkspace& ws, std::size_t i, std::size_t j, ConvergenceCode& code,
                       const SolverConfig& cfg, BlockStats& stats, std::size_t block) {
    auto& pi = ws.diag[i];
    auto& pj = ws.diag[j];
    auto gi = ws.g.col(pi.rho);
    auto gj = ws.g.col(pj.rho);
    const PivotGram gram{pi.d, pj.d, dot_chunked(gi, gj, cfg.chunk)};

    if (cfg.use_rel_orth_skip && relatively_orthogonal(gram, cfg.eps)) {
        ++stats.skips;
        return;
    }
    const int hyp = pi.sign == pj.sign ? -1 : 1;
    Rotation rot;
    try {
        rot = compute_rotation(gram, hyp);
    } catch (const DefinitenessLostError& e) {
        std::ostringstream msg;
        msg << e.what() << " (block " << block << ", pivot positions " << i << ',' << j << ", columns "
            << pi.rho << ',' << pj.rho << ')';
        throw DefinitenessLostError(msg.str(), block, i, j);
    }
    if (rot.skipped) {
        ++stats.skips;
        return;
    }
    std::tie(pi.d, pj.d) = fused_pair_update(gi, gj, rot.t, rot.c, rot.hyp, cfg.chunk);
    if (ws.vinv_t) {
        auto vi = ws.vinv_t->col(pi.rho);
        auto vj = ws.vinv_t->col(pj.rho);
        // Norms of V columns are not needed; the by-product is discarded.
        fused_pair_update(vi, vj, rot.t, rot.c, rot.hyp, cfg.chunk);
    }
    ++stats.rotations;
    stats.max_abs_t = std::max(stats.max_abs_t, std::fabs(rot.t));
    code = convergence_code(code, true, rot.t, cfg.teps);
}

void jacobi_step(SolverWorkspace& ws, StepperState& stepper, std::span<ConvergenceCode> codes,
                 const SolverConfig& cfg, std::span<BlockStats> stats) {
    const std::size_t b = stepper.block_count();
    if (codes.size() != b) throw ShapeError("jacobi_step: one convergence code per block required");
    std::vector<BlockStats> scratch;
    if (stats.empty()) {
        scratch.resize(b);
        stats = scratch;
    }
    for (std::size_t k = 0; k < b; ++k) {
        const auto pr = stepper.blocks[k].pair();
        rotate_pivot_pair(ws, pr.i, pr.j, codes[k], cfg, stats[k], k);
    }
    stepper_advance_all(stepper);
}

ConvergenceDecision check_convergence(std::span<const ConvergenceCode> codes) {
    auto all = ConvergenceCode::none;
    for (auto c : codes) all = all | c;
    switch (all) {
        case ConvergenceCode::none: return ConvergenceDecision::stop_orthogonal;
        case ConvergenceCode::quadratic: return ConvergenceDecision::stop_quadratic;
        default: return ConvergenceDecision::proceed;
    }
}

namespace {

// All r steps of one modulus quasi-sweep. Blocks are statically dealt to
// workers (k mod W), with a barrier between steps.
void run_modulus_sweep(SolverWorkspace& ws, StepperState& stepper, std::span<ConvergenceCode> codes,
                       std::span<BlockStats> stats, const SolverConfig& cfg) {
    const std::size_t r = stepper.r;
    const std::size_t b = stepper.block_count();
    const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, b);
    if (workers == 1) {
        for (std::size_t s = 0; s < r; ++s) jacobi_step(ws, stepper, codes, cfg, stats);
        return;
    }

    std::barrier sync(static_cast<std::ptrdiff_t>(workers));
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&](std::size_t w) {
        for (std::size_t s = 0; s < r; ++s) {
            if (!failed.load(std::memory_order_relaxed)) {
                try {
                    for (std::size_t k = w; k < b; k += workers) {
                        const auto pr = stepper.blocks[k].pair();
                        rotate_pivot_pair(ws, pr.i, pr.j, codes[k], cfg, stats[k], k);
                        stepper_advance(stepper, k);
                    }
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                }
            }
            sync.arrive_and_wait();
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
        work(0);
    }
    if (error) std::rethrow_exception(error);
}

void run_row_cyclic_sweep(SolverWorkspace& ws, ConvergenceCode& code, BlockStats& stats,
                          const SolverConfig& cfg) {
    const std::size_t r = ws.diag.size();
    for (std::size_t i = 0; i + 1 < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) rotate_pivot_pair(ws, i, j, code, cfg, stats, 0);
}

HsvdResult extract(const SolverWorkspace& ws) {
    const std::size_t n = ws.g.rows();
    const std::size_t r = ws.g.cols();
    HsvdResult res;
    res.sigma.resize(r);
    res.lambda.resize(r);
    res.u = DenseMatrix(n, r);
    for (const auto& pkg : ws.diag) {
        const std::size_t c = pkg.rho;
        const double sigma = std::sqrt(pkg.d);
        res.sigma[c] = sigma;
        res.lambda[c] = pkg.sign * pkg.d;
        auto src = ws.g.col(c);
        auto dst = res.u.col(c);
        for (std::size_t k = 0; k < n; ++k) dst[k] = src[k] / sigma;
    }
    res.vinv_t = ws.vinv_t;
    return res;
}

}  // namespace

HsvdResult drive(const DenseMatrix& g, const SignatureVector& j, const SolverConfig& cfg,
                 const SweepObserver& observer) {
    const std::size_t n = g.rows();
    const std::size_t r = g.cols();
    if (j.size() != r) throw ShapeError("drive: signature length != column count");
    if (r == 0) throw ShapeError("drive: empty factor");
    if (n < r)
        throw ShapeError("drive: need n >= r, got " + std::to_string(n) + "x" + std::to_string(r) +
                         " (shorten by QR first)");
    if (cfg.schedule == Schedule::modulus && r % 2 != 0)
        throw ShapeError("drive: modulus schedule needs even r, got " + std::to_string(r) + " (border first)");
    if (!g.all_finite()) throw DomainError("drive: factor contains NaN or Inf");

    SolverWorkspace ws{g, std::nullopt, {}};
    if (cfg.accumulate_v) ws.vinv_t = DenseMatrix::identity(r);
    ws.diag = precompute(ws.g, j, cfg.chunk);
    const std::size_t p = j.positives();
    if (cfg.sort) sort_diagonal(ws.diag, p);

    const bool modulus = cfg.schedule == Schedule::modulus;
    StepperState stepper;
    std::size_t blocks = 1;
    if (modulus) {
        stepper = stepper_init(r);
        blocks = stepper.block_count();
    }
    std::vector<ConvergenceCode> codes(blocks);
    std::vector<BlockStats> stats(blocks);

    HsvdResult res;
    std::vector<SweepTelemetry> telemetry;
    StopReason stop = StopReason::max_sweeps;
    std::size_t sweeps = 0;
    for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        std::fill(codes.begin(), codes.end(), ConvergenceCode::none);
        std::fill(stats.begin(), stats.end(), BlockStats{});
        if (modulus)
            run_modulus_sweep(ws, stepper, codes, stats, cfg);
        else
            run_row_cyclic_sweep(ws, codes[0], stats[0], cfg);
        ++sweeps;

        const auto decision = check_convergence(codes);
        SweepTelemetry t;
        t.sweep = sweep;
        for (std::size_t k = 0; k < blocks; ++k) {
            t.rotations += stats[k].rotations;
            t.skips += stats[k].skips;
            t.max_abs_t = std::max(t.max_abs_t, stats[k].max_abs_t);
            t.code = t.code | codes[k];
        }
        telemetry.push_back(t);
        if (observer) observer(t, ws);
        if (cfg.sort) sort_diagonal(ws.diag, p);

        if (decision == ConvergenceDecision::stop_orthogonal) {
            stop = StopReason::orthogonal;
            break;
        }
        if (decision == ConvergenceDecision::stop_quadratic) {
            stop = StopReason::quadratic;
            break;
        }
    }

    res = extract(ws);
    res.sweeps_used = sweeps;
    res.stop_reason = stop;
    res.telemetry = std::move(telemetry);
    return res;
}

DenseMatrix recover_v(const DenseMatrix& vinv_t, const SignatureVector& j) {
    const std::size_t r = vinv_t.rows();
    if (vinv_t.cols() != r || j.size() != r) throw ShapeError("recover_v: shape mismatch");
    DenseMatrix v = vinv_t;
    for (std::size_t c = 0; c < r; ++c)
        for (std::size_t i = 0; i < r; ++i)
            if (j[i] != j[c]) v(i, c) = -v(i, c);
    return v;
}

BorderedFactor border(const DenseMatrix& g, const SignatureVector& j, std::size_t target_r,
                      std::size_t target_n) {
    const std::size_t n = g.rows();
    const std::size_t r = g.cols();
    if (j.size() != r) throw ShapeError("border: signature length != column count");
    if (target_r < r || target_r > r + 1 || target_r % 2 != 0)
        throw ShapeError("border: target_r must be r or r + 1 and even");
    const bool synthetic = target_r == r + 1;
    if (target_n < n || target_n < target_r || (synthetic && target_n < n + 1))
        throw ShapeError("border: target_n=" + std::to_string(target_n) + " too small for " +
                         std::to_string(n) + "x" + std::to_string(r));

    const std::size_t p = j.positives();
    BorderedFactor out{DenseMatrix(target_n, target_r), SignatureVector(target_r, p + (synthetic ? 1 : 0)),
                       BorderInfo{n, r, std::nullopt}};
    for (std::size_t k = 0; k < r; ++k) {
        const std::size_t dst = (synthetic && k >= p) ? k + 1 : k;
        std::copy(g.col(k).begin(), g.col(k).end(), out.g.col(dst).begin());
    }
    if (synthetic) {
        out.g(n, p) = 1.0;
        out.info.synthetic_column = p;
    }
    return out;
}

HsvdResult strip_border(HsvdResult res, const BorderInfo& info) {
    const std::size_t rb = res.sigma.size();
    std::vector<std::size_t> keep;
    keep.reserve(info.orig_cols);
    for (std::size_t c = 0; c < rb; ++c)
        if (!info.synthetic_column || c != *info.synthetic_column) keep.push_back(c);
    if (keep.size() != info.orig_cols) throw ShapeError("strip_border: result does not match border info");

    HsvdResult out;
    out.sweeps_used = res.sweeps_used;
    out.stop_reason = res.stop_reason;
    out.telemetry = std::move(res.telemetry);
    out.u = DenseMatrix(info.orig_rows, keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.sigma.push_back(res.sigma[keep[k]]);
        out.lambda.push_back(res.lambda[keep[k]]);
        auto src = res.u.col(keep[k]);
        std::copy_n(src.begin(), info.orig_rows, out.u.col(k).begin());
    }
    if (res.vinv_t) {
        DenseMatrix v(keep.size(), keep.size());
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = 0; b < keep.size(); ++b) v(a, b) = (*res.vinv_t)(keep[a], keep[b]);
        out.vinv_t = std::move(v);
    }
    return out;
}

HsvdResult drive_bordered(const DenseMatrix& g, const SignatureVector& j, const SolverConfig& cfg) {
    const std::size_t r = g.cols();
    if (r % 2 == 0 || cfg.schedule == Schedule::row_cyclic) return drive(g, j, cfg);
    const std::size_t target_r = r + 1;
    const std::size_t target_n = std::max(g.rows() + 1, target_r);
    auto b = border(g, j, target_r, target_n);
    return strip_border(drive(b.g, b.j, cfg), b.info);
}

}  // namespace hjac
