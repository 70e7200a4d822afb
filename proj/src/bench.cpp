#include "hjac/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hjac/errors.hpp"
#include "hjac/matrix_io.hpp"

namespace hjac {

namespace fs = std::filesystem;

void write_run_record_header(std::ostream& out) {
    out << "n,r,p,schedule,workers,sorting,sweeps,stop_reason,wall_time,max_rel_eig_err,dU,rotations,skips\n";
}

void write_run_record(std::ostream& out, const RunRecord& rec) {
    const auto old = out.precision(6);
    out << rec.n << ',' << rec.r << ',' << rec.p << ',' << to_string(rec.schedule) << ',' << rec.workers << ','
        << (rec.sorting_enabled ? 1 : 0) << ',' << rec.sweeps << ',' << to_string(rec.stop_reason) << ','
        << rec.wall_time << ',';
    out.precision(17);
    if (rec.max_rel_eig_err) out << *rec.max_rel_eig_err;
    else out << "nan";
    out << ',' << rec.d_u << ',' << rec.rotations << ',' << rec.skips << '\n';
    out.precision(old);
}

double max_relative_eigen_error(std::span<const double> computed, std::span<const double> truth) {
    if (computed.size() != truth.size()) throw ShapeError("eigen error: length mismatch");
    std::vector<double> a(computed.begin(), computed.end());
    std::vector<double> b(truth.begin(), truth.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::fabs(b[k] - a[k]) / std::fabs(b[k]));
    return worst;
}

namespace {

DenseMatrix column_of(std::span<const double> v) {
    return DenseMatrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

std::uint32_t count_positive(std::span<const double> v) {
    return static_cast<std::uint32_t>(std::count_if(v.begin(), v.end(), [](double x) { return x > 0.0; }));
}

}  // namespace

void write_bundle(const fs::path& dir, const TestInstance& inst) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    const auto p = static_cast<std::uint32_t>(inst.factor.j.positives());
    write_gjh(dir / "M.gjh", inst.m, count_positive(inst.lambda_true));
    write_gjh(dir / "G.gjh", inst.factor.g, p);
    write_gjh(dir / "lambda.gjh", column_of(inst.lambda_true), count_positive(inst.lambda_true));
    std::ofstream man(dir / "manifest.csv", std::ios::trunc);
    if (!man) throw IoError("cannot open for writing: " + (dir / "manifest.csv").string());
    man.precision(17);
    man << "seed,n,a,p\n" << inst.spec.seed << ',' << inst.spec.n << ',' << inst.spec.a << ',' << p << '\n';
    if (!man) throw IoError("write failed: " + (dir / "manifest.csv").string());
}

namespace {

SignatureVector signature_of(const GjhRecord& rec, const fs::path& path) {
    if (rec.p > rec.matrix.cols())
        throw IoError(path.string() + ": p=" + std::to_string(rec.p) + " exceeds column count " +
                      std::to_string(rec.matrix.cols()));
    return SignatureVector(rec.matrix.cols(), rec.p);
}

}  // namespace

Bundle read_bundle(const fs::path& path) {
    Bundle b;
    if (!fs::is_directory(path)) {
        auto rec = read_gjh(path);
        b.j = signature_of(rec, path);
        b.g = std::move(rec.matrix);
        return b;
    }
    auto g = read_gjh(path / "G.gjh");
    b.j = signature_of(g, path / "G.gjh");
    b.g = std::move(g.matrix);
    if (fs::exists(path / "M.gjh")) b.m = read_gjh(path / "M.gjh").matrix;
    if (fs::exists(path / "lambda.gjh")) {
        auto lam = read_gjh(path / "lambda.gjh").matrix;
        b.lambda_true = std::vector<double>(lam.data().begin(), lam.data().end());
    }
    if (fs::exists(path / "manifest.csv")) {
        std::ifstream man(path / "manifest.csv");
        std::string header, row;
        if (std::getline(man, header) && std::getline(man, row)) {
            std::stringstream ss(row);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (cells.size() >= 3) {
                try {
                    b.seed = std::stoull(cells[0]);
                    b.a = std::stod(cells[2]);
                } catch (const std::exception&) {
                    throw IoError("malformed manifest: " + (path / "manifest.csv").string());
                }
            }
        }
    }
    return b;
}

SolveOutcome run_solver(const Bundle& bundle, const SolverConfig& cfg, bool allow_border) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    HsvdResult res = allow_border ? drive_bordered(bundle.g, bundle.j, cfg) : drive(bundle.g, bundle.j, cfg);
    const auto t1 = clock::now();

    RunRecord rec;
    rec.n = bundle.g.rows();
    rec.r = bundle.g.cols();
    rec.p = bundle.j.positives();
    rec.sweeps = res.sweeps_used;
    rec.stop_reason = res.stop_reason;
    rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
    rec.d_u = orthonormality_distance(res.u);
    for (const auto& t : res.telemetry) {
        rec.rotations += t.rotations;
        rec.skips += t.skips;
    }
    rec.sorting_enabled = cfg.sort;
    rec.schedule = cfg.schedule;
    rec.workers = cfg.workers;
    if (bundle.lambda_true && bundle.lambda_true->size() == res.lambda.size())
        rec.max_rel_eig_err = max_relative_eigen_error(res.lambda, *bundle.lambda_true);
    return {std::move(res), rec};
}

std::size_t resolve_sign_count(const std::string& token, std::size_t n) {
    if (token == "small") return std::max<std::size_t>(1, n / 64);
    if (token == "half") return n / 2;
    if (token == "all") return n;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(token, &pos);
    } catch (const std::exception&) {
        throw DomainError("bad sign token '" + token + "'");
    }
    if (pos != token.size() || v > n) throw DomainError("bad sign token '" + token + "' for n=" + std::to_string(n));
    return static_cast<std::size_t>(v);
}

std::vector<RunRecord> run_bench(const BenchOptions& opts) {
    std::vector<RunRecord> rows;
    for (std::size_t n : opts.orders) {
        for (const auto& token : opts.signs) {
            SpectrumSpec spec;
            spec.n = n;
            spec.a = opts.a.value_or(scale_for_order(n));
            spec.seed = opts.seed;
            spec.positives = resolve_sign_count(token, n);
            const auto inst = generate_instance(spec);
            Bundle bundle{inst.factor.g, inst.factor.j, std::nullopt, inst.lambda_true, spec.seed, spec.a};
            for (bool sorting : {true, false}) {
                SolverConfig cfg = opts.base;
                cfg.sort = sorting;
                for (std::size_t rep = 0; rep < opts.repeats; ++rep)
                    rows.push_back(run_solver(bundle, cfg, true).record);
            }
        }
    }
    return rows;
}

}  // namespace hjac
