#include "hjac/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>

#include "hjac/bench.hpp"
#include "hjac/errors.hpp"
#include "hjac/factory.hpp"
#include "hjac/hsvd.hpp"
#include "hjac/matrix_io.hpp"
#include "hjac/strategy.hpp"

namespace hjac::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct SolveFlags {
    std::string in;
    std::string out;
    bool no_sort = false;
    bool no_accumulate_v = false;
    bool no_skip = false;
    bool border = false;
    std::size_t max_sweeps = 30;
    std::size_t workers = 1;
    std::size_t chunk = kDefaultChunk;
    std::string schedule = "modulus";
    std::string telemetry;
};

void add_solve_options(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--in", f.in, "bundle directory or GJH1 factor file")->required();
    cmd->add_option("--out", f.out, "output directory for result files");
    cmd->add_flag("--no-sort", f.no_sort, "disable diagonal sorting between quasi-sweeps");
    cmd->add_flag("--no-accumulate-v", f.no_accumulate_v, "do not accumulate V^{-T}");
    cmd->add_flag("--no-skip", f.no_skip, "disable the relative orthogonality skip");
    cmd->add_flag("--border", f.border, "border odd column counts with a synthetic unit column");
    cmd->add_option("--max-sweeps", f.max_sweeps, "quasi-sweep limit")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", f.workers, "worker threads per step")->check(CLI::PositiveNumber);
    cmd->add_option("--chunk", f.chunk, "dot-product lane count")->check(CLI::PositiveNumber);
    cmd->add_option("--schedule", f.schedule, "pivot schedule")
        ->check(CLI::IsMember({"modulus", "row-cyclic"}));
    cmd->add_option("--telemetry", f.telemetry, "write per-sweep telemetry CSV to this file");
}

SolverConfig to_config(const SolveFlags& f) {
    SolverConfig cfg;
    cfg.max_sweeps = f.max_sweeps;
    cfg.sort = !f.no_sort;
    cfg.accumulate_v = !f.no_accumulate_v;
    cfg.use_rel_orth_skip = !f.no_skip;
    cfg.workers = f.workers;
    cfg.chunk = f.chunk;
    cfg.schedule = f.schedule == "row-cyclic" ? Schedule::row_cyclic : Schedule::modulus;
    return cfg;
}

DenseMatrix as_column(const std::vector<double>& v) { return DenseMatrix(v.size(), 1, v); }

int cmd_solve(const SolveFlags& f, bool eigen_mode, std::ostream& out) {
    const auto bundle = read_bundle(f.in);
    const auto cfg = to_config(f);
    if (!f.border && cfg.schedule == Schedule::modulus && bundle.g.cols() % 2 != 0)
        throw UsageError("factor has odd column count " + std::to_string(bundle.g.cols()) + "; pass --border");

    const auto outcome = run_solver(bundle, cfg, f.border);
    const auto& res = outcome.result;
    const auto p = static_cast<std::uint32_t>(bundle.j.positives());

    if (!f.out.empty()) {
        const fs::path dir(f.out);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
        write_gjh(dir / "sigma.gjh", as_column(res.sigma), p);
        write_gjh(dir / "U.gjh", res.u, p);
        if (eigen_mode) write_gjh(dir / "lambda.gjh", as_column(res.lambda), p);
        if (!eigen_mode && res.vinv_t) write_gjh(dir / "Vinv_t.gjh", *res.vinv_t, p);
        std::ofstream rec(dir / "record.csv", std::ios::trunc);
        if (!rec) throw IoError("cannot open for writing: " + (dir / "record.csv").string());
        write_run_record_header(rec);
        write_run_record(rec, outcome.record);
    }
    if (!f.telemetry.empty()) {
        std::ofstream tel(f.telemetry, std::ios::trunc);
        if (!tel) throw IoError("cannot open for writing: " + f.telemetry);
        write_telemetry_csv(tel, res.telemetry);
    }
    write_run_record_header(out);
    write_run_record(out, outcome.record);
    return res.stop_reason == StopReason::max_sweeps ? kNonConvergence : kOk;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    auto parse = [&](std::string_view s) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError("bad range '" + text + "'");
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const auto v = parse(text);
        return {v, v};
    }
    return {parse(std::string_view(text).substr(0, dots)), parse(std::string_view(text).substr(dots + 2))};
}

int cmd_check_strategy(const std::string& range, const std::string& dump, std::ostream& out) {
    const auto [lo, hi] = parse_range(range);
    if (lo < 4 || hi < lo) throw UsageError("range must satisfy 4 <= lo <= hi, got '" + range + "'");
    if (lo % 2 != 0 || hi % 2 != 0) throw UsageError("column counts must be even, got '" + range + "'");

    bool all_ok = true;
    out << "n,coverage,doubled,weak_equivalence,shift\n";
    for (std::size_t n = lo; n <= hi; n += 2) {
        const auto ordering = enumerate_modified_modulus(n, 1);
        const auto cov = validate_coverage(ordering, n / 2);
        const auto weak = weakly_equivalent_modulus_rowcyclic(n);
        out << n << ',' << (cov.ok ? "pass" : "FAIL") << ",\"";
        for (std::size_t k = 0; k < cov.doubled.size(); ++k) out << (k ? " " : "") << cov.doubled[k];
        out << "\"," << (weak.equivalent ? "pass" : "FAIL") << ',';
        if (weak.shift) out << *weak.shift;
        out << '\n';
        for (const auto& msg : cov.failures) out << "  coverage n=" << n << ": " << msg << '\n';
        if (!weak.equivalent) out << "  weak-equivalence n=" << n << ": " << weak.diagnostics << '\n';
        all_ok = all_ok && cov.ok && weak.equivalent;
        if (!dump.empty() && lo == hi) {
            std::ofstream f(dump, std::ios::trunc);
            if (!f) throw IoError("cannot open for writing: " + dump);
            ordering.write_csv(f);
        }
    }
    return all_ok ? kOk : kCheckFailed;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int dispatch(CLI::App& app, const std::vector<std::string>& argv_tail, std::ostream& out, std::ostream& err) {
    // gen
    SpectrumSpec gen_spec;
    std::optional<double> gen_a;
    std::optional<std::size_t> gen_positives;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a test bundle (M, G, J, lambda)");
    gen->add_option("--n", gen_spec.n, "matrix order")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    gen->add_option("--a", gen_a, "spectrum scale (default by order)")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_spec.seed, "RNG seed")->required();
    gen->add_option("--positives", gen_positives, "force this many positive eigenvalues");
    gen->add_option("--out", gen_out, "bundle directory")->required();

    // factor
    std::string factor_in, factor_out;
    auto* factor = app.add_subcommand("factor", "factor a symmetric matrix as G J G^T");
    factor->add_option("--in", factor_in, "symmetric matrix (GJH1 or .csv)")->required();
    factor->add_option("--out", factor_out, "output GJH1 factor file")->required();

    SolveFlags hsvd_flags, eig_flags;
    auto* hsvd = app.add_subcommand("hsvd", "hyperbolic SVD of a factor");
    add_solve_options(hsvd, hsvd_flags);
    auto* eig = app.add_subcommand("eig", "eigenvalues of M = G J G^T");
    add_solve_options(eig, eig_flags);

    std::string check_range, check_dump;
    auto* check = app.add_subcommand("check-strategy", "verify pivot strategy coverage and equivalence");
    check->add_option("--n", check_range, "even n or range lo..hi")->required();
    check->add_option("--dump-ordering", check_dump, "write step,i,j CSV (single n only)");

    BenchOptions bench_opts;
    std::string bench_orders = "160", bench_signs = "0,small,half", bench_out;
    std::optional<double> bench_a;
    SolveFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "sweep/time/accuracy table");
    bench->add_option("--orders", bench_orders, "comma-separated matrix orders");
    bench->add_option("--signs", bench_signs, "comma-separated positive counts (int, small, half, all)");
    bench->add_option("--repeats", bench_opts.repeats, "runs per configuration")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_opts.seed, "RNG seed");
    bench->add_option("--a", bench_a, "spectrum scale (default by order)")->check(CLI::PositiveNumber);
    bench->add_option("--workers", bench_flags.workers, "worker threads per step")->check(CLI::PositiveNumber);
    bench->add_flag("--no-accumulate-v", bench_flags.no_accumulate_v, "do not accumulate V^{-T}");
    bench->add_option("--out", bench_out, "write CSV here instead of stdout");

    app.require_subcommand(1);

    std::vector<std::string> reversed(argv_tail.rbegin(), argv_tail.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    if (gen->parsed()) {
        gen_spec.a = gen_a.value_or(scale_for_order(gen_spec.n));
        gen_spec.positives = gen_positives;
        if (gen_positives && *gen_positives > gen_spec.n) throw UsageError("--positives exceeds --n");
        const auto inst = generate_instance(gen_spec);
        write_bundle(gen_out, inst);
        out << "seed,n,a,p\n" << gen_spec.seed << ',' << gen_spec.n << ',' << gen_spec.a << ','
            << inst.factor.j.positives() << '\n';
        return kOk;
    }
    if (factor->parsed()) {
        const fs::path in(factor_in);
        const DenseMatrix m = in.extension() == ".csv" ? read_csv(in) : read_gjh(in).matrix;
        if (m.rows() != m.cols()) throw UsageError("factor: input is not square");
        const auto fp = bunch_parlett_factor(m);
        write_gjh(factor_out, fp.g, static_cast<std::uint32_t>(fp.j.positives()));
        out << "n,p\n" << fp.g.rows() << ',' << fp.j.positives() << '\n';
        return kOk;
    }
    if (hsvd->parsed()) return cmd_solve(hsvd_flags, false, out);
    if (eig->parsed()) return cmd_solve(eig_flags, true, out);
    if (check->parsed()) return cmd_check_strategy(check_range, check_dump, out);
    if (bench->parsed()) {
        bench_opts.orders.clear();
        for (const auto& tok : split_list(bench_orders)) {
            std::size_t v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size() || v < 2)
                throw UsageError("bad order '" + tok + "'");
            bench_opts.orders.push_back(v);
        }
        bench_opts.signs = split_list(bench_signs);
        for (const auto& s : bench_opts.signs) {
            for (auto n : bench_opts.orders) {
                try {
                    resolve_sign_count(s, n);
                } catch (const DomainError& e) {
                    throw UsageError(e.what());
                }
            }
        }
        bench_opts.a = bench_a;
        bench_opts.base = to_config(bench_flags);
        const auto rows = run_bench(bench_opts);
        std::ofstream file;
        std::ostream* sink = &out;
        if (!bench_out.empty()) {
            file.open(bench_out, std::ios::trunc);
            if (!file) throw IoError("cannot open for writing: " + bench_out);
            sink = &file;
        }
        write_run_record_header(*sink);
        for (const auto& r : rows) write_run_record(*sink, r);
        return kOk;
    }
    return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"hjac: one-sided hyperbolic Jacobi HSVD and symmetric indefinite eigensolver"};
    app.name("hjac");
    try {
        return dispatch(app, args, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericalSingularityError& e) {
        err << "numerical singularity: " << e.what() << '\n';
        return kNumericalSingularity;
    } catch (const DefinitenessLostError& e) {
        err << "definiteness lost: " << e.what() << '\n';
        return kDefinitenessLost;
    } catch (const RankDeficiencyError& e) {
        err << "rank deficiency: " << e.what() << '\n';
        return kRankDeficient;
    } catch (const ShapeError& e) {
        err << "shape error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(args, out, err);
}

}  // namespace hjac::cli
