#include "hjac/strategy.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "hjac/errors.hpp"

namespace hjac {

std::ostream& operator<<(std::ostream& os, const IndexPair& p) {
    return os << '(' << p.i << ',' << p.j << ')';
}

StepperState stepper_init(std::size_t r) {
    if (r < 2 || r % 2 != 0)
        throw ShapeError("stepper: column count must be even and >= 2, got " + std::to_string(r));
    StepperState s;
    s.r = r;
    s.blocks.resize(r / 2);
    for (std::size_t k = 0; k < r / 2; ++k) {
        auto& b = s.blocks[k];
        b.ip = b.iblk = k;
        b.jp = b.jblk = r - k - 1;
    }
    return s;
}

void stepper_advance(StepperState& state, std::size_t k) {
    auto& b = state.blocks[k];
    const std::size_t r = state.r;
    // ip + jp >= r - 1, not "> r - 1": the strict form walks off the matrix
    // (pair (0, r)) right after the antidiagonal start.
    if (b.ip + b.jp >= r - 1) {
        ++b.ip;
        if (b.ip == b.jp) {
            b.ip -= r / 2;
            b.jp = b.ip;
        }
        b.iblk = b.ip;
    } else {
        ++b.jp;
        b.jblk = b.jp;
    }
}

void stepper_advance_all(StepperState& state) {
    for (std::size_t k = 0; k < state.blocks.size(); ++k) stepper_advance(state, k);
}

PivotOrdering::PivotOrdering(std::size_t n, std::vector<Step> steps) : n_(n), steps_(std::move(steps)) {
    for (auto& step : steps_) {
        for (auto& p : step) {
            if (p.i > p.j) std::swap(p.i, p.j);
            if (p.i == p.j || p.j >= n_)
                throw DomainError("ordering: invalid pair (" + std::to_string(p.i) + "," +
                                  std::to_string(p.j) + ") for n=" + std::to_string(n_));
        }
        std::sort(step.begin(), step.end());
    }
}

std::size_t PivotOrdering::pair_count() const noexcept {
    std::size_t total = 0;
    for (const auto& s : steps_) total += s.size();
    return total;
}

std::vector<IndexPair> PivotOrdering::linearize() const {
    std::vector<IndexPair> out;
    out.reserve(pair_count());
    for (const auto& s : steps_) out.insert(out.end(), s.begin(), s.end());
    return out;
}

std::vector<std::size_t> PivotOrdering::step_offsets() const {
    std::vector<std::size_t> off;
    off.reserve(steps_.size());
    std::size_t pos = 0;
    for (const auto& s : steps_) {
        off.push_back(pos);
        pos += s.size();
    }
    return off;
}

bool PivotOrdering::is_cyclic() const {
    if (pair_count() != n_ * (n_ - 1) / 2) return false;
    std::vector<char> seen(n_ * n_, 0);
    for (const auto& s : steps_)
        for (const auto& p : s) {
            char& f = seen[p.i * n_ + p.j];
            if (f) return false;
            f = 1;
        }
    return true;
}

void PivotOrdering::write_csv(std::ostream& out) const {
    for (std::size_t s = 0; s < steps_.size(); ++s)
        for (const auto& p : steps_[s]) out << s << ',' << p.i << ',' << p.j << '\n';
}

PivotOrdering PivotOrdering::sequential(std::size_t n, const std::vector<IndexPair>& pairs) {
    std::vector<Step> steps;
    steps.reserve(pairs.size());
    for (const auto& p : pairs) steps.push_back({p});
    return PivotOrdering(n, std::move(steps));
}

PivotOrdering enumerate_modified_modulus(std::size_t r, std::size_t sweeps) {
    auto state = stepper_init(r);
    std::vector<PivotOrdering::Step> steps;
    steps.reserve(r * sweeps);
    for (std::size_t s = 0; s < r * sweeps; ++s) {
        PivotOrdering::Step step;
        step.reserve(state.blocks.size());
        for (const auto& b : state.blocks) step.push_back(b.pair());
        steps.push_back(std::move(step));
        stepper_advance_all(state);
    }
    return PivotOrdering(r, std::move(steps));
}

PivotOrdering enumerate_row_cyclic(std::size_t n) {
    if (n < 2) throw ShapeError("row-cyclic: n must be >= 2");
    std::vector<IndexPair> pairs;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    return PivotOrdering::sequential(n, pairs);
}

PivotOrdering enumerate_antidiagonal(std::size_t n) {
    if (n < 2) throw ShapeError("antidiagonal: n must be >= 2");
    // Step s (zero-based) holds every pair with i + j = s + 1.
    std::vector<PivotOrdering::Step> steps;
    for (std::size_t sum = 1; sum + 2 <= 2 * n - 1; ++sum) {
        PivotOrdering::Step step;
        for (std::size_t i = 0; 2 * i < sum; ++i) {
            const std::size_t j = sum - i;
            if (j < n) step.push_back({i, j});
        }
        steps.push_back(std::move(step));
    }
    return PivotOrdering(n, std::move(steps));
}

PivotOrdering enumerate_classic_modulus(std::size_t n) {
    if (n < 3) throw ShapeError("classic modulus: n must be >= 3");
    const auto anti = enumerate_antidiagonal(n);
    const auto& a = anti.steps();
    // One-based antidiagonal step labels: n-1, n, then (n+k, k) for k = 1..n-3, then n-2.
    std::vector<std::size_t> labels{n - 1, n};
    for (std::size_t k = 1; n + k <= 2 * n - 3; ++k) {
        labels.push_back(n + k);
        labels.push_back(k);
    }
    labels.push_back(n - 2);
    std::vector<PivotOrdering::Step> steps;
    steps.reserve(labels.size());
    for (auto label : labels) steps.push_back(a[label - 1]);
    return PivotOrdering(n, std::move(steps));
}

namespace {

void require_distinct(const std::vector<IndexPair>& lin, std::size_t n, const char* which) {
    std::vector<char> seen(n * n, 0);
    for (const auto& p : lin) {
        char& f = seen[p.i * n + p.j];
        if (f) {
            std::ostringstream msg;
            msg << "trace_equivalent: " << which << " ordering repeats pair " << p;
            throw DomainError(msg.str());
        }
        f = 1;
    }
}

}  // namespace

bool trace_equivalent(const PivotOrdering& a, const PivotOrdering& b) {
    const std::size_t n = std::max(a.order(), b.order());
    const auto la = a.linearize();
    const auto lb = b.linearize();
    require_distinct(la, n, "first");
    require_distinct(lb, n, "second");
    if (la.size() != lb.size()) return false;

    auto sa = la;
    auto sb = lb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;

    // Dependent pairs share an index, so the relative order of all dependent
    // pairs is fixed iff the projection onto every index agrees.
    std::vector<std::vector<IndexPair>> pa(n), pb(n);
    for (const auto& p : la) {
        pa[p.i].push_back(p);
        pa[p.j].push_back(p);
    }
    for (const auto& p : lb) {
        pb[p.i].push_back(p);
        pb[p.j].push_back(p);
    }
    return pa == pb;
}

PivotOrdering shift_ordering(const PivotOrdering& o, long long c) {
    const auto lin = o.linearize();
    const std::size_t np = lin.size();
    if (np == 0) return o;
    const auto m = static_cast<long long>(np);
    const auto shift = static_cast<std::size_t>(((c % m) + m) % m);

    std::vector<IndexPair> moved(np);
    for (std::size_t pos = 0; pos < np; ++pos) moved[(pos + shift) % np] = lin[pos];

    // Step boundaries travel with their pairs; position 0 always starts a step.
    std::set<std::size_t> cuts{0};
    for (auto off : o.step_offsets()) cuts.insert((off + shift) % np);

    std::vector<PivotOrdering::Step> steps;
    std::vector<std::size_t> bounds(cuts.begin(), cuts.end());
    bounds.push_back(np);
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k)
        steps.emplace_back(moved.begin() + static_cast<std::ptrdiff_t>(bounds[k]),
                           moved.begin() + static_cast<std::ptrdiff_t>(bounds[k + 1]));
    return PivotOrdering(o.order(), std::move(steps));
}

WeakEquivalenceWitness weakly_equivalent_modulus_rowcyclic(std::size_t n) {
    WeakEquivalenceWitness w;
    std::ostringstream diag;
    const auto row = enumerate_row_cyclic(n);
    const auto anti = enumerate_antidiagonal(n);
    const auto modulus = enumerate_classic_modulus(n);

    w.rowcyclic_equiv_antidiagonal = trace_equivalent(row, anti);
    if (!w.rowcyclic_equiv_antidiagonal) diag << "row-cyclic(" << n << ") !~ antidiagonal; ";

    const std::size_t np = n * (n - 1) / 2;
    for (std::size_t c = 0; c < np; ++c) {
        if (trace_equivalent(shift_ordering(anti, static_cast<long long>(c)), modulus)) {
            w.shift = c;
            break;
        }
    }
    if (!w.shift) diag << "no shift c in [0," << np << ") maps antidiagonal onto classic modulus";
    w.equivalent = w.rowcyclic_equiv_antidiagonal && w.shift.has_value();
    w.diagnostics = diag.str();
    return w;
}

CoverageReport validate_coverage(const PivotOrdering& o, std::size_t q) {
    CoverageReport rep;
    const std::size_t r = 2 * q;
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };

    if (o.order() != r) fail("ordering order " + std::to_string(o.order()) + " != r=" + std::to_string(r));

    std::map<IndexPair, std::size_t> count;
    const auto& steps = o.steps();
    for (std::size_t s = 0; s < steps.size(); ++s) {
        std::vector<char> used(r, 0);
        for (const auto& p : steps[s]) {
            ++count[p];
            if (p.j >= r) continue;
            if (used[p.i] || used[p.j]) {
                std::ostringstream msg;
                msg << "step " << s << ": pair " << p << " overlaps another pair";
                fail(msg.str());
            }
            used[p.i] = used[p.j] = 1;
        }
    }

    const std::size_t total = o.pair_count();
    if (total != r * q) fail("total annihilations " + std::to_string(total) + " != " + std::to_string(r * q));

    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = i + 1; j < r; ++j) {
            const IndexPair p{i, j};
            const auto it = count.find(p);
            const std::size_t c = it == count.end() ? 0 : it->second;
            const std::size_t want = (j == i + q) ? 2 : 1;
            if (c == 2 && want == 2) rep.doubled.push_back(p);
            if (c != want) {
                std::ostringstream msg;
                msg << "pair " << p << (c == 0 ? " missing" : " annihilated " + std::to_string(c) + " times")
                    << " (expected " << want << ")";
                fail(msg.str());
            }
        }
    }
    rep.ok = rep.failures.empty();
    return rep;
}

}  // namespace hjac
