#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hjac {

/// Unordered index pair stored with i < j (zero-based).
struct IndexPair {
    std::size_t i = 0;
    std::size_t j = 0;

    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Per-block state of the modified modulus stepper. (ip, jp) are auxiliary
/// cursors; (iblk, jblk) is the pivot pair the block works on in this step.
struct StepperBlock {
    std::size_t ip = 0;
    std::size_t jp = 0;
    std::size_t iblk = 0;
    std::size_t jblk = 0;

    IndexPair pair() const noexcept { return {iblk, jblk}; }
    friend bool operator==(const StepperBlock&, const StepperBlock&) = default;
};

struct StepperState {
    std::size_t r = 0;
    std::vector<StepperBlock> blocks;  // r / 2 entries

    std::size_t block_count() const noexcept { return blocks.size(); }
    friend bool operator==(const StepperState&, const StepperState&) = default;
};

/// Antidiagonal start: block k works on (k, r - k - 1). r must be even and >= 2.
StepperState stepper_init(std::size_t r);

/// Advance one block to its next pivot pair.
void stepper_advance(StepperState& state, std::size_t k);

/// Advance every block (one step transition).
void stepper_advance_all(StepperState& state);

/// A pivot ordering as a sequence of steps of mutually disjoint pairs.
class PivotOrdering {
public:
    using Step = std::vector<IndexPair>;

    PivotOrdering() = default;
    PivotOrdering(std::size_t n, std::vector<Step> steps);

    std::size_t order() const noexcept { return n_; }
    const std::vector<Step>& steps() const noexcept { return steps_; }
    std::size_t step_count() const noexcept { return steps_.size(); }
    std::size_t pair_count() const noexcept;

    /// Steps concatenated in order; pairs within a step ascending by (i, j).
    std::vector<IndexPair> linearize() const;

    /// Position in the linearization at which each step begins.
    std::vector<std::size_t> step_offsets() const;

    /// Every pair i < j of 0..n-1 appears exactly once.
    bool is_cyclic() const;

    /// "step,i,j" lines, zero-based.
    void write_csv(std::ostream& out) const;

    /// Convenience: one pair per step.
    static PivotOrdering sequential(std::size_t n, const std::vector<IndexPair>& pairs);

    friend bool operator==(const PivotOrdering&, const PivotOrdering&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Step> steps_;
};

/// `sweeps` quasi-sweeps of the modified modulus stepper (r steps each), with
/// the stepper state carried across sweeps.
PivotOrdering enumerate_modified_modulus(std::size_t r, std::size_t sweeps = 1);

PivotOrdering enumerate_row_cyclic(std::size_t n);
PivotOrdering enumerate_antidiagonal(std::size_t n);
/// Antidiagonal steps reordered as (n-1, n, n+1, 1, n+2, 2, ..., 2n-3, n-2)
/// (one-based step labels), each antidiagonal step kept as its own step.
PivotOrdering enumerate_classic_modulus(std::size_t n);

/// Linearizations related by admissible transpositions (adjacent swaps of
/// disjoint pairs). Throws DomainError if either input repeats a pair.
bool trace_equivalent(const PivotOrdering& a, const PivotOrdering& b);

/// Cyclic shift: the pair at linear position I moves to (I + c) mod n_p.
PivotOrdering shift_ordering(const PivotOrdering& o, long long c);

struct WeakEquivalenceWitness {
    bool equivalent = false;
    bool rowcyclic_equiv_antidiagonal = false;
    std::optional<std::size_t> shift;  ///< c with shift(antidiagonal, c) ~ classic modulus
    std::string diagnostics;
};

/// Witness chain row-cyclic ~ antidiagonal, shift(antidiagonal, c) ~ classic modulus.
WeakEquivalenceWitness weakly_equivalent_modulus_rowcyclic(std::size_t n);

struct CoverageReport {
    bool ok = false;
    std::vector<IndexPair> doubled;
    std::vector<std::string> failures;
};

/// Checks one quasi-sweep of the modified modulus strategy on r = 2q columns.
CoverageReport validate_coverage(const PivotOrdering& o, std::size_t q);

std::ostream& operator<<(std::ostream& os, const IndexPair& p);

}  // namespace hjac
