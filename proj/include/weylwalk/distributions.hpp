#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "weylwalk/chambers.hpp"

namespace weylwalk {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class StepKind { DiscreteAtoms, Gaussian, UniformSymmetric };
enum class Coupling { IidComponents, ExchangeableTable };

struct Atom {
    Rational value;
    Rational prob;
};

// One row of an exchangeable joint table: an integer step vector with its
// probability. Components need not be independent.
struct TableEntry {
    std::vector<long long> vec;
    Rational prob;
};

// Step distribution of one walk increment in R^k. Components are iid copies
// of the marginal unless a joint table is given.
struct StepDistribution {
    StepKind kind = StepKind::DiscreteAtoms;
    int k = 1;
    Coupling coupling = Coupling::IidComponents;
    std::vector<Atom> atoms;        // marginal law, iid coupling
    std::vector<TableEntry> table;  // joint law, table coupling
    double sigma = 1.0;             // gaussian scale
    double halfwidth = 1.7320508075688772935;  // uniform [-a, a]; a = sqrt(3) gives unit variance

    static StepDistribution rademacher(int k);
    // Marginal {-1, 0, +1} with P(0) = p0 and the rest split evenly.
    static StepDistribution three_point(int k, const Rational& p0);
    static StepDistribution gaussian(int k, double sigma = 1.0);
    static StepDistribution uniform_symmetric(int k, double halfwidth = 1.7320508075688772935);
    // Correlated exchangeable law on {-1,0,1}^k: all-zero vector with
    // probability lam, otherwise iid signs. Fully sign- and permutation-symmetric.
    static StepDistribution lazy_signs_table(int k, const Rational& lam);

    static StepDistribution from_json(const std::string& text);
    std::string to_json() const;

    // Structural checks: probabilities in (0,1] summing to one, distinct atom
    // values, consistent table dimensions, permutation invariance of tables.
    void validate() const;

    bool is_discrete() const { return kind == StepKind::DiscreteAtoms; }
    // Discrete with integer-valued support (usable by the lattice engines).
    bool is_lattice() const;
    // True when all atom offsets are odd integers (walk parity alternates).
    bool all_offsets_odd() const;

    // Exact marginal moment E[xi^r] for discrete laws.
    Rational marginal_moment(int r) const;
    // Marginal moment as double; closed form for the continuous kinds.
    double marginal_moment_d(int r) const;

    // True if every single-coordinate sign flip preserves the law. For iid
    // coupling this is symmetry of the marginal. Guarantees that all
    // conditional marginals have vanishing odd moments, which the one-step
    // mean-preservation of h relies on for joint tables.
    bool sign_symmetric() const;
};

struct AssumptionReport {
    Chamber chamber;
    int k = 1;
    // Moment order required for the tail asymptotics: 2k-1 for C (3 at k=2),
    // 2k-2 for D at k>=3; at k=2 for D any order above 2 suffices.
    int r_required = 1;
    bool moment_assumption = false;   // E|xi|^r finite
    bool symmetry_assumption = false; // odd moments up to r_required vanish
    bool normalization_assumption = false;  // unit variance
    double variance = 0.0;
    std::vector<double> odd_moments;  // orders 1, 3, ..., <= r_required
    std::string notes;
};

AssumptionReport validate_assumptions(const StepDistribution& d, Chamber z);

}  // namespace weylwalk
