#pragma once

#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "weylwalk/chambers.hpp"
#include "weylwalk/distributions.hpp"

namespace weylwalk {

// Exact h at integer points (product form over big integers).
BigInt h_lattice(Chamber z, std::span<const long long> x);

// Strict chamber membership with exact integer comparisons.
bool contains_lattice(Chamber z, std::span<const long long> x);

struct LatticeAtom {
    long long offset;
    Rational prob;
};

// Integer step law with iid components: the ground-truth walks for the
// dynamic-programming oracles.
struct LatticeWalkSpec {
    int k = 1;
    std::vector<LatticeAtom> atoms;
    Rational lattice_shift = 0;  // start coordinates live on Z + shift

    static LatticeWalkSpec rademacher(int k);
    static LatticeWalkSpec three_point(int k, const Rational& p0);
    // Requires an iid integer-valued discrete law.
    static LatticeWalkSpec from_distribution(const StepDistribution& d);

    void validate() const;
    long long max_offset() const;
    bool all_offsets_odd() const;
};

// k-fold product of the marginal atoms, in a fixed lexicographic order.
std::vector<std::pair<std::vector<long long>, Rational>> product_moves(
    const LatticeWalkSpec& spec);

// Exact rational DP over the killed walk. State maps lattice points to
// rational masses; mass leaving the chamber is folded into exit accumulators,
// so total mass is conserved exactly at every layer. k <= 4.
class SparseRationalDP {
public:
    SparseRationalDP(const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x);

    void advance(long long layers = 1);

    long long step_index() const { return step_; }
    bool start_inside() const { return start_inside_; }
    // P(tau > n) at the current layer n.
    Rational survival() const;
    // E[h(S(n)); tau > n], direct sum over the live support.
    Rational restricted_h() const;
    // E[h(S(tau)); tau <= n], accumulated at exits.
    const Rational& exit_h_accum() const { return exit_h_; }
    const Rational& exit_mass_accum() const { return exit_mass_; }

    Rational restricted_expectation(
        const std::function<Rational(std::span<const long long>)>& f) const;
    // Live support, sorted lexicographically.
    std::vector<std::pair<std::vector<long long>, Rational>> support() const;

private:
    int k_;
    Chamber z_;
    long long step_ = 0;
    bool start_inside_;
    std::vector<std::pair<std::vector<long long>, Rational>> moves_;
    std::map<std::vector<long long>, Rational> state_;
    Rational exit_mass_ = 0, exit_h_ = 0;
};

// Compensated-double DP for k in {1,2}, dense over the reachable box.
// Survival and restricted-h curves are derived from the exit accumulators
// (mass balance), so every layer's values come for free.
class DenseDP {
public:
    DenseDP(const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x,
            long long capacity);

    void advance(long long layers = 1);

    long long step_index() const { return step_; }
    long long capacity() const { return capacity_; }
    bool start_inside() const { return start_inside_; }

    // survival_series()[n] = P(tau > n); filled up to the current layer.
    const std::vector<double>& survival_series() const { return survival_series_; }
    // restricted_h_series()[n] = E[h(S(n)); tau > n] = h(x) - exit_h_accum(n).
    const std::vector<double>& restricted_h_series() const { return restricted_h_series_; }

    double survival() const { return survival_series_.back(); }
    double restricted_h() const { return restricted_h_series_.back(); }
    double exit_h_accum() const;
    double exit_mass_accum() const;
    double dropped_mass() const;

    // Direct Neumaier-compensated reduction over the live support.
    double restricted_expectation(
        const std::function<double(std::span<const long long>)>& f) const;
    double mass_reduction() const;  // direct sum of live mass, for balance checks
    std::vector<std::pair<std::array<long long, 2>, double>> support(double min_mass = 0.0) const;

    void save_checkpoint(const std::string& path) const;
    static DenseDP load_checkpoint(const std::string& path);

private:
    struct Sum {  // Neumaier-compensated accumulator
        double s = 0.0, c = 0.0;
        void add(double v);
        double get() const { return s + c; }
    };

    DenseDP() = default;
    void advance_one();
    template <typename InChamber>
    void scatter_k2(const InChamber& inw);
    void scatter_k1();
    size_t idx(long long x1, long long x2) const;

    LatticeWalkSpec spec_;
    int k_ = 1;
    Chamber z_ = Chamber::C;
    long long capacity_ = 0;
    long long step_ = 0;
    bool start_inside_ = false;
    long long a_ = 1;  // max |offset|
    std::vector<long long> start_;
    // grid bounds (k=2: x1 fast axis, x2 slow; k=1: x1 only, height 1)
    long long lo1_ = 0, hi1_ = 0, lo2_ = 0, hi2_ = 0;
    size_t width_ = 0;
    std::vector<double> cur_, nxt_;
    std::vector<std::tuple<long long, long long, double>> moves_;  // (dx1, dx2, p)
    Sum exit_mass_, exit_h_, dropped_;
    double h_start_ = 0.0;
    std::vector<double> survival_series_, restricted_h_series_;
};

struct VExactRational {
    std::vector<Rational> seq;  // E[h(S(n)); tau > n] for n = 0..n_max
    Rational value;             // seq.back()
    Rational identity_value;    // h(x) - E[h(S(tau)); tau <= n_max]; equals value
    bool increments_decreasing = false;
};

struct VExactResult {
    std::vector<double> seq;
    double value = 0.0;
    double identity_value = 0.0;  // direct final-layer reduction, cross-check
    bool increments_decreasing = false;
    double final_increment = 0.0;
};

struct BruteForceResult {
    Rational survival;
    Rational restricted_h;
    Rational exit_h;
    std::map<std::vector<long long>, Rational> surviving_support;
};

Rational survival_probability(const LatticeWalkSpec& spec, Chamber z,
                              std::span<const long long> x, long long n);
Rational restricted_expectation_exact(const LatticeWalkSpec& spec, Chamber z,
                                      std::span<const long long> x, long long n,
                                      const std::function<Rational(std::span<const long long>)>& f);
// Law of S(n) given tau > n; throws on zero survival mass.
std::vector<std::pair<std::vector<long long>, Rational>> conditional_distribution(
    const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x, long long n);

VExactRational v_exact_rational(const LatticeWalkSpec& spec, Chamber z,
                                std::span<const long long> x, long long n_max);
VExactResult v_exact(const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x,
                     long long n_max);

// Full path enumeration; refuses instances beyond ~1e8 paths.
BruteForceResult brute_force_check(const LatticeWalkSpec& spec, Chamber z,
                                   std::span<const long long> x, long long n);

}  // namespace weylwalk
