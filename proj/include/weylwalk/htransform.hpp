#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "weylwalk/chambers.hpp"
#include "weylwalk/distributions.hpp"
#include "weylwalk/rng.hpp"
#include "weylwalk/vtable.hpp"
#include "weylwalk/walk.hpp"

namespace weylwalk {

enum class HKind { PureH, VExactTable, VMcTable, TildeVC, OneDimV };

// A positive function on the chamber used to reweight the killed kernel.
// Evaluation enforces strict positivity at in-chamber points: a nonpositive
// value signals a broken table and raises std::domain_error.
class HFunction {
  public:
    static HFunction pure_h(Chamber z, int k);
    static HFunction from_table(std::shared_ptr<const VTable> table);
    static HFunction from_callable(Chamber z, int k, HKind kind,
                                   std::function<double(std::span<const long long>)> fn);

    double operator()(std::span<const long long> x) const;
    HKind kind() const { return kind_; }
    Chamber chamber() const { return z_; }
    int k() const { return k_; }

  private:
    HFunction(Chamber z, int k, HKind kind) : z_(z), k_(k), kind_(kind) {}
    Chamber z_;
    int k_;
    HKind kind_;
    std::function<double(std::span<const long long>)> fn_;
};

struct EstimateWithError {
    double value = 0.0;
    double std_error = 0.0;
    long long n_samples = 0;
    long long truncation_horizon = 0;
    // fraction of paths still alive at the horizon (their exit term is
    // dropped; the induced bias shrinks with the horizon)
    double unfinished_fraction = 0.0;
};

// Monte Carlo estimate of V^Z(x) = h^Z(x) - E_x[h^Z(S(tau)); tau <= horizon].
// Trajectory i draws from stream (seed, stream_offset + i); fixed-size chunks
// combined in index order make the result independent of the worker count.
EstimateWithError estimate_V_mc(const StepDistribution& d, Chamber z, std::span<const double> x,
                                long long horizon, long long samples, std::uint64_t seed,
                                std::uint64_t stream_offset = 0, int workers = 1);

struct DoobStepResult {
    std::vector<long long> y;
    double residual;  // (sum of transformed masses) - 1 before renormalization
};

// One step of the V-transformed walk from x: moves to y = x + xi with
// probability p(xi) V(y) / V(x), restricted to in-chamber y and renormalized.
DoobStepResult doob_step(const StepDistribution& d, Chamber z, const HFunction& V,
                         std::span<const long long> x, RandomStream& stream);

struct ConditionedPath {
    PathSample path;
    double max_abs_residual = 0.0;
};

ConditionedPath sample_conditioned_path(const StepDistribution& d, Chamber z, const HFunction& V,
                                        std::span<const long long> x, long long n,
                                        RandomStream& stream);

// V(z) = z - E_z[S(tau^+)] for a one-dimensional symmetric law; exact lattice
// dynamic programming when samples == 0 (z must then be a positive integer),
// Monte Carlo otherwise.
EstimateWithError one_dim_V(const StepDistribution& marginal, double z, long long horizon,
                            long long samples = 0, std::uint64_t seed = 0);

// V^{+,A}(x) = h^A(x) - E-hat_x[h^A(S(tau^A))] where each component is
// independently transformed to stay positive via the one-dimensional V.
// Requires an iid integer lattice law with a symmetric marginal.
EstimateWithError estimate_V_plus_A(const StepDistribution& d, std::span<const long long> x,
                                    long long horizon, long long samples, std::uint64_t seed,
                                    std::uint64_t stream_offset = 0, int workers = 1,
                                    long long v1_horizon = 2000);

// tilde V^C = V^{+,A}(x) * prod_i V(x_i); collapses to the one-dimensional V
// at k = 1.
EstimateWithError tilde_V_C(const StepDistribution& d, std::span<const long long> x,
                            long long horizon, long long samples, std::uint64_t seed,
                            std::uint64_t stream_offset = 0, int workers = 1,
                            long long v1_horizon = 2000);

}  // namespace weylwalk
