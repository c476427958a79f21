#pragma once

#include <optional>
#include <span>
#include <vector>

#include "weylwalk/chambers.hpp"
#include "weylwalk/distributions.hpp"
#include "weylwalk/rng.hpp"

namespace weylwalk {

// A finite trajectory of n steps in R^k. Increments (not positions) are
// stored so stopping times for different chambers can be recomputed without
// resampling; step m occupies increments[m*k .. (m+1)*k).
struct PathSample {
    std::vector<double> start;
    int k = 1;
    long long n = 0;
    std::vector<double> increments;

    std::optional<long long> tau;  // first exit from the open chamber
    std::optional<long long> T;    // first nonpositive h
    std::optional<long long> nu;   // first entrance into the auxiliary chamber

    std::vector<double> position(long long m) const;
};

// Precomputed sampling tables for one step distribution. Draws consume the
// stream sequentially, so results are reproducible given (seed, index).
class StepSampler {
public:
    explicit StepSampler(const StepDistribution& d);

    void sample(RandomStream& stream, std::span<double> out) const;
    int k() const { return k_; }

private:
    StepKind kind_;
    int k_ = 1;
    Coupling coupling_;
    double sigma_ = 1.0;
    double halfwidth_ = 1.0;
    std::vector<double> cum_;     // cumulative probabilities
    std::vector<double> values_;  // atom values, or table rows flattened k at a time
};

PathSample sample_path(const StepDistribution& d, std::span<const double> x, long long n,
                       RandomStream& stream);

// tau = inf{m >= 0 : S(m) outside the open chamber}; 0 when the start is
// already outside, absent when the path stays inside through its horizon.
std::optional<long long> exit_time_tau(Chamber z, const PathSample& path);
// T = inf{m >= 0 : h^Z(S(m)) <= 0}; always >= tau when both are defined.
std::optional<long long> sign_time_T(Chamber z, const PathSample& path);
// nu = inf{m >= 0 : S(m) in the auxiliary chamber W_{n,eps}}.
std::optional<long long> entrance_time_nu(Chamber z, long long n, double eps,
                                          const PathSample& path);

// Fills tau/T (and nu when aux_n > 0) in place.
void annotate_stopping_times(Chamber z, PathSample& path, long long aux_n = 0, double eps = 0.25);

}  // namespace weylwalk
