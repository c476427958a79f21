#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "weylwalk/chambers.hpp"
#include "weylwalk/lattice.hpp"

namespace weylwalk {

// Parameters for the precomputed V table. The table stores the truncated
// limit u_N(x) = E_x[h(S(N)); tau > N] on a window of the chamber; outside
// the window, queries fall back to h where the smoothed ratio certifies the
// deep-interior regime and fail otherwise.
struct VTableOptions {
    long long radius = 200;       // window: table covers points with max coordinate <= radius
    long long horizon = 2000;     // sweep depth N
    double spread_sigmas = 8.0;   // diffusive envelope half-width, in units of a*sqrt(N)
    double envelope_pad = 40.0;   // additive slack on the envelope
    double fallback_smooth_ratio = 1.05;  // h_2/h threshold for the out-of-window fallback
};

class VTable {
  public:
    static VTable build(const LatticeWalkSpec& spec, Chamber z, const VTableOptions& opt = {});

    // V at a lattice point: stored value in-window; h(x) beyond the window
    // when h_smoothed(2,x)/h(x) < fallback_smooth_ratio; std::domain_error
    // otherwise (the point is neither tabulated nor certifiably deep).
    double value(std::span<const long long> x) const;
    bool stored(std::span<const long long> x) const;

    // sum over steps xi of p(xi) * value(x + xi) * 1[x + xi in W]; the
    // regularity residual is |result - value(x)| / value(x).
    double one_step_killed_expectation(std::span<const long long> x) const;

    Chamber chamber() const { return z_; }
    int k() const { return k_; }
    const VTableOptions& options() const { return opt_; }
    const LatticeWalkSpec& spec() const { return spec_; }
    long long stored_count() const;

    void save_csv(const std::string& path) const;
    static VTable load_csv(const std::string& path);

  private:
    VTable() = default;
    bool in_window(std::span<const long long> x) const;
    size_t cell(long long x1, long long x2) const;
    void sweep();

    LatticeWalkSpec spec_;
    Chamber z_ = Chamber::C;
    int k_ = 0;
    long long a_ = 1;            // max step offset
    VTableOptions opt_;
    long long cap_ = 0;          // grid extends to max coordinate <= cap_
    std::vector<double> table_;  // u_N over the grid (0 outside the chamber)
    std::vector<size_t> row_offset_;
};

}  // namespace weylwalk
