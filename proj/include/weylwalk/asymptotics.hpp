#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "weylwalk/chambers.hpp"

namespace weylwalk {

// Decay exponent in P(tau > n) ~ kappa * V(x) * n^{-alpha/2}: k^2 for C,
// k^2 - k for D.
long long alpha(Chamber z, int k);

// Prefactor constant, evaluated from the Gamma-product formulas in the log
// domain. Strictly positive for all supported (chamber, k).
double kappa(Chamber z, int k);

enum class IntegrationMethod { Quadrature, MonteCarlo };

struct IntegralEstimate {
    double value = 0.0;
    double error = 0.0;  // node-doubling gap (quadrature) or standard error (MC)
    IntegrationMethod method = IntegrationMethod::Quadrature;
    long long evaluations = 0;
};

// normalizer of the limiting measure: integral of h(y) e^{-|y|^2/2} over the
// chamber. level = nodes per axis (quadrature, 0 picks a default by k) or
// sample count (MC).
IntegralEstimate mu_normalizer(Chamber z, int k,
                               IntegrationMethod method = IntegrationMethod::Quadrature,
                               long long level = 0, std::uint64_t seed = 0);

// Radial moments E[|y|^r] under the limiting measure, one per requested order.
std::vector<IntegralEstimate> mu_moments(Chamber z, int k, std::span<const int> orders,
                                         IntegrationMethod method = IntegrationMethod::Quadrature,
                                         long long level = 0, std::uint64_t seed = 0);

// K = (reflection-copy count) * kappa / integral of e^{-|x|^2/2} |h| over
// R^k, which reduces to kappa / mu_normalizer.
double K_constant(Chamber z, int k);

// Asymptotic Brownian survival kappa * h(y) * t^{-alpha/2}.
double bm_tail(Chamber z, std::span<const double> y, double t);

// Asymptotic killed-kernel density K * t^{-k/2} * exp(-|z|^2/(2t)) * h(y) *
// h(z) * t^{-alpha}.
double bm_density_asym(Chamber z, std::span<const double> y, std::span<const double> zpt,
                       double t);

struct TailFit {
    double slope = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    long long n_min = 0;
    long long n_max = 0;
};

struct TailFitOptions {
    std::optional<long long> n_min;  // default: upper half of the curve in log n
    std::optional<long long> n_max;
    bool even_only = false;  // smooth out period-2 parity oscillation
};

// Least-squares fit of log P against log n over the tail window.
TailFit tail_fit(std::span<const std::pair<long long, double>> curve,
                 const TailFitOptions& opt = {});

// Nodes and weights for the physicists' weight exp(-t^2) on n points.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace weylwalk
