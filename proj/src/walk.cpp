#include "weylwalk/walk.hpp"

#include <algorithm>
#include <stdexcept>

namespace weylwalk {

std::vector<double> PathSample::position(long long m) const {
    if (m < 0 || m > n) throw std::out_of_range("path index out of range");
    std::vector<double> pos = start;
    for (long long s = 0; s < m; ++s)
        for (int i = 0; i < k; ++i) pos[i] += increments[static_cast<size_t>(s) * k + i];
    return pos;
}

StepSampler::StepSampler(const StepDistribution& d)
    : kind_(d.kind), k_(d.k), coupling_(d.coupling), sigma_(d.sigma), halfwidth_(d.halfwidth) {
    d.validate();
    if (kind_ != StepKind::DiscreteAtoms) return;
    double c = 0.0;
    if (coupling_ == Coupling::IidComponents) {
        for (const auto& a : d.atoms) {
            c += a.prob.convert_to<double>();
            cum_.push_back(c);
            values_.push_back(a.value.convert_to<double>());
        }
    } else {
        for (const auto& e : d.table) {
            c += e.prob.convert_to<double>();
            cum_.push_back(c);
            for (long long v : e.vec) values_.push_back(static_cast<double>(v));
        }
    }
    cum_.back() = 1.0;  // absorb rounding so the last bucket always catches
}

void StepSampler::sample(RandomStream& stream, std::span<double> out) const {
    if (static_cast<int>(out.size()) != k_)
        throw std::invalid_argument("output span dimension mismatch");
    switch (kind_) {
        case StepKind::Gaussian:
            for (int i = 0; i < k_; ++i) out[i] = sigma_ * stream.normal();
            return;
        case StepKind::UniformSymmetric:
            for (int i = 0; i < k_; ++i) out[i] = halfwidth_ * (2.0 * stream.uniform01() - 1.0);
            return;
        case StepKind::DiscreteAtoms:
            break;
    }
    if (coupling_ == Coupling::IidComponents) {
        for (int i = 0; i < k_; ++i) {
            double u = stream.uniform01();
            size_t idx = std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
            if (idx >= cum_.size()) idx = cum_.size() - 1;
            out[i] = values_[idx];
        }
        return;
    }
    double u = stream.uniform01();
    size_t row = std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
    if (row >= cum_.size()) row = cum_.size() - 1;
    for (int i = 0; i < k_; ++i) out[i] = values_[row * k_ + i];
}

PathSample sample_path(const StepDistribution& d, std::span<const double> x, long long n,
                       RandomStream& stream) {
    if (static_cast<int>(x.size()) != d.k)
        throw std::invalid_argument("start point dimension mismatch");
    if (n < 0) throw std::invalid_argument("path length must be >= 0");
    StepSampler sampler(d);
    PathSample p;
    p.start.assign(x.begin(), x.end());
    p.k = d.k;
    p.n = n;
    p.increments.resize(static_cast<size_t>(n) * d.k);
    for (long long m = 0; m < n; ++m)
        sampler.sample(stream, {p.increments.data() + static_cast<size_t>(m) * d.k,
                                static_cast<size_t>(d.k)});
    return p;
}

namespace {

// Walks positions incrementally and returns the first index where pred holds.
template <typename Pred>
std::optional<long long> first_index(const PathSample& path, Pred pred) {
    std::vector<double> pos = path.start;
    for (long long m = 0;; ++m) {
        if (pred(pos)) return m;
        if (m == path.n) return std::nullopt;
        for (int i = 0; i < path.k; ++i)
            pos[i] += path.increments[static_cast<size_t>(m) * path.k + i];
    }
}

}  // namespace

std::optional<long long> exit_time_tau(Chamber z, const PathSample& path) {
    return first_index(path, [z](const std::vector<double>& p) { return !contains(z, p); });
}

std::optional<long long> sign_time_T(Chamber z, const PathSample& path) {
    // Sign via the log form: immune to overflow of h at spread-out points.
    return first_index(path, [z](const std::vector<double>& p) { return h_log(z, p).sign <= 0; });
}

std::optional<long long> entrance_time_nu(Chamber z, long long n, double eps,
                                          const PathSample& path) {
    return first_index(
        path, [&](const std::vector<double>& p) { return in_auxiliary(z, n, eps, p); });
}

void annotate_stopping_times(Chamber z, PathSample& path, long long aux_n, double eps) {
    path.tau = exit_time_tau(z, path);
    path.T = sign_time_T(z, path);
    if (aux_n > 0) path.nu = entrance_time_nu(z, aux_n, eps, path);
}

}  // namespace weylwalk
