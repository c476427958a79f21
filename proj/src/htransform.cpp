#include "weylwalk/htransform.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "weylwalk/lattice.hpp"

namespace weylwalk {

namespace {

std::vector<double> to_doubles(std::span<const long long> x) {
    return std::vector<double>(x.begin(), x.end());
}

// Discrete joint moves of one step as (offset vector, probability): the
// component product for iid laws, the rows themselves for joint tables.
std::vector<std::pair<std::vector<long long>, double>> lattice_moves(const StepDistribution& d) {
    d.validate();
    if (!d.is_discrete()) throw std::invalid_argument("discrete step law required");
    std::vector<std::pair<std::vector<long long>, double>> moves;
    if (d.coupling == Coupling::ExchangeableTable) {
        for (const auto& row : d.table) moves.emplace_back(row.vec, row.prob.convert_to<double>());
        return moves;
    }
    for (const auto& [vec, p] : product_moves(LatticeWalkSpec::from_distribution(d)))
        moves.emplace_back(vec, p.convert_to<double>());
    return moves;
}

void kadd(double& s, double& c, double v) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v))
        c += (s - t) + v;
    else
        c += (v - t) + s;
    s = t;
}

struct ChunkStats {
    double sum = 0, csum = 0, sum2 = 0, csum2 = 0;
    long long unfinished = 0;
};

// Runs per(i) for i in [0, samples), accumulating (value, unfinished-flag)
// pairs into fixed-size chunks that are reduced in index order, so the
// result does not depend on the number of workers.
template <class PerTraj>
EstimateWithError run_mc(long long samples, long long horizon, int workers, PerTraj per) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (workers < 1) workers = 1;
    constexpr long long kChunk = 4096;
    const long long nchunks = (samples + kChunk - 1) / kChunk;
    std::vector<ChunkStats> stats(static_cast<size_t>(nchunks));
    std::atomic<long long> next{0};
    auto work = [&] {
        for (;;) {
            long long c = next.fetch_add(1);
            if (c >= nchunks) return;
            ChunkStats st;
            const long long b = c * kChunk, e = std::min(samples, b + kChunk);
            for (long long i = b; i < e; ++i) {
                auto [w, unfinished] = per(i);
                kadd(st.sum, st.csum, w);
                kadd(st.sum2, st.csum2, w * w);
                st.unfinished += unfinished;
            }
            stats[static_cast<size_t>(c)] = st;
        }
    };
    if (workers == 1 || nchunks == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        int n = static_cast<int>(std::min<long long>(workers, nchunks));
        pool.reserve(static_cast<size_t>(n));
        for (int t = 0; t < n; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    double s = 0, cs = 0, s2 = 0, cs2 = 0;
    long long unfinished = 0;
    for (const auto& st : stats) {
        kadd(s, cs, st.sum + st.csum);
        kadd(s2, cs2, st.sum2 + st.csum2);
        unfinished += st.unfinished;
    }
    const double n = static_cast<double>(samples);
    const double mean = (s + cs) / n;
    double var = (s2 + cs2) / n - mean * mean;
    if (samples > 1) var *= n / (n - 1);
    var = std::max(0.0, var);
    EstimateWithError out;
    out.value = mean;
    out.std_error = std::sqrt(var / n);
    out.n_samples = samples;
    out.truncation_horizon = horizon;
    out.unfinished_fraction = static_cast<double>(unfinished) / n;
    return out;
}

}  // namespace

HFunction HFunction::pure_h(Chamber z, int k) {
    if (k < 1 || (z == Chamber::D && k < 2)) throw std::invalid_argument("invalid dimension");
    HFunction f(z, k, HKind::PureH);
    f.fn_ = [z](std::span<const long long> x) {
        std::vector<double> xd(x.begin(), x.end());
        return h(z, xd);
    };
    return f;
}

HFunction HFunction::from_table(std::shared_ptr<const VTable> table) {
    if (!table) throw std::invalid_argument("null table");
    HFunction f(table->chamber(), table->k(), HKind::VExactTable);
    f.fn_ = [table](std::span<const long long> x) { return table->value(x); };
    return f;
}

HFunction HFunction::from_callable(Chamber z, int k, HKind kind,
                                   std::function<double(std::span<const long long>)> fn) {
    if (!fn) throw std::invalid_argument("null callable");
    HFunction f(z, k, kind);
    f.fn_ = std::move(fn);
    return f;
}

double HFunction::operator()(std::span<const long long> x) const {
    if (static_cast<int>(x.size()) != k_) throw std::invalid_argument("dimension mismatch");
    double v = fn_(x);
    if (contains_lattice(z_, x) && !(v > 0.0))
        throw std::domain_error("transform value not strictly positive inside the chamber");
    return v;
}

EstimateWithError estimate_V_mc(const StepDistribution& d, Chamber z, std::span<const double> x,
                                long long horizon, long long samples, std::uint64_t seed,
                                std::uint64_t stream_offset, int workers) {
    d.validate();
    if (static_cast<int>(x.size()) != d.k) throw std::invalid_argument("dimension mismatch");
    if (!contains(z, x)) throw std::invalid_argument("start point must lie inside the chamber");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const StepSampler sampler(d);
    const std::vector<double> x0(x.begin(), x.end());
    const double hx = h(z, x0);
    auto per = [&](long long i) -> std::pair<double, int> {
        RandomStream stream(seed, stream_offset + static_cast<std::uint64_t>(i));
        std::vector<double> pos = x0;
        std::vector<double> step(pos.size());
        for (long long m = 0; m < horizon; ++m) {
            sampler.sample(stream, step);
            for (size_t j = 0; j < pos.size(); ++j) pos[j] += step[j];
            if (!contains(z, pos)) return {hx - h(z, pos), 0};
        }
        return {hx, 1};  // survivor: the exit term is truncated to zero
    };
    return run_mc(samples, horizon, workers, per);
}

namespace {

DoobStepResult doob_step_impl(const std::vector<std::pair<std::vector<long long>, double>>& moves,
                              Chamber z, const HFunction& V, std::span<const long long> x,
                              RandomStream& stream, std::vector<long long>& y,
                              std::vector<double>& weights,
                              std::vector<std::vector<long long>>& targets) {
    const int k = static_cast<int>(x.size());
    const double vx = V(x);
    weights.clear();
    targets.clear();
    double total = 0.0;
    for (const auto& [vec, p] : moves) {
        y.assign(x.begin(), x.end());
        for (int i = 0; i < k; ++i) y[i] += vec[i];
        if (!contains_lattice(z, y)) continue;
        double w = p * V(y) / vx;
        total += w;
        weights.push_back(w);
        targets.push_back(y);
    }
    if (weights.empty() || !(total > 0.0))
        throw std::domain_error("all moves leave the chamber: V is not a valid transform here");
    double u = stream.uniform01() * total;
    size_t pick = weights.size() - 1;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    return {targets[pick], total - 1.0};
}

}  // namespace

DoobStepResult doob_step(const StepDistribution& d, Chamber z, const HFunction& V,
                         std::span<const long long> x, RandomStream& stream) {
    if (static_cast<int>(x.size()) != d.k) throw std::invalid_argument("dimension mismatch");
    if (!contains_lattice(z, x)) throw std::invalid_argument("x must lie inside the chamber");
    auto moves = lattice_moves(d);
    std::vector<long long> y;
    std::vector<double> weights;
    std::vector<std::vector<long long>> targets;
    return doob_step_impl(moves, z, V, x, stream, y, weights, targets);
}

ConditionedPath sample_conditioned_path(const StepDistribution& d, Chamber z, const HFunction& V,
                                        std::span<const long long> x, long long n,
                                        RandomStream& stream) {
    if (static_cast<int>(x.size()) != d.k) throw std::invalid_argument("dimension mismatch");
    if (!contains_lattice(z, x)) throw std::invalid_argument("x must lie inside the chamber");
    if (n < 0) throw std::invalid_argument("n must be >= 0");
    auto moves = lattice_moves(d);
    ConditionedPath out;
    out.path.start = to_doubles(x);
    out.path.k = d.k;
    out.path.n = n;
    out.path.increments.reserve(static_cast<size_t>(n) * static_cast<size_t>(d.k));
    std::vector<long long> pos(x.begin(), x.end());
    std::vector<long long> y;
    std::vector<double> weights;
    std::vector<std::vector<long long>> targets;
    for (long long m = 0; m < n; ++m) {
        auto step = doob_step_impl(moves, z, V, pos, stream, y, weights, targets);
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(step.residual));
        for (int i = 0; i < d.k; ++i)
            out.path.increments.push_back(static_cast<double>(step.y[i] - pos[i]));
        pos = step.y;
    }
    return out;
}

EstimateWithError one_dim_V(const StepDistribution& marginal, double z, long long horizon,
                            long long samples, std::uint64_t seed) {
    marginal.validate();
    if (marginal.k != 1) throw std::invalid_argument("one-dimensional law required");
    if (!(z > 0)) throw std::invalid_argument("z must be positive");
    if (!marginal.sign_symmetric()) throw std::invalid_argument("symmetric marginal required");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (samples == 0) {
        if (!marginal.is_lattice())
            throw std::invalid_argument("exact mode requires an integer lattice law");
        long long zi = std::llround(z);
        if (static_cast<double>(zi) != z || zi < 1)
            throw std::invalid_argument("exact mode requires a positive integer z");
        auto spec = LatticeWalkSpec::from_distribution(marginal);
        DenseDP dp(spec, Chamber::C, std::span<const long long>(&zi, 1), horizon);
        dp.advance(horizon);
        EstimateWithError out;
        out.value = dp.restricted_h();  // equals z - E[S(tau); tau <= horizon]
        out.std_error = 0.0;
        out.n_samples = 1;  // one deterministic evaluation
        out.truncation_horizon = horizon;
        out.unfinished_fraction = dp.survival();
        return out;
    }
    const StepSampler sampler(marginal);
    auto per = [&](long long i) -> std::pair<double, int> {
        RandomStream stream(seed, static_cast<std::uint64_t>(i));
        double s = z;
        double step;
        for (long long m = 0; m < horizon; ++m) {
            sampler.sample(stream, std::span<double>(&step, 1));
            s += step;
            if (!(s > 0)) return {z - s, 0};
        }
        return {z, 1};
    };
    return run_mc(samples, horizon, 1, per);
}

EstimateWithError estimate_V_plus_A(const StepDistribution& d, std::span<const long long> x,
                                    long long horizon, long long samples, std::uint64_t seed,
                                    std::uint64_t stream_offset, int workers,
                                    long long v1_horizon) {
    d.validate();
    const int k = static_cast<int>(x.size());
    if (d.k != k) throw std::invalid_argument("dimension mismatch");
    if (d.coupling != Coupling::IidComponents || !d.is_lattice())
        throw std::invalid_argument("iid integer lattice law required");
    if (!d.sign_symmetric()) throw std::invalid_argument("symmetric marginal required");
    if (!contains_lattice(Chamber::C, x))
        throw std::invalid_argument("x must be componentwise positive and strictly ordered");
    if (horizon < 1 || samples < 1) throw std::invalid_argument("invalid horizon or samples");
    EstimateWithError out;
    if (k == 1) {
        // h^A is the empty product: V^{+,A} is identically one
        out.value = 1.0;
        out.std_error = 0.0;
        out.n_samples = samples;
        out.truncation_horizon = horizon;
        out.unfinished_fraction = 0.0;
        return out;
    }

    StepDistribution m1 = d;
    m1.k = 1;
    auto spec1 = LatticeWalkSpec::from_distribution(m1);
    const long long a = spec1.max_offset();
    VTableOptions vopt;
    vopt.radius = x.back() + a * (horizon + 1);
    vopt.horizon = v1_horizon;
    const VTable v1 = VTable::build(spec1, Chamber::C, vopt);

    std::vector<long long> offs;
    std::vector<double> probs;
    for (const auto& at : spec1.atoms) {
        offs.push_back(at.offset);
        probs.push_back(at.prob.convert_to<double>());
    }
    const std::vector<double> x0(x.begin(), x.end());
    const double hAx = h(Chamber::A, x0);

    auto per = [&](long long i) -> std::pair<double, int> {
        RandomStream stream(seed, stream_offset + static_cast<std::uint64_t>(i));
        std::vector<long long> pos(x.begin(), x.end());
        std::vector<double> w(offs.size());
        std::vector<double> posd(pos.size());
        for (long long m = 0; m < horizon; ++m) {
            for (int c = 0; c < k; ++c) {
                double total = 0.0;
                for (size_t j = 0; j < offs.size(); ++j) {
                    long long y = pos[c] + offs[j];
                    double wj = 0.0;
                    if (y >= 1) {
                        long long yv[1] = {y};
                        wj = probs[j] * v1.value(yv);
                    }
                    w[j] = wj;
                    total += wj;
                }
                double u = stream.uniform01() * total;
                size_t pick = offs.size() - 1;
                double acc = 0.0;
                for (size_t j = 0; j < offs.size(); ++j) {
                    acc += w[j];
                    if (u < acc) {
                        pick = j;
                        break;
                    }
                }
                pos[c] += offs[pick];
            }
            bool ordered = true;
            for (int c = 0; c + 1 < k; ++c)
                if (pos[c] >= pos[c + 1]) ordered = false;
            if (!ordered) {
                for (int c = 0; c < k; ++c) posd[c] = static_cast<double>(pos[c]);
                return {hAx - h(Chamber::A, posd), 0};
            }
        }
        return {hAx, 1};
    };
    return run_mc(samples, horizon, workers, per);
}

EstimateWithError tilde_V_C(const StepDistribution& d, std::span<const long long> x,
                            long long horizon, long long samples, std::uint64_t seed,
                            std::uint64_t stream_offset, int workers, long long v1_horizon) {
    d.validate();
    const int k = static_cast<int>(x.size());
    if (d.k != k) throw std::invalid_argument("dimension mismatch");
    StepDistribution m1 = d;
    m1.k = 1;
    if (k == 1) {
        auto v = one_dim_V(m1, static_cast<double>(x[0]), v1_horizon, 0);
        v.truncation_horizon = horizon;
        return v;
    }
    auto vp = estimate_V_plus_A(d, x, horizon, samples, seed, stream_offset, workers, v1_horizon);
    double prod = 1.0;
    for (long long xi : x) prod *= one_dim_V(m1, static_cast<double>(xi), v1_horizon, 0).value;
    vp.value *= prod;
    vp.std_error *= prod;
    if (!(vp.value > 0)) throw std::domain_error("tilde V^C estimate is not positive");
    return vp;
}

}  // namespace weylwalk
