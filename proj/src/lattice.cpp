#include "weylwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace weylwalk {

BigInt h_lattice(Chamber z, std::span<const long long> x) {
    size_t k = x.size();
    if (k == 0) throw std::invalid_argument("empty point");
    if (z == Chamber::D && k < 2) throw std::invalid_argument("chamber D needs k >= 2");
    BigInt v = 1;
    if (z == Chamber::A) {
        for (size_t i = 0; i < k; ++i)
            for (size_t j = i + 1; j < k; ++j) v *= BigInt(x[j]) - BigInt(x[i]);
        return v;
    }
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j)
            v *= BigInt(x[j]) * x[j] - BigInt(x[i]) * x[i];
    if (z == Chamber::C)
        for (long long c : x) v *= c;
    return v;
}

bool contains_lattice(Chamber z, std::span<const long long> x) {
    size_t k = x.size();
    if (k == 0) throw std::invalid_argument("empty point");
    switch (z) {
        case Chamber::A:
            for (size_t i = 1; i < k; ++i)
                if (x[i - 1] >= x[i]) return false;
            return true;
        case Chamber::C:
            if (x[0] <= 0) return false;
            for (size_t i = 1; i < k; ++i)
                if (x[i - 1] >= x[i]) return false;
            return true;
        case Chamber::D:
            if (k < 2) throw std::invalid_argument("chamber D needs k >= 2");
            if (std::llabs(x[0]) >= x[1]) return false;
            for (size_t i = 2; i < k; ++i)
                if (x[i - 1] >= x[i]) return false;
            return true;
    }
    throw std::logic_error("bad chamber");
}

LatticeWalkSpec LatticeWalkSpec::rademacher(int k) {
    LatticeWalkSpec s;
    s.k = k;
    s.atoms = {{-1, Rational(1, 2)}, {1, Rational(1, 2)}};
    s.validate();
    return s;
}

LatticeWalkSpec LatticeWalkSpec::three_point(int k, const Rational& p0) {
    LatticeWalkSpec s;
    s.k = k;
    Rational side = (Rational(1) - p0) / 2;
    s.atoms = {{-1, side}, {0, p0}, {1, side}};
    s.validate();
    return s;
}

LatticeWalkSpec LatticeWalkSpec::from_distribution(const StepDistribution& d) {
    if (!d.is_lattice() || d.coupling != Coupling::IidComponents)
        throw std::invalid_argument("lattice oracles need an iid integer-valued discrete law");
    LatticeWalkSpec s;
    s.k = d.k;
    for (const auto& a : d.atoms)
        s.atoms.push_back({numerator(a.value).convert_to<long long>(), a.prob});
    s.validate();
    return s;
}

void LatticeWalkSpec::validate() const {
    if (k < 1) throw std::invalid_argument("dimension k must be >= 1");
    if (atoms.empty()) throw std::invalid_argument("lattice law needs at least one atom");
    Rational total = 0;
    for (const auto& a : atoms) {
        if (!(a.prob > 0) || a.prob > 1)
            throw std::invalid_argument("atom probabilities must lie in (0, 1]");
        total += a.prob;
    }
    if (total != 1) throw std::invalid_argument("atom probabilities must sum to 1");
    for (size_t i = 0; i < atoms.size(); ++i)
        for (size_t j = i + 1; j < atoms.size(); ++j)
            if (atoms[i].offset == atoms[j].offset)
                throw std::invalid_argument("atom offsets must be distinct");
}

long long LatticeWalkSpec::max_offset() const {
    long long a = 0;
    for (const auto& at : atoms) a = std::max(a, std::llabs(at.offset));
    return a;
}

bool LatticeWalkSpec::all_offsets_odd() const {
    for (const auto& at : atoms)
        if (at.offset % 2 == 0) return false;
    return true;
}

// k-fold product of the marginal atoms, in a fixed lexicographic order.
std::vector<std::pair<std::vector<long long>, Rational>> product_moves(
    const LatticeWalkSpec& spec) {
    std::vector<std::pair<std::vector<long long>, Rational>> moves;
    std::vector<size_t> idx(spec.k, 0);
    while (true) {
        std::vector<long long> d(spec.k);
        Rational p = 1;
        for (int i = 0; i < spec.k; ++i) {
            d[i] = spec.atoms[idx[i]].offset;
            p *= spec.atoms[idx[i]].prob;
        }
        moves.emplace_back(std::move(d), std::move(p));
        int pos = spec.k - 1;
        while (pos >= 0 && ++idx[pos] == spec.atoms.size()) idx[pos--] = 0;
        if (pos < 0) break;
    }
    return moves;
}

namespace {

// h at a k<=2 lattice point, in double (exact for coordinates below ~2e3).
double h_point_double(Chamber z, long long y1, long long y2, int k) {
    if (k == 1) return z == Chamber::A ? 1.0 : static_cast<double>(y1);
    double a = static_cast<double>(y1), b = static_cast<double>(y2);
    switch (z) {
        case Chamber::A: return b - a;
        case Chamber::D: return b * b - a * a;
        case Chamber::C: return a * b * (b * b - a * a);
    }
    return 0.0;
}

}  // namespace

SparseRationalDP::SparseRationalDP(const LatticeWalkSpec& spec, Chamber z,
                                   std::span<const long long> x)
    : k_(spec.k), z_(z) {
    spec.validate();
    if (static_cast<int>(x.size()) != spec.k)
        throw std::invalid_argument("start point dimension mismatch");
    if (spec.k > 4) throw std::invalid_argument("rational DP supports k <= 4");
    moves_ = product_moves(spec);
    start_inside_ = contains_lattice(z, x);
    if (start_inside_) {
        state_.emplace(std::vector<long long>(x.begin(), x.end()), Rational(1));
    } else {
        exit_mass_ = 1;
        exit_h_ = Rational(h_lattice(z, x));
    }
}

void SparseRationalDP::advance(long long layers) {
    for (long long l = 0; l < layers; ++l) {
        std::map<std::vector<long long>, Rational> next;
        for (const auto& [pt, w] : state_) {
            for (const auto& [d, p] : moves_) {
                std::vector<long long> y(k_);
                for (int i = 0; i < k_; ++i) y[i] = pt[i] + d[i];
                Rational q = w * p;
                if (contains_lattice(z_, y)) {
                    next[std::move(y)] += q;
                } else {
                    exit_mass_ += q;
                    exit_h_ += q * Rational(h_lattice(z_, y));
                }
            }
        }
        state_ = std::move(next);
        ++step_;
    }
}

Rational SparseRationalDP::survival() const {
    Rational s = 0;
    for (const auto& [pt, w] : state_) s += w;
    return s;
}

Rational SparseRationalDP::restricted_h() const {
    Rational s = 0;
    for (const auto& [pt, w] : state_) s += w * Rational(h_lattice(z_, pt));
    return s;
}

Rational SparseRationalDP::restricted_expectation(
    const std::function<Rational(std::span<const long long>)>& f) const {
    Rational s = 0;
    for (const auto& [pt, w] : state_) s += w * f(pt);
    return s;
}

std::vector<std::pair<std::vector<long long>, Rational>> SparseRationalDP::support() const {
    return {state_.begin(), state_.end()};
}

void DenseDP::Sum::add(double v) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v))
        c += (s - t) + v;
    else
        c += (v - t) + s;
    s = t;
}

DenseDP::DenseDP(const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x,
                 long long capacity)
    : spec_(spec), k_(spec.k), z_(z), capacity_(capacity) {
    spec.validate();
    if (static_cast<int>(x.size()) != spec.k)
        throw std::invalid_argument("start point dimension mismatch");
    if (k_ > 2) throw std::invalid_argument("dense DP supports k <= 2");
    if (z == Chamber::D && k_ < 2) throw std::invalid_argument("chamber D needs k >= 2");
    if (capacity < 0) throw std::invalid_argument("capacity must be >= 0");
    a_ = spec.max_offset();
    start_.assign(x.begin(), x.end());
    const long long R = capacity * a_;
    if (k_ == 2) {
        lo2_ = start_[1] - R;
        hi2_ = start_[1] + R;
        if (z != Chamber::A) lo2_ = std::max(lo2_, z == Chamber::C ? 2LL : 1LL);
        lo1_ = start_[0] - R;
        hi1_ = start_[0] + R;
        if (z == Chamber::C) lo1_ = std::max(lo1_, 1LL);
        if (z == Chamber::D) lo1_ = std::max(lo1_, 1 - hi2_);
        if (z != Chamber::A) hi1_ = std::min(hi1_, hi2_ - 1);
    } else {
        lo1_ = start_[0] - R;
        hi1_ = start_[0] + R;
        if (z == Chamber::C) lo1_ = std::max(lo1_, 1LL);
        lo2_ = hi2_ = 0;
    }
    width_ = static_cast<size_t>(hi1_ - lo1_ + 1);
    size_t cells = width_ * static_cast<size_t>(hi2_ - lo2_ + 1);
    cur_.assign(cells, 0.0);
    nxt_.assign(cells, 0.0);
    for (const auto& [d, p] : product_moves(spec))
        moves_.emplace_back(d[0], k_ == 2 ? d[1] : 0, p.convert_to<double>());

    h_start_ = Rational(h_lattice(z, x)).convert_to<double>();
    start_inside_ = contains_lattice(z, x);
    if (start_inside_) {
        cur_[idx(start_[0], k_ == 2 ? start_[1] : 0)] = 1.0;
        survival_series_.push_back(1.0);
        restricted_h_series_.push_back(h_start_);
    } else {
        exit_mass_.add(1.0);
        exit_h_.add(h_start_);
        survival_series_.push_back(0.0);
        restricted_h_series_.push_back(0.0);
    }
}

size_t DenseDP::idx(long long x1, long long x2) const {
    return static_cast<size_t>(x2 - lo2_) * width_ + static_cast<size_t>(x1 - lo1_);
}

template <typename InChamber>
void DenseDP::scatter_k2(const InChamber& inw) {
    const long long m = step_;
    const long long s1 = start_[0], s2 = start_[1];
    const long long r1lo = std::max(lo1_, s1 - m * a_), r1hi = std::min(hi1_, s1 + m * a_);
    const long long r2lo = std::max(lo2_, s2 - m * a_), r2hi = std::min(hi2_, s2 + m * a_);
    const long long t1lo = std::max(lo1_, s1 - (m + 1) * a_),
                    t1hi = std::min(hi1_, s1 + (m + 1) * a_);
    const long long t2lo = std::max(lo2_, s2 - (m + 1) * a_),
                    t2hi = std::min(hi2_, s2 + (m + 1) * a_);
    for (long long y2 = t2lo; y2 <= t2hi; ++y2)
        std::fill(nxt_.begin() + idx(t1lo, y2), nxt_.begin() + idx(t1hi, y2) + 1, 0.0);

    const size_t nm = moves_.size();
    for (long long x2 = r2lo; x2 <= r2hi; ++x2) {
        const size_t row = idx(r1lo, x2);
        for (long long x1 = r1lo; x1 <= r1hi; ++x1) {
            double w = cur_[row + static_cast<size_t>(x1 - r1lo)];
            if (w == 0.0) continue;
            if (w < 1e-300) {
                dropped_.add(w);
                continue;
            }
            for (size_t t = 0; t < nm; ++t) {
                const auto& [d1, d2, p] = moves_[t];
                long long y1 = x1 + d1, y2 = x2 + d2;
                double q = w * p;
                if (inw(y1, y2)) {
                    nxt_[idx(y1, y2)] += q;
                } else {
                    exit_mass_.add(q);
                    double he = h_point_double(z_, y1, y2, 2);
                    if (he != 0.0) exit_h_.add(q * he);
                }
            }
        }
    }
}

void DenseDP::scatter_k1() {
    const long long m = step_;
    const long long s1 = start_[0];
    const long long r1lo = std::max(lo1_, s1 - m * a_), r1hi = std::min(hi1_, s1 + m * a_);
    const long long t1lo = std::max(lo1_, s1 - (m + 1) * a_),
                    t1hi = std::min(hi1_, s1 + (m + 1) * a_);
    std::fill(nxt_.begin() + idx(t1lo, 0), nxt_.begin() + idx(t1hi, 0) + 1, 0.0);
    const bool all_in = z_ == Chamber::A;  // for A, k=1, the chamber is everything
    for (long long x1 = r1lo; x1 <= r1hi; ++x1) {
        double w = cur_[idx(x1, 0)];
        if (w == 0.0) continue;
        if (w < 1e-300) {
            dropped_.add(w);
            continue;
        }
        for (const auto& [d1, d2, p] : moves_) {
            long long y1 = x1 + d1;
            double q = w * p;
            if (all_in || y1 > 0) {
                nxt_[idx(y1, 0)] += q;
            } else {
                exit_mass_.add(q);
                double he = h_point_double(z_, y1, 0, 1);
                if (he != 0.0) exit_h_.add(q * he);
            }
        }
    }
}

void DenseDP::advance_one() {
    if (step_ >= capacity_) throw std::invalid_argument("dense DP capacity exhausted");
    if (k_ == 1) {
        scatter_k1();
    } else {
        switch (z_) {
            case Chamber::A:
                scatter_k2([](long long y1, long long y2) { return y1 < y2; });
                break;
            case Chamber::C:
                scatter_k2([](long long y1, long long y2) { return y1 > 0 && y1 < y2; });
                break;
            case Chamber::D:
                scatter_k2([](long long y1, long long y2) { return std::llabs(y1) < y2; });
                break;
        }
    }
    cur_.swap(nxt_);
    ++step_;
    survival_series_.push_back(1.0 - exit_mass_.get() - dropped_.get());
    restricted_h_series_.push_back(h_start_ - exit_h_.get());
}

void DenseDP::advance(long long layers) {
    for (long long l = 0; l < layers; ++l) advance_one();
}

double DenseDP::exit_h_accum() const { return exit_h_.get(); }
double DenseDP::exit_mass_accum() const { return exit_mass_.get(); }
double DenseDP::dropped_mass() const { return dropped_.get(); }

double DenseDP::restricted_expectation(
    const std::function<double(std::span<const long long>)>& f) const {
    Sum acc;
    const long long m = step_;
    long long pt[2];
    const long long r1lo = std::max(lo1_, start_[0] - m * a_),
                    r1hi = std::min(hi1_, start_[0] + m * a_);
    if (k_ == 1) {
        for (long long x1 = r1lo; x1 <= r1hi; ++x1) {
            double w = cur_[idx(x1, 0)];
            if (w == 0.0) continue;
            pt[0] = x1;
            acc.add(w * f({pt, 1}));
        }
        return acc.get();
    }
    const long long r2lo = std::max(lo2_, start_[1] - m * a_),
                    r2hi = std::min(hi2_, start_[1] + m * a_);
    for (long long x2 = r2lo; x2 <= r2hi; ++x2)
        for (long long x1 = r1lo; x1 <= r1hi; ++x1) {
            double w = cur_[idx(x1, x2)];
            if (w == 0.0) continue;
            pt[0] = x1;
            pt[1] = x2;
            acc.add(w * f({pt, 2}));
        }
    return acc.get();
}

double DenseDP::mass_reduction() const {
    return restricted_expectation([](std::span<const long long>) { return 1.0; });
}

std::vector<std::pair<std::array<long long, 2>, double>> DenseDP::support(double min_mass) const {
    std::vector<std::pair<std::array<long long, 2>, double>> out;
    const long long m = step_;
    const long long r1lo = std::max(lo1_, start_[0] - m * a_),
                    r1hi = std::min(hi1_, start_[0] + m * a_);
    const long long r2lo = k_ == 1 ? 0 : std::max(lo2_, start_[1] - m * a_),
                    r2hi = k_ == 1 ? 0 : std::min(hi2_, start_[1] + m * a_);
    // lexicographic in (x1, x2), matching the rational engine's map order
    for (long long x1 = r1lo; x1 <= r1hi; ++x1)
        for (long long x2 = r2lo; x2 <= r2hi; ++x2) {
            double w = cur_[idx(x1, x2)];
            if (w > min_mass) out.push_back({{x1, x2}, w});
        }
    return out;
}

namespace {
void put_u64(std::ofstream& f, uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); }
void put_i64(std::ofstream& f, int64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); }
void put_d(std::ofstream& f, double v) { f.write(reinterpret_cast<const char*>(&v), 8); }
uint64_t get_u64(std::ifstream& f) {
    uint64_t v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
int64_t get_i64(std::ifstream& f) {
    int64_t v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
double get_d(std::ifstream& f) {
    double v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
}  // namespace

// Native-endian binary snapshot; intended for resuming on the same machine.
void DenseDP::save_checkpoint(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
    f.write("WWDPCK1\n", 8);
    put_i64(f, k_);
    put_i64(f, static_cast<int64_t>(z_));
    put_i64(f, capacity_);
    put_i64(f, step_);
    put_i64(f, start_[0]);
    put_i64(f, k_ == 2 ? start_[1] : 0);
    put_i64(f, start_inside_ ? 1 : 0);
    put_u64(f, spec_.atoms.size());
    for (const auto& at : spec_.atoms) {
        put_i64(f, at.offset);
        put_i64(f, numerator(at.prob).convert_to<int64_t>());
        put_i64(f, denominator(at.prob).convert_to<int64_t>());
    }
    for (const Sum* s : {&exit_mass_, &exit_h_, &dropped_}) {
        put_d(f, s->s);
        put_d(f, s->c);
    }
    put_u64(f, survival_series_.size());
    for (double v : survival_series_) put_d(f, v);
    for (double v : restricted_h_series_) put_d(f, v);
    put_u64(f, cur_.size());
    f.write(reinterpret_cast<const char*>(cur_.data()),
            static_cast<std::streamsize>(cur_.size() * sizeof(double)));
    if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

DenseDP DenseDP::load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint file: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, "WWDPCK1\n", 8) != 0)
        throw std::runtime_error("bad checkpoint header: " + path);
    int64_t k = get_i64(f);
    Chamber z = static_cast<Chamber>(get_i64(f));
    int64_t capacity = get_i64(f);
    int64_t step = get_i64(f);
    long long s1 = get_i64(f), s2 = get_i64(f);
    bool inside = get_i64(f) != 0;
    LatticeWalkSpec spec;
    spec.k = static_cast<int>(k);
    uint64_t na = get_u64(f);
    for (uint64_t i = 0; i < na; ++i) {
        long long off = get_i64(f);
        int64_t num = get_i64(f), den = get_i64(f);
        spec.atoms.push_back({off, Rational(num, den)});
    }
    std::vector<long long> start = {s1};
    if (k == 2) start.push_back(s2);
    DenseDP dp(spec, z, start, capacity);
    dp.step_ = step;
    dp.start_inside_ = inside;
    for (Sum* s : {&dp.exit_mass_, &dp.exit_h_, &dp.dropped_}) {
        s->s = get_d(f);
        s->c = get_d(f);
    }
    uint64_t ns = get_u64(f);
    dp.survival_series_.resize(ns);
    for (auto& v : dp.survival_series_) v = get_d(f);
    dp.restricted_h_series_.resize(ns);
    for (auto& v : dp.restricted_h_series_) v = get_d(f);
    uint64_t cells = get_u64(f);
    if (cells != dp.cur_.size()) throw std::runtime_error("checkpoint grid mismatch: " + path);
    f.read(reinterpret_cast<char*>(dp.cur_.data()),
           static_cast<std::streamsize>(cells * sizeof(double)));
    if (!f) throw std::runtime_error("checkpoint truncated: " + path);
    return dp;
}

Rational survival_probability(const LatticeWalkSpec& spec, Chamber z,
                              std::span<const long long> x, long long n) {
    SparseRationalDP dp(spec, z, x);
    dp.advance(n);
    return dp.survival();
}

Rational restricted_expectation_exact(
    const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x, long long n,
    const std::function<Rational(std::span<const long long>)>& f) {
    SparseRationalDP dp(spec, z, x);
    dp.advance(n);
    return dp.restricted_expectation(f);
}

std::vector<std::pair<std::vector<long long>, Rational>> conditional_distribution(
    const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x, long long n) {
    SparseRationalDP dp(spec, z, x);
    dp.advance(n);
    Rational mass = dp.survival();
    if (mass == 0)
        throw std::domain_error("conditioning on survival is degenerate: zero surviving mass");
    auto law = dp.support();
    for (auto& [pt, w] : law) w /= mass;
    return law;
}

namespace {

// |increments| over (n/2, 3n/4] should dominate those over (3n/4, n].
bool increments_eventually_decreasing(const std::vector<double>& mags) {
    size_t n = mags.size();
    if (n < 5) return true;
    double early = 0.0, late = 0.0;
    size_t half = n / 2, three_quarter = half + (n - half) / 2;
    for (size_t i = half; i < n; ++i) {
        if (i < three_quarter)
            early = std::max(early, mags[i]);
        else
            late = std::max(late, mags[i]);
    }
    return late <= early;
}

}  // namespace

VExactRational v_exact_rational(const LatticeWalkSpec& spec, Chamber z,
                                std::span<const long long> x, long long n_max) {
    SparseRationalDP dp(spec, z, x);
    VExactRational out;
    out.seq.push_back(dp.restricted_h());
    for (long long n = 1; n <= n_max; ++n) {
        dp.advance();
        out.seq.push_back(dp.restricted_h());
    }
    out.value = out.seq.back();
    out.identity_value = Rational(h_lattice(z, x)) - dp.exit_h_accum();
    std::vector<double> incr;
    for (size_t i = 1; i < out.seq.size(); ++i)
        incr.push_back(std::abs(Rational(out.seq[i] - out.seq[i - 1]).convert_to<double>()));
    out.increments_decreasing = increments_eventually_decreasing(incr);
    return out;
}

VExactResult v_exact(const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x,
                     long long n_max) {
    DenseDP dp(spec, z, x, n_max);
    dp.advance(n_max);
    VExactResult out;
    out.seq = dp.restricted_h_series();
    out.value = out.seq.back();
    out.identity_value = dp.restricted_expectation([z](std::span<const long long> pt) {
        return h_point_double(z, pt[0], pt.size() == 2 ? pt[1] : 0, static_cast<int>(pt.size()));
    });
    std::vector<double> incr;
    for (size_t i = 1; i < out.seq.size(); ++i)
        incr.push_back(std::abs(out.seq[i] - out.seq[i - 1]));
    out.final_increment = incr.empty() ? 0.0 : incr.back();
    out.increments_decreasing = increments_eventually_decreasing(incr);
    return out;
}

namespace {

void brute_force_rec(const std::vector<std::pair<std::vector<long long>, Rational>>& moves,
                     Chamber z, std::vector<long long>& pos, const Rational& p, long long depth,
                     BruteForceResult& out) {
    if (depth == 0) {
        out.survival += p;
        out.restricted_h += p * Rational(h_lattice(z, pos));
        out.surviving_support[pos] += p;
        return;
    }
    int k = static_cast<int>(pos.size());
    for (const auto& [d, mp] : moves) {
        for (int i = 0; i < k; ++i) pos[i] += d[i];
        Rational q = p * mp;
        if (contains_lattice(z, pos))
            brute_force_rec(moves, z, pos, q, depth - 1, out);
        else
            out.exit_h += q * Rational(h_lattice(z, pos));
        for (int i = 0; i < k; ++i) pos[i] -= d[i];
    }
}

}  // namespace

BruteForceResult brute_force_check(const LatticeWalkSpec& spec, Chamber z,
                                   std::span<const long long> x, long long n) {
    spec.validate();
    if (static_cast<int>(x.size()) != spec.k)
        throw std::invalid_argument("start point dimension mismatch");
    double paths = std::pow(static_cast<double>(spec.atoms.size()),
                            static_cast<double>(spec.k) * static_cast<double>(n));
    if (paths > 1e8) throw std::invalid_argument("brute force instance too large");
    BruteForceResult out;
    out.survival = 0;
    out.restricted_h = 0;
    out.exit_h = 0;
    std::vector<long long> pos(x.begin(), x.end());
    if (!contains_lattice(z, pos)) {
        out.exit_h = Rational(h_lattice(z, pos));
        return out;
    }
    auto moves = product_moves(spec);
    brute_force_rec(moves, z, pos, Rational(1), n, out);
    return out;
}

}  // namespace weylwalk
