#include "weylwalk/vtable.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace weylwalk {

namespace {

double h_val(Chamber z, int k, long long x1, long long x2) {
    if (k == 1) return static_cast<double>(x1);  // C only
    double a = static_cast<double>(x1), b = static_cast<double>(x2);
    double d = b * b - a * a;
    return z == Chamber::C ? a * b * d : d;
}

}  // namespace

VTable VTable::build(const LatticeWalkSpec& spec, Chamber z, const VTableOptions& opt) {
    spec.validate();
    if (z != Chamber::C && z != Chamber::D)
        throw std::invalid_argument("V tables support chambers C and D");
    if (spec.k < 1 || spec.k > 2) throw std::invalid_argument("V tables support k <= 2");
    if (z == Chamber::D && spec.k != 2) throw std::invalid_argument("chamber D needs k = 2");
    if (opt.radius < 4) throw std::invalid_argument("radius too small");
    if (opt.horizon < 1) throw std::invalid_argument("horizon must be positive");
    if (opt.spread_sigmas <= 0 || opt.envelope_pad < 0 || opt.fallback_smooth_ratio <= 1.0)
        throw std::invalid_argument("invalid envelope parameters");

    VTable t;
    t.spec_ = spec;
    t.z_ = z;
    t.k_ = spec.k;
    t.a_ = spec.max_offset();
    t.opt_ = opt;
    t.cap_ = opt.radius +
             static_cast<long long>(std::ceil(opt.spread_sigmas * static_cast<double>(t.a_) *
                                                  std::sqrt(static_cast<double>(opt.horizon)) +
                                              opt.envelope_pad));

    t.row_offset_.assign(static_cast<size_t>(t.cap_) + 2, 0);
    if (t.k_ == 1) {
        for (long long x = 1; x <= t.cap_ + 1; ++x)
            t.row_offset_[static_cast<size_t>(x)] = static_cast<size_t>(x - 1);
        t.table_.assign(static_cast<size_t>(t.cap_), 0.0);
        for (long long x = 1; x <= t.cap_; ++x) t.table_[t.cell(x, 0)] = h_val(z, 1, x, 0);
    } else {
        const long long first_row = z == Chamber::C ? 2 : 1;
        size_t off = 0;
        for (long long x2 = first_row; x2 <= t.cap_ + 1; ++x2) {
            t.row_offset_[static_cast<size_t>(x2)] = off;
            long long width = z == Chamber::C ? x2 - 1 : 2 * x2 - 1;
            off += static_cast<size_t>(width);
        }
        // sentinel width for row cap_+1 not used; offsets beyond cover lookups
        t.table_.assign(t.row_offset_[static_cast<size_t>(t.cap_) + 1], 0.0);
        for (long long x2 = first_row; x2 <= t.cap_; ++x2) {
            long long lo = z == Chamber::C ? 1 : 1 - x2;
            for (long long x1 = lo; x1 <= x2 - 1; ++x1)
                t.table_[t.cell(x1, x2)] = h_val(z, 2, x1, x2);
        }
    }
    t.sweep();
    return t;
}

size_t VTable::cell(long long x1, long long x2) const {
    if (k_ == 1) return static_cast<size_t>(x1 - 1);
    long long lo = z_ == Chamber::C ? 1 : 1 - x2;
    return row_offset_[static_cast<size_t>(x2)] + static_cast<size_t>(x1 - lo);
}

void VTable::sweep() {
    struct Move {
        long long d1, d2;
        double p;
    };
    std::vector<Move> moves;
    for (const auto& [vec, p] : product_moves(spec_))
        moves.push_back({vec[0], k_ == 2 ? vec[1] : 0, p.convert_to<double>()});

    std::vector<double> next(table_.size(), 0.0);
    const long long first_row = k_ == 1 ? 0 : (z_ == Chamber::C ? 2 : 1);

    for (long long layer = 0; layer < opt_.horizon; ++layer) {
        std::fill(next.begin(), next.end(), 0.0);
        if (k_ == 1) {
            for (const auto& mv : moves) {
                for (long long x = 1; x <= cap_; ++x) {
                    long long y = x + mv.d1;
                    if (y < 1) continue;  // killed at the wall
                    next[cell(x, 0)] += mv.p * (y <= cap_ ? table_[cell(y, 0)]
                                                          : h_val(z_, 1, y, 0));
                }
            }
        } else {
            for (long long x2 = first_row; x2 <= cap_; ++x2) {
                const long long lo = z_ == Chamber::C ? 1 : 1 - x2;
                const long long hi = x2 - 1;
                for (const auto& mv : moves) {
                    const long long y2 = x2 + mv.d2;
                    if (y2 < first_row) continue;  // row entirely outside the chamber
                    const long long ylo = z_ == Chamber::C ? 1 : 1 - y2;
                    const long long yhi = y2 - 1;
                    if (y2 <= cap_) {
                        // x1 subrange whose neighbor stays on the grid row
                        long long s = std::max(lo, ylo - mv.d1);
                        long long e = std::min(hi, yhi - mv.d1);
                        if (s > e) continue;
                        double* dst = &next[cell(s, x2)];
                        const double* src = &table_[cell(s + mv.d1, y2)];
                        const double p = mv.p;
                        const long long len = e - s + 1;
                        for (long long i = 0; i < len; ++i) dst[i] += p * src[i];
                    } else {
                        // neighbor row beyond the grid: deep-interior seed by h
                        for (long long x1 = lo; x1 <= hi; ++x1) {
                            long long y1 = x1 + mv.d1;
                            if (y1 < ylo || y1 > yhi) continue;
                            next[cell(x1, x2)] += mv.p * h_val(z_, 2, y1, y2);
                        }
                    }
                }
            }
        }
        table_.swap(next);
    }
}

bool VTable::in_window(std::span<const long long> x) const {
    if (static_cast<int>(x.size()) != k_) return false;
    if (!contains_lattice(z_, x)) return false;
    for (long long c : x)
        if (std::llabs(c) > std::min(opt_.radius, cap_)) return false;
    return true;
}

bool VTable::stored(std::span<const long long> x) const { return in_window(x); }

double VTable::value(std::span<const long long> x) const {
    if (static_cast<int>(x.size()) != k_) throw std::invalid_argument("dimension mismatch");
    if (!contains_lattice(z_, x)) throw std::domain_error("point outside the chamber");
    if (in_window(x)) return table_[cell(x[0], k_ == 2 ? x[1] : 0)];
    std::vector<double> xd(x.begin(), x.end());
    double hv = h(z_, xd);
    double hs = h_smoothed(z_, 2.0, xd);
    if (hv > 0 && hs / hv < opt_.fallback_smooth_ratio) return hv;
    throw std::domain_error("point outside the table window and not certifiably deep");
}

double VTable::one_step_killed_expectation(std::span<const long long> x) const {
    if (!contains_lattice(z_, x)) throw std::domain_error("point outside the chamber");
    double acc = 0.0;
    std::vector<long long> y(x.begin(), x.end());
    for (const auto& [vec, p] : product_moves(spec_)) {
        for (int i = 0; i < k_; ++i) y[i] = x[i] + vec[i];
        if (contains_lattice(z_, y)) acc += p.convert_to<double>() * value(y);
    }
    return acc;
}

long long VTable::stored_count() const {
    long long r = std::min(opt_.radius, cap_);
    if (k_ == 1) return r;
    if (z_ == Chamber::C) return r * (r - 1) / 2;
    return r * r;  // rows 1..r with 2*x2-1 cells
}

void VTable::save_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "chamber,k,radius,horizon,spread_sigmas,envelope_pad,fallback_smooth_ratio\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%d,%lld,%lld,%.17g,%.17g,%.17g\n", chamber_name(z_), k_,
                  opt_.radius, opt_.horizon, opt_.spread_sigmas, opt_.envelope_pad,
                  opt_.fallback_smooth_ratio);
    f << buf;
    f << "atoms\n";
    for (const auto& at : spec_.atoms) f << at.offset << ',' << at.prob.str() << '\n';
    f << "points\n";
    if (k_ == 1)
        f << "x1,value\n";
    else
        f << "x1,x2,value\n";
    const long long r = std::min(opt_.radius, cap_);
    if (k_ == 1) {
        for (long long x = 1; x <= r; ++x) {
            std::snprintf(buf, sizeof buf, "%lld,%.17g\n", x, table_[cell(x, 0)]);
            f << buf;
        }
    } else {
        const long long first_row = z_ == Chamber::C ? 2 : 1;
        for (long long x2 = first_row; x2 <= r; ++x2) {
            long long lo = z_ == Chamber::C ? 1 : 1 - x2;
            for (long long x1 = lo; x1 <= x2 - 1; ++x1) {
                std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g\n", x1, x2,
                              table_[cell(x1, x2)]);
                f << buf;
            }
        }
    }
    if (!f) throw std::runtime_error("write failure on " + path);
}

VTable VTable::load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("truncated table file");
    if (!std::getline(f, line)) throw std::runtime_error("truncated table file");

    VTable t;
    {
        std::istringstream s(line);
        std::string tok;
        std::getline(s, tok, ',');
        t.z_ = parse_chamber(tok);
        std::getline(s, tok, ',');
        t.k_ = std::stoi(tok);
        std::getline(s, tok, ',');
        t.opt_.radius = std::stoll(tok);
        std::getline(s, tok, ',');
        t.opt_.horizon = std::stoll(tok);
        std::getline(s, tok, ',');
        t.opt_.spread_sigmas = std::stod(tok);
        std::getline(s, tok, ',');
        t.opt_.envelope_pad = std::stod(tok);
        std::getline(s, tok, ',');
        t.opt_.fallback_smooth_ratio = std::stod(tok);
    }
    if (!std::getline(f, line) || line != "atoms") throw std::runtime_error("bad table file");
    t.spec_.k = t.k_;
    while (std::getline(f, line) && line != "points") {
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad atom row");
        LatticeAtom at;
        at.offset = std::stoll(line.substr(0, comma));
        at.prob = Rational(line.substr(comma + 1));
        t.spec_.atoms.push_back(at);
    }
    t.spec_.validate();
    t.a_ = t.spec_.max_offset();
    std::getline(f, line);  // column header

    // a loaded table has no envelope: the grid is exactly the window
    t.cap_ = t.opt_.radius;
    t.row_offset_.assign(static_cast<size_t>(t.cap_) + 2, 0);
    if (t.k_ == 1) {
        for (long long x = 1; x <= t.cap_ + 1; ++x)
            t.row_offset_[static_cast<size_t>(x)] = static_cast<size_t>(x - 1);
        t.table_.assign(static_cast<size_t>(t.cap_), 0.0);
    } else {
        const long long first_row = t.z_ == Chamber::C ? 2 : 1;
        size_t off = 0;
        for (long long x2 = first_row; x2 <= t.cap_ + 1; ++x2) {
            t.row_offset_[static_cast<size_t>(x2)] = off;
            off += static_cast<size_t>(t.z_ == Chamber::C ? x2 - 1 : 2 * x2 - 1);
        }
        t.table_.assign(t.row_offset_[static_cast<size_t>(t.cap_) + 1], 0.0);
    }
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream s(line);
        std::string tok;
        std::getline(s, tok, ',');
        long long x1 = std::stoll(tok);
        long long x2 = 0;
        if (t.k_ == 2) {
            std::getline(s, tok, ',');
            x2 = std::stoll(tok);
        }
        std::getline(s, tok, ',');
        t.table_[t.cell(x1, x2)] = std::stod(tok);
    }
    return t;
}

}  // namespace weylwalk
