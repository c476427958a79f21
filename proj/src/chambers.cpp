#include "weylwalk/chambers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace weylwalk {

namespace {

void check_point(Chamber z, std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("point must have dimension k >= 1");
    if (z == Chamber::D && x.size() < 2) throw std::invalid_argument("chamber D needs k >= 2");
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("point has non-finite coordinate");
    }
}

}  // namespace

Chamber parse_chamber(const std::string& s) {
    if (s == "A" || s == "a") return Chamber::A;
    if (s == "C" || s == "c") return Chamber::C;
    if (s == "D" || s == "d") return Chamber::D;
    throw std::invalid_argument("unknown chamber '" + s + "' (expected A, C or D)");
}

const char* chamber_name(Chamber z) {
    switch (z) {
        case Chamber::A: return "A";
        case Chamber::C: return "C";
        case Chamber::D: return "D";
    }
    throw std::logic_error("bad chamber value");
}

int chamber_gamma(Chamber z) {
    if (z == Chamber::C) return 1;
    if (z == Chamber::D) return 0;
    throw std::invalid_argument("gamma is defined for chambers C and D only");
}

bool contains(Chamber z, std::span<const double> x) {
    check_point(z, x);
    const size_t k = x.size();
    for (size_t i = 1; i + 1 <= k; ++i) {
        if (!(x[i - 1] < x[i])) {
            // D only constrains |x1| < x2; the first pair is rechecked below.
            if (!(z == Chamber::D && i == 1)) return false;
        }
    }
    switch (z) {
        case Chamber::A: return true;
        case Chamber::C: return x[0] > 0.0;
        case Chamber::D: return std::abs(x[0]) < x[1];
    }
    return false;
}

double h(Chamber z, std::span<const double> x) {
    check_point(z, x);
    const size_t k = x.size();
    double prod = 1.0;
    if (z == Chamber::A) {
        for (size_t i = 0; i < k; ++i)
            for (size_t j = i + 1; j < k; ++j) prod *= x[j] - x[i];
        return prod;
    }
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) prod *= x[j] * x[j] - x[i] * x[i];
    if (z == Chamber::C)
        for (size_t i = 0; i < k; ++i) prod *= x[i];
    return prod;
}

SignLog h_log(Chamber z, std::span<const double> x) {
    check_point(z, x);
    const size_t k = x.size();
    int sign = 1;
    double log_abs = 0.0;
    auto absorb = [&](double factor) {
        if (factor == 0.0) {
            sign = 0;
            log_abs = -std::numeric_limits<double>::infinity();
            return;
        }
        if (factor < 0.0) {
            sign = -sign;
            factor = -factor;
        }
        log_abs += std::log(factor);
    };
    for (size_t i = 0; i < k && sign != 0; ++i)
        for (size_t j = i + 1; j < k && sign != 0; ++j) {
            if (z == Chamber::A) {
                absorb(x[j] - x[i]);
            } else {
                absorb(x[j] - x[i]);
                absorb(x[j] + x[i]);
            }
        }
    if (z == Chamber::C)
        for (size_t i = 0; i < k && sign != 0; ++i) absorb(x[i]);
    return {sign, log_abs};
}

double h_det(Chamber z, std::span<const double> x) {
    check_point(z, x);
    if (z == Chamber::A) throw std::invalid_argument("h_det supports chambers C and D only");
    const int gamma = chamber_gamma(z);
    const size_t k = x.size();

#if defined(__SIZEOF_FLOAT128__)
    using wide = __float128;
#else
    using wide = long double;
#endif

    // The monomial matrix is badly conditioned for spread-out points, so
    // rescale to max|x_j| = 1 first (h is homogeneous of degree k(k-1)+gamma*k)
    // and run the elimination in extended precision.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    const int degree = static_cast<int>(k * (k - 1)) + gamma * static_cast<int>(k);

    // m[i][j] = (x_j/scale)^{2i - 2 + gamma}, built by repeated squares per column.
    std::vector<wide> m(k * k);
    for (size_t j = 0; j < k; ++j) {
        wide xs = static_cast<wide>(x[j]) / static_cast<wide>(scale);
        wide base = xs * xs;
        wide cur = gamma ? xs : static_cast<wide>(1);
        for (size_t i = 0; i < k; ++i) {
            m[i * k + j] = cur;
            cur *= base;
        }
    }

    wide det = 1;
    for (size_t col = 0; col < k; ++col) {
        auto mag = [&](wide v) { return v < 0 ? -v : v; };
        size_t piv = col;
        for (size_t r = col + 1; r < k; ++r)
            if (mag(m[r * k + col]) > mag(m[piv * k + col])) piv = r;
        if (m[piv * k + col] == 0) return 0.0;
        if (piv != col) {
            for (size_t c = 0; c < k; ++c) std::swap(m[piv * k + c], m[col * k + c]);
            det = -det;
        }
        det *= m[col * k + col];
        for (size_t r = col + 1; r < k; ++r) {
            wide f = m[r * k + col] / m[col * k + col];
            for (size_t c = col; c < k; ++c) m[r * k + c] -= f * m[col * k + c];
        }
    }
    return static_cast<double>(det) * std::pow(scale, degree);
}

double h_smoothed(Chamber z, double t, std::span<const double> x) {
    check_point(z, x);
    if (!(t > 0.0)) throw std::invalid_argument("smoothing parameter t must be > 0");
    const size_t k = x.size();
    double prod = 1.0;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) {
            prod *= t + std::abs(x[j] - x[i]);
            if (z != Chamber::A) prod *= t + std::abs(x[j] + x[i]);
        }
    if (z == Chamber::C)
        for (size_t i = 0; i < k; ++i) prod *= t + std::abs(x[i]);
    return prod;
}

bool in_auxiliary(Chamber z, double n, double eps, std::span<const double> x) {
    check_point(z, x);
    if (!(n >= 1.0)) throw std::invalid_argument("auxiliary chamber needs n >= 1");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
    const double t = std::pow(n, 0.5 - eps);
    const size_t k = x.size();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) {
            if (!(std::abs(x[j] - x[i]) > t)) return false;
            if (z != Chamber::A && !(std::abs(x[j] + x[i]) > t)) return false;
        }
    if (z == Chamber::C)
        for (size_t i = 0; i < k; ++i)
            if (!(std::abs(x[i]) > t)) return false;
    return true;
}

double boundary_distance(Chamber z, std::span<const double> x) {
    check_point(z, x);
    if (!contains(z, x)) return 0.0;
    const size_t k = x.size();
    const double inv_sqrt2 = 0.7071067811865475244;
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i + 1 <= k; ++i) {
        if (z == Chamber::D && i == 1) continue;
        d = std::min(d, (x[i] - x[i - 1]) * inv_sqrt2);
    }
    if (z == Chamber::C) d = std::min(d, x[0]);
    if (z == Chamber::D) {
        d = std::min(d, (x[1] - x[0]) * inv_sqrt2);
        d = std::min(d, (x[1] + x[0]) * inv_sqrt2);
    }
    if (z == Chamber::A && k == 1) return std::numeric_limits<double>::infinity();
    return d;
}

}  // namespace weylwalk
