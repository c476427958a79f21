#include "weylwalk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace weylwalk {

namespace {

using nlohmann::json;

Rational rat(long long num, long long den = 1) { return Rational(BigInt(num), BigInt(den)); }

const char* kind_name(StepKind kind) {
    switch (kind) {
        case StepKind::DiscreteAtoms: return "discrete-atoms";
        case StepKind::Gaussian: return "gaussian";
        case StepKind::UniformSymmetric: return "uniform-symmetric";
    }
    throw std::logic_error("bad step kind");
}

StepKind parse_kind(const std::string& s) {
    if (s == "discrete-atoms") return StepKind::DiscreteAtoms;
    if (s == "gaussian") return StepKind::Gaussian;
    if (s == "uniform-symmetric") return StepKind::UniformSymmetric;
    throw std::invalid_argument("unsupported step distribution kind '" + s + "'");
}

}  // namespace

StepDistribution StepDistribution::rademacher(int k) {
    StepDistribution d;
    d.kind = StepKind::DiscreteAtoms;
    d.k = k;
    d.atoms = {{rat(-1), rat(1, 2)}, {rat(1), rat(1, 2)}};
    d.validate();
    return d;
}

StepDistribution StepDistribution::three_point(int k, const Rational& p0) {
    StepDistribution d;
    d.kind = StepKind::DiscreteAtoms;
    d.k = k;
    Rational side = (Rational(1) - p0) / 2;
    d.atoms = {{rat(-1), side}, {rat(0), p0}, {rat(1), side}};
    d.validate();
    return d;
}

StepDistribution StepDistribution::gaussian(int k, double sigma) {
    StepDistribution d;
    d.kind = StepKind::Gaussian;
    d.k = k;
    d.sigma = sigma;
    d.validate();
    return d;
}

StepDistribution StepDistribution::uniform_symmetric(int k, double halfwidth) {
    StepDistribution d;
    d.kind = StepKind::UniformSymmetric;
    d.k = k;
    d.halfwidth = halfwidth;
    d.validate();
    return d;
}

StepDistribution StepDistribution::lazy_signs_table(int k, const Rational& lam) {
    if (k < 1 || k > 8) throw std::invalid_argument("table construction supports 1 <= k <= 8");
    StepDistribution d;
    d.kind = StepKind::DiscreteAtoms;
    d.k = k;
    d.coupling = Coupling::ExchangeableTable;
    d.table.push_back({std::vector<long long>(k, 0), lam});
    Rational per = (Rational(1) - lam) / rat(1LL << k);
    for (long long mask = 0; mask < (1LL << k); ++mask) {
        std::vector<long long> v(k);
        for (int i = 0; i < k; ++i) v[i] = (mask >> i) & 1 ? 1 : -1;
        d.table.push_back({std::move(v), per});
    }
    d.validate();
    return d;
}

void StepDistribution::validate() const {
    if (k < 1) throw std::invalid_argument("dimension k must be >= 1");
    if (kind != StepKind::DiscreteAtoms) {
        if (coupling != Coupling::IidComponents)
            throw std::invalid_argument("joint tables are only supported for discrete laws");
        if (kind == StepKind::Gaussian && !(sigma > 0))
            throw std::invalid_argument("gaussian sigma must be positive");
        if (kind == StepKind::UniformSymmetric && !(halfwidth > 0))
            throw std::invalid_argument("uniform halfwidth must be positive");
        return;
    }
    if (coupling == Coupling::IidComponents) {
        if (atoms.empty()) throw std::invalid_argument("discrete law needs at least one atom");
        Rational total = 0;
        std::set<Rational> seen;
        for (const auto& a : atoms) {
            if (!(a.prob > 0) || a.prob > 1)
                throw std::invalid_argument("atom probabilities must lie in (0, 1]");
            if (!seen.insert(a.value).second)
                throw std::invalid_argument("atom values must be distinct");
            total += a.prob;
        }
        if (total != 1) throw std::invalid_argument("atom probabilities must sum to 1");
        return;
    }
    // Joint table: dimensions, total mass, and permutation invariance.
    if (table.empty()) throw std::invalid_argument("table coupling needs entries");
    std::map<std::vector<long long>, Rational> mass;
    Rational total = 0;
    for (const auto& e : table) {
        if (static_cast<int>(e.vec.size()) != k)
            throw std::invalid_argument("table vector dimension mismatch");
        if (!(e.prob > 0) || e.prob > 1)
            throw std::invalid_argument("table probabilities must lie in (0, 1]");
        if (!mass.emplace(e.vec, e.prob).second)
            throw std::invalid_argument("duplicate table vector");
        total += e.prob;
    }
    if (total != 1) throw std::invalid_argument("table probabilities must sum to 1");
    for (const auto& [v, p] : mass) {
        std::vector<long long> w = v;
        std::sort(w.begin(), w.end());
        do {
            auto it = mass.find(w);
            if (it == mass.end() || it->second != p)
                throw std::invalid_argument("table is not invariant under coordinate permutations");
        } while (std::next_permutation(w.begin(), w.end()));
    }
}

bool StepDistribution::is_lattice() const {
    if (kind != StepKind::DiscreteAtoms) return false;
    if (coupling == Coupling::ExchangeableTable) return true;  // integer vectors by construction
    for (const auto& a : atoms)
        if (denominator(a.value) != 1) return false;
    return true;
}

bool StepDistribution::all_offsets_odd() const {
    if (!is_lattice()) return false;
    if (coupling == Coupling::ExchangeableTable) {
        for (const auto& e : table)
            for (long long v : e.vec)
                if (v % 2 == 0) return false;
        return true;
    }
    for (const auto& a : atoms) {
        BigInt num = numerator(a.value);
        if (num % 2 == 0) return false;
    }
    return true;
}

Rational StepDistribution::marginal_moment(int r) const {
    if (kind != StepKind::DiscreteAtoms)
        throw std::invalid_argument("exact moments are available for discrete laws only");
    if (r < 0) throw std::invalid_argument("moment order must be >= 0");
    Rational m = 0;
    if (coupling == Coupling::ExchangeableTable) {
        for (const auto& e : table) {
            Rational p = 1;
            for (int i = 0; i < r; ++i) p *= e.vec[0];
            m += e.prob * p;
        }
        return m;
    }
    for (const auto& a : atoms) {
        Rational p = 1;
        for (int i = 0; i < r; ++i) p *= a.value;
        m += a.prob * p;
    }
    return m;
}

double StepDistribution::marginal_moment_d(int r) const {
    switch (kind) {
        case StepKind::DiscreteAtoms:
            return marginal_moment(r).convert_to<double>();
        case StepKind::Gaussian: {
            if (r % 2 == 1) return 0.0;
            double m = 1.0;  // (r-1)!! sigma^r
            for (int i = r - 1; i >= 1; i -= 2) m *= i;
            return m * std::pow(sigma, r);
        }
        case StepKind::UniformSymmetric:
            if (r % 2 == 1) return 0.0;
            return std::pow(halfwidth, r) / (r + 1);
    }
    throw std::logic_error("bad step kind");
}

bool StepDistribution::sign_symmetric() const {
    if (kind != StepKind::DiscreteAtoms) return true;  // both continuous kinds are symmetric
    if (coupling == Coupling::IidComponents) {
        std::map<Rational, Rational> mass;
        for (const auto& a : atoms) mass[a.value] = a.prob;
        for (const auto& [v, p] : mass) {
            auto it = mass.find(-v);
            if (it == mass.end() || it->second != p) return false;
        }
        return true;
    }
    std::map<std::vector<long long>, Rational> mass;
    for (const auto& e : table) mass[e.vec] = e.prob;
    for (const auto& [v, p] : mass) {
        for (int i = 0; i < k; ++i) {
            std::vector<long long> w = v;
            w[i] = -w[i];
            auto it = mass.find(w);
            if (it == mass.end() || it->second != p) return false;
        }
    }
    return true;
}

StepDistribution StepDistribution::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad step distribution JSON: ") + e.what());
    }
    StepDistribution d;
    if (!j.contains("kind") || !j.contains("k"))
        throw std::invalid_argument("step distribution JSON needs 'kind' and 'k'");
    d.kind = parse_kind(j.at("kind").get<std::string>());
    d.k = j.at("k").get<int>();
    if (d.kind == StepKind::Gaussian) {
        d.sigma = j.value("sigma", 1.0);
    } else if (d.kind == StepKind::UniformSymmetric) {
        d.halfwidth = j.value("halfwidth", 1.7320508075688772935);
    } else if (j.contains("table")) {
        d.coupling = Coupling::ExchangeableTable;
        for (const auto& e : j.at("table")) {
            TableEntry te;
            for (const auto& v : e.at("v")) te.vec.push_back(v.get<long long>());
            const auto& p = e.at("p");
            te.prob = Rational(BigInt(p.at(0).get<long long>()), BigInt(p.at(1).get<long long>()));
            d.table.push_back(std::move(te));
        }
    } else {
        if (!j.contains("atoms")) throw std::invalid_argument("discrete law needs 'atoms' or 'table'");
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 4)
                throw std::invalid_argument("atom entries are [value_num, value_den, prob_num, prob_den]");
            Atom atom;
            atom.value = Rational(BigInt(a.at(0).get<long long>()), BigInt(a.at(1).get<long long>()));
            atom.prob = Rational(BigInt(a.at(2).get<long long>()), BigInt(a.at(3).get<long long>()));
            d.atoms.push_back(std::move(atom));
        }
    }
    d.validate();
    return d;
}

std::string StepDistribution::to_json() const {
    json j;
    j["kind"] = kind_name(kind);
    j["k"] = k;
    if (kind == StepKind::Gaussian) {
        j["sigma"] = sigma;
    } else if (kind == StepKind::UniformSymmetric) {
        j["halfwidth"] = halfwidth;
    } else if (coupling == Coupling::ExchangeableTable) {
        json rows = json::array();
        for (const auto& e : table) {
            json row;
            row["v"] = e.vec;
            row["p"] = {numerator(e.prob).convert_to<long long>(),
                        denominator(e.prob).convert_to<long long>()};
            rows.push_back(row);
        }
        j["table"] = rows;
    } else {
        json rows = json::array();
        for (const auto& a : atoms)
            rows.push_back({numerator(a.value).convert_to<long long>(),
                            denominator(a.value).convert_to<long long>(),
                            numerator(a.prob).convert_to<long long>(),
                            denominator(a.prob).convert_to<long long>()});
        j["atoms"] = rows;
    }
    return j.dump();
}

AssumptionReport validate_assumptions(const StepDistribution& d, Chamber z) {
    d.validate();
    if (z == Chamber::A) throw std::invalid_argument("assumption table covers chambers C and D");
    if (z == Chamber::D && d.k < 2) throw std::invalid_argument("chamber D needs k >= 2");

    AssumptionReport rep;
    rep.chamber = z;
    rep.k = d.k;
    const int k = d.k;
    if (z == Chamber::C) {
        rep.r_required = 2 * k - 1;
    } else {
        rep.r_required = k >= 3 ? 2 * k - 2 : 3;
        if (k == 2) rep.notes = "k=2: any moment order above 2 suffices; ";
    }

    // All supported kinds have moments of every order (bounded support or gaussian).
    rep.moment_assumption = true;
    rep.notes += d.is_discrete() ? "bounded support" : "closed-form moments";

    bool odd_ok = true;
    for (int r = 1; r <= rep.r_required; r += 2) {
        double m = d.marginal_moment_d(r);
        rep.odd_moments.push_back(m);
        if (m != 0.0) odd_ok = false;
    }
    if (d.is_discrete()) {
        for (int r = 1; r <= rep.r_required; r += 2)
            if (d.marginal_moment(r) != 0) odd_ok = false;
    }
    // Joint tables additionally need symmetry of every conditional law; full
    // per-coordinate sign symmetry is the enforced sufficient condition.
    if (!d.sign_symmetric()) odd_ok = false;
    rep.symmetry_assumption = odd_ok;

    rep.variance = d.marginal_moment_d(2);
    if (d.is_discrete()) {
        rep.normalization_assumption = d.marginal_moment(2) == 1;
    } else {
        rep.normalization_assumption = std::abs(rep.variance - 1.0) <= 1e-12;
    }
    return rep;
}

}  // namespace weylwalk
