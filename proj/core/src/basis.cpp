#include "hmf/basis.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace hmf {

namespace {

bool same_ideal(const RingElement& x, const RingElement& y) {
    return divides(x, y) && divides(y, x);
}

bool trace_key_less(const RingElement& x, const RingElement& y) {
    Int tx = trace(x), ty = trace(y);
    if (tx != ty) return tx < ty;
    if (x.a() != y.a()) return x.a() < y.a();
    return x.b() < y.b();
}

// exact row reduction; one pivot per row (the zero element encodes the
// constant term) or nullopt when the rows are dependent
std::optional<std::vector<RingElement>> elimination_pivots(std::vector<FourierExpansion> rows) {
    std::vector<RingElement> pivots;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].is_zero()) return std::nullopt;
        RingElement piv = rows[i].constant_term().is_zero()
                              ? rows[i].support().front().first
                              : RingElement(rows[i].d(), 0, 0);
        CyclotomicNumber v = rows[i].coeff(piv);
        rows[i] = scale(v.inverse(), rows[i]);
        for (size_t j = i + 1; j < rows.size(); ++j) {
            CyclotomicNumber w = rows[j].coeff(piv);
            if (!w.is_zero()) rows[j] = sub(rows[j], scale(w, rows[i]));
        }
        pivots.push_back(piv);
    }
    return pivots;
}

}  // namespace

std::vector<OmegaPair> omega_set(const RingElement& c, const DirichletCharacter& psi) {
    int d = c.d();
    RingElement four(d, 4, 0);
    if (!divides(four, c)) throw LevelError("level must be divisible by 4");

    std::vector<OmegaPair> out;
    for (const RingElement& r : divisors_up_to_units(c)) {
        RingElement four_r2 = four * r * r;
        if (!divides(four_r2, c)) continue;
        RingElement quot = *exact_div(c, four_r2);
        for (const DirichletCharacter& chi : characters_trivial_on_units(r)) {
            DirichletCharacter prim = reduce_to_conductor(chi);
            if (!same_ideal(prim.modulus, r)) continue;  // conductor exactly r
            for (const RingElement& t : divisors_up_to_units(quot)) {
                DirichletCharacter eps = epsilon_t(squarefree_part(t));
                if (char_equal(psi, char_mul(prim, eps))) out.push_back({prim, t});
            }
        }
    }
    return out;
}

BasisReport basis(const RingElement& c, const DirichletCharacter& psi, const Box& box) {
    int d = c.d();
    if (!divides(RingElement(d, 4, 0), c)) throw LevelError("level must be divisible by 4");
    if (!is_nonsplit(c)) throw HypothesisError("level has a split prime factor");

    BasisReport report;
    report.level = canonical_rep_mod_squared_units(c);
    report.character = psi;
    report.pairs = omega_set(c, psi);
    report.dimension = report.pairs.size();

    // theta_{chi,t} vanishes at every shift with fewer prime factors than t,
    // so this arrangement makes the pivot matrix triangular
    std::sort(report.pairs.begin(), report.pairs.end(), [](const OmegaPair& x, const OmegaPair& y) {
        int ox = prime_omega(x.t), oy = prime_omega(y.t);
        if (ox != oy) return ox < oy;
        Int nx = abs(norm(x.t)), ny = abs(norm(y.t));
        if (nx != ny) return nx < ny;
        return trace_key_less(x.t, y.t);
    });

    for (const OmegaPair& pair : report.pairs) {
        if (!(sigma1(pair.t) <= box.first && sigma2(pair.t) <= box.second))
            throw BoxTooSmallError("box does not reach the shift " + to_string(pair.t));
        report.expansions.push_back(theta_chi_t(pair.chi, pair.t, box));
    }

    CyclotomicNumber two = CyclotomicNumber::from_int(2);
    bool triangular = true;
    for (size_t i = 0; triangular && i < report.expansions.size(); ++i) {
        if (!(report.expansions[i].coeff(report.pairs[i].t) == two)) triangular = false;
        for (size_t j = i + 1; triangular && j < report.expansions.size(); ++j)
            if (!report.expansions[j].coeff(report.pairs[i].t).is_zero()) triangular = false;
    }
    if (triangular) {
        for (const OmegaPair& pair : report.pairs) report.pivots.push_back(pair.t);
    } else {
        auto pivots = elimination_pivots(report.expansions);
        if (!pivots) throw std::logic_error("theta expansions are linearly dependent");
        report.pivots = *pivots;
    }
    return report;
}

std::vector<DimensionRow> sqrt2_dimension_table(int n_max) {
    RingElement q(2, 0, 1);
    DirichletCharacter triv = characters_trivial_on_units(RingElement(2, 1, 0))[0];
    DirichletCharacter odd;
    RingElement q5 = canonical_rep_mod_squared_units(totally_positive_associate(pow(q, 5)));
    for (const auto& chi : characters_trivial_on_units(q5))
        if (!chi.is_trivial()) odd = chi;

    std::vector<DimensionRow> rows;
    for (int n = 4; n <= n_max; ++n) {
        RingElement c = canonical_rep_mod_squared_units(totally_positive_associate(pow(q, n)));
        size_t s1 = omega_set(c, triv).size();
        size_t s2 = omega_set(c, odd).size();
        size_t f1 = static_cast<size_t>((n - 2) / 2 + (n >= 13 ? (n - 13) / 2 : 0));
        size_t f2 = static_cast<size_t>((n - 3) / 2 + (n >= 12 ? (n - 12) / 2 : 0));
        if (s1 != f1 || s2 != f2)
            throw std::logic_error("dimension formula disagrees with the pair count at n = " +
                                   std::to_string(n));
        rows.push_back({n, s1, s2});
    }
    return rows;
}

FourierExpansion newform_candidate(const DirichletCharacter& psi, const Box& box) {
    DirichletCharacter prim = reduce_to_conductor(psi);
    int d = prim.modulus.d();
    RingElement one(d, 1, 0);
    Rat half(1, 2);
    FourierExpansion f = scale(CyclotomicNumber::from_rational(half),
                               theta_chi_t(prim, one, box));
    if (!(f.coeff(one) == CyclotomicNumber::from_int(1)))
        throw std::logic_error("normalization lost: a(1) != 1");
    return f;
}

}  // namespace hmf
