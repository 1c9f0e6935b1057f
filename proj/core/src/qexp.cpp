#include "hmf/qexp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <utility>

namespace hmf {

namespace {

// (trace, a, b), the order enumerate_box uses
bool trace_key_less(const RingElement& x, const RingElement& y) {
    Int tx = trace(x), ty = trace(y);
    if (tx != ty) return tx < ty;
    if (x.a() != y.a()) return x.a() < y.a();
    return x.b() < y.b();
}

struct TraceLess {
    bool operator()(const RingElement& x, const RingElement& y) const {
        return trace_key_less(x, y);
    }
};

Box min_box(const Box& A, const Box& B) {
    return {A.first < B.first ? A.first : B.first,
            A.second < B.second ? A.second : B.second};
}

// a totally positive element has norm >= 1 and trace >= 2, so a box failing
// either bound holds none
bool box_can_hold_tp(int d, const Box& B) {
    if (B.first.sign() <= 0 || B.second.sign() <= 0) return false;
    if (B.first * B.second < QuadVal::from_rational(d, 1)) return false;
    return B.first + B.second >= QuadVal::from_rational(d, 2);
}

bool same_ideal(const RingElement& x, const RingElement& y) {
    return divides(x, y) && divides(y, x);
}

using Support = std::vector<std::pair<RingElement, CyclotomicNumber>>;

void fill_sorted(FourierExpansion& out, Support pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& x, const auto& y) { return trace_key_less(x.first, y.first); });
    for (auto& [xi, v] : pairs)
        if (!v.is_zero()) out.set_coeff(xi, std::move(v));
}

CyclotomicNumber inverse_norm(const RingElement& p) {
    Rat r(1);
    r /= Rat(norm(p));
    return CyclotomicNumber::from_rational(r);
}

}  // namespace

FourierExpansion::FourierExpansion(int d, Box box) : d_(d), box_(std::move(box)) {}

bool FourierExpansion::in_box(const RingElement& xi) const {
    if (!is_totally_positive(xi)) return false;
    return sigma1(xi) <= box_.first && sigma2(xi) <= box_.second;
}

CyclotomicNumber FourierExpansion::coeff(const RingElement& xi) const {
    if (xi.is_zero()) return a0_;
    if (!in_box(xi))
        throw BoxTooSmallError("coefficient at " + to_string(xi) +
                               " lies outside the certified box");
    auto it = std::lower_bound(
        coeffs_.begin(), coeffs_.end(), xi,
        [](const auto& e, const RingElement& k) { return trace_key_less(e.first, k); });
    if (it != coeffs_.end() && it->first == xi) return it->second;
    return CyclotomicNumber();
}

void FourierExpansion::set_coeff(const RingElement& xi, CyclotomicNumber v) {
    assert(in_box(xi));
    auto it = std::lower_bound(
        coeffs_.begin(), coeffs_.end(), xi,
        [](const auto& e, const RingElement& k) { return trace_key_less(e.first, k); });
    if (it != coeffs_.end() && it->first == xi) {
        if (v.is_zero())
            coeffs_.erase(it);
        else
            it->second = std::move(v);
        return;
    }
    if (!v.is_zero()) coeffs_.insert(it, {xi, std::move(v)});
}

FourierExpansion theta_chi_t(const DirichletCharacter& chi, const RingElement& t,
                             const Box& box) {
    if (!is_totally_positive(t)) throw PositivityError("theta shift must be totally positive");
    int d = t.d();
    FieldContext F = make_field(d);
    DirichletCharacter prim = reduce_to_conductor(chi);

    FourierExpansion out(d, box);
    if (prim.is_trivial()) out.set_constant_term(CyclotomicNumber::from_int(1));

    // scan x with |sigma_i(x)| <= sqrt(X_i / sigma_i(t)); the integer ranges
    // are padded and every candidate is re-checked exactly
    double B1s = (box.first / sigma1(t)).to_double();
    double B2s = (box.second / sigma2(t)).to_double();
    double B1 = B1s > 0 ? std::sqrt(B1s) + 1e-9 : 0;
    double B2 = B2s > 0 ? std::sqrt(B2s) + 1e-9 : 0;
    double w1 = sigma1(F.omega).to_double(), w2 = sigma2(F.omega).to_double();
    long bmax = static_cast<long>(std::floor((B1 + B2) / (w1 - w2))) + 1;

    std::map<RingElement, CyclotomicNumber, TraceLess> acc;
    for (long b = -bmax; b <= bmax; ++b) {
        double lo = std::max(-B1 - b * w1, -B2 - b * w2);
        double hi = std::min(B1 - b * w1, B2 - b * w2);
        long alo = static_cast<long>(std::floor(lo)) - 1;
        long ahi = static_cast<long>(std::ceil(hi)) + 1;
        for (long a = alo; a <= ahi; ++a) {
            RingElement x(d, a, b);
            if (x.is_zero()) continue;
            RingElement xi = t * x * x;
            if (!(sigma1(xi) <= box.first && sigma2(xi) <= box.second)) continue;
            CyclotomicNumber val = char_eval(prim, x);
            if (val.is_zero()) continue;
            acc[xi] += val.conj();
        }
    }
    for (auto& [xi, v] : acc)
        if (!v.is_zero()) out.set_coeff(xi, std::move(v));

    const RingElement& r = prim.modulus;
    out.level = canonical_rep_mod_squared_units(RingElement(d, 4, 0) * r * r * t);
    out.character = char_mul(prim, epsilon_t(squarefree_part(t)));
    return out;
}

FourierExpansion op_T_p2(const FourierExpansion& f, const RingElement& p,
                         const DirichletCharacter& psi, const RingElement& c) {
    if (!is_totally_positive(p)) throw PositivityError("Hecke prime must be totally positive");
    assert(prime_omega(p) == 1);
    int d = f.d();
    RingElement p2 = p * p;
    bool coprime = is_coprime(p, c);

    // b(xi) reads a(xi p^2) always and a(xi), a(xi/p^2) in the coprime branch;
    // all three stay inside the input box when each bound shrinks by
    // max(sigma_i(p^2), sigma_i(p^2)^-1)
    QuadVal one = QuadVal::from_rational(d, 1);
    QuadVal s1 = sigma1(p2), s2 = sigma2(p2);
    QuadVal r1 = one / s1, r2 = one / s2;
    if (coprime) {
        r1 = r1 < s1 ? r1 : s1;
        r2 = r2 < s2 ? r2 : s2;
    }
    Box out_box{f.box().first * r1, f.box().second * r2};
    if (!box_can_hold_tp(d, out_box))
        throw BoxTooSmallError("input box leaves no room for any Hecke coefficient");

    CyclotomicNumber psi_p_bar, psi_p2_bar, invN;
    if (coprime) {
        DirichletCharacter prim = reduce_to_conductor(psi);
        psi_p_bar = char_eval(prim, p).conj();
        psi_p2_bar = psi_p_bar * psi_p_bar;
        invN = inverse_norm(p);
    }

    FourierExpansion out(d, out_box);
    // at xi = 0 the symbol term drops and 0/p^2 = 0 contributes a(0) again
    CyclotomicNumber b0 = f.constant_term();
    if (coprime) b0 += psi_p2_bar * invN * f.constant_term();
    out.set_constant_term(b0);

    std::map<RingElement, CyclotomicNumber, TraceLess> cand;
    auto add_cand = [&](const RingElement& xi) {
        if (out.in_box(xi)) cand.emplace(xi, CyclotomicNumber());
    };
    for (const auto& [s, v] : f.support()) {
        add_cand(s);
        if (auto q = exact_div(s, p2)) add_cand(*q);
        add_cand(s * p2);
    }
    for (auto& [xi, b] : cand) {
        b = f.coeff(xi * p2);
        if (coprime) {
            int sym = quadratic_symbol(xi, p);
            if (sym != 0) {
                CyclotomicNumber mid = psi_p_bar * invN * f.coeff(xi);
                b += (sym == 1) ? mid : -mid;
            }
            if (auto q = exact_div(xi, p2)) b += psi_p2_bar * invN * f.coeff(*q);
        }
        if (!b.is_zero()) out.set_coeff(xi, std::move(b));
    }
    out.level = canonical_rep_mod_squared_units(c);
    out.character = psi;
    return out;
}

FourierExpansion op_V(const RingElement& m, const FourierExpansion& f) {
    if (!is_totally_positive(m)) throw PositivityError("shift must be totally positive");
    Box out_box{f.box().first * sigma1(m), f.box().second * sigma2(m)};
    FourierExpansion out(f.d(), out_box);
    out.set_constant_term(f.constant_term());
    Support pairs;
    for (const auto& [s, v] : f.support()) pairs.emplace_back(m * s, v);
    fill_sorted(out, std::move(pairs));
    if (f.level) out.level = canonical_rep_mod_squared_units(*f.level * m);
    if (f.character)
        out.character = char_mul(*f.character, epsilon_t(squarefree_part(m)));
    return out;
}

FourierExpansion op_U(const RingElement& p, const FourierExpansion& f) {
    if (!is_totally_positive(p)) throw PositivityError("shift must be totally positive");
    Box out_box{f.box().first / sigma1(p), f.box().second / sigma2(p)};
    if (!box_can_hold_tp(f.d(), out_box))
        throw BoxTooSmallError("input box leaves no room after U");
    FourierExpansion out(f.d(), out_box);
    out.set_constant_term(f.constant_term());
    Support pairs;
    for (const auto& [s, v] : f.support())
        if (auto q = exact_div(s, p))
            if (out.in_box(*q)) pairs.emplace_back(*q, v);
    fill_sorted(out, std::move(pairs));
    out.level = f.level;
    if (f.character)
        out.character = char_mul(*f.character, epsilon_t(squarefree_part(p)));
    return out;
}

FourierExpansion op_K(const RingElement& p, const FourierExpansion& f) {
    FourierExpansion out(f.d(), f.box());
    // constant term dropped: p divides 0
    for (const auto& [s, v] : f.support())
        if (!divides(p, s)) out.set_coeff(s, v);
    if (f.level) out.level = canonical_rep_mod_squared_units(*f.level * p * p);
    out.character = f.character;
    return out;
}

FourierExpansion op_H(const FourierExpansion& f) {
    FourierExpansion out(f.d(), f.box());
    out.set_constant_term(f.constant_term().conj());
    for (const auto& [s, v] : f.support()) out.set_coeff(s, v.conj());
    out.level = f.level;
    if (f.character) out.character = char_conjugate(*f.character);
    return out;
}

std::optional<CyclotomicNumber> is_proportional(const FourierExpansion& f,
                                                const FourierExpansion& g) {
    assert(f.d() == g.d());
    Box B = min_box(f.box(), g.box());
    auto inside = [&](const RingElement& s) {
        return sigma1(s) <= B.first && sigma2(s) <= B.second;
    };

    std::optional<CyclotomicNumber> lambda;
    auto consider = [&](const CyclotomicNumber& fv, const CyclotomicNumber& gv) {
        if (gv.is_zero()) return fv.is_zero();
        if (!lambda) lambda = fv * gv.inverse();
        return fv == *lambda * gv;
    };

    if (!consider(f.constant_term(), g.constant_term())) return std::nullopt;
    const auto& fs = f.support();
    const auto& gs = g.support();
    size_t i = 0, j = 0;
    while (i < fs.size() || j < gs.size()) {
        bool take_f = j == gs.size() ||
                      (i < fs.size() && trace_key_less(fs[i].first, gs[j].first));
        bool take_g = i == fs.size() ||
                      (j < gs.size() && trace_key_less(gs[j].first, fs[i].first));
        if (take_f) {
            if (inside(fs[i].first) && !consider(fs[i].second, CyclotomicNumber()))
                return std::nullopt;
            ++i;
        } else if (take_g) {
            if (inside(gs[j].first) && !consider(CyclotomicNumber(), gs[j].second))
                return std::nullopt;
            ++j;
        } else {
            if (inside(fs[i].first) && !consider(fs[i].second, gs[j].second))
                return std::nullopt;
            ++i;
            ++j;
        }
    }
    if (!lambda) return CyclotomicNumber::from_int(1);
    return lambda;
}

CyclotomicNumber coeff_at_ideal(const FourierExpansion& f, const RingElement& x) {
    if (!f.character)
        throw WellDefinednessError("ideal coefficients need character metadata");
    assert(!x.is_zero());
    RingElement xi = canonical_rep_mod_squared_units(x);
    CyclotomicNumber base = f.coeff(xi);
    const RingElement& eps = fundamental_unit(f.d());
    RingElement eps2 = eps * eps;
    RingElement ieps2 = conj(eps) * conj(eps);  // eps^-1 = -conj(eps), so this is eps^-2
    for (const RingElement& u2 : {eps2, ieps2}) {
        RingElement v = xi * u2;
        if (f.in_box(v) && !(f.coeff(v) == base))
            throw WellDefinednessError("coefficient varies on the unit-square orbit of " +
                                       to_string(xi));
    }
    return base;
}

FourierExpansion scale(const CyclotomicNumber& lambda, const FourierExpansion& f) {
    FourierExpansion out(f.d(), f.box());
    out.level = f.level;
    out.character = f.character;
    if (lambda.is_zero()) return out;
    out.set_constant_term(lambda * f.constant_term());
    for (const auto& [s, v] : f.support()) out.set_coeff(s, lambda * v);
    return out;
}

FourierExpansion add(const FourierExpansion& f, const FourierExpansion& g) {
    assert(f.d() == g.d());
    FourierExpansion out(f.d(), min_box(f.box(), g.box()));
    out.set_constant_term(f.constant_term() + g.constant_term());
    Support pairs;
    const auto& fs = f.support();
    const auto& gs = g.support();
    size_t i = 0, j = 0;
    while (i < fs.size() || j < gs.size()) {
        if (j == gs.size() || (i < fs.size() && trace_key_less(fs[i].first, gs[j].first))) {
            pairs.push_back(fs[i]);
            ++i;
        } else if (i == fs.size() || trace_key_less(gs[j].first, fs[i].first)) {
            pairs.push_back(gs[j]);
            ++j;
        } else {
            pairs.emplace_back(fs[i].first, fs[i].second + gs[j].second);
            ++i;
            ++j;
        }
    }
    for (auto& [s, v] : pairs)
        if (out.in_box(s) && !v.is_zero()) out.set_coeff(s, std::move(v));
    if (f.level && g.level && same_ideal(*f.level, *g.level)) out.level = f.level;
    if (f.character && g.character && char_equal(*f.character, *g.character))
        out.character = f.character;
    return out;
}

FourierExpansion sub(const FourierExpansion& f, const FourierExpansion& g) {
    return add(f, scale(-CyclotomicNumber::from_int(1), g));
}

bool equal_on_shared_box(const FourierExpansion& f, const FourierExpansion& g) {
    FourierExpansion diff = sub(f, g);
    return diff.is_zero();
}

}  // namespace hmf
