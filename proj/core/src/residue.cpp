#include "hmf/residue.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <unordered_map>

#include "hmf/errors.hpp"

namespace hmf {

namespace {

using u64 = std::uint64_t;
using i128 = __int128;

long long floordiv_ll(i128 a, long long b) {
    i128 q = a / b;
    if (a % b != 0 && (a < 0) != (b < 0)) --q;
    return static_cast<long long>(q);
}

// canonical totally positive generator of the ideal (x)
RingElement canonical_ideal_gen(const RingElement& x) {
    return canonical_rep_mod_squared_units(totally_positive_associate(x));
}

Rat make_rat(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// fold into [0, 1)
Rat reduce_mod_one(const Rat& phase) {
    Int num = phase.get_num(), den = phase.get_den();
    mpz_fdiv_r(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return make_rat(num, den);
}

}  // namespace

ResidueRing::ResidueRing(const RingElement& modulus) : m_(modulus) {
    if (m_.is_zero()) throw Error("residue ring needs a nonzero modulus");
    const FieldContext& F = make_field(m_.d());
    (void)F;
    RingElement omega(m_.d(), 0, 1);
    Int tw = trace(omega);
    Int nw = norm(omega);
    t_omega_ = tw.get_si();
    n_omega_ = nw.get_si();

    // ideal lattice rows: m = (A, B), m*omega = (-B n_w, A + B t_w)
    Int A = m_.a(), B = m_.b();
    Int Nm = abs(norm(m_));
    Int s2 = A + B * tw;
    Int g, u, v;
    mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), B.get_mpz_t(), s2.get_mpz_t());
    Int gammaZ = abs(g);
    Int alphaZ = Nm / gammaZ;
    // first coordinate of the combination u*m + v*(m*omega), reduced mod alpha
    Int c = u * A + v * (-B * nw);
    Int betaZ;
    mpz_fdiv_r(betaZ.get_mpz_t(), c.get_mpz_t(), alphaZ.get_mpz_t());

    if (Nm > (Int(1) << 40)) throw Error("modulus norm exceeds the 2^40 residue-ring cap");
    alpha_ = alphaZ.get_si();
    beta_ = betaZ.get_si();
    gamma_ = gammaZ.get_si();

    modulus_primes_ = factor(m_).primes;
}

std::pair<long long, long long> ResidueRing::reduce_coords(long long x, long long y) const {
    long long k = floordiv_ll(y, gamma_);
    long long yr = y - k * gamma_;
    i128 xs = static_cast<i128>(x) - static_cast<i128>(k) * beta_;
    long long xr = static_cast<long long>(xs % alpha_);
    if (xr < 0) xr += alpha_;
    return {xr, yr};
}

std::uint64_t ResidueRing::reduce(const RingElement& x) const {
    if (x.d() != m_.d()) throw Error("residue reduction across different fields");
    Int q, yr;
    Int gammaZ(static_cast<long>(gamma_)), alphaZ(static_cast<long>(alpha_));
    mpz_fdiv_qr(q.get_mpz_t(), yr.get_mpz_t(), x.b().get_mpz_t(), gammaZ.get_mpz_t());
    Int xr = x.a() - q * Int(static_cast<long>(beta_));
    mpz_fdiv_r(xr.get_mpz_t(), xr.get_mpz_t(), alphaZ.get_mpz_t());
    return xr.get_ui() * static_cast<u64>(gamma_) + yr.get_ui();
}

RingElement ResidueRing::lift(std::uint64_t idx) const {
    long long x = static_cast<long long>(idx / static_cast<u64>(gamma_));
    long long y = static_cast<long long>(idx % static_cast<u64>(gamma_));
    return RingElement(m_.d(), Int(static_cast<long>(x)), Int(static_cast<long>(y)));
}

std::uint64_t ResidueRing::one() const {
    auto [x, y] = reduce_coords(1, 0);
    return static_cast<u64>(x) * gamma_ + static_cast<u64>(y);
}

std::uint64_t ResidueRing::add(std::uint64_t a, std::uint64_t b) const {
    long long x1 = static_cast<long long>(a / gamma_), y1 = static_cast<long long>(a % gamma_);
    long long x2 = static_cast<long long>(b / gamma_), y2 = static_cast<long long>(b % gamma_);
    auto [x, y] = reduce_coords(x1 + x2, y1 + y2);
    return static_cast<u64>(x) * gamma_ + static_cast<u64>(y);
}

std::uint64_t ResidueRing::neg(std::uint64_t a) const {
    long long x1 = static_cast<long long>(a / gamma_), y1 = static_cast<long long>(a % gamma_);
    auto [x, y] = reduce_coords(-x1, -y1);
    return static_cast<u64>(x) * gamma_ + static_cast<u64>(y);
}

std::uint64_t ResidueRing::mul(std::uint64_t a, std::uint64_t b) const {
    i128 x1 = static_cast<long long>(a / gamma_), y1 = static_cast<long long>(a % gamma_);
    i128 x2 = static_cast<long long>(b / gamma_), y2 = static_cast<long long>(b % gamma_);
    // (x1 + y1 w)(x2 + y2 w) with w^2 = t w - n
    i128 xc = x1 * x2 - y1 * y2 * n_omega_;
    i128 yc = x1 * y2 + y1 * x2 + y1 * y2 * t_omega_;
    long long k = floordiv_ll(yc, gamma_);
    long long yr = static_cast<long long>(yc - static_cast<i128>(k) * gamma_);
    i128 xs = xc - static_cast<i128>(k) * beta_;
    long long xr = static_cast<long long>(xs % alpha_);
    if (xr < 0) xr += alpha_;
    return static_cast<u64>(xr) * gamma_ + static_cast<u64>(yr);
}

std::uint64_t ResidueRing::pow(std::uint64_t x, std::uint64_t e) const {
    u64 acc = one(), base = x;
    while (e > 0) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

bool ResidueRing::is_unit(std::uint64_t idx) const {
    RingElement x = lift(idx);
    for (const auto& [pi, e] : modulus_primes_) {
        (void)e;
        if (divides(pi, x)) return false;
    }
    return true;
}

std::vector<std::uint64_t> ResidueRing::units() const {
    std::vector<u64> out;
    for (u64 i = 0; i < size(); ++i) {
        if (is_unit(i)) out.push_back(i);
    }
    return out;
}

std::uint64_t element_order(const ResidueRing& ring, const RingElement& x) {
    u64 idx = ring.reduce(x);
    if (!ring.is_unit(idx)) throw Error("element_order of a non-unit residue");
    u64 one = ring.one(), cur = idx, ord = 1;
    while (cur != one) {
        cur = ring.mul(cur, idx);
        ++ord;
        if (ord > ring.size()) throw std::logic_error("element_order runaway");
    }
    return ord;
}

namespace {

struct GroupView {
    const std::vector<u64>* elems;
    std::function<u64(u64, u64)> mul;
    u64 id;
};

u64 group_pow(const GroupView& G, u64 x, u64 e) {
    u64 acc = G.id, base = x;
    while (e > 0) {
        if (e & 1) acc = G.mul(acc, base);
        base = G.mul(base, base);
        e >>= 1;
    }
    return acc;
}

// order of x in a p-group
u64 p_power_order(const GroupView& G, u64 x, u64 p) {
    u64 ord = 1, cur = x;
    while (cur != G.id) {
        cur = group_pow(G, cur, p);
        ord *= p;
    }
    return ord;
}

// independent cyclic generators of a finite abelian p-group, orders descending
void decompose_p_group(const GroupView& G, u64 p,
                       std::vector<std::pair<u64, u64>>& out) {
    if (G.elems->size() == 1) return;
    u64 g = G.id, n1 = 1;
    for (u64 x : *G.elems) {
        u64 ord = p_power_order(G, x, p);
        if (ord > n1) {
            n1 = ord;
            g = x;
        }
    }
    // discrete log table for <g>
    std::unordered_map<u64, u64> glog;
    glog.reserve(n1 * 2);
    u64 cur = G.id;
    for (u64 j = 0; j < n1; ++j) {
        glog.emplace(cur, j);
        cur = G.mul(cur, g);
    }
    // cosets of <g>, canonical representative = smallest member
    std::unordered_map<u64, u64> repmap;
    repmap.reserve(G.elems->size() * 2);
    std::vector<u64> qelems;
    std::vector<u64> members(n1);
    for (u64 x : *G.elems) {
        if (repmap.count(x)) continue;
        u64 c = x;
        for (u64 j = 0; j < n1; ++j) {
            members[j] = c;
            c = G.mul(c, g);
        }
        u64 rep = *std::min_element(members.begin(), members.end());
        for (u64 y : members) repmap.emplace(y, rep);
        qelems.push_back(rep);
    }
    GroupView Q{&qelems,
                [&repmap, &G](u64 a, u64 b) { return repmap.at(G.mul(a, b)); },
                repmap.at(G.id)};
    std::vector<std::pair<u64, u64>> sub;
    decompose_p_group(Q, p, sub);
    out.emplace_back(g, n1);
    for (auto& [xbar, M] : sub) {
        // lift: xbar^M lies in <g>; its log is divisible by M because g has
        // maximal order
        u64 t = group_pow(G, xbar, M);
        auto it = glog.find(t);
        if (it == glog.end()) throw std::logic_error("unit-group lift left <g>");
        u64 c0 = it->second;
        if (c0 % M != 0) throw std::logic_error("unit-group lift: log not divisible");
        u64 corr = (n1 - c0 / M) % n1;
        u64 lifted = G.mul(xbar, group_pow(G, g, corr));
        if (p_power_order(G, lifted, p) != M) {
            throw std::logic_error("unit-group lift has wrong order");
        }
        out.emplace_back(lifted, M);
    }
}

std::vector<std::pair<u64, u64>> decompose_abelian(const std::vector<u64>& elems,
                                                   const std::function<u64(u64, u64)>& mul,
                                                   u64 id) {
    std::vector<std::pair<u64, u64>> out;
    u64 N = elems.size();
    if (N == 1) return out;
    GroupView G{&elems, mul, id};
    // prime decomposition of |G|
    std::vector<std::pair<u64, u64>> sylows;  // (p, p^a)
    u64 n = N;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            u64 pk = 1;
            while (n % p == 0) {
                n /= p;
                pk *= p;
            }
            sylows.emplace_back(p, pk);
        }
    }
    if (n > 1) sylows.emplace_back(n, n);
    for (auto& [p, pk] : sylows) {
        std::vector<u64> sylow;
        u64 cof = N / pk;
        std::set<u64> seen;
        for (u64 x : elems) {
            // project into the Sylow p-subgroup
            u64 y = group_pow(G, x, cof);
            if (seen.insert(y).second) sylow.push_back(y);
        }
        std::sort(sylow.begin(), sylow.end());
        if (sylow.size() != pk) throw std::logic_error("Sylow projection has wrong size");
        GroupView S{&sylow, mul, id};
        decompose_p_group(S, p, out);
    }
    return out;
}

}  // namespace

std::vector<std::uint64_t> UnitGroupStructure::exponents_of(std::uint64_t idx) const {
    long long code = dlog_codes[static_cast<size_t>(idx)];
    if (code < 0) throw Error("exponents_of a non-unit residue");
    std::vector<u64> exps(orders.size());
    u64 c = static_cast<u64>(code);
    for (size_t i = 0; i < orders.size(); ++i) {
        exps[i] = c % orders[i];
        c /= orders[i];
    }
    return exps;
}

std::shared_ptr<const UnitGroupStructure> unit_group(const RingElement& m) {
    RingElement key = canonical_ideal_gen(m);
    static std::map<std::tuple<int, Int, Int>, std::shared_ptr<const UnitGroupStructure>> cache;
    static std::mutex mu;
    std::tuple<int, Int, Int> k{key.d(), key.a(), key.b()};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(k);
        if (it != cache.end()) return it->second;
    }

    auto st = std::make_shared<UnitGroupStructure>();
    st->ring = std::make_shared<ResidueRing>(key);
    const ResidueRing& ring = *st->ring;
    std::vector<u64> units = ring.units();
    u64 one = ring.one();
    auto mul = [&ring](u64 a, u64 b) { return ring.mul(a, b); };

    auto dec = decompose_abelian(units, mul, one);
    for (auto& [g, n] : dec) {
        st->generators.push_back(g);
        st->orders.push_back(n);
        st->group_order *= n;
    }
    if (st->group_order != units.size()) {
        throw std::logic_error("unit-group decomposition order mismatch");
    }

    // full discrete-log table by enumerating exponent tuples
    st->dlog_codes.assign(ring.size(), -1);
    std::vector<std::pair<u64, u64>> table{{one, 0}};
    table.reserve(units.size());
    u64 radix = 1;
    for (size_t i = 0; i < st->generators.size(); ++i) {
        size_t base = table.size();
        u64 gpow = one;
        for (u64 e = 1; e < st->orders[i]; ++e) {
            gpow = mul(gpow, st->generators[i]);
            for (size_t j = 0; j < base; ++j) {
                table.emplace_back(mul(table[j].first, gpow), table[j].second + e * radix);
            }
        }
        radix *= st->orders[i];
    }
    for (auto& [elem, code] : table) {
        if (st->dlog_codes[elem] != -1) {
            throw std::logic_error("unit-group generators not independent");
        }
        st->dlog_codes[elem] = static_cast<long long>(code);
    }

    // subgroup generated by the images of -1 and the fundamental unit
    std::set<u64> sub{one};
    RingElement minus_one(key.d(), -1, 0);
    for (const RingElement& seed :
         {minus_one, fundamental_unit(key.d())}) {
        u64 s = ring.reduce(seed);
        std::set<u64> grown;
        u64 cur = one;
        do {
            for (u64 x : sub) grown.insert(ring.mul(x, cur));
            cur = ring.mul(cur, s);
        } while (cur != one);
        sub = std::move(grown);
    }
    st->unit_image_subgroup.assign(sub.begin(), sub.end());

    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(k, std::move(st));
    return it->second;
}

namespace {

// rational phase r with chi(lift(idx)) = e^{2 pi i r}, or nullopt on non-unit
std::optional<Rat> char_phase(const DirichletCharacter& chi, u64 idx) {
    const UnitGroupStructure& U = *chi.group;
    if (!U.is_unit_index(idx)) return std::nullopt;
    std::vector<u64> exps = U.exponents_of(idx);
    Rat phase(0);
    for (size_t i = 0; i < exps.size(); ++i) {
        if (chi.exponents[i] == 0 || exps[i] == 0) continue;
        phase += make_rat(Int(chi.exponents[i]) * Int(exps[i]), Int(U.orders[i]));
    }
    return reduce_mod_one(phase);
}

CyclotomicNumber phase_to_value(const Rat& phase) {
    unsigned long den = phase.get_den().get_ui();
    long num = phase.get_num().get_si();
    return CyclotomicNumber::root_of_unity(den, num);
}

// exponent k with chi(g) = zeta_n^k, from the phase of chi at g
u64 phase_to_exponent(const Rat& phase, u64 n) {
    Int num = phase.get_num(), den = phase.get_den();
    if (Int(n) % den != 0) throw std::logic_error("character phase has wrong order");
    Int k = num * (Int(n) / den);
    mpz_fdiv_r(k.get_mpz_t(), k.get_mpz_t(), Int(n).get_mpz_t());
    return k.get_ui();
}

}  // namespace

bool DirichletCharacter::is_trivial() const {
    for (u64 k : exponents) {
        if (k != 0) return false;
    }
    return true;
}

std::uint64_t DirichletCharacter::order() const {
    u64 ord = 1;
    for (size_t i = 0; i < exponents.size(); ++i) {
        u64 n = group->orders[i];
        u64 k = exponents[i];
        ord = std::lcm(ord, n / std::gcd(n, k == 0 ? n : k));
    }
    return ord;
}

std::vector<DirichletCharacter> characters_trivial_on_units(
    const RingElement& m, std::optional<std::uint64_t> order_divides) {
    auto U = unit_group(m);
    const ResidueRing& ring = *U->ring;
    const std::vector<u64>& H = U->unit_image_subgroup;

    // cosets of H among the units; first unvisited index is the coset minimum
    std::unordered_map<u64, u64> repmap;
    std::vector<u64> qelems;
    for (u64 idx = 0; idx < ring.size(); ++idx) {
        if (!U->is_unit_index(idx) || repmap.count(idx)) continue;
        for (u64 h : H) repmap.emplace(ring.mul(idx, h), idx);
        qelems.push_back(idx);
    }

    auto mulQ = [&repmap, &ring](u64 a, u64 b) { return repmap.at(ring.mul(a, b)); };
    u64 idQ = repmap.at(ring.one());
    auto qdec = decompose_abelian(qelems, mulQ, idQ);

    // discrete logs in the quotient
    std::unordered_map<u64, std::vector<u64>> qlog;
    std::vector<std::pair<u64, std::vector<u64>>> table{{idQ, std::vector<u64>(qdec.size(), 0)}};
    for (size_t i = 0; i < qdec.size(); ++i) {
        size_t base = table.size();
        u64 gpow = idQ;
        for (u64 e = 1; e < qdec[i].second; ++e) {
            gpow = mulQ(gpow, qdec[i].first);
            for (size_t j = 0; j < base; ++j) {
                auto exps = table[j].second;
                exps[i] = e;
                table.emplace_back(mulQ(table[j].first, gpow), std::move(exps));
            }
        }
    }
    for (auto& [elem, exps] : table) qlog.emplace(elem, exps);

    // all exponent tuples on the quotient generators
    std::vector<DirichletCharacter> out;
    std::vector<u64> c(qdec.size(), 0);
    while (true) {
        u64 chi_order = 1;
        for (size_t j = 0; j < c.size(); ++j) {
            u64 mj = qdec[j].second;
            chi_order = std::lcm(chi_order, mj / std::gcd(mj, c[j] == 0 ? mj : c[j]));
        }
        if (!order_divides || *order_divides % chi_order == 0) {
            DirichletCharacter chi;
            chi.modulus = ring.modulus();
            chi.group = U;
            chi.exponents.resize(U->generators.size());
            for (size_t i = 0; i < U->generators.size(); ++i) {
                const std::vector<u64>& d = qlog.at(repmap.at(U->generators[i]));
                Rat phase(0);
                for (size_t j = 0; j < c.size(); ++j) {
                    if (c[j] == 0 || d[j] == 0) continue;
                    phase += make_rat(Int(c[j]) * Int(d[j]), Int(qdec[j].second));
                }
                chi.exponents[i] = phase_to_exponent(reduce_mod_one(phase), U->orders[i]);
            }
            out.push_back(std::move(chi));
        }
        // odometer
        size_t pos = 0;
        while (pos < c.size()) {
            if (++c[pos] < qdec[pos].second) break;
            c[pos] = 0;
            ++pos;
        }
        if (pos == c.size()) break;
    }
    return out;
}

CyclotomicNumber char_eval(const DirichletCharacter& chi, const RingElement& x) {
    u64 idx = chi.group->ring->reduce(x);
    auto phase = char_phase(chi, idx);
    if (!phase) return CyclotomicNumber();
    return phase_to_value(*phase);
}

RingElement conductor(const DirichletCharacter& chi) {
    if (chi.conductor_cache) return *chi.conductor_cache;
    const ResidueRing& ring = *chi.group->ring;
    RingElement one_el(chi.modulus.d(), 1, 0);
    for (const RingElement& div : divisors_up_to_units(chi.modulus)) {
        // chi factors through (R/div)^x iff it kills every unit congruent to 1
        // mod div; those are 1 + div*w with w running over R/(m/div)
        auto cof = exact_div(chi.modulus, div);
        if (!cof) throw std::logic_error("divisor list returned a non-divisor");
        ResidueRing coring(*cof);
        bool factors = true;
        for (u64 w = 0; w < coring.size() && factors; ++w) {
            u64 idx = ring.reduce(one_el + div * coring.lift(w));
            auto phase = char_phase(chi, idx);
            if (phase && *phase != 0) factors = false;
        }
        if (factors) {
            chi.conductor_cache = div;
            return div;
        }
    }
    throw std::logic_error("conductor scan exhausted the divisors");
}

DirichletCharacter reduce_to_conductor(const DirichletCharacter& chi) {
    RingElement cond = conductor(chi);
    if (cond == canonical_ideal_gen(chi.modulus)) {
        DirichletCharacter copy = chi;
        copy.conductor_cache = cond;
        return copy;
    }
    auto U2 = unit_group(cond);
    const ResidueRing& ring2 = *U2->ring;
    DirichletCharacter out;
    out.modulus = ring2.modulus();
    out.group = U2;
    out.conductor_cache = ring2.modulus();
    out.exponents.resize(U2->generators.size());
    for (size_t i = 0; i < U2->generators.size(); ++i) {
        RingElement lift = ring2.lift(U2->generators[i]);
        // move to a representative coprime to the larger modulus
        RingElement probe = lift;
        long guard = 0;
        while (!is_coprime(probe, chi.modulus)) {
            probe = probe + cond;
            if (++guard > 1000000) throw std::logic_error("coprime lift scan stuck");
        }
        u64 idx = chi.group->ring->reduce(probe);
        auto phase = char_phase(chi, idx);
        if (!phase) throw std::logic_error("coprime lift is not a unit");
        out.exponents[i] = phase_to_exponent(*phase, U2->orders[i]);
    }
    return out;
}

namespace {

// totally positive canonical generator of lcm of the ideals (a), (b)
RingElement ideal_lcm(const RingElement& a, const RingElement& b) {
    if (is_unit(a)) return canonical_ideal_gen(b);
    if (is_unit(b)) return canonical_ideal_gen(a);
    Factorization fa = factor(a), fb = factor(b);
    std::vector<std::pair<RingElement, int>> merged = fa.primes;
    for (const auto& [p, e] : fb.primes) {
        bool found = false;
        for (auto& [q, f] : merged) {
            if (q == p) {
                f = std::max(f, e);
                found = true;
                break;
            }
        }
        if (!found) merged.emplace_back(p, e);
    }
    RingElement acc(a.d(), 1, 0);
    for (const auto& [p, e] : merged) acc = acc * pow(p, static_cast<unsigned long>(e));
    return canonical_ideal_gen(acc);
}

}  // namespace

DirichletCharacter char_mul(const DirichletCharacter& a, const DirichletCharacter& b) {
    DirichletCharacter A = reduce_to_conductor(a);
    DirichletCharacter B = reduce_to_conductor(b);
    RingElement M = ideal_lcm(A.modulus, B.modulus);
    auto U = unit_group(M);
    const ResidueRing& ring = *U->ring;
    DirichletCharacter prod;
    prod.modulus = ring.modulus();
    prod.group = U;
    prod.exponents.resize(U->generators.size());
    for (size_t i = 0; i < U->generators.size(); ++i) {
        RingElement lift = ring.lift(U->generators[i]);
        Rat phase = *char_phase(A, A.group->ring->reduce(lift)) +
                    *char_phase(B, B.group->ring->reduce(lift));
        prod.exponents[i] = phase_to_exponent(reduce_mod_one(phase), U->orders[i]);
    }
    return reduce_to_conductor(prod);
}

DirichletCharacter char_conjugate(const DirichletCharacter& chi) {
    DirichletCharacter out = chi;
    for (size_t i = 0; i < out.exponents.size(); ++i) {
        if (out.exponents[i] != 0) out.exponents[i] = chi.group->orders[i] - out.exponents[i];
    }
    return out;
}

bool char_equal(const DirichletCharacter& a, const DirichletCharacter& b) {
    DirichletCharacter A = reduce_to_conductor(a);
    DirichletCharacter B = reduce_to_conductor(b);
    return A.modulus == B.modulus && A.exponents == B.exponents;
}

int quadratic_symbol(const RingElement& xi, const RingElement& p) {
    Int Np = abs(norm(p));
    if (Np % 2 == 0) throw EvenPrimeError("quadratic symbol at a prime over 2");
    ResidueRing ring(p);
    u64 x = ring.reduce(xi);
    if (!ring.is_unit(x)) return 0;
    Int e = (Np - 1) / 2;
    u64 r = ring.pow(x, e.get_ui());
    if (r == ring.one()) return 1;
    if (r == ring.reduce(RingElement(p.d(), -1, 0))) return -1;
    throw std::logic_error("Euler criterion did not give a sign; modulus not prime?");
}

int is_local_square(const RingElement& x, const RingElement& p) {
    if (x.is_zero()) return 0;
    RingElement y = x;
    int v = 0;
    while (divides(p, y)) {
        auto q = exact_div(y, p);
        y = *q;
        ++v;
    }
    if (v % 2 == 1) return 0;
    // Hensel bound: squares mod p^{2e+1} lift, e = v_p(2)
    int e = 0;
    RingElement two(p.d(), 2, 0);
    RingElement t = two;
    while (divides(p, t)) {
        t = *exact_div(t, p);
        ++e;
    }
    ResidueRing ring(pow(p, static_cast<unsigned long>(2 * e + 1)));
    u64 target = ring.reduce(y);
    for (u64 c = 0; c < ring.size(); ++c) {
        if (ring.mul(c, c) == target) return 1;
    }
    return -1;
}

DirichletCharacter epsilon_t(const RingElement& t) {
    if (!is_totally_positive(t)) throw PositivityError("epsilon_t needs a totally positive t");
    if (!(squarefree_part(t) == t)) {
        throw NotSquarefreeError("epsilon_t needs the squarefree canonical representative");
    }
    RingElement m4t = RingElement(t.d(), 4, 0) * t;
    auto U = unit_group(m4t);
    const ResidueRing& ring = *U->ring;
    DirichletCharacter chi;
    chi.modulus = ring.modulus();
    chi.group = U;
    chi.exponents.resize(U->generators.size());
    for (size_t i = 0; i < U->generators.size(); ++i) {
        RingElement lift = ring.lift(U->generators[i]);
        int val = 1;
        for (const auto& [pi, e] : factor(lift).primes) {
            if (e % 2 == 0) continue;
            int s = quadratic_symbol(t, pi);
            if (s == 0) throw std::logic_error("epsilon_t generator shares a factor with t");
            val *= s;
        }
        if (val == 1) {
            chi.exponents[i] = 0;
        } else {
            if (U->orders[i] % 2 != 0) throw std::logic_error("sign value on odd-order generator");
            chi.exponents[i] = U->orders[i] / 2;
        }
    }
    // the extension F(sqrt t)/F is unramified at infinity, so the character
    // must kill the unit images; anything else is a construction bug
    for (u64 h : U->unit_image_subgroup) {
        if (*char_phase(chi, h) != 0) throw std::logic_error("epsilon_t not trivial on units");
    }
    return reduce_to_conductor(chi);
}

CyclotomicNumber ideal_char_value(const DirichletCharacter& psi, const RingElement& x) {
    if (x.is_zero()) return CyclotomicNumber();
    DirichletCharacter prim = reduce_to_conductor(psi);
    RingElement s = totally_positive_associate(x);
    return char_eval(prim, s).conj();
}

}  // namespace hmf
