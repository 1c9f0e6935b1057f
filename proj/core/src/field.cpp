#include "hmf/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace hmf {

namespace {

struct FieldParams {
    int d;
    long Tw;  // trace of w
    long Nw;  // norm of w
    long D;   // field discriminant; also disc of the minimal polynomial of w
};

const FieldParams& params(int d) {
    static const std::map<int, FieldParams> table = {
        {2, {2, 0, -2, 8}},
        {3, {3, 0, -3, 12}},
        {5, {5, 1, -1, 5}},
        {13, {13, 1, -3, 13}},
    };
    auto it = table.find(d);
    if (it == table.end()) {
        throw CatalogError("field catalog covers d in {2, 3, 5, 13}; got d=" +
                           std::to_string(d));
    }
    return it->second;
}

void check_same_field(const RingElement& x, const RingElement& y) {
    if (x.d() != y.d()) throw Error("mixed-field arithmetic");
}

double omega1(int d) {
    const auto& P = params(d);
    return (P.Tw + std::sqrt(static_cast<double>(P.D))) / 2.0;
}
double omega2(int d) {
    const auto& P = params(d);
    return (P.Tw - std::sqrt(static_cast<double>(P.D))) / 2.0;
}

RingElement one(int d) { return RingElement(d, 1, 0); }

// eps^{-1} = -conj(eps) since N(eps) = -1.
RingElement unit_inverse(const RingElement& u) {
    Int n = norm(u);
    if (n == 1) return conj(u);
    if (n == -1) return -conj(u);
    throw Error("unit_inverse: not a unit");
}

}  // namespace

RingElement RingElement::operator+(const RingElement& o) const {
    check_same_field(*this, o);
    return RingElement(d_, a_ + o.a_, b_ + o.b_);
}

RingElement RingElement::operator-(const RingElement& o) const {
    check_same_field(*this, o);
    return RingElement(d_, a_ - o.a_, b_ - o.b_);
}

RingElement RingElement::operator*(const RingElement& o) const {
    check_same_field(*this, o);
    const auto& P = params(d_);
    // (a1 + b1 w)(a2 + b2 w) with w^2 = Tw*w - Nw
    Int a = a_ * o.a_ - b_ * o.b_ * P.Nw;
    Int b = a_ * o.b_ + b_ * o.a_ + b_ * o.b_ * P.Tw;
    return RingElement(d_, a, b);
}

Int norm(const RingElement& x) {
    const auto& P = params(x.d());
    return x.a() * x.a() + x.a() * x.b() * P.Tw + x.b() * x.b() * P.Nw;
}

Int trace(const RingElement& x) {
    const auto& P = params(x.d());
    return 2 * x.a() + x.b() * P.Tw;
}

RingElement conj(const RingElement& x) {
    const auto& P = params(x.d());
    return RingElement(x.d(), x.a() + x.b() * P.Tw, -x.b());
}

QuadVal sigma1(const RingElement& x) {
    const auto& P = params(x.d());
    // a + b*w = (2a + b*Tw)/2 + (b/2) sqrt(disc of w) and sqrt there is
    // sqrt(D) scaled: for Tw=0, w = sqrt(d) and D = 4d, so sqrt(D)/2 = sqrt(d).
    // Uniformly: sigma1 = (2a + b*Tw)/2 + (b/2)*sqrt(D) in terms of sqrt(D)...
    // We store QuadVal over sqrt(d), so convert: sqrt(D) = 2*sqrt(d) (Tw=0)
    // or sqrt(D) = sqrt(d) (Tw=1, D=d).
    Rat u(trace(x).get_str(), 10);
    u /= 2;
    Rat v(x.b().get_str(), 10);
    if (P.Tw == 0) {
        // w = sqrt(d): image is a + b sqrt(d)
        return QuadVal(x.d(), Rat(x.a().get_str(), 10), v);
    }
    v /= 2;
    return QuadVal(x.d(), u, v);
}

QuadVal sigma2(const RingElement& x) {
    QuadVal s = sigma1(x);
    return QuadVal(x.d(), s.u(), -s.v());
}

std::pair<double, double> embeddings(const RingElement& x) {
    double a = x.a().get_d(), b = x.b().get_d();
    return {a + b * omega1(x.d()), a + b * omega2(x.d())};
}

int QuadVal::sign() const {
    int su = sgn(u_), sv = sgn(v_);
    if (sv == 0) return su;
    if (su == 0) return sv;
    if (su > 0 && sv > 0) return 1;
    if (su < 0 && sv < 0) return -1;
    Rat uu = u_ * u_;
    Rat vv = v_ * v_ * d_;
    int c = cmp(uu, vv);
    if (c == 0) return 0;  // impossible for nonzero v with nonsquare d; defensive
    if (su > 0) return c > 0 ? 1 : -1;
    return c > 0 ? -1 : 1;
}

QuadVal QuadVal::operator+(const QuadVal& o) const {
    if (d_ != o.d_ && !is_zero() && !o.is_zero()) throw Error("mixed-field QuadVal");
    int d = is_zero() ? o.d_ : d_;
    return QuadVal(d, u_ + o.u_, v_ + o.v_);
}

QuadVal QuadVal::operator-(const QuadVal& o) const { return *this + (-o); }

QuadVal QuadVal::operator*(const QuadVal& o) const {
    if (d_ != o.d_ && !is_zero() && !o.is_zero()) throw Error("mixed-field QuadVal");
    int d = is_zero() ? o.d_ : d_;
    return QuadVal(d, u_ * o.u_ + v_ * o.v_ * d, u_ * o.v_ + v_ * o.u_);
}

QuadVal QuadVal::operator/(const QuadVal& o) const {
    if (o.is_zero()) throw Error("QuadVal division by zero");
    // 1/(u + v sqrt(d)) = (u - v sqrt(d)) / (u^2 - v^2 d)
    Rat den = o.u_ * o.u_ - o.v_ * o.v_ * o.d_;
    QuadVal inv(o.d_, o.u_ / den, -o.v_ / den);
    return *this * inv;
}

double QuadVal::to_double() const {
    return u_.get_d() + v_.get_d() * std::sqrt(static_cast<double>(d_));
}

bool is_totally_positive(const RingElement& x) {
    if (x.is_zero()) return false;
    return sigma1(x).sign() > 0 && sigma2(x).sign() > 0;
}

bool is_unit(const RingElement& x) {
    Int n = norm(x);
    return n == 1 || n == -1;
}

const RingElement& fundamental_unit(int d) {
    static std::map<int, RingElement> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;

    const auto& P = params(d);
    // Continued fraction of w: iterate a_i = floor((P_i + sqrt(d))/Q_i) with
    // P_{i+1} = a_i Q_i - P_i, Q_{i+1} = (d - P_{i+1}^2)/Q_i.  The convergent
    // numerators/denominators h_i/k_i give candidates (h_i - k_i Tw) + k_i w;
    // the first with norm of absolute value 1 is the fundamental unit.
    Int s = sqrt(Int(d));
    Int Pi = (P.Tw == 0) ? Int(0) : Int(1);
    Int Qi = (P.Tw == 0) ? Int(1) : Int(2);
    Int h_prev = 1, h_prev2 = 0;  // h_{-1}, h_{-2}
    Int k_prev = 0, k_prev2 = 1;
    RingElement found;
    bool ok = false;
    for (int i = 0; i < 10000; ++i) {
        Int ai = (Pi + s) / Qi;
        Int h = ai * h_prev + h_prev2;
        Int k = ai * k_prev + k_prev2;
        RingElement cand(d, h - k * P.Tw, k);
        Int n = norm(cand);
        if (n == 1 || n == -1) {
            found = cand;
            ok = true;
            break;
        }
        h_prev2 = h_prev; h_prev = h;
        k_prev2 = k_prev; k_prev = k;
        Pi = ai * Qi - Pi;
        Qi = (Int(d) - Pi * Pi) / Qi;
    }
    if (!ok) throw Error("continued fraction did not produce a unit");
    // Normalize to the associate > 1 under sigma1.
    if (sigma1(found).sign() < 0) found = -found;
    if (sigma1(found) < QuadVal::from_rational(d, 1)) found = unit_inverse(found);
    if (sigma1(found).sign() < 0) found = -found;
    if (norm(found) != -1) {
        throw UnitSignError("fundamental unit " + to_string(found) + " of Q(sqrt(" +
                            std::to_string(d) +
                            ")) has norm +1, so the narrow class number exceeds 1");
    }
    auto [pos, inserted] = cache.emplace(d, found);
    (void)inserted;
    return pos->second;
}

RingElement totally_positive_associate(const RingElement& x) {
    if (x.is_zero()) throw PositivityError("zero has no totally positive associate");
    Int n = norm(x);
    if (n > 0) {
        if (is_totally_positive(x)) return x;
        if (is_totally_positive(-x)) return -x;
        throw PositivityError("no totally positive associate at |k| = 0");
    }
    const RingElement& eps = fundamental_unit(x.d());
    RingElement y = x * eps;
    if (is_totally_positive(y)) return y;
    if (is_totally_positive(-y)) return -y;
    throw PositivityError("no totally positive associate at |k| = 1");
}

RingElement canonical_rep_mod_squared_units(const RingElement& x) {
    if (x.is_zero()) return x;
    const RingElement& eps = fundamental_unit(x.d());
    RingElement eps2 = eps * eps;
    RingElement eps2inv = conj(eps2);  // N(eps^2) = 1
    RingElement c = totally_positive_associate(x);
    // trace(c * eps^{2k}) is strictly convex in k; walk to the minimum.
    while (trace(c * eps2inv) < trace(c)) c = c * eps2inv;
    while (trace(c * eps2) < trace(c)) c = c * eps2;
    RingElement best = c;
    for (const RingElement& nb : {c * eps2, c * eps2inv}) {
        if (trace(nb) == trace(c)) {
            // tie: lexicographically largest (a, b) wins
            if (best < nb) best = nb;
        }
    }
    return best;
}

Splitting splitting_type(int d, const Int& p) {
    const auto& P = params(d);
    if (mpz_divisible_p(Int(P.D).get_mpz_t(), p.get_mpz_t()) == 0) {
        if (p == 2) {
            // d odd here (2 | D otherwise); split iff d = 1 mod 8
            return (d % 8 == 1) ? Splitting::split : Splitting::inert;
        }
        int leg = mpz_legendre(Int(P.D).get_mpz_t(), p.get_mpz_t());
        return leg == 1 ? Splitting::split : Splitting::inert;
    }
    return Splitting::ramified;
}

std::optional<RingElement> exact_div(const RingElement& y, const RingElement& x) {
    check_same_field(y, x);
    if (x.is_zero()) return std::nullopt;
    if (y.is_zero()) return RingElement(y.d(), 0, 0);
    // y/x = y*conj(x)/N(x)
    RingElement num = y * conj(x);
    Int n = norm(x);
    if (!mpz_divisible_p(num.a().get_mpz_t(), n.get_mpz_t()) ||
        !mpz_divisible_p(num.b().get_mpz_t(), n.get_mpz_t())) {
        return std::nullopt;
    }
    return RingElement(y.d(), num.a() / n, num.b() / n);
}

bool divides(const RingElement& x, const RingElement& y) {
    return exact_div(y, x).has_value();
}

namespace {

// Pollard rho with Brent's cycle detection; inputs here are small but the
// factorizer should not silently hang on an adversarial norm.
Int pollard_rho(const Int& n) {
    if (n % 2 == 0) return 2;
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(0xC0FFEEul);
    while (true) {
        Int y = rng.get_z_range(n - 3) + 2;
        Int c = rng.get_z_range(n - 1) + 1;
        Int m = 128, g = 1, r = 1, q = 1, x, ys;
        while (g == 1) {
            x = y;
            for (Int i = 0; i < r; ++i) y = (y * y + c) % n;
            Int k = 0;
            while (k < r && g == 1) {
                ys = y;
                Int rem = r - k;
                Int lim = m < rem ? m : rem;
                for (Int i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    q = q * ((x - y) % n + n) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
            }
            r *= 2;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                ys = (ys * ys + c) % n;
                Int diff = ((x - ys) % n + n) % n;
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            }
        }
        if (g != n) return g;
    }
}

void factor_int(Int n, std::map<Int, int>& out) {
    if (n < 0) n = -n;
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
        while (n % p == 0) {
            out[Int(p)]++;
            n /= p;
        }
    }
    Int p = 17;
    while (n > 1 && p * p <= n && p < 100000) {
        while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            out[p]++;
            n /= p;
        }
        p += 2;
    }
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
        out[n]++;
        return;
    }
    Int f = pollard_rho(n);
    factor_int(f, out);
    factor_int(n / f, out);
}

// Prime elements above a rational prime p, as canonical representatives,
// sorted by (trace, a, b).
std::vector<RingElement> primes_above(int d, const Int& p) {
    const auto& P = params(d);
    Splitting sp = splitting_type(d, p);
    if (sp == Splitting::inert) {
        return {RingElement(d, p, 0)};
    }
    // find pi = a + b w with norm +-p by solving the quadratic in a
    for (Int b = 0; b <= sqrt(4 * p) + 2; ++b) {
        for (int sign : {1, -1}) {
            Int target = sign * p;
            Int disc = b * b * P.D + 4 * target;
            if (disc < 0) continue;
            if (mpz_perfect_square_p(disc.get_mpz_t()) == 0) continue;
            Int r = sqrt(disc);
            for (int rs : {1, -1}) {
                Int num = -b * P.Tw + rs * r;
                if (num % 2 != 0) continue;
                RingElement pi(d, num / 2, b);
                if (norm(pi) != target) continue;
                RingElement c1 = canonical_rep_mod_squared_units(pi);
                if (sp == Splitting::ramified) return {c1};
                RingElement c2 = canonical_rep_mod_squared_units(conj(pi));
                if (c1 == c2) throw Error("split prime produced associate conjugates");
                std::vector<RingElement> out = {c1, c2};
                std::sort(out.begin(), out.end(), [](const RingElement& x, const RingElement& y) {
                    Int tx = trace(x), ty = trace(y);
                    if (tx != ty) return tx < ty;
                    return x < y;
                });
                return out;
            }
        }
    }
    throw Error("no prime element found above " + p.get_str());
}

}  // namespace

Factorization factor(const RingElement& x) {
    if (x.is_zero()) throw Error("factor(0) is undefined");
    Factorization out;
    Int n = norm(x);
    if (n < 0) n = -n;
    if (n == 1) {
        out.unit = x;
        return out;
    }
    std::map<Int, int> rational;
    factor_int(n, rational);
    RingElement y = x;
    for (const auto& [p, e] : rational) {
        (void)e;
        for (const RingElement& pi : primes_above(x.d(), p)) {
            int count = 0;
            while (auto q = exact_div(y, pi)) {
                y = *q;
                ++count;
            }
            if (count > 0) out.primes.emplace_back(pi, count);
        }
    }
    if (!is_unit(y)) throw Error("factorization left a non-unit cofactor");
    out.unit = y;
    return out;
}

RingElement squarefree_part(const RingElement& x) {
    if (!is_totally_positive(x)) {
        throw Error("squarefree_part requires a totally positive argument");
    }
    Factorization f = factor(x);
    RingElement t = one(x.d());
    for (const auto& [pi, e] : f.primes) {
        if (e % 2 == 1) t = t * pi;
    }
    return canonical_rep_mod_squared_units(totally_positive_associate(t));
}

std::optional<RingElement> perfect_square_root(const RingElement& x) {
    if (x.is_zero()) return RingElement(x.d(), 0, 0);
    if (!is_totally_positive(x)) return std::nullopt;  // squares are totally positive
    Factorization f = factor(x);
    RingElement root = one(x.d());
    for (const auto& [pi, e] : f.primes) {
        if (e % 2 == 1) return std::nullopt;
        root = root * pow(pi, static_cast<unsigned long>(e / 2));
    }
    // x / root^2 is a totally positive unit, hence eps^{2k}; fold eps^k into root.
    auto rem = exact_div(x, root * root);
    if (!rem) throw Error("internal error in perfect_square_root");
    RingElement u = *rem;
    const RingElement& eps = fundamental_unit(x.d());
    RingElement eps2 = eps * eps, eps2inv = conj(eps2), epsinv = unit_inverse(eps);
    QuadVal one_q = QuadVal::from_rational(x.d(), 1);
    for (int guard = 0; guard < 100000 && !(u == one(x.d())); ++guard) {
        if (sigma1(u) > one_q) {
            u = u * eps2inv;
            root = root * eps;
        } else {
            u = u * eps2;
            root = root * epsinv;
        }
    }
    if (!(root * root == x)) return std::nullopt;
    return root;
}

std::vector<RingElement> enumerate_box(int d, const QuadVal& X1, const QuadVal& X2,
                                       bool include_zero) {
    std::vector<RingElement> out;
    if (include_zero) out.push_back(RingElement(d, 0, 0));
    if (X1.sign() <= 0 || X2.sign() <= 0) return out;
    double x1 = X1.to_double(), x2 = X2.to_double();
    double w1 = omega1(d), w2 = omega2(d);
    double s = w1 - w2;  // sqrt(D)
    long b_lo = static_cast<long>(std::floor(-x2 / s)) - 2;
    long b_hi = static_cast<long>(std::ceil(x1 / s)) + 2;
    QuadVal zero = QuadVal::from_rational(d, 0);
    for (long b = b_lo; b <= b_hi; ++b) {
        double lo = std::max(-b * w1, -b * w2);
        double hi = std::min(x1 - b * w1, x2 - b * w2);
        if (hi < lo - 4) continue;
        long a_lo = static_cast<long>(std::floor(lo)) - 2;
        long a_hi = static_cast<long>(std::ceil(hi)) + 2;
        for (long a = a_lo; a <= a_hi; ++a) {
            RingElement xi(d, a, b);
            QuadVal s1 = sigma1(xi), s2 = sigma2(xi);
            if (s1 > zero && s2 > zero && s1 <= X1 && s2 <= X2) out.push_back(xi);
        }
    }
    std::sort(out.begin(), out.end(), [](const RingElement& x, const RingElement& y) {
        Int tx = trace(x), ty = trace(y);
        if (tx != ty) return tx < ty;
        return x < y;
    });
    return out;
}

std::vector<RingElement> enumerate_box(int d, double X1, double X2, bool include_zero) {
    return enumerate_box(d, QuadVal(d, Rat(X1), Rat(0)), QuadVal(d, Rat(X2), Rat(0)),
                         include_zero);
}

std::vector<RingElement> divisors_up_to_units(const RingElement& x) {
    Factorization f = factor(x);
    std::vector<RingElement> out = {one(x.d())};
    for (const auto& [pi, e] : f.primes) {
        std::vector<RingElement> next;
        next.reserve(out.size() * (e + 1));
        for (const RingElement& base : out) {
            RingElement cur = base;
            next.push_back(cur);
            for (int k = 1; k <= e; ++k) {
                cur = cur * pi;
                next.push_back(cur);
            }
        }
        out = std::move(next);
    }
    for (RingElement& v : out) {
        v = canonical_rep_mod_squared_units(totally_positive_associate(v));
    }
    std::sort(out.begin(), out.end(), [](const RingElement& x, const RingElement& y) {
        Int nx = norm(x), ny = norm(y);
        if (nx != ny) return nx < ny;
        Int tx = trace(x), ty = trace(y);
        if (tx != ty) return tx < ty;
        return x < y;
    });
    return out;
}

bool is_nonsplit(const RingElement& x) {
    if (x.is_zero()) return false;
    if (is_unit(x)) return true;
    Int n = norm(x);
    if (n < 0) n = -n;
    std::map<Int, int> rational;
    factor_int(n, rational);
    for (const auto& [p, e] : rational) {
        (void)e;
        if (splitting_type(x.d(), p) == Splitting::split) return false;
    }
    return true;
}

RingElement gcd(const RingElement& x, const RingElement& y) {
    if (x.is_zero() && y.is_zero()) return RingElement(x.d(), 0, 0);
    if (x.is_zero()) return canonical_rep_mod_squared_units(y);
    if (y.is_zero()) return canonical_rep_mod_squared_units(x);
    Factorization f = factor(x);
    RingElement g = one(x.d());
    for (const auto& [pi, e] : f.primes) {
        RingElement rest = y;
        int k = 0;
        while (k < e) {
            auto q = exact_div(rest, pi);
            if (!q) break;
            rest = *q;
            ++k;
        }
        g = g * pow(pi, static_cast<unsigned long>(k));
    }
    return canonical_rep_mod_squared_units(g);
}

bool is_coprime(const RingElement& x, const RingElement& y) {
    Int g;
    Int nx = norm(x), ny = norm(y);
    mpz_gcd(g.get_mpz_t(), nx.get_mpz_t(), ny.get_mpz_t());
    if (g == 1) return true;
    return gcd(x, y) == one(x.d());
}

RingElement pow(const RingElement& x, unsigned long e) {
    RingElement r = one(x.d());
    RingElement base = x;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

int prime_omega(const RingElement& x) {
    int total = 0;
    for (const auto& [pi, e] : factor(x).primes) {
        (void)pi;
        total += e;
    }
    return total;
}

std::string to_string(const RingElement& x) {
    const auto& P = params(x.d());
    // Print as U + V*sqrt(d), halved when the coordinates demand it.
    Int U, V;
    bool half = false;
    if (P.Tw == 0) {
        U = x.a();
        V = x.b();
    } else {
        U = 2 * x.a() + x.b();
        V = x.b();
        if (U % 2 == 0 && V % 2 == 0) {
            U /= 2;
            V /= 2;
        } else {
            half = true;
        }
    }
    std::string root = "sqrt(" + std::to_string(x.d()) + ")";
    std::string core;
    if (V == 0) {
        core = U.get_str();
    } else {
        std::string vpart;
        if (V == 1) vpart = root;
        else if (V == -1) vpart = "-" + root;
        else vpart = V.get_str() + "*" + root;
        if (U == 0) core = vpart;
        else core = U.get_str() + (V > 0 ? "+" : "") + vpart;
    }
    return half ? "(" + core + ")/2" : core;
}

FieldContext make_field(int d) {
    const auto& P = params(d);
    FieldContext ctx;
    ctx.d = d;
    ctx.discriminant = P.D;
    ctx.omega = RingElement(d, 0, 1);
    ctx.fundamental_unit = fundamental_unit(d);  // throws UnitSignError for d = 3
    // Different: (2 sqrt(d)) when w = sqrt(d), (sqrt(d)) when w = (1+sqrt(d))/2;
    // in both cases sqrt(d) = 2w - Tw ... for Tw=0 it is w itself.
    RingElement root =
        (P.Tw == 0) ? RingElement(d, 0, 1) : RingElement(d, -1, 2);  // sqrt(d)
    RingElement gen = (P.Tw == 0) ? RingElement(d, 0, 2) : root;     // 2 sqrt(d) or sqrt(d)
    ctx.delta = totally_positive_associate(gen);
    ctx.description = (P.Tw == 0)
                          ? "Z[sqrt(" + std::to_string(d) + ")]"
                          : "Z[(1+sqrt(" + std::to_string(d) + "))/2]";
    return ctx;
}

}  // namespace hmf
