#include "hmf/cyclotomic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hmf/errors.hpp"

namespace hmf {

namespace {

unsigned long euler_phi(unsigned long n) {
    unsigned long result = n;
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

void trim(std::vector<Rat>& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

// long division by a monic integer polynomial; remainder must vanish
std::vector<Int> int_poly_div_exact(std::vector<Int> num, const std::vector<Int>& den) {
    size_t dd = den.size() - 1;
    size_t nd = num.size() - 1;
    std::vector<Int> q(nd - dd + 1);
    for (size_t i = nd - dd + 1; i-- > 0;) {
        Int c = num[i + dd];
        q[i] = c;
        if (c != 0) {
            for (size_t j = 0; j <= dd; ++j) num[i + j] -= c * den[j];
        }
    }
    for (const Int& c : num) {
        if (c != 0) throw std::logic_error("cyclotomic polynomial division not exact");
    }
    return q;
}

// reduce p in place modulo a monic integer polynomial
void poly_mod_monic(std::vector<Rat>& p, const std::vector<Int>& phi) {
    size_t dd = phi.size() - 1;
    trim(p);
    while (p.size() > dd) {
        Rat c = p.back();
        size_t shift = p.size() - 1 - dd;
        for (size_t j = 0; j <= dd; ++j) p[shift + j] -= c * Rat(phi[j]);
        trim(p);
    }
}

std::vector<Rat> poly_mul(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Rat> out(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

// quotient of a by b over Q, b nonzero; a is replaced by the remainder
std::vector<Rat> poly_divmod(std::vector<Rat>& a, const std::vector<Rat>& b) {
    trim(a);
    std::vector<Rat> q;
    if (a.size() < b.size()) return q;
    q.assign(a.size() - b.size() + 1, Rat(0));
    const Rat& lead = b.back();
    while (a.size() >= b.size()) {
        Rat c = a.back() / lead;
        size_t shift = a.size() - b.size();
        q[shift] = c;
        for (size_t j = 0; j < b.size(); ++j) a[shift + j] -= c * b[j];
        trim(a);
        if (a.empty()) break;
    }
    return q;
}

}  // namespace

const std::vector<Int>& cyclotomic_polynomial(unsigned long N) {
    static std::map<unsigned long, std::vector<Int>> cache;
    static std::mutex mu;
    if (N == 0) throw std::invalid_argument("cyclotomic order must be positive");
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(N);
        if (it != cache.end()) return it->second;
    }
    std::vector<Int> num(N + 1, Int(0));
    num[0] = -1;
    num[N] = 1;
    if (N > 1) {
        for (unsigned long d = 1; d < N; ++d) {
            if (N % d == 0) num = int_poly_div_exact(std::move(num), cyclotomic_polynomial(d));
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(N, std::move(num)).first->second;
}

CyclotomicNumber::CyclotomicNumber() : order_(1), coeffs_{Rat(0)} {}

CyclotomicNumber::CyclotomicNumber(unsigned long order, std::vector<Rat> coeffs)
    : order_(order), coeffs_(std::move(coeffs)) {
    coeffs_.resize(euler_phi(order_), Rat(0));
    normalize();
}

void CyclotomicNumber::normalize() {
    bool rational = true;
    for (size_t i = 1; i < coeffs_.size(); ++i) {
        if (coeffs_[i] != 0) {
            rational = false;
            break;
        }
    }
    if (rational && order_ != 1) {
        Rat c = coeffs_.empty() ? Rat(0) : coeffs_[0];
        order_ = 1;
        coeffs_.assign(1, c);
    }
    if (coeffs_.empty()) coeffs_.assign(1, Rat(0));
}

CyclotomicNumber CyclotomicNumber::from_rational(const Rat& r) {
    return CyclotomicNumber(1, {r});
}

CyclotomicNumber CyclotomicNumber::from_int(long v) { return from_rational(Rat(v)); }

CyclotomicNumber CyclotomicNumber::root_of_unity(unsigned long N, long k) {
    if (N == 0) throw std::invalid_argument("root_of_unity: order must be positive");
    long kk = k % static_cast<long>(N);
    if (kk < 0) kk += static_cast<long>(N);
    unsigned long g = std::gcd(N, static_cast<unsigned long>(kk));
    if (kk == 0) return from_rational(Rat(1));
    N /= g;
    kk /= static_cast<long>(g);
    std::vector<Rat> p(static_cast<size_t>(kk) + 1, Rat(0));
    p[static_cast<size_t>(kk)] = 1;
    poly_mod_monic(p, cyclotomic_polynomial(N));
    return CyclotomicNumber(N, std::move(p));
}

bool CyclotomicNumber::is_zero() const {
    for (const Rat& c : coeffs_) {
        if (c != 0) return false;
    }
    return true;
}

Rat CyclotomicNumber::rational_value() const {
    if (order_ != 1) throw std::logic_error("rational_value on irrational cyclotomic");
    return coeffs_[0];
}

std::vector<Rat> CyclotomicNumber::lifted_coeffs(unsigned long L) const {
    if (L % order_ != 0) throw std::logic_error("cyclotomic lift to non-multiple order");
    unsigned long s = L / order_;
    std::vector<Rat> p((coeffs_.size() - 1) * s + 1, Rat(0));
    for (size_t i = 0; i < coeffs_.size(); ++i) p[i * s] = coeffs_[i];
    if (L > 1) poly_mod_monic(p, cyclotomic_polynomial(L));
    p.resize(euler_phi(L), Rat(0));
    return p;
}

CyclotomicNumber CyclotomicNumber::conj() const {
    if (order_ == 1) return *this;
    // Galois map zeta -> zeta^{N-1}
    std::vector<Rat> p((coeffs_.size() - 1) * (order_ - 1) + 1, Rat(0));
    for (size_t i = 0; i < coeffs_.size(); ++i) p[i * (order_ - 1)] += coeffs_[i];
    poly_mod_monic(p, cyclotomic_polynomial(order_));
    return CyclotomicNumber(order_, std::move(p));
}

CyclotomicNumber CyclotomicNumber::inverse() const {
    if (is_zero()) throw std::logic_error("inverse of zero cyclotomic");
    if (order_ == 1) return from_rational(Rat(1) / coeffs_[0]);
    // extended Euclid: r0 = this, r1 = Phi_N; maintain r_i = s_i * this (mod Phi_N)
    std::vector<Rat> r0(coeffs_);
    trim(r0);
    const std::vector<Int>& phi = cyclotomic_polynomial(order_);
    std::vector<Rat> r1(phi.size());
    for (size_t i = 0; i < phi.size(); ++i) r1[i] = Rat(phi[i]);
    std::vector<Rat> s0{Rat(1)}, s1;
    while (true) {
        trim(r1);
        if (r1.empty()) break;
        std::vector<Rat> rem = r0;
        std::vector<Rat> q = poly_divmod(rem, r1);
        std::vector<Rat> s2 = s0;
        std::vector<Rat> qs1 = poly_mul(q, s1);
        s2.resize(std::max(s2.size(), qs1.size()), Rat(0));
        for (size_t i = 0; i < qs1.size(); ++i) s2[i] -= qs1[i];
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    trim(r0);
    if (r0.size() != 1) throw std::logic_error("cyclotomic inverse: gcd not constant");
    Rat c = r0[0];
    for (Rat& v : s0) v /= c;
    poly_mod_monic(s0, phi);
    return CyclotomicNumber(order_, std::move(s0));
}

std::complex<double> CyclotomicNumber::embed() const {
    const double tau = 6.283185307179586476925286766559;
    std::complex<double> zeta = std::polar(1.0, tau / static_cast<double>(order_));
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * zeta + coeffs_[i].get_d();
    return acc;
}

CyclotomicNumber CyclotomicNumber::operator-() const {
    std::vector<Rat> c = coeffs_;
    for (Rat& v : c) v = -v;
    return CyclotomicNumber(order_, std::move(c));
}

CyclotomicNumber operator+(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    unsigned long L = std::lcm(a.order_, b.order_);
    std::vector<Rat> x = a.lifted_coeffs(L), y = b.lifted_coeffs(L);
    for (size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return CyclotomicNumber(L, std::move(x));
}

CyclotomicNumber operator-(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    return a + (-b);
}

CyclotomicNumber operator*(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    unsigned long L = std::lcm(a.order_, b.order_);
    std::vector<Rat> p = poly_mul(a.lifted_coeffs(L), b.lifted_coeffs(L));
    if (L > 1) poly_mod_monic(p, cyclotomic_polynomial(L));
    return CyclotomicNumber(L, std::move(p));
}

bool CyclotomicNumber::operator==(const CyclotomicNumber& o) const {
    unsigned long L = std::lcm(order_, o.order_);
    return lifted_coeffs(L) == o.lifted_coeffs(L);
}

std::string to_string(const CyclotomicNumber& x) {
    if (x.is_rational()) return x.rational_value().get_str();
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < x.coeffs().size(); ++i) {
        const Rat& c = x.coeffs()[i];
        if (c == 0) continue;
        if (!first) os << " + ";
        os << c.get_str();
        if (i > 0) os << "*z" << x.order() << "^" << i;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace hmf
