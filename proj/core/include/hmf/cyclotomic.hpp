#pragma once

#include <complex>
#include <vector>

#include "hmf/field.hpp"

namespace hmf {

// Element of Q(zeta_N): a polynomial in zeta_N of degree < phi(N), reduced mod
// the N-th cyclotomic polynomial. Arithmetic between different orders lifts
// both operands to the lcm order. Values that turn out rational are stored at
// order 1 so character-free workloads stay in plain rational arithmetic.
class CyclotomicNumber {
 public:
    CyclotomicNumber();  // zero

    static CyclotomicNumber from_rational(const Rat& r);
    static CyclotomicNumber from_int(long v);
    // zeta_N^k (k may be negative)
    static CyclotomicNumber root_of_unity(unsigned long N, long k);

    unsigned long order() const { return order_; }
    const std::vector<Rat>& coeffs() const { return coeffs_; }

    bool is_zero() const;
    bool is_rational() const { return order_ == 1; }
    Rat rational_value() const;  // pre: is_rational()

    CyclotomicNumber conj() const;
    CyclotomicNumber inverse() const;  // pre: nonzero
    std::complex<double> embed() const;

    CyclotomicNumber operator-() const;
    friend CyclotomicNumber operator+(const CyclotomicNumber&, const CyclotomicNumber&);
    friend CyclotomicNumber operator-(const CyclotomicNumber&, const CyclotomicNumber&);
    friend CyclotomicNumber operator*(const CyclotomicNumber&, const CyclotomicNumber&);
    CyclotomicNumber& operator+=(const CyclotomicNumber& o) { return *this = *this + o; }
    CyclotomicNumber& operator-=(const CyclotomicNumber& o) { return *this = *this - o; }
    CyclotomicNumber& operator*=(const CyclotomicNumber& o) { return *this = *this * o; }
    bool operator==(const CyclotomicNumber& o) const;
    bool operator!=(const CyclotomicNumber& o) const { return !(*this == o); }

 private:
    CyclotomicNumber(unsigned long order, std::vector<Rat> coeffs);
    // coefficients rewritten in the order-L basis, padded to phi(L); L must be
    // a multiple of order_
    std::vector<Rat> lifted_coeffs(unsigned long L) const;
    void normalize();

    unsigned long order_;
    std::vector<Rat> coeffs_;  // size phi(order_)
};

// Monic N-th cyclotomic polynomial, ascending coefficients, cached.
const std::vector<Int>& cyclotomic_polynomial(unsigned long N);

std::string to_string(const CyclotomicNumber& x);

}  // namespace hmf
