#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmf/errors.hpp"

namespace hmf {

using Int = mpz_class;
using Rat = mpq_class;

// Ring of integers of Q(sqrt(d)) with integral basis {1, w} where
//   w = sqrt(d)        if d = 2,3 mod 4
//   w = (1+sqrt(d))/2  if d = 1 mod 4
// Elements are a + b*w with integer a, b.  Each element carries its d so
// that mixed-field arithmetic is caught immediately.
class RingElement {
public:
    RingElement() : a_(0), b_(0), d_(0) {}
    RingElement(int d, Int a, Int b) : a_(std::move(a)), b_(std::move(b)), d_(d) {}

    const Int& a() const { return a_; }
    const Int& b() const { return b_; }
    int d() const { return d_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }

    RingElement operator-() const { return RingElement(d_, -a_, -b_); }
    RingElement operator+(const RingElement& o) const;
    RingElement operator-(const RingElement& o) const;
    RingElement operator*(const RingElement& o) const;

    bool operator==(const RingElement& o) const {
        return d_ == o.d_ && a_ == o.a_ && b_ == o.b_;
    }
    bool operator!=(const RingElement& o) const { return !(*this == o); }

    // Lexicographic on (a, b); used for deterministic ordering only.
    bool operator<(const RingElement& o) const {
        int c = cmp(a_, o.a_);
        if (c != 0) return c < 0;
        return cmp(b_, o.b_) < 0;
    }

private:
    Int a_, b_;
    int d_;
};

// Exact value u + v*sqrt(d) with rational u, v.  Closed under the field
// operations; sign and comparisons are exact.  Used for embedding images
// and box bounds.
class QuadVal {
public:
    QuadVal() : u_(0), v_(0), d_(0) {}
    QuadVal(int d, Rat u, Rat v) : u_(std::move(u)), v_(std::move(v)), d_(d) {
        u_.canonicalize();
        v_.canonicalize();
    }

    static QuadVal from_rational(int d, const Rat& r) { return QuadVal(d, r, 0); }

    const Rat& u() const { return u_; }
    const Rat& v() const { return v_; }
    int d() const { return d_; }

    int sign() const;
    bool is_zero() const { return u_ == 0 && v_ == 0; }

    QuadVal operator-() const { return QuadVal(d_, -u_, -v_); }
    QuadVal operator+(const QuadVal& o) const;
    QuadVal operator-(const QuadVal& o) const;
    QuadVal operator*(const QuadVal& o) const;
    QuadVal operator/(const QuadVal& o) const;  // o must be nonzero

    bool operator==(const QuadVal& o) const { return (*this - o).is_zero(); }
    bool operator!=(const QuadVal& o) const { return !(*this == o); }
    bool operator<(const QuadVal& o) const { return (*this - o).sign() < 0; }
    bool operator<=(const QuadVal& o) const { return (*this - o).sign() <= 0; }
    bool operator>(const QuadVal& o) const { return (*this - o).sign() > 0; }
    bool operator>=(const QuadVal& o) const { return (*this - o).sign() >= 0; }

    double to_double() const;

private:
    Rat u_, v_;
    int d_;
};

using Box = std::pair<QuadVal, QuadVal>;

// Summary of a catalog field, produced by make_field.
struct FieldContext {
    int d = 0;
    Int discriminant;            // D = disc(R)
    RingElement omega;           // the generator w of the integral basis
    RingElement fundamental_unit;  // eps > 1, norm -1
    RingElement delta;           // totally positive generator of the different
    std::string description;
};

// Throws CatalogError for d outside {2, 3, 5, 13}; UnitSignError for d = 3
// (fundamental unit 2+sqrt(3) has norm +1).
FieldContext make_field(int d);

// Fundamental unit eps with eps > 1 and N(eps) = -1; cached per field.
const RingElement& fundamental_unit(int d);

Int norm(const RingElement& x);
Int trace(const RingElement& x);
RingElement conj(const RingElement& x);

// Exact embedding images: sigma1 sends w to the larger root.
QuadVal sigma1(const RingElement& x);
QuadVal sigma2(const RingElement& x);
std::pair<double, double> embeddings(const RingElement& x);

bool is_totally_positive(const RingElement& x);
bool is_unit(const RingElement& x);

// Exact division in R: returns y/x when x | y, nullopt otherwise.
std::optional<RingElement> exact_div(const RingElement& y, const RingElement& x);
bool divides(const RingElement& x, const RingElement& y);

struct Factorization {
    RingElement unit;  // |N(unit)| = 1
    std::vector<std::pair<RingElement, int>> primes;  // canonical, deterministic order
};

// Factors nonzero x into a unit times totally positive prime elements.
// Primes are canonical representatives (see canonical_rep_mod_squared_units),
// ordered by ascending rational prime, ties broken by (trace, a, b).
Factorization factor(const RingElement& x);

// Splitting type of a rational prime p in R.
enum class Splitting { split, inert, ramified };
Splitting splitting_type(int d, const Int& p);

// The associate +-x*eps^k of minimal |k| (preferring k >= 0, then the +
// sign) that is totally positive.  Throws PositivityError if none exists
// (unreachable when N(eps) = -1).
RingElement totally_positive_associate(const RingElement& x);

// Distinguished representative of x modulo squares of units: the totally
// positive associate x*eps^(2k) of minimal trace, ties broken by taking the
// lexicographically largest (a, b).
RingElement canonical_rep_mod_squared_units(const RingElement& x);

// Totally positive squarefree t (canonical representative) with x/t a
// perfect square in R; requires x totally positive.
RingElement squarefree_part(const RingElement& x);

// If x is a perfect square in R, returns a square root.
std::optional<RingElement> perfect_square_root(const RingElement& x);

// All totally positive xi with sigma1(xi) <= X1 and sigma2(xi) <= X2,
// sorted by (trace, a, b); zero is prepended when include_zero.
std::vector<RingElement> enumerate_box(int d, const QuadVal& X1, const QuadVal& X2,
                                       bool include_zero);
std::vector<RingElement> enumerate_box(int d, double X1, double X2, bool include_zero);

// Canonical representatives of the divisors of (x), ascending by norm,
// ties broken by (trace, a, b).  Includes 1 and the canonical rep of x.
std::vector<RingElement> divisors_up_to_units(const RingElement& x);

// True when every prime dividing x lies over a rational prime with a
// unique prime above it (inert or ramified).  Units give true.
bool is_nonsplit(const RingElement& x);

// gcd of x and y as a canonical totally positive representative
// (factorization-based; Z[sqrt(13)] is not norm-Euclidean).
RingElement gcd(const RingElement& x, const RingElement& y);
bool is_coprime(const RingElement& x, const RingElement& y);

RingElement pow(const RingElement& x, unsigned long e);

// Parses "a+b*w", "a", "q^n" is not handled here (see the CLI).
std::string to_string(const RingElement& x);

// Number of prime factors of x counted with multiplicity.
int prime_omega(const RingElement& x);

}  // namespace hmf
