#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hmf/cyclotomic.hpp"
#include "hmf/field.hpp"

namespace hmf {

// Quotient ring R/(m). Residues are indexed 0..|N(m)|-1 through the
// Hermite-normal-form basis of the ideal lattice; coordinates stay in native
// integers, so |N(m)| is capped at 2^40.
class ResidueRing {
 public:
    explicit ResidueRing(const RingElement& modulus);

    const RingElement& modulus() const { return m_; }
    int d() const { return m_.d(); }
    std::uint64_t size() const { return static_cast<std::uint64_t>(alpha_) * gamma_; }

    std::uint64_t reduce(const RingElement& x) const;
    RingElement lift(std::uint64_t idx) const;

    std::uint64_t zero() const { return 0; }
    std::uint64_t one() const;
    std::uint64_t add(std::uint64_t x, std::uint64_t y) const;
    std::uint64_t neg(std::uint64_t x) const;
    std::uint64_t mul(std::uint64_t x, std::uint64_t y) const;
    std::uint64_t pow(std::uint64_t x, std::uint64_t e) const;

    // x is a unit iff it avoids every prime of the modulus
    bool is_unit(std::uint64_t idx) const;
    std::vector<std::uint64_t> units() const;

 private:
    RingElement m_;
    long long alpha_, beta_, gamma_;  // ideal lattice rows (alpha,0), (beta,gamma)
    long long t_omega_, n_omega_;
    std::vector<std::pair<RingElement, int>> modulus_primes_;

    std::pair<long long, long long> reduce_coords(long long x, long long y) const;
};

// (R/m)^x decomposed into independent cyclic factors.
struct UnitGroupStructure {
    std::shared_ptr<const ResidueRing> ring;
    std::vector<std::uint64_t> generators;  // residue indices
    std::vector<std::uint64_t> orders;      // orders[i] = order of generators[i]
    std::uint64_t group_order = 1;          // product of orders = |(R/m)^x|
    // subgroup generated by the images of -1 and the fundamental unit, sorted
    std::vector<std::uint64_t> unit_image_subgroup;
    // residue index -> mixed-radix generator exponents, or -1 for non-units
    std::vector<long long> dlog_codes;

    std::vector<std::uint64_t> exponents_of(std::uint64_t idx) const;
    bool is_unit_index(std::uint64_t idx) const {
        return dlog_codes[static_cast<size_t>(idx)] >= 0;
    }
};

// cached per modulus (canonical representative)
std::shared_ptr<const UnitGroupStructure> unit_group(const RingElement& m);

// multiplicative order of x in (R/m)^x; pre: x a unit mod m
std::uint64_t element_order(const ResidueRing& ring, const RingElement& x);

// Character of (R/m)^x that kills the images of the units of R: determined by
// exponents k_i with chi(g_i) = zeta_{n_i}^{k_i} on the unit-group generators.
struct DirichletCharacter {
    RingElement modulus;
    std::shared_ptr<const UnitGroupStructure> group;
    std::vector<std::uint64_t> exponents;
    mutable std::optional<RingElement> conductor_cache;

    bool is_trivial() const;
    std::uint64_t order() const;  // lcm of n_i / gcd(n_i, k_i)
};

std::vector<DirichletCharacter> characters_trivial_on_units(
    const RingElement& m, std::optional<std::uint64_t> order_divides = std::nullopt);

CyclotomicNumber char_eval(const DirichletCharacter& chi, const RingElement& x);

RingElement conductor(const DirichletCharacter& chi);

// the primitive character mod conductor(chi) inducing chi
DirichletCharacter reduce_to_conductor(const DirichletCharacter& chi);

DirichletCharacter char_mul(const DirichletCharacter& a, const DirichletCharacter& b);
DirichletCharacter char_conjugate(const DirichletCharacter& chi);
bool char_equal(const DirichletCharacter& a, const DirichletCharacter& b);

// Euler criterion xi^{(|N(p)|-1)/2} mod p for a prime element p of odd norm
int quadratic_symbol(const RingElement& xi, const RingElement& p);

// +1/-1 if the even-valuation-stripped part of x is/is not a square in the
// completion at p (square decided mod p^{2 v_p(2) + 1}); 0 on odd valuation
int is_local_square(const RingElement& x, const RingElement& p);

// quadratic character cutting out F(sqrt(t))/F, as a character mod 4t reduced
// to its conductor; t must be a totally positive squarefree canonical rep
DirichletCharacter epsilon_t(const RingElement& t);

// value of the ideal character at the ideal (x): conj of the primitive
// character at the totally positive generator, 0 on common factor with the
// conductor
CyclotomicNumber ideal_char_value(const DirichletCharacter& psi, const RingElement& x);

}  // namespace hmf
