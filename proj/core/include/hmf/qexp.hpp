#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hmf/cyclotomic.hpp"
#include "hmf/field.hpp"
#include "hmf/residue.hpp"

namespace hmf {

// Box-truncated q-expansion sum a(0) + sum_xi a(xi) e(xi z / 2) with exact
// cyclotomic coefficients. The coefficient table covers {0} and every totally
// positive xi with sigma_i(xi) <= X_i; only the nonzero entries are stored,
// sorted by (trace, a, b). Queries inside the box return the stored value or
// zero; queries outside throw BoxTooSmallError. Expansions are immutable
// values once built; every operator returns a new expansion together with the
// box on which its output is certified.
class FourierExpansion {
 public:
    FourierExpansion(int d, Box box);

    int d() const { return d_; }
    const Box& box() const { return box_; }

    const CyclotomicNumber& constant_term() const { return a0_; }
    void set_constant_term(CyclotomicNumber v) { a0_ = std::move(v); }

    // xi totally positive and componentwise within the box bounds
    bool in_box(const RingElement& xi) const;

    // a(xi); xi = 0 gives the constant term
    CyclotomicNumber coeff(const RingElement& xi) const;

    // pre: in_box(xi); a zero value erases the entry
    void set_coeff(const RingElement& xi, CyclotomicNumber v);

    // nonzero coefficients at totally positive indices, sorted by (trace, a, b)
    const std::vector<std::pair<RingElement, CyclotomicNumber>>& support() const {
        return coeffs_;
    }

    bool is_zero() const { return a0_.is_zero() && coeffs_.empty(); }

    // generator of the level and character of the ambient space, when known;
    // levels are kept as canonical representatives mod squared units
    std::optional<RingElement> level;
    std::optional<DirichletCharacter> character;

 private:
    int d_;
    Box box_;
    CyclotomicNumber a0_;
    std::vector<std::pair<RingElement, CyclotomicNumber>> coeffs_;
};

// Theta series of the character chi shifted by t: coefficient at xi is
// sum of conj(chi(x)) over x with t x^2 = xi, the constant term is 1 for
// trivial chi and 0 otherwise. chi is replaced by the primitive character
// inducing it, so values are taken mod the conductor r. Metadata: level
// 4 r^2 t, character chi * epsilon_t. t must be totally positive (the result
// only depends on t mod squared units).
FourierExpansion theta_chi_t(const DirichletCharacter& chi, const RingElement& t,
                             const Box& box);

// Hecke operator at p^2 on a form of level c and character psi (psi trivial on
// units, so the infinity type drops out):
//   b(xi) = a(xi p^2) + [p coprime to c] * ( conj(psi(p)) N(p)^-1 (xi|p) a(xi)
//           + conj(psi(p))^2 N(p)^-1 a(xi/p^2) )
// with a(xi/p^2) = 0 unless p^2 | xi, and (xi|p) the quadratic symbol. p must
// be a totally positive prime. The output box is the input box shrunk
// componentwise by the embeddings of p^2 (by max(s, 1/s) per coordinate when
// the coprime terms are read); BoxTooSmallError if that leaves no room for
// any totally positive index.
FourierExpansion op_T_p2(const FourierExpansion& f, const RingElement& p,
                         const DirichletCharacter& psi, const RingElement& c);

// b(xi) = a(xi/m) when m | xi, else 0; the output box is the input box scaled
// up by the embeddings of m (that is where the output is determined).
// Level gains a factor m, character a factor epsilon_m.
FourierExpansion op_V(const RingElement& m, const FourierExpansion& f);

// b(xi) = a(p xi); the output box shrinks by the embeddings of p
// (BoxTooSmallError if nothing fits). Character gains a factor epsilon_p,
// the level is unchanged.
FourierExpansion op_U(const RingElement& p, const FourierExpansion& f);

// b(xi) = a(xi) for xi coprime to p, else 0 (the constant term is dropped:
// p divides 0). Level gains p^2. Equals f - op_V(p, op_U(p, f)) wherever both
// sides are defined.
FourierExpansion op_K(const RingElement& p, const FourierExpansion& f);

// Coefficientwise complex conjugation; character metadata is conjugated.
FourierExpansion op_H(const FourierExpansion& f);

// The unique lambda with f = lambda * g on the shared box (componentwise min
// of the two boxes, constant terms included), if it exists. Both zero gives 1.
std::optional<CyclotomicNumber> is_proportional(const FourierExpansion& f,
                                                const FourierExpansion& g);

// Coefficient at the ideal (x): reads a(xi) at the canonical totally positive
// generator xi of (x) and checks a(xi u^2) = a(xi) for the fundamental unit u
// wherever xi u^2 or xi u^-2 stays in the box (WellDefinednessError on
// mismatch, also when f carries no character metadata). Requires nonzero x.
CyclotomicNumber coeff_at_ideal(const FourierExpansion& f, const RingElement& x);

// lambda * f; keeps box and metadata
FourierExpansion scale(const CyclotomicNumber& lambda, const FourierExpansion& f);

// f + g and f - g on the componentwise min box; metadata survives only when
// both operands agree on it (same level ideal, equal characters)
FourierExpansion add(const FourierExpansion& f, const FourierExpansion& g);
FourierExpansion sub(const FourierExpansion& f, const FourierExpansion& g);

// coefficientwise equality on the componentwise min box
bool equal_on_shared_box(const FourierExpansion& f, const FourierExpansion& g);

}  // namespace hmf
