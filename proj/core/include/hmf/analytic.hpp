#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "hmf/qexp.hpp"

namespace hmf {

using Complex = std::complex<double>;

// worker threads the verification routines may fan out to; evaluation order
// and results are identical for every setting
void set_thread_count(int n);
int thread_count();

// Point of H^2, one coordinate per real embedding.
struct UpperHalfPoint {
    Complex z1, z2;
    double y_min() const { return z1.imag() < z2.imag() ? z1.imag() : z2.imag(); }
};

// 2x2 matrix with exact entries u + v*sqrt(d).
struct MatrixOverF {
    QuadVal a, b, c, d;
};

MatrixOverF identity_matrix(int d);
MatrixOverF mat_mul(const MatrixOverF& x, const MatrixOverF& y);
QuadVal mat_det(const MatrixOverF& m);

// the exact value of a ring element, and the way back (nullopt when the
// value is not an algebraic integer)
QuadVal field_value(const RingElement& x);
std::optional<RingElement> integral_value(const QuadVal& x);

// second embedding of an exact value
QuadVal conj_value(const QuadVal& x);

// determinant 1, integral diagonal, b in f R, c in g R
bool in_gamma_group(const MatrixOverF& m, const QuadVal& f, const QuadVal& g);
// the group the theta ratio is defined on: b in 2 delta^-1 R, c in 2 delta R
bool in_theta_group(const MatrixOverF& m);
// the congruence group of level c: b in 2 delta^-1 R, c_gamma in (delta c / 2) R
bool in_level_group(const MatrixOverF& m, const RingElement& c);

// Moebius action componentwise over the two embeddings
UpperHalfPoint apply_matrix(const MatrixOverF& m, const UpperHalfPoint& z);

// imaginary parts below this are rejected by the public theta evaluator
double evaluation_floor();

// theta(z) = sum over x in R of e(x^2 z / 2), truncated once the certified
// additive tail (lattice-count envelope times the geometric term bound)
// drops below 10^-precision. ConvergenceError if Im z dips under the floor
// or the truncation budget is exhausted.
Complex theta_eval(int d, const UpperHalfPoint& z, int precision = 12);

// theta_{chi,t}(z) = sum over x of conj(chi(x)) e(t x^2 z / 2) by direct
// lattice summation; no floor, same certified tail contract. chi must be
// primitive and t totally positive.
Complex theta_series_eval(const DirichletCharacter& chi, const RingElement& t,
                          const UpperHalfPoint& z, int precision = 10);

struct AutomorphyValue {
    Complex h;
    enum class Method { ratio, closed_form } method;
};

// theta(gamma z) / theta(z). gamma must lie in the theta group, or be the
// inversion (0, -delta^-1; delta, 0) that the ratio classically extends to;
// MembershipError otherwise. Internal evaluations ignore the floor.
AutomorphyValue h_ratio(const MatrixOverF& gamma, const UpperHalfPoint& z, int precision = 10);

// Closed form eps(d) epstilde(d) (eps_c)*(d) (cz+d)^{1/2} for gamma in the
// theta group with c != 0 (DegenerateError otherwise: triangular elements
// have ratio exactly 1). eps(d) is a normalized Gauss sum over
// delta^-1 R / 2R, epstilde counts negative embeddings, and (eps_c)* is the
// extended quadratic symbol of F(sqrt c) at the lower-right entry: the
// ideal symbol at (d) times the Hilbert symbol (c, d)_v at each infinite
// place. On the theta group d is odd and coprime to c, so the symbol never
// vanishes there (SymbolError guards the impossible case). Principal
// square roots throughout; no per-case branch data.
AutomorphyValue h_garrett(const MatrixOverF& gamma, const UpperHalfPoint& z);

// the unimodular scalar eps(x) epstilde(x) of the closed form, exposed for
// the unitarity check; x must be odd (coprime to 2)
Complex gauss_epsilon(int field_d, const RingElement& x);

// the inversion (0, -delta^-1; delta, 0) and the value (-iz)^{1/2} N(delta)^{1/2}
// its theta ratio equals
MatrixOverF w0_matrix(int d);
Complex w0_reference(int d, const UpperHalfPoint& z);

// word of word_length random elementary letters (1, 2b/delta; 0, 1) and
// (1, 0; delta c b'/2, 1) with coefficients of b, b' in [-2, 2]; exact
// entries, membership in the level-c group re-verified. Requires 4 | c.
MatrixOverF random_gamma(const RingElement& c, int word_length, std::uint64_t seed);

// the element (a, 2k/delta; delta c/2, abar) of the level-c group, where
// abar lifts a^-1 mod c and k = (a abar - 1)/c; exercises an upper-left
// entry that is not 1 mod c. a must be invertible mod c.
MatrixOverF twist_matrix(const RingElement& c, const RingElement& a);

// f(z) from the stored coefficients, with a certified bound on the
// discarded tail beyond the box (coefficient magnitudes outside the box are
// assumed bounded by 4 times the largest stored magnitude, which holds for
// every theta series here). ConvergenceError if the bound exceeds tail_tol.
Complex expansion_eval(const FourierExpansion& f, const UpperHalfPoint& z, double tail_tol);

struct ModularityReport {
    int samples = 0;
    double max_deviation = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// max over sampled (gamma, z) of |f(gamma z) - psi_c(a_gamma) h(gamma, z) f(z)|
// with f = theta_{chi,t} evaluated by direct lattice summation, h by the
// theta ratio, and psi_c(a) = conj of the ideal character value. Words have
// length <= 6 with one lower-triangular or twist letter each (deeper words
// push Im(gamma z) below any evaluation budget); z has Im in [0.6, 1.2].
ModularityReport verify_modularity(const DirichletCharacter& chi, const RingElement& t,
                                   const DirichletCharacter& psi, const RingElement& c,
                                   int samples, double tol, std::uint64_t seed);

// same law with f evaluated from its boxed expansion at both endpoints; the
// box must certify tails <= tol/10 there (ConvergenceError otherwise), which
// confines this variant to low levels and generous boxes.
ModularityReport verify_modularity(const FourierExpansion& f, const DirichletCharacter& psi,
                                   const RingElement& c, int samples, double tol,
                                   std::uint64_t seed);

// (f | W(c))(z) = (-iz)^{-1/2} N(2^-2 delta^2 c)^{-1/4} f(-4 / (c delta^2 z));
// z must sit above the floor, and f's box must certify the tail at the
// mapped point (which always sinks below the floor).
Complex w_operator_eval(const FourierExpansion& f, const RingElement& c,
                        const UpperHalfPoint& z);

// |((f | W(c)) | W(c))(z) - f(z)|, assembled from two symmetry applications
double w_involution_deviation(const FourierExpansion& f, const RingElement& c,
                              const UpperHalfPoint& z);

// canonical totally positive ideal representatives with norm <= bound,
// ascending by norm
std::vector<RingElement> ideal_reps_up_to_norm(int d, long bound);

// sum of a(I) N(I)^{-s} over ideals of norm <= norm_bound
Complex partial_L(const FourierExpansion& f, double s, long norm_bound);

// product of (1 - psi*(p) N(p)^{-2s})^{-1} over primes of norm <= norm_bound
Complex euler_partial(const DirichletCharacter& psi, double s, long norm_bound);

}  // namespace hmf
