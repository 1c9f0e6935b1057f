#pragma once

#include <vector>

#include "hmf/qexp.hpp"

namespace hmf {

// A theta-series label: primitive character chi (trivial on units) together
// with a canonical totally positive shift t, subject to 4 r(chi)^2 t dividing
// the level and chi * epsilon_t matching the space's character.
struct OmegaPair {
    DirichletCharacter chi;
    RingElement t;
};

// All pairs (chi, t) for the space of level c and character psi: conductors r
// run over divisors of c with 4 r^2 | c, chi over the characters of conductor
// exactly r, t over canonical divisors of c / (4 r^2), keeping the pairs with
// chi * epsilon_t = psi. Order is deterministic: conductors ascending by
// norm, characters in enumeration order, shifts ascending by norm.
// LevelError if 4 does not divide c.
std::vector<OmegaPair> omega_set(const RingElement& c, const DirichletCharacter& psi);

struct BasisReport {
    RingElement level;  // canonical representative
    DirichletCharacter character;
    std::vector<OmegaPair> pairs;              // arranged in certificate order
    std::vector<FourierExpansion> expansions;  // theta series, shared box
    // certificate: expansions[i] is nonzero at pivots[i] while every later
    // expansion vanishes there; the zero element stands for the constant term
    std::vector<RingElement> pivots;
    size_t dimension = 0;
};

// The theta basis of the space of level c and character psi. Requires 4 | c
// and no split prime in c (HypothesisError); the box must contain every shift
// t (BoxTooSmallError). Pairs are arranged by the number of prime factors of
// t, which makes the pivot matrix triangular with diagonal 2; if that pattern
// ever failed, an exact elimination over the cyclotomic coefficients would
// recover pivots, and a genuine dependence is a hard error.
BasisReport basis(const RingElement& c, const DirichletCharacter& psi, const Box& box);

struct DimensionRow {
    int n;               // level q^n over Q(sqrt 2)
    size_t dim_trivial;  // trivial character
    size_t dim_odd;      // the character of conductor q^5
};

// Closed-form dimensions floor((n-2)/2) + max(floor((n-13)/2), 0) and
// floor((n-3)/2) + max(floor((n-12)/2), 0) for 4 <= n <= n_max, each row
// cross-checked against the independently enumerated omega_set sizes.
std::vector<DimensionRow> sqrt2_dimension_table(int n_max);

// 1/2 theta_{psi,1} at level 4 r(psi)^2, normalized so the coefficient at 1
// is exactly 1 (verified; BoxTooSmallError if 1 is outside the box).
FourierExpansion newform_candidate(const DirichletCharacter& psi, const Box& box);

}  // namespace hmf
