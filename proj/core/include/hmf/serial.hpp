#pragma once

#include <string>

#include "hmf/analytic.hpp"
#include "hmf/qexp.hpp"
#include "hmf/residue.hpp"

namespace hmf {

// Exact JSON forms for the value types that cross the tool boundary. All
// integers are written as 64-bit values (ParseError when a coordinate does
// not fit), rationals as [num, den], ring elements as coordinate pairs
// [a, b] against 1, omega, and cyclotomics as {"order": N, "coeffs":
// [[num, den], ...]} of length phi(N). Writers emit pretty-printed JSON with
// alphabetically ordered keys, so equal values serialize identically.

// {"field", "modulus", "generators", "exponents", "order"}. The generator
// list pins the presentation: the reader rebuilds the unit group of the
// modulus and refuses the file (ParseError) when the stored generators or
// orders disagree with the rebuilt ones.
std::string character_to_json(const DirichletCharacter& chi);
DirichletCharacter character_from_json(const std::string& text);

// {"field", "box", "level", "character", "constant", "coeffs"} with each box
// bound as an exact field value [[u_num, u_den], [v_num, v_den]] meaning
// u + v*sqrt(d) (Hecke images have fractional bounds), level and character
// null when the expansion carries no metadata, and coeffs the nonzero
// support in its stored (trace, a, b) order.
std::string expansion_to_json(const FourierExpansion& f);
FourierExpansion expansion_from_json(const std::string& text);

// a verification outcome tied to the form label it certifies
struct VerificationRecord {
    std::string form;
    RingElement level;
    DirichletCharacter character;
    ModularityReport report;
};

// {"form", "level", "character", "samples", "max_deviation", "tol", "pass"}
std::string verification_to_json(const VerificationRecord& rec);
VerificationRecord verification_from_json(const std::string& text);

// whole-file helpers; ParseError when the path cannot be read or written
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hmf
