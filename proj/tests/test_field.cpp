#include "doctest.h"

#include <random>

#include "hmf/field.hpp"

using namespace hmf;

namespace {

RingElement elt(int d, long a, long b) { return RingElement(d, Int(a), Int(b)); }

// Brute-force oracle for the fundamental unit: scan coordinates outward and
// return the unit > 1 with the smallest sigma1 image.
RingElement oracle_fundamental_unit(int d) {
    QuadVal one = QuadVal::from_rational(d, 1);
    RingElement best;
    bool found = false;
    for (long b = 1; b <= 50; ++b) {
        for (long a = -200; a <= 200; ++a) {
            RingElement x = elt(d, a, b);
            Int n = norm(x);
            if (n != 1 && n != -1) continue;
            if (!(sigma1(x) > one)) continue;
            if (!found || sigma1(x) < sigma1(best)) {
                best = x;
                found = true;
            }
        }
        if (found) break;  // larger b only gives larger units
    }
    REQUIRE(found);
    return best;
}

// Independent slow enumeration: raw coordinate rectangle plus exact checks.
std::vector<RingElement> oracle_box(int d, double X1, double X2) {
    std::vector<RingElement> out;
    QuadVal zero = QuadVal::from_rational(d, 0);
    QuadVal B1(d, Rat(X1), Rat(0)), B2(d, Rat(X2), Rat(0));
    for (long a = -200; a <= 200; ++a) {
        for (long b = -200; b <= 200; ++b) {
            RingElement x = elt(d, a, b);
            QuadVal s1 = sigma1(x), s2 = sigma2(x);
            if (s1 > zero && s2 > zero && s1 <= B1 && s2 <= B2) out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end(), [](const RingElement& x, const RingElement& y) {
        Int tx = trace(x), ty = trace(y);
        if (tx != ty) return tx < ty;
        return x < y;
    });
    return out;
}

RingElement random_nonzero(std::mt19937& rng, int d, int span = 9) {
    std::uniform_int_distribution<long> coord(-span, span);
    while (true) {
        RingElement x = elt(d, coord(rng), coord(rng));
        if (!x.is_zero()) return x;
    }
}

}  // namespace

TEST_CASE("catalog and context construction") {
    FieldContext f2 = make_field(2);
    CHECK(f2.discriminant == 8);
    CHECK(f2.fundamental_unit == elt(2, 1, 1));  // 1 + sqrt(2)
    CHECK(f2.delta == elt(2, 4, 2));             // 4 + 2 sqrt(2), totally positive
    CHECK(norm(f2.delta) == 8);
    CHECK(is_totally_positive(f2.delta));

    CHECK_THROWS_AS(make_field(3), UnitSignError);
    CHECK_THROWS_AS(make_field(6), CatalogError);
    CHECK_THROWS_AS(make_field(-1), CatalogError);
    CHECK_THROWS_AS(make_field(11), CatalogError);

    FieldContext f5 = make_field(5);
    CHECK(f5.discriminant == 5);
    CHECK(f5.fundamental_unit == elt(5, 0, 1));  // (1+sqrt(5))/2
    CHECK(norm(f5.delta) == 5);
    CHECK(is_totally_positive(f5.delta));

    FieldContext f13 = make_field(13);
    CHECK(f13.discriminant == 13);
    CHECK(f13.fundamental_unit == elt(13, 1, 1));  // (3+sqrt(13))/2
    CHECK(norm(f13.fundamental_unit) == -1);
    CHECK(norm(f13.delta) == 13);
    CHECK(is_totally_positive(f13.delta));
}

TEST_CASE("fundamental unit matches brute-force scan") {
    for (int d : {2, 5, 13}) {
        CHECK(fundamental_unit(d) == oracle_fundamental_unit(d));
    }
}

TEST_CASE("norm, trace, embeddings") {
    CHECK(norm(elt(2, 1, 1)) == -1);
    CHECK(trace(elt(2, 3, 4)) == 6);
    auto [e1, e2] = embeddings(elt(2, 2, 1));
    CHECK(e1 == doctest::Approx(3.4142).epsilon(1e-4));
    CHECK(e2 == doctest::Approx(0.5858).epsilon(1e-4));

    std::mt19937 rng(7);
    for (int d : {2, 5, 13}) {
        for (int i = 0; i < 200; ++i) {
            RingElement x = random_nonzero(rng, d), y = random_nonzero(rng, d);
            CHECK(norm(x) * norm(y) == norm(x * y));
            CHECK(trace(x + y) == trace(x) + trace(y));
            CHECK(norm(conj(x)) == norm(x));
            // exact embeddings bracket the doubles
            auto [d1, d2] = embeddings(x);
            CHECK(std::abs(sigma1(x).to_double() - d1) < 1e-9);
            CHECK(std::abs(sigma2(x).to_double() - d2) < 1e-9);
        }
    }
}

TEST_CASE("total positivity") {
    CHECK(is_totally_positive(elt(2, 2, 1)));
    CHECK_FALSE(is_totally_positive(elt(2, 0, 1)));  // sqrt(2) is negative at sigma2
    CHECK_FALSE(is_totally_positive(elt(2, 0, 0)));
    // x totally positive iff trace > 0 and norm > 0
    std::mt19937 rng(11);
    for (int d : {2, 5, 13}) {
        for (int i = 0; i < 300; ++i) {
            RingElement x = random_nonzero(rng, d);
            bool expected = trace(x) > 0 && norm(x) > 0;
            CHECK(is_totally_positive(x) == expected);
        }
    }
}

TEST_CASE("totally positive associate") {
    CHECK(totally_positive_associate(elt(2, 0, 1)) == elt(2, 2, 1));
    CHECK(totally_positive_associate(elt(2, 5, 0)) == elt(2, 5, 0));
    CHECK(totally_positive_associate(elt(2, -1, 0)) == elt(2, 1, 0));
    std::mt19937 rng(13);
    for (int d : {2, 5, 13}) {
        const RingElement& eps = fundamental_unit(d);
        for (int i = 0; i < 200; ++i) {
            RingElement x = random_nonzero(rng, d);
            RingElement y = totally_positive_associate(x);
            CHECK(is_totally_positive(y));
            // same ideal: y/x is a unit
            auto q = exact_div(y, x);
            REQUIRE(q.has_value());
            CHECK(is_unit(*q));
            (void)eps;
        }
    }
}

TEST_CASE("canonical representative mod squared units") {
    CHECK(canonical_rep_mod_squared_units(elt(2, 3, 2)) == elt(2, 1, 0));
    CHECK(canonical_rep_mod_squared_units(elt(2, 2, 0)) == elt(2, 2, 0));
    CHECK(canonical_rep_mod_squared_units(elt(2, 1, 0)) == elt(2, 1, 0));
    // invariance under multiplication by eps^{2k}, |k| <= 6
    std::mt19937 rng(17);
    for (int d : {2, 5, 13}) {
        const RingElement& eps = fundamental_unit(d);
        RingElement eps2 = eps * eps;
        for (int i = 0; i < 60; ++i) {
            RingElement x = random_nonzero(rng, d);
            RingElement can = canonical_rep_mod_squared_units(x);
            RingElement y = x;
            for (int k = 1; k <= 6; ++k) {
                y = y * eps2;
                CHECK(canonical_rep_mod_squared_units(y) == can);
            }
            RingElement z = x;
            RingElement eps2inv = conj(eps2);
            for (int k = 1; k <= 6; ++k) {
                z = z * eps2inv;
                CHECK(canonical_rep_mod_squared_units(z) == can);
            }
        }
    }
}

TEST_CASE("factorization frozen examples") {
    Factorization f6 = factor(elt(2, 6, 0));
    CHECK(f6.unit == elt(2, 3, -2));  // (sqrt(2)-1)^2
    REQUIRE(f6.primes.size() == 2);
    CHECK(f6.primes[0].first == elt(2, 2, 1));
    CHECK(f6.primes[0].second == 2);
    CHECK(f6.primes[1].first == elt(2, 3, 0));
    CHECK(f6.primes[1].second == 1);

    Factorization fu = factor(elt(2, 1, 1));
    CHECK(fu.unit == elt(2, 1, 1));
    CHECK(fu.primes.empty());

    Factorization f7 = factor(elt(2, 7, 0));
    REQUIRE(f7.primes.size() == 2);
    CHECK(f7.primes[0].second == 1);
    CHECK(f7.primes[1].second == 1);
    CHECK(norm(f7.primes[0].first) == 7);
    CHECK(norm(f7.primes[1].first) == 7);
    CHECK(is_totally_positive(f7.primes[0].first));
    CHECK(is_totally_positive(f7.primes[1].first));
    CHECK_FALSE(f7.primes[0].first == f7.primes[1].first);
}

TEST_CASE("factorization multiplies back") {
    std::mt19937 rng(19);
    for (int d : {2, 5, 13}) {
        for (int i = 0; i < 120; ++i) {
            RingElement x = random_nonzero(rng, d);
            Factorization f = factor(x);
            RingElement prod = f.unit;
            for (const auto& [pi, e] : f.primes) {
                CHECK(is_totally_positive(pi));
                Int n = norm(pi);
                // prime elements have norm p or p^2
                CHECK(n > 1);
                prod = prod * pow(pi, static_cast<unsigned long>(e));
            }
            CHECK(prod == x);
        }
    }
}

TEST_CASE("squarefree part") {
    CHECK(squarefree_part(elt(2, 4, 2)) == elt(2, 2, 1));
    CHECK(squarefree_part(elt(2, 9, 0)) == elt(2, 1, 0));
    CHECK(squarefree_part(elt(2, 2, 1)) == elt(2, 2, 1));
    std::mt19937 rng(23);
    for (int d : {2, 5, 13}) {
        for (int i = 0; i < 80; ++i) {
            RingElement x = totally_positive_associate(random_nonzero(rng, d));
            RingElement t = squarefree_part(x);
            auto q = exact_div(x, t);
            REQUIRE(q.has_value());
            auto root = perfect_square_root(*q);
            REQUIRE(root.has_value());
            CHECK((*root) * (*root) == *q);
        }
    }
}

TEST_CASE("box enumeration") {
    auto b1 = enumerate_box(2, 3.0, 3.0, false);
    REQUIRE(b1.size() == 3);
    CHECK(b1[0] == elt(2, 1, 0));
    CHECK(b1[1] == elt(2, 2, 0));
    CHECK(b1[2] == elt(2, 3, 0));

    // 2-sqrt(2) has embeddings ~0.586 and ~3.414, so it lies in the symmetric box too
    auto b2 = enumerate_box(2, 3.5, 3.5, false);
    REQUIRE(b2.size() == 5);
    // sorted by (trace, a, b): 1, 2-sqrt(2), 2, 2+sqrt(2), 3
    CHECK(b2[0] == elt(2, 1, 0));
    CHECK(b2[1] == elt(2, 2, -1));
    CHECK(b2[2] == elt(2, 2, 0));
    CHECK(b2[3] == elt(2, 2, 1));
    CHECK(b2[4] == elt(2, 3, 0));

    auto b3 = enumerate_box(2, 0.5, 0.5, true);
    REQUIRE(b3.size() == 1);
    CHECK(b3[0].is_zero());
}

TEST_CASE("box enumeration matches slow oracle") {
    for (int d : {2, 5, 13}) {
        for (double X : {1.0, 4.5, 17.0, 50.0}) {
            auto fast = enumerate_box(d, X, X, false);
            auto slow = oracle_box(d, X, X);
            CHECK(fast == slow);
        }
        auto fast = enumerate_box(d, 50.0, 3.0, false);
        auto slow = oracle_box(d, 50.0, 3.0);
        CHECK(fast == slow);
    }
}

TEST_CASE("divisors up to units") {
    auto d2 = divisors_up_to_units(elt(2, 2, 0));
    REQUIRE(d2.size() == 3);
    CHECK(d2[0] == elt(2, 1, 0));
    CHECK(d2[1] == elt(2, 2, 1));
    CHECK(d2[2] == elt(2, 2, 0));

    auto d1 = divisors_up_to_units(elt(2, 1, 0));
    REQUIRE(d1.size() == 1);
    CHECK(d1[0] == elt(2, 1, 0));

    auto d3 = divisors_up_to_units(elt(2, 3, 0));
    REQUIRE(d3.size() == 2);
    CHECK(d3[0] == elt(2, 1, 0));
    CHECK(d3[1] == elt(2, 3, 0));
}

TEST_CASE("split detection") {
    // q^5 generator: totally positive associate of (sqrt 2)^5 = 4 sqrt(2)
    RingElement q5 = totally_positive_associate(elt(2, 0, 4));
    CHECK(is_nonsplit(q5));
    CHECK_FALSE(is_nonsplit(elt(2, 7, 0)));
    CHECK(is_nonsplit(elt(2, 1, 0)));
    CHECK(is_nonsplit(elt(2, 3, 0)));  // 3 inert
    CHECK(splitting_type(2, Int(2)) == Splitting::ramified);
    CHECK(splitting_type(2, Int(3)) == Splitting::inert);
    CHECK(splitting_type(2, Int(7)) == Splitting::split);
    CHECK(splitting_type(5, Int(5)) == Splitting::ramified);
    CHECK(splitting_type(13, Int(13)) == Splitting::ramified);
    CHECK(splitting_type(13, Int(3)) == Splitting::split);  // 13 is 1 mod 3, a square
}

TEST_CASE("gcd and coprimality") {
    CHECK(hmf::gcd(elt(2, 6, 0), elt(2, 2, 1)) == elt(2, 2, 1));
    CHECK(hmf::gcd(elt(2, 3, 0), elt(2, 7, 0)) == elt(2, 1, 0));
    CHECK(is_coprime(elt(2, 3, 0), elt(2, 7, 0)));
    CHECK_FALSE(is_coprime(elt(2, 6, 0), elt(2, 0, 1)));
    // split primes over 7: the two factors are coprime even though norms share 7
    Factorization f7 = factor(elt(2, 7, 0));
    CHECK(is_coprime(f7.primes[0].first, f7.primes[1].first));

    std::mt19937 rng(29);
    for (int d : {2, 5, 13}) {
        for (int i = 0; i < 60; ++i) {
            RingElement x = random_nonzero(rng, d), y = random_nonzero(rng, d);
            RingElement g = hmf::gcd(x, y);
            CHECK(divides(g, x));
            CHECK(divides(g, y));
        }
    }
}

TEST_CASE("quadval exact arithmetic") {
    QuadVal a(2, Rat(1), Rat(1));   // 1 + sqrt(2)
    QuadVal b(2, Rat(1), Rat(-1));  // 1 - sqrt(2)
    CHECK((a * b) == QuadVal::from_rational(2, -1));
    CHECK((a + b) == QuadVal::from_rational(2, 2));
    CHECK(a > QuadVal::from_rational(2, 2));
    CHECK(b < QuadVal::from_rational(2, 0));
    QuadVal r = a / a;
    CHECK(r == QuadVal::from_rational(2, 1));
    // dividing a box bound by an element keeps exactness
    QuadVal big(2, Rat(11), Rat(6));
    QuadVal q = QuadVal::from_rational(2, 1) / big;
    CHECK((q * big) == QuadVal::from_rational(2, 1));
}

TEST_CASE("perfect squares") {
    RingElement x = elt(2, 3, 1);
    auto r = perfect_square_root(x * x);
    REQUIRE(r.has_value());
    CHECK((*r) * (*r) == x * x);
    CHECK_FALSE(perfect_square_root(elt(2, 5, 0)).has_value());
    CHECK_FALSE(perfect_square_root(elt(2, 3, 0)).has_value());
    // 2 = eps^{-2} (2+sqrt 2)^2 is a square with non-totally-positive root sqrt(2)
    auto r2 = perfect_square_root(elt(2, 2, 0));
    REQUIRE(r2.has_value());
    CHECK((*r2) * (*r2) == elt(2, 2, 0));
    // units: eps^2 is a square, eps is not
    RingElement eps = fundamental_unit(2);
    CHECK(perfect_square_root(eps * eps).has_value());
}

TEST_CASE("element printing") {
    CHECK(to_string(elt(2, 2, 1)) == "2+sqrt(2)");
    CHECK(to_string(elt(2, 3, -2)) == "3-2*sqrt(2)");
    CHECK(to_string(elt(2, -5, 0)) == "-5");
    CHECK(to_string(elt(5, 0, 1)) == "(1+sqrt(5))/2");
    CHECK(to_string(elt(13, 1, 1)) == "(3+sqrt(13))/2");
    CHECK(to_string(elt(5, 1, 2)) == "2+sqrt(5)");
}
