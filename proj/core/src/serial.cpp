#include "hmf/serial.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "hmf/errors.hpp"

namespace hmf {

namespace {

using nlohmann::json;

long to_i64(const Int& x) {
    if (!x.fits_slong_p()) throw ParseError("integer exceeds the 64-bit serialization range");
    return x.get_si();
}

json rat_to(const Rat& r) { return json::array({to_i64(r.get_num()), to_i64(r.get_den())}); }

Rat rat_from(const json& j) {
    long num = j.at(0).get<long long>();
    long den = j.at(1).get<long long>();
    if (den == 0) throw ParseError("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    Rat r(num, den);
    r.canonicalize();
    return r;
}

json ring_to(const RingElement& x) { return json::array({to_i64(x.a()), to_i64(x.b())}); }

RingElement ring_from(int d, const json& j) {
    return RingElement(d, Int(static_cast<long>(j.at(0).get<long long>())),
                       Int(static_cast<long>(j.at(1).get<long long>())));
}

std::size_t phi_of(unsigned long N) { return cyclotomic_polynomial(N).size() - 1; }

json cyclo_to(const CyclotomicNumber& x) {
    json coeffs = json::array();
    for (const Rat& c : x.coeffs()) coeffs.push_back(rat_to(c));
    return json{{"order", x.order()}, {"coeffs", std::move(coeffs)}};
}

CyclotomicNumber cyclo_from(const json& j) {
    long long order_raw = j.at("order").get<long long>();
    if (order_raw < 1) throw ParseError("cyclotomic order must be positive");
    unsigned long N = static_cast<unsigned long>(order_raw);
    const json& coeffs = j.at("coeffs");
    if (coeffs.size() != phi_of(N))
        throw ParseError("cyclotomic coefficient count does not match the order");
    CyclotomicNumber acc;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Rat c = rat_from(coeffs[i]);
        if (c == 0) continue;
        acc += CyclotomicNumber::from_rational(c) *
               CyclotomicNumber::root_of_unity(N, static_cast<long>(i));
    }
    return acc;
}

json character_to_obj(const DirichletCharacter& chi) {
    json gens = json::array();
    for (std::uint64_t idx : chi.group->generators)
        gens.push_back(ring_to(chi.group->ring->lift(idx)));
    return json{{"field", chi.modulus.d()},
                {"modulus", ring_to(chi.modulus)},
                {"generators", std::move(gens)},
                {"exponents", chi.exponents},
                {"order", chi.order()}};
}

DirichletCharacter character_from_obj(const json& j) {
    int d = j.at("field").get<int>();
    RingElement modulus = ring_from(d, j.at("modulus"));
    DirichletCharacter chi{modulus, unit_group(modulus), {}, std::nullopt};
    const json& gens = j.at("generators");
    if (gens.size() != chi.group->generators.size())
        throw ParseError("stored generators disagree with the unit group of the modulus");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        RingElement stored = ring_from(d, gens[i]);
        RingElement lifted = chi.group->ring->lift(chi.group->generators[i]);
        if (!(stored == lifted))
            throw ParseError("stored generators disagree with the unit group of the modulus");
    }
    chi.exponents = j.at("exponents").get<std::vector<std::uint64_t>>();
    if (chi.exponents.size() != chi.group->generators.size())
        throw ParseError("exponent count does not match the generator count");
    if (j.at("order").get<std::uint64_t>() != chi.order())
        throw ParseError("stored character order disagrees with the exponents");
    return chi;
}

json qv_to(const QuadVal& q) { return json::array({rat_to(q.u()), rat_to(q.v())}); }

QuadVal qv_from(int d, const json& j) {
    return QuadVal(d, rat_from(j.at(0)), rat_from(j.at(1)));
}

template <typename F>
auto guard(const char* what, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string character_to_json(const DirichletCharacter& chi) {
    return character_to_obj(chi).dump(2) + "\n";
}

DirichletCharacter character_from_json(const std::string& text) {
    return guard("malformed character JSON",
                 [&] { return character_from_obj(json::parse(text)); });
}

std::string expansion_to_json(const FourierExpansion& f) {
    json j;
    j["field"] = f.d();
    j["box"] = json::array({qv_to(f.box().first), qv_to(f.box().second)});
    j["level"] = f.level ? ring_to(*f.level) : json(nullptr);
    j["character"] = f.character ? character_to_obj(*f.character) : json(nullptr);
    j["constant"] = cyclo_to(f.constant_term());
    json coeffs = json::array();
    for (const auto& [xi, v] : f.support())
        coeffs.push_back(json::array({ring_to(xi), cyclo_to(v)}));
    j["coeffs"] = std::move(coeffs);
    return j.dump(2) + "\n";
}

FourierExpansion expansion_from_json(const std::string& text) {
    return guard("malformed expansion JSON", [&] {
        json j = json::parse(text);
        int d = j.at("field").get<int>();
        FourierExpansion f(d, {qv_from(d, j.at("box").at(0)),
                               qv_from(d, j.at("box").at(1))});
        f.set_constant_term(cyclo_from(j.at("constant")));
        for (const json& entry : j.at("coeffs")) {
            RingElement xi = ring_from(d, entry.at(0));
            if (!f.in_box(xi))
                throw ParseError("stored coefficient index lies outside the stored box");
            f.set_coeff(xi, cyclo_from(entry.at(1)));
        }
        if (!j.at("level").is_null()) f.level = ring_from(d, j.at("level"));
        if (!j.at("character").is_null()) {
            DirichletCharacter chi = character_from_obj(j.at("character"));
            if (chi.modulus.d() != d)
                throw ParseError("character field disagrees with the expansion field");
            f.character = std::move(chi);
        }
        return f;
    });
}

std::string verification_to_json(const VerificationRecord& rec) {
    json j;
    j["form"] = rec.form;
    j["level"] = ring_to(rec.level);
    j["character"] = character_to_obj(rec.character);
    j["samples"] = rec.report.samples;
    j["max_deviation"] = rec.report.max_deviation;
    j["tol"] = rec.report.tol;
    j["pass"] = rec.report.pass;
    return j.dump(2) + "\n";
}

VerificationRecord verification_from_json(const std::string& text) {
    return guard("malformed verification JSON", [&] {
        json j = json::parse(text);
        DirichletCharacter chi = character_from_obj(j.at("character"));
        RingElement level = ring_from(chi.modulus.d(), j.at("level"));
        ModularityReport rep;
        rep.samples = j.at("samples").get<int>();
        rep.max_deviation = j.at("max_deviation").get<double>();
        rep.tol = j.at("tol").get<double>();
        rep.pass = j.at("pass").get<bool>();
        return VerificationRecord{j.at("form").get<std::string>(), level, std::move(chi),
                                  rep};
    });
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ParseError("read failure on " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw ParseError("write failure on " + path);
}

}  // namespace hmf
