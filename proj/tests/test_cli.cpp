// End-to-end checks of the hmf binary: worked examples, exit codes, JSON
// output validated against the shipped schemas, cache memoization, and
// byte-level determinism.  The binary path and schema directory arrive as
// compile definitions.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    std::string out;
    int rc = -1;
};

// stdout only by default; pass merge_stderr for diagnostics-on-stdout checks
RunResult run(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(HMF_CLI_PATH) + " " + args +
                      (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json load_schema(const std::string& name) {
    std::ifstream in(std::string(HMF_SCHEMA_DIR) + "/" + name + ".json");
    REQUIRE(in.good());
    return json::parse(in);
}

// Validator for the subset of draft-07 the shipped schemas use: type
// (string or list), properties, required, additionalProperties (bool),
// items (uniform schema or tuple), minItems/maxItems, enum, minimum.
// Structural keywords apply only when the instance has the matching type.
bool type_matches(const json& inst, const std::string& t) {
    if (t == "object") return inst.is_object();
    if (t == "array") return inst.is_array();
    if (t == "string") return inst.is_string();
    if (t == "integer") return inst.is_number_integer();
    if (t == "number") return inst.is_number();
    if (t == "boolean") return inst.is_boolean();
    if (t == "null") return inst.is_null();
    return false;
}

void validate(const json& inst, const json& schema, const std::string& where,
              std::string& err) {
    if (!err.empty()) return;
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) ok = type_matches(inst, t.get<std::string>());
        else
            for (const json& alt : t) ok = ok || type_matches(inst, alt.get<std::string>());
        if (!ok) {
            err = where + ": type mismatch";
            return;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& alt : schema["enum"]) ok = ok || (alt == inst);
        if (!ok) {
            err = where + ": not in enum";
            return;
        }
    }
    if (inst.is_number() && schema.contains("minimum") &&
        inst.get<double>() < schema["minimum"].get<double>()) {
        err = where + ": below minimum";
        return;
    }
    if (inst.is_object()) {
        if (schema.contains("required"))
            for (const json& key : schema["required"])
                if (!inst.contains(key.get<std::string>())) {
                    err = where + ": missing required key " + key.get<std::string>();
                    return;
                }
        const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        for (auto it = inst.begin(); it != inst.end(); ++it) {
            if (props && props->contains(it.key()))
                validate(it.value(), (*props)[it.key()], where + "." + it.key(), err);
            else if (schema.contains("additionalProperties") &&
                     schema["additionalProperties"].is_boolean() &&
                     !schema["additionalProperties"].get<bool>()) {
                err = where + ": unexpected key " + it.key();
                return;
            }
            if (!err.empty()) return;
        }
    }
    if (inst.is_array()) {
        if (schema.contains("minItems") && inst.size() < schema["minItems"].get<size_t>()) {
            err = where + ": too few items";
            return;
        }
        if (schema.contains("maxItems") && inst.size() > schema["maxItems"].get<size_t>()) {
            err = where + ": too many items";
            return;
        }
        if (schema.contains("items")) {
            const json& items = schema["items"];
            for (size_t i = 0; i < inst.size(); ++i) {
                const json& sub = items.is_array() ? items[i % items.size()] : items;
                validate(inst[i], sub, where + "[" + std::to_string(i) + "]", err);
                if (!err.empty()) return;
            }
        }
    }
}

void check_schema(const json& inst, const std::string& schema_name) {
    std::string err;
    validate(inst, load_schema(schema_name), schema_name, err);
    INFO(err);
    CHECK(err.empty());
}

std::string tmp_path(const std::string& name) {
    return "/tmp/hmf-cli-test-" + name;
}

}  // namespace

TEST_CASE("field: catalog data and refusals with documented exit codes") {
    RunResult r = run("field --d 2 --json");
    CHECK(r.rc == 0);
    json j = json::parse(r.out);
    check_schema(j, "field");
    CHECK(j["discriminant"] == 8);
    CHECK(j["fundamental_unit"] == json::array({1, 1}));
    CHECK(j["norm_delta"] == 8);

    RunResult d3 = run("field --d 3", true);
    CHECK(d3.rc == 2);
    CHECK(d3.out.find("norm +1") != std::string::npos);

    CHECK(run("field --d 6").rc == 2);
    CHECK(run("field --d 5 --json").rc == 0);
}

TEST_CASE("unit-group: structure output, schema, cache memoization") {
    RunResult r = run("unit-group --level q^6 --json");
    CHECK(r.rc == 0);
    json j = json::parse(r.out);
    check_schema(j, "unit-group");
    CHECK(j["size"] == 32);
    CHECK(j["generator_orders"] == json::array({8, 2, 2}));
    CHECK(j["unit_image_order"] == 16);

    // memoized rerun must emit identical bytes, corrupt entries recompute
    std::string dir = tmp_path("cache");
    REQUIRE(std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) == 0);
    std::string env = "HMF_CACHE_DIR=" + dir + " " + HMF_CLI_PATH;
    auto cached_run = [&] {
        FILE* pipe = popen((env + " unit-group --level q^6 --json 2>/dev/null").c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::string out;
        char buf[4096];
        size_t n;
        while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
        pclose(pipe);
        return out;
    };
    std::string first = cached_run();
    CHECK(first == r.out);
    std::string entry = dir + "/unit-group-d2-8-0.json";
    std::ifstream probe(entry);
    CHECK(probe.good());
    CHECK(cached_run() == first);
    std::ofstream(entry) << "{ not json";
    CHECK(cached_run() == first);
}

TEST_CASE("characters: q^5 carries exactly the trivial pair") {
    RunResult r = run("characters --level q^5 --order 2 --json");
    CHECK(r.rc == 0);
    json j = json::parse(r.out);
    check_schema(j, "characters");
    CHECK(j["count"] == 2);
    CHECK(j["characters"][0]["order"] == 1);
    CHECK(j["characters"][1]["order"] == 2);
    // phi is primitive mod q^5, so its conductor equals the modulus
    CHECK(j["characters"][1]["conductor"] == j["modulus"]);
}

TEST_CASE("basis: dimensions match the table and split levels are refused") {
    RunResult r = run("basis --level q^14 --char phi --json");
    CHECK(r.rc == 0);
    json j = json::parse(r.out);
    check_schema(j, "basis");
    CHECK(j["dimension"] == 6);
    CHECK(j["pairs"].size() == 6);
    CHECK(j["pivots"].size() == 6);

    json j4 = json::parse(run("basis --level q^4 --char phi --json").out);
    CHECK(j4["dimension"] == 0);

    RunResult split = run("basis --level 7", true);
    CHECK(split.rc == 3);
    CHECK(split.out.find("split") != std::string::npos);
}

TEST_CASE("theta, hecke, lseries: the worked chain with exact ratio 10/9") {
    std::string form = tmp_path("theta.json");
    RunResult th = run("theta --chi trivial --t 1 --box 50 --out " + form + " --json");
    CHECK(th.rc == 0);
    json expansion = json::parse(th.out);
    check_schema(expansion, "expansion");
    // a(1) = 2: the coefficient at (1, 0)
    bool found = false;
    for (const json& entry : expansion["coeffs"])
        if (entry[0] == json::array({1, 0})) {
            found = true;
            CHECK(entry[1] == json({{"coeffs", json::array({json::array({2, 1})})},
                                    {"order", 1}}));
        }
    CHECK(found);

    // the --out file holds the same expansion
    std::ifstream in(form);
    REQUIRE(in.good());
    std::stringstream file_text;
    file_text << in.rdbuf();
    CHECK(json::parse(file_text.str()) == expansion);

    RunResult hk = run("hecke --p 3 --on " + form + " --json");
    CHECK(hk.rc == 0);
    json hj = json::parse(hk.out);
    check_schema(hj, "hecke");
    REQUIRE(!hj["ratio"].is_null());
    CHECK(hj["ratio"]["order"] == 1);
    CHECK(hj["ratio"]["coeffs"] == json::array({json::array({10, 9})}));
    check_schema(hj["expansion"], "expansion");

    RunResult ls = run("lseries --form " + form + " --s 2 --bound 400 --json");
    CHECK(ls.rc == 0);
    json lj = json::parse(ls.out);
    check_schema(lj, "lseries");
    CHECK(lj["bound_used"] == 400);
    // theta has a(1) = 2, so the partial sum tracks twice the Euler side
    double ratio = lj["ratio"][0].get<double>();
    CHECK(std::abs(ratio - 2.0) < 0.01);
    CHECK(std::abs(lj["ratio"][1].get<double>()) < 1e-12);

    // a bound beyond what the box certifies is clamped, not mis-summed
    json clamp = json::parse(run("lseries --form " + form + " --s 2 --bound 100000 --json").out);
    CHECK(clamp["bound_used"].get<long>() < 100000);
    CHECK(clamp["bound_used"] == 428);
}

TEST_CASE("verify: suite reports validate, failures exit 1, usage exits 64") {
    RunResult r = run("verify --suite dimensions --json");
    CHECK(r.rc == 0);
    json j = json::parse(r.out);
    check_schema(j, "verify");
    CHECK(j["pass"] == true);
    CHECK(j["first_failure"].is_null());
    CHECK(j["checks"].size() > 0);

    // unreachable tolerance: the suite runs, reports FAIL, exits 1
    RunResult fail = run("verify --suite modularity --samples 2 --tol 1e-15 --json");
    CHECK(fail.rc == 1);
    json fj = json::parse(fail.out);
    check_schema(fj, "verify");
    CHECK(fj["pass"] == false);
    CHECK(fj["first_failure"].is_string());

    CHECK(run("frobnicate").rc == 64);
    CHECK(run("verify").rc == 64);  // --suite is required
}

TEST_CASE("determinism: identical command and seed give identical bytes") {
    std::string cmd = "verify --suite modularity --samples 3 --seed 9 --json";
    RunResult a = run(cmd);
    RunResult b = run(cmd);
    CHECK(a.rc == 0);
    CHECK(a.out == b.out);

    RunResult t1 = run("theta --chi phi --t 1 --box 40 --json");
    RunResult t2 = run("theta --chi phi --t 1 --box 40 --json");
    CHECK(t1.out == t2.out);
}
