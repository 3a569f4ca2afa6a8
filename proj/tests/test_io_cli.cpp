#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "tvar/fdiv.hpp"
#include "tvar/io.hpp"

using namespace tvar;
using namespace tvar::geom;
namespace fd = tvar::fdiv;

namespace {

QVec qv(std::vector<long> xs) {
    QVec v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

fd::BasePoint bp(long p, long q = 1) { return fd::BasePoint::at(rat(p, q)); }

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string temp_file(const std::string& name, const std::string& content) {
    std::string path = "/tmp/tvar_io_test_" + std::to_string(getpid()) + "_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

struct RunResult {
    int exit = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string tag = std::to_string(getpid()) + "_" + std::to_string(counter++);
    std::string outPath = "/tmp/tvar_cli_out_" + tag;
    std::string errPath = "/tmp/tvar_cli_err_" + tag;
    std::string cmd =
        std::string(CLI_BINARY) + " " + args + " > " + outPath + " 2> " + errPath;
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(outPath);
    r.err = slurp(errPath);
    std::remove(outPath.c_str());
    std::remove(errPath.c_str());
    return r;
}

nlohmann::json as_json(const std::string& text) { return nlohmann::json::parse(text); }

}  // namespace

TEST_CASE("base point strings") {
    CHECK(io::parse_base_point("inf") == fd::BasePoint::infinity());
    CHECK(io::parse_base_point("0") == bp(0));
    CHECK(io::parse_base_point("-2/3") == bp(-2, 3));
    CHECK(io::parse_base_point("4/2") == bp(2));
    CHECK_THROWS_AS(io::parse_base_point("oo"), std::invalid_argument);
    CHECK(io::parse_base_point("inf").str() == "inf");
    CHECK(bp(-2, 3).str() == "-2/3");
}

TEST_CASE("fixture files parse, validate and round-trip") {
    for (const char* name : {"example4.json", "half.json", "cox.json"}) {
        CAPTURE(name);
        fd::FDivisor s = io::read_fdivisor(fixture(name));
        CHECK(fd::validate_fdivisor(s).ok());
        std::string text = io::write_fdivisor(s);
        fd::FDivisor s2 = io::parse_fdivisor(text);
        CHECK(io::fdivisor_equal(s, s2));
        CHECK(io::write_fdivisor(s2) == text);
    }
}

TEST_CASE("example4 parses to the expected object") {
    fd::FDivisor s = io::read_fdivisor(fixture("example4.json"));
    CHECK(s.rank == 1);
    REQUIRE(s.tailFan.maximal.size() == 2);
    CHECK(s.tailFan.maximal[0] == Cone::from_rays(1, {qv({-1})}));
    REQUIRE(s.slices.size() == 3);
    CHECK(s.slices.count(bp(0)) == 1);
    CHECK(s.slices.count(bp(1)) == 1);
    CHECK(s.slices.count(fd::BasePoint::infinity()) == 1);
    const auto& cells = s.slices.at(bp(0)).cells();
    REQUIRE(cells.size() == 3);
    CHECK(cells[1] == Polyhedron::from_generators(1, {qv({-1}), qv({1})}, {}));
    REQUIRE(s.degree.at(0).has_value());
    CHECK(*s.degree.at(0) == Polyhedron::from_generators(1, {qv({-3})}, {qv({-1})}));
}

TEST_CASE("rationals accept integers, strings and unreduced fractions") {
    std::string text = R"({
      "rank": 1,
      "tailFan": [[[-1]], [["1"]]],
      "slices": [{"point": 2, "cells": [
        {"vertices": [["6/4"]], "rays": [[-1]]},
        {"vertices": [[1.5]], "rays": [[1]]}
      ]}]
    })";
    CHECK_THROWS_WITH_AS(io::parse_fdivisor(text),
                         "divisor.slices[0].cells[1].vertices[0][0]: expected an integer or a "
                         "\"p/q\" string",
                         io::ParseError);

    std::string fixed = text;
    fixed.replace(fixed.find("1.5"), 3, "\"3/2\"");
    fd::FDivisor s = io::parse_fdivisor(fixed);
    CHECK(s.slices.count(bp(2)) == 1);
    const auto& cells = s.slices.at(bp(2)).cells();
    CHECK(cells[0].vertices()[0] == QVec{rat(3, 2)});
    CHECK(cells[1].vertices()[0] == QVec{rat(3, 2)});
}

TEST_CASE("schema violations name the offending field") {
    auto bad = [](const std::string& text) { return io::parse_fdivisor(text); };

    CHECK_THROWS_WITH_AS(bad("[]"), "divisor: expected an object", io::ParseError);
    CHECK_THROWS_WITH_AS(bad("{}"), "divisor: missing key 'rank'", io::ParseError);
    CHECK_THROWS_WITH_AS(bad(R"({"rank": 0, "tailFan": [[[1]]]})"),
                         "divisor.rank: rank must be between 1 and 8", io::ParseError);
    CHECK_THROWS_WITH_AS(bad(R"({"rank": 1, "tailFan": []})"),
                         "divisor.tailFan: expected a nonempty array", io::ParseError);
    CHECK_THROWS_WITH_AS(bad(R"({"rank": 1, "tailFan": [[[1, 0]]]})"),
                         "divisor.tailFan[0][0]: expected 1 entries, got 2", io::ParseError);
    CHECK_THROWS_WITH_AS(bad(R"({"rank": 1, "tailFan": [[[1]]], "degre": []})"),
                         "divisor: unknown key 'degre'", io::ParseError);

    std::string dup = R"({
      "rank": 1, "tailFan": [[[-1]], [[1]]],
      "slices": [
        {"point": "1/2", "cells": []},
        {"point": "2/4", "cells": []}
      ]
    })";
    CHECK_THROWS_WITH_AS(bad(dup), "divisor.slices[1].point: duplicate slice point 1/2",
                         io::ParseError);

    CHECK_THROWS_WITH_AS(
        bad(R"({"rank": 1, "tailFan": [[[-1]], [[1]]], "degree": [{"cone": 2, "value": null}]})"),
        "divisor.degree[0].cone: cone index 2 out of range", io::ParseError);
    CHECK_THROWS_WITH_AS(
        bad(R"({"rank": 1, "tailFan": [[[-1]], [[1]]], "degree": [{"cone": [[2], [-1]], "value": null}]})"),
        "divisor.degree[0].cone: rays do not span a maximal cone of the tail fan",
        io::ParseError);
    CHECK_THROWS_WITH_AS(
        bad(R"({"rank": 1, "tailFan": [[[-1]], [[1]]],
                "degree": [{"cone": 0, "value": null}, {"cone": [[-1]], "value": null}]})"),
        "divisor.degree[1].cone: duplicate degree entry", io::ParseError);
    CHECK_THROWS_WITH_AS(
        bad(R"({"rank": 1, "tailFan": [[[-1]], [[1]]], "degree": [{"cone": 0, "value": {"rays": [[-1]]}}]})"),
        "divisor.degree[0].value: missing key 'vertices'", io::ParseError);
}

TEST_CASE("degree cones resolve from ray lists") {
    std::string text = R"({
      "rank": 1,
      "tailFan": [[[-1]], [[1]]],
      "degree": [
        {"cone": [[1]], "value": {"vertices": [[3]], "rays": [[1]]}},
        {"cone": 0, "value": null}
      ]
    })";
    fd::FDivisor s = io::parse_fdivisor(text);
    CHECK(s.degree.at(0) == std::nullopt);
    REQUIRE(s.degree.at(1).has_value());
    CHECK(*s.degree.at(1) == Polyhedron::from_generators(1, {qv({3})}, {qv({1})}));
}

TEST_CASE("polyhedra with lineality round-trip") {
    std::string text = R"({
      "rank": 2,
      "tailFan": [[[1, 0], [-1, 0], [0, 1]], [[1, 0], [-1, 0], [0, -1]]],
      "slices": [{"point": "0", "cells": [
        {"vertices": [["1/3", 0]], "rays": [[1, 0], [-1, 0], [0, 1]]},
        {"vertices": [["1/3", 0]], "rays": [[1, 0], [-1, 0], [0, -1]]}
      ]}],
      "degree": [{"cone": 0, "value": null}, {"cone": 1, "value": null}]
    })";
    fd::FDivisor s = io::parse_fdivisor(text);
    CHECK(s.tailFan.maximal[0].lineality().size() == 1);
    CHECK(s.slices.at(bp(0)).cells()[0].lineality().size() == 1);
    fd::FDivisor s2 = io::parse_fdivisor(io::write_fdivisor(s));
    CHECK(io::fdivisor_equal(s, s2));
}

TEST_CASE("support function files parse and round-trip") {
    fd::FDivisor s = io::read_fdivisor(fixture("half.json"));
    fd::SupportFunction h = io::read_sf(s, fixture("half_sf.json"));
    CHECK(fd::validate_sf(s, h).ok());
    CHECK(h.lin[0] == qv({0}));
    CHECK(h.lin[1] == qv({-1}));
    REQUIRE(h.pieces.count(bp(0)) == 1);
    CHECK(h.pieces.at(bp(0))[1].a == rat(-1, 2));

    fd::SupportFunction h2 = io::parse_sf(s, io::write_sf(h));
    CHECK(h2 == h);

    std::string byRays = R"({
      "lin": [
        {"cone": [[1]], "u": ["-1"]},
        {"cone": [[-1]], "u": [0]}
      ],
      "pieces": [
        {"point": "0", "cell": 1, "u": [-1], "a": "-1/2"},
        {"point": "0", "cell": 0, "u": [0], "a": 0}
      ]
    })";
    CHECK(io::parse_sf(s, byRays) == h);
}

TEST_CASE("support function schema violations") {
    fd::FDivisor s = io::read_fdivisor(fixture("half.json"));
    CHECK_THROWS_WITH_AS(io::parse_sf(s, R"({"lin": [{"cone": 0, "u": [0]}]})"),
                         "sf.lin: missing entry for cone 1", io::ParseError);
    CHECK_THROWS_WITH_AS(
        io::parse_sf(s, R"({"lin": [{"cone": 0, "u": [0]}, {"cone": 0, "u": [0]}]})"),
        "sf.lin[1].cone: duplicate lin entry for cone 0", io::ParseError);
    std::string gap = R"({
      "lin": [{"cone": 0, "u": [0]}, {"cone": 1, "u": [0]}],
      "pieces": [{"point": "0", "cell": 1, "u": [0], "a": 0}]
    })";
    CHECK_THROWS_WITH_AS(io::parse_sf(s, gap), "sf.pieces: cell indices for point 0 must cover 0..0",
                         io::ParseError);
    std::string dup = R"({
      "lin": [{"cone": 0, "u": [0]}, {"cone": 1, "u": [0]}],
      "pieces": [
        {"point": "0", "cell": 0, "u": [0], "a": 0},
        {"point": "0", "cell": 0, "u": [0], "a": 1}
      ]
    })";
    CHECK_THROWS_WITH_AS(io::parse_sf(s, dup), "sf.pieces[1].cell: duplicate piece for point 0, cell 0",
                         io::ParseError);
}

TEST_CASE("cli validate-fdivisor") {
    RunResult ok = run_cli("validate-fdivisor " + fixture("example4.json") + " " +
                           fixture("half.json") + " --jobs 2");
    CHECK(ok.exit == 0);
    CHECK(ok.out.find("example4.json: valid f-divisor") != std::string::npos);
    CHECK(ok.out.find("half.json: valid f-divisor") != std::string::npos);

    std::string invalid = temp_file("invalid.json", R"({
      "rank": 1,
      "tailFan": [[[-1]], [[1]]],
      "slices": [{"point": "0", "cells": [{"vertices": [[0]], "rays": [[1]]}]}],
      "degree": [{"cone": 0, "value": null}, {"cone": 1, "value": null}]
    })");
    RunResult bad = run_cli("validate-fdivisor " + invalid + " --format json");
    CHECK(bad.exit == 1);
    auto j = as_json(bad.out);
    CHECK(j["command"] == "validate-fdivisor");
    CHECK(j["results"][0]["valid"] == false);
    CHECK(!j["results"][0]["issues"].empty());

    RunResult missing = run_cli("validate-fdivisor /nonexistent_tvar.json");
    CHECK(missing.exit == 2);
    CHECK(missing.out.empty());
    CHECK(missing.err.find("cannot open file") != std::string::npos);
    std::remove(invalid.c_str());
}

TEST_CASE("cli check criteria and exit codes") {
    std::string example = fixture("example4.json");

    RunResult cover = run_cli("check " + example + " --criterion toric-cover --format json");
    CHECK(cover.exit == 0);
    auto jc = as_json(cover.out);
    CHECK(jc["criterion"] == "toric-cover");
    CHECK(jc["results"][0]["verdict"] == true);

    RunResult flex = run_cli("check " + example + " --criterion all-cones-flexible --format json");
    CHECK(flex.exit == 1);
    auto jf = as_json(flex.out);
    CHECK(jf["results"][0]["verdict"] == false);
    REQUIRE(!jf["results"][0]["witnesses"].empty());
    std::string witness = jf["results"][0]["witnesses"][0];
    CHECK(witness.find("0, 1, inf") != std::string::npos);

    RunResult toric = run_cli("check " + fixture("half.json") + " --criterion toric");
    CHECK(toric.exit == 0);
    CHECK(toric.out.find("toric holds") != std::string::npos);

    // Structurally well-formed but invalid divisors are input errors here.
    std::string invalid = temp_file("invalid2.json", R"({
      "rank": 1,
      "tailFan": [[[-1]], [[1]]],
      "slices": [{"point": "0", "cells": [{"vertices": [[0]], "rays": [[1]]}]}],
      "degree": [{"cone": 0, "value": null}, {"cone": 1, "value": null}]
    })");
    RunResult inval = run_cli("check " + invalid + " --criterion toric-cover");
    CHECK(inval.exit == 2);
    CHECK(inval.out.empty());
    CHECK(inval.err.find("invalid f-divisor") != std::string::npos);
    std::remove(invalid.c_str());

    RunResult badc = run_cli("check " + example + " --criterion bogus");
    CHECK(badc.exit == 2);
}

TEST_CASE("cli divisor and ample-check") {
    std::string args = fixture("half.json") + " --sf " + fixture("half_sf.json");

    RunResult div = run_cli("divisor " + args + " --format json");
    CHECK(div.exit == 0);
    auto jd = as_json(div.out);
    REQUIRE(jd["horizontal"].size() == 2);
    CHECK(jd["horizontal"][0]["ray"] == nlohmann::json::array({-1}));
    CHECK(jd["horizontal"][0]["coeff"] == "0");
    CHECK(jd["horizontal"][1]["ray"] == nlohmann::json::array({1}));
    CHECK(jd["horizontal"][1]["coeff"] == "1");
    REQUIRE(jd["vertical"].size() == 1);
    CHECK(jd["vertical"][0]["point"] == "0");
    CHECK(jd["vertical"][0]["vertex"] == nlohmann::json::array({"-1/2"}));
    CHECK(jd["vertical"][0]["coeff"] == "0");
    CHECK(jd["effective"] == true);

    RunResult amp = run_cli("ample-check " + args + " --format json");
    CHECK(amp.exit == 0);
    CHECK(as_json(amp.out)["ample_necessary_passed"] == true);

    // Mirror subdivision at +1/2: same divisor and box, but the dual drops
    // below zero at the left box vertex, so the ample check fails.
    std::string mirror = temp_file("mirror.json", R"({
      "rank": 1,
      "tailFan": [[[-1]], [[1]]],
      "slices": [{"point": "0", "cells": [
        {"vertices": [["1/2"]], "rays": [[-1]]},
        {"vertices": [["1/2"]], "rays": [[1]]}
      ]}],
      "degree": [{"cone": 0, "value": null}, {"cone": 1, "value": null}]
    })");
    std::string mirrorSf = temp_file("mirror_sf.json", R"({
      "lin": [{"cone": 0, "u": [0]}, {"cone": 1, "u": [-1]}],
      "pieces": [
        {"point": "0", "cell": 0, "u": [0], "a": 0},
        {"point": "0", "cell": 1, "u": [-1], "a": "1/2"}
      ]
    })");
    RunResult fail = run_cli("ample-check " + mirror + " --sf " + mirrorSf + " --format json");
    CHECK(fail.exit == 1);
    auto jm = as_json(fail.out);
    CHECK(jm["ample_necessary_passed"] == false);
    CHECK(!jm["witnesses"].empty());
    std::remove(mirror.c_str());
    std::remove(mirrorSf.c_str());
}

TEST_CASE("cli polar-chart emits a loadable support function") {
    fd::FDivisor s = io::read_fdivisor(fixture("half.json"));
    fd::SupportFunction h = io::read_sf(s, fixture("half_sf.json"));
    std::string args = fixture("half.json") + " --sf " + fixture("half_sf.json");

    for (size_t cell : {size_t(0), size_t(1)}) {
        CAPTURE(cell);
        RunResult r = run_cli("polar-chart " + args + " --point 0 --cell " +
                              std::to_string(cell) + " --format json");
        CHECK(r.exit == 0);
        fd::SupportFunction expected = fd::polar_chart(s, h, bp(0), cell);
        CHECK(io::parse_sf(s, r.out) == expected);
    }

    RunResult inf = run_cli("polar-chart " + args + " --point inf --cell 0");
    CHECK(inf.exit == 1);
    CHECK(inf.err.find("polar chart unavailable") != std::string::npos);
}

TEST_CASE("cli cox") {
    RunResult r = run_cli("cox " + fixture("cox.json") + " --format json");
    CHECK(r.exit == 0);
    auto j = as_json(r.out);
    CHECK(j["ring"] ==
          "K[S(-1), S(1), T(0;1/2), T(1;-1/3), T(inf;0)] / "
          "(T(0;1/2)^2 + T(1;-1/3)^3 + T(inf;0))");
    REQUIRE(j["relations"].size() == 1);
    CHECK(j["relations"][0]["z"] == "1");
    CHECK(j["relations"][0]["poly"] == "T(0;1/2)^2 + T(1;-1/3)^3 + T(inf;0)");
    REQUIRE(j["generators"].size() == 5);
    CHECK(j["generators"][2]["mu"] == 2);
    CHECK(j["generators"][3]["mu"] == 3);
}

TEST_CASE("cli secant reports") {
    RunResult ver = run_cli("secant --dims 2 --degs 2 --ideal-degree 2 --format json");
    CHECK(ver.exit == 0);
    auto jv = as_json(ver.out);
    CHECK(jv["dimSec"] == 4);
    CHECK(jv["degenerate"] == true);
    CHECK(jv["latticePoints"] ==
          nlohmann::json::array({{0, 2}, {1, 1}, {2, 0}}));
    REQUIRE(jv["ideal"].size() == 1);
    CHECK(jv["ideal"][0]["a"] == nlohmann::json::array({1, 0, 1}));
    CHECK(jv["ideal"][0]["b"] == nlohmann::json::array({0, 2, 0}));
    CHECK(jv["ideal"][0]["str"] == "z(1,1)*z(2,2) - z(1,2)^2");

    RunResult cube =
        run_cli("secant --dims 1 1 1 --degs 1 1 1 --tangential --ideal-degree 3 --format json");
    CHECK(cube.exit == 0);
    auto jc = as_json(cube.out);
    CHECK(jc["dimSec"] == 7);
    CHECK(jc["dimTan"] == 6);
    CHECK(jc["polytopeVertices"].size() == 4);
    REQUIRE(jc["ideal"].size() == 1);
    CHECK(jc["ideal"][0]["str"] == "z(0,1,1)*z(1,0,1)*z(1,1,0) - z(1,1,1)^2");

    RunResult cusp = run_cli("secant --dims 1 --degs 3 --tangential --format json");
    CHECK(cusp.exit == 0);
    auto ju = as_json(cusp.out);
    CHECK(ju["monoidGenerators"] == nlohmann::json::array({{2}, {3}}));
    CHECK(ju.find("ideal") == ju.end());

    RunResult bad = run_cli("secant --dims 2 --degs 2 --ideal-degree 0");
    CHECK(bad.exit == 2);
    RunResult shape = run_cli("secant --dims 2 2 --degs 1");
    CHECK(shape.exit == 2);
}

TEST_CASE("cli sv-verify") {
    RunResult r = run_cli("sv-verify --dims 1 1 --degs 2 1 --points 4 --format json");
    CHECK(r.exit == 0);
    auto j = as_json(r.out);
    CHECK(j["failures"] == 0);
    CHECK(j["ok"] == true);
    CHECK(j["points"] == 4);
}

TEST_CASE("cli rejects malformed invocations") {
    CHECK(run_cli("").exit == 2);
    CHECK(run_cli("frobnicate").exit == 2);
    CHECK(run_cli("divisor " + fixture("half.json")).exit == 2);
    CHECK(run_cli("polar-chart " + fixture("half.json") + " --sf " + fixture("half_sf.json") +
                  " --point oo --cell 0")
              .exit == 2);
}
