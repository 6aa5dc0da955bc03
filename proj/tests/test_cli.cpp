#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "biquad/cli.hpp"
#include "biquad/kleinmod.hpp"
#include "testutil.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using json = nlohmann::json;
namespace km = biquad::kleinmod;
using km::SummandType;

namespace {

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = biquad::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp_module(const km::KleinModule& m, const std::string& tag)
{
    std::string path = "cli_test_" + tag + ".module";
    std::ofstream f(path);
    f << km::format_module_text(m);
    return path;
}

}  // namespace

TEST_CASE("classify: text output and exit code")
{
    auto r = run({"classify", "7", "-5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("X: Zero") != std::string::npos);
    CHECK(r.out.find("im(T): dim 0") != std::string::npos);

    auto r2 = run({"classify", "5", "41"});
    CHECK(r2.code == 0);
    CHECK(r2.out.find("Undecided(Omega-2 | Omega-1 ⊕ Omega-1)") != std::string::npos);
}

TEST_CASE("classify: degenerate inputs exit 2")
{
    auto r = run({"classify", "4", "8"});
    CHECK(r.code == 2);
    CHECK(r.err.find("a1 is a square") != std::string::npos);

    auto r2 = run({"classify", "3", "12"});
    CHECK(r2.code == 2);
    CHECK(r2.err.find("dependent") != std::string::npos);

    auto r3 = run({"classify", "0", "5"});
    CHECK(r3.code == 2);
}

TEST_CASE("classify: non-squarefree inputs are reduced with a warning")
{
    auto r = run({"classify", "12", "5"});
    CHECK(r.code == 0);
    CHECK(r.err.find("reduced") != std::string::npos);
    CHECK(r.out.find("a1=3") != std::string::npos);
}

TEST_CASE("classify: json round-trips and carries the text data")
{
    auto r = run({"classify", "2", "-1", "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["a1"] == 2);
    CHECK(doc["a2"] == -1);
    CHECK(doc["a3"] == -2);
    CHECK(doc["x_shape"] == "Omega-1");
    CHECK(doc["im_t_dim"] == 2);
    CHECK(doc["im_t_basis"].size() == 2);
    CHECK(json::parse(doc.dump()) == doc);

    // z4z2 type 1 witness must be present and verifiable: 2 = 1 + 1.
    CHECK(doc["witnesses"]["z4z2"][0]["found"] == true);
}

TEST_CASE("classify: identical invocations are byte-identical")
{
    auto a = run({"classify", "5", "41", "--format", "json"});
    auto b = run({"classify", "5", "41", "--format", "json"});
    CHECK(a.out == b.out);
    auto c = run({"classify", "5", "41"});
    auto d = run({"classify", "5", "41"});
    CHECK(c.out == d.out);
}

TEST_CASE("examples: all five match, fault injection is caught")
{
    auto r = run({"examples"});
    CHECK(r.code == 0);
    CHECK(r.out.find("5/5 examples match") != std::string::npos);

    auto rf = run({"examples", "--inject-fault"});
    CHECK(rf.code == 1);
    CHECK(rf.out.find("MISMATCH") != std::string::npos);

    auto rj = run({"examples", "--format", "json"});
    CHECK(rj.code == 0);
    json arr = json::parse(rj.out);
    REQUIRE(arr.size() == 5);
    for (const auto& rec : arr)
        CHECK(rec["match"] == true);
    CHECK(arr[0]["computed"]["x_shape"] == "Zero");
    CHECK(arr[4]["expected_im_t_dim"] == 3);
}

TEST_CASE("decompose: constructed sum")
{
    auto m = km::direct_sum({SummandType::free_module(), SummandType::omega_minus(1)});
    auto path = write_temp_module(m, "sum");
    auto r = run({"decompose", path});
    CHECK(r.code == 0);
    CHECK(r.out.find("Free:1") != std::string::npos);
    CHECK(r.out.find("Omega-1:1") != std::string::npos);

    auto rj = run({"decompose", path, "--format", "json"});
    json doc = json::parse(rj.out);
    CHECK(doc["dim"] == 7);
    CHECK(doc["multiplicities"]["Free"] == 1);
    CHECK(doc["multiplicities"]["Omega-1"] == 1);
    CHECK(doc["dim_check_ok"] == true);
    CHECK(doc["hat_j"]["verified"] == true);
    std::remove(path.c_str());
}

TEST_CASE("decompose: the degeneracy pair is resolved at the surface")
{
    testutil::Rng rng(151);
    auto m = testutil::random_conjugate(
        rng, km::direct_sum({SummandType::cyc(1), SummandType::cyc(2), SummandType::cyc(3)}));
    auto path = write_temp_module(m, "cycs");
    auto r = run({"decompose", path, "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["multiplicities"]["C_G1"] == 1);
    CHECK(doc["multiplicities"]["C_G2"] == 1);
    CHECK(doc["multiplicities"]["C_G3"] == 1);
    CHECK(doc["multiplicities"].size() == 3);
    std::remove(path.c_str());
}

TEST_CASE("decompose: invalid and out-of-family modules")
{
    km::KleinModule bad{2, biquad::f2la::F2Matrix::of(2, 2, {0, 1, 1, 0}),
                        biquad::f2la::F2Matrix::of(2, 2, {1, 0, 1, 1})};
    auto path = write_temp_module(bad, "bad");
    auto r = run({"decompose", path});
    CHECK(r.code == 2);
    CHECK(r.err.find("s1*s2 != s2*s1") != std::string::npos);
    std::remove(path.c_str());

    auto deep = km::canonical(SummandType::omega_minus(3));
    auto path2 = write_temp_module(deep, "deep");
    auto r2 = run({"decompose", path2});
    CHECK(r2.code == 3);
    CHECK(r2.out.find("functional values") != std::string::npos);
    std::remove(path2.c_str());

    auto r3 = run({"decompose", "no_such_file.module"});
    CHECK(r3.code == 2);
}

TEST_CASE("sweep: small bounds")
{
    auto r1 = run({"sweep", "1"});
    CHECK(r1.code == 2);

    auto r = run({"sweep", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("a1=-1 a2=2") != std::string::npos);
    CHECK(r.out.find("histogram:") != std::string::npos);

    auto rj = run({"sweep", "3", "--format", "json"});
    CHECK(rj.code == 0);
    json doc = json::parse(rj.out);
    CHECK(doc["max_abs"] == 3);
    CHECK(doc["records"].size() > 4);
    std::size_t total = 0;
    for (const auto& [shape, count] : doc["histogram"].items())
        total += count.get<std::size_t>();
    CHECK(total == doc["records"].size());
    // Every record's achieved image is consistent (dim matches basis size).
    for (const auto& rec : doc["records"])
        CHECK(rec["im_t_dim"].get<std::size_t>() == rec["im_t_basis"].size());
}

TEST_CASE("sweep: the larger sweep hits the worked example and is deterministic")
{
    auto r = run({"sweep", "50", "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    bool found = false;
    for (const auto& rec : doc["records"])
        if (rec["a1"] == 5 && rec["a2"] == 13) {
            found = true;
            CHECK(rec["x_shape"] == "F2 ⊕ F2");
        }
    CHECK(found);

    auto a = run({"sweep", "10"});
    auto b = run({"sweep", "10"});
    CHECK(a.out == b.out);
}

TEST_CASE("selftest: passes, is seed-reproducible, prints the matrix when asked")
{
    auto r = run({"selftest"});
    CHECK(r.code == 0);
    CHECK(r.out.find("check gram-rank: ok") != std::string::npos);
    CHECK(r.out.find("check hilbert-product-formula: ok") != std::string::npos);
    CHECK(r.out.find("check norm-tower: ok") != std::string::npos);
    CHECK(r.out.find("check k3-norm-factorization: ok") != std::string::npos);

    auto a = run({"selftest", "--seed", "7"});
    auto b = run({"selftest", "--seed", "7"});
    CHECK(a.out == b.out);
    CHECK(a.code == 0);

    auto v = run({"selftest", "--verbose"});
    CHECK(v.out.find("functional matrix") != std::string::npos);
    CHECK(v.out.find("hom(F2, M)") != std::string::npos);

    auto j = run({"selftest", "--format", "json"});
    json doc = json::parse(j.out);
    CHECK(doc["ok"] == true);
    CHECK(doc["checks"].size() == 4);
}

TEST_CASE("bad usage exits 2")
{
    CHECK(run({"classify", "7"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"classify", "abc", "5"}).code == 2);
}
