#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "holofol/config.hpp"
#include "holofol/philox.hpp"

using namespace holofol;

TEST_CASE("complex literals parse and format round-trip") {
    CHECK(parse_complex("1+2i") == cplx(1, 2));
    CHECK(parse_complex("-1.5-0.25i") == cplx(-1.5, -0.25));
    CHECK(parse_complex("2") == cplx(2, 0));
    CHECK(parse_complex("i") == cplx(0, 1));
    CHECK(parse_complex("-i") == cplx(0, -1));
    CHECK(parse_complex("2i") == cplx(0, 2));
    CHECK(parse_complex("1e-3+2.5e2i") == cplx(1e-3, 2.5e2));
    CHECK(parse_complex("-0.5i") == cplx(0, -0.5));

    CHECK_THROWS_AS((void)parse_complex("1 + 2i"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_complex("abc"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_complex(""), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_complex("1+2j"), std::invalid_argument);

    CounterRng rng(1, kStreamAux, 9);
    for (int t = 0; t < 2000; ++t) {
        cplx z(20.0 * (rng.uniform() - 0.5), 20.0 * (rng.uniform() - 0.5));
        CHECK(parse_complex(format_complex(z)) == z);
    }
    auto lst = parse_complex_list("1+0i,0+1i,-2");
    REQUIRE(lst.size() == 3);
    CHECK(lst[2] == cplx(-2, 0));
}

TEST_CASE("fmt_double is a shortest round-trip representation") {
    CounterRng rng(2, kStreamAux, 10);
    for (int t = 0; t < 2000; ++t) {
        double v = std::exp(600.0 * (rng.uniform() - 0.5)) * (rng.uniform() < 0.5 ? -1 : 1);
        CHECK(std::strtod(fmt_double(v).c_str(), nullptr) == v);
    }
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(1.0) == "1");
}

TEST_CASE("csv quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_row({"a", "b,c", "1.5"}) == "a,\"b,c\",1.5\n");
}

TEST_CASE("config parse/dump round-trips byte-identically on canonical files") {
    std::string canonical = "lambda=1+0i,1+0i\nseed=42\npaths=64\nprofile=accelerating\n";
    ConfigFile cfg = ConfigFile::parse(canonical);
    CHECK(cfg.dump() == canonical);
    CHECK(ConfigFile::parse(cfg.dump()).dump() == canonical);
    REQUIRE(cfg.find("seed") != nullptr);
    CHECK(*cfg.find("seed") == "42");
    CHECK(cfg.find("missing") == nullptr);

    // comments and blank lines are accepted but not canonical
    ConfigFile cfg2 = ConfigFile::parse("# comment\n\nseed=1\nseed=2\n");
    CHECK(*cfg2.find("seed") == "2"); // last wins
    CHECK(cfg2.dump() == "seed=1\nseed=2\n");

    CHECK_THROWS_AS((void)ConfigFile::parse("not a kv line\n"), std::invalid_argument);
}
