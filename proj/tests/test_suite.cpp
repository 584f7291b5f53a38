#include "hesskit/suite.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <string>

using namespace hesskit;

namespace {

SuiteConfig config(const std::string& suite)
{
    SuiteConfig c;
    c.suite = suite;
    return c;
}

std::string run_with_threads(SuiteConfig cfg, const char* threads)
{
    ::setenv("HESSKIT_THREADS", threads, 1);
    const auto text = to_json(run_suite(cfg));
    ::unsetenv("HESSKIT_THREADS");
    return text;
}

} // namespace

TEST_CASE("suite names")
{
    const auto& names = suite_names();
    CHECK(names.back() == "all");
    for (const char* s : {"symm", "grid-identities", "radial", "poincare", "schwarz", "minkowski", "sobolev",
                          "dual-sobolev", "trace", "wolff-sandwich", "local-estimate"})
        CHECK(std::find(names.begin(), names.end(), s) != names.end());
}

TEST_CASE("preconditions name the violated invariant")
{
    auto c = config("sobolev");
    c.n = 4;
    c.k = 2;
    const auto why = suite_precondition("sobolev", c);
    REQUIRE(why.has_value());
    CHECK(why->find("2k < n") != std::string::npos);
    CHECK_THROWS_AS((void)run_suite(c), UsageError);

    auto g = config("grid-identities");
    g.n = 5;
    CHECK(suite_precondition("grid-identities", g).has_value());

    auto p = config("poincare");
    p.n = 5;
    p.k = 2;
    p.l = 2;
    CHECK(suite_precondition("poincare", p).has_value());

    auto k = config("symm");
    k.n = 3;
    k.k = 4;
    CHECK_THROWS_AS(k.validate(), UsageError);

    auto t = config("trace");
    t.n = 5;
    t.k = 1;
    t.q = 1.5;
    CHECK(suite_precondition("trace", t).has_value());
}

TEST_CASE("explicit n and k select a single pair")
{
    auto c = config("local-estimate");
    c.n = 4;
    c.k = 1;
    const auto doc = run_suite(c);
    CHECK(doc.pass());
    for (const auto& b : doc.blocks)
        for (const auto& r : b.reports) {
            CHECK(*r.parameter("n") == 4.0);
            CHECK(*r.parameter("k") == 1.0);
        }
}

TEST_CASE("all skips suites whose precondition fails")
{
    auto c = config("all");
    c.n = 6;
    c.k = 3;
    c.samples = 1001;
    c.family = 5;
    const auto doc = run_suite(c);
    CHECK(doc.pass());
    const auto skipped = [&](const std::string& s) {
        return std::any_of(doc.skipped.begin(), doc.skipped.end(), [&](const auto& x) { return x.suite == s; });
    };
    CHECK(skipped("grid-identities"));
    CHECK(skipped("sobolev"));
    CHECK(skipped("wolff-sandwich"));
    CHECK_FALSE(skipped("poincare"));
}

TEST_CASE("reports do not depend on the worker count")
{
    auto c = config("schwarz");
    c.n = 3;
    c.k = 1;
    c.family = 12;
    c.samples = 1001;
    c.seed = 99;
    const auto one = run_with_threads(c, "1");
    const auto four = run_with_threads(c, "4");
    CHECK(one == four);
    c.seed = 100;
    CHECK(run_with_threads(c, "1") != one);
}
