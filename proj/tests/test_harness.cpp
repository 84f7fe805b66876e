#include <doctest.h>

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <string>

#include "acb/errors.hpp"
#include "acb/harness.hpp"

using namespace acb;
using namespace acb::harness;

TEST_CASE("config text parsing") {
    const auto s = parse_config_text("# comment\nn = 512, 1024\n\nsigma=0.5  # trailing\n");
    CHECK(s.size() == 2);
    CHECK(s.at("n") == "512, 1024");
    CHECK(s.at("sigma") == "0.5");
    CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
}

TEST_CASE("resolve applies defaults and overrides") {
    const auto c = resolve("coverage", {{"n", "512,1024"}, {"sigma", "0.5"}, {"seed", "7"}});
    CHECK(c.experiment == "coverage");
    CHECK(c.n == std::vector<std::size_t>{512, 1024});
    CHECK(c.sigma == 0.5);
    CHECK(c.seed == 7);
    CHECK(c.r == 0.75);
    CHECK(c.s == 2.0);

    CHECK(resolve("lowerbound", {}).r == 1.0);
    CHECK(resolve("rates", {}).n.size() >= 4);
}

TEST_CASE("resolve rejects bad input") {
    CHECK_THROWS_AS(resolve("coverage", {{"bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(resolve("coverage", {{"sigma", "abc"}}), ConfigError);
    CHECK_THROWS_AS(resolve("coverage", {{"experiment", "rates"}}), ConfigError);
    CHECK_THROWS_AS(resolve("nonsense", {}), ConfigError);
    CHECK_THROWS_AS(resolve("coverage", {{"alpha", "1.5"}}), ConfigError);
    CHECK_THROWS_AS(run_rates(resolve("rates", {{"n", "1024"}}), serial_executor()), ConfigError);
}

TEST_CASE("echo round trip") {
    for (const auto& name : experiment_names()) {
        const auto c = resolve(name, {{"seed", "99"}, {"sigma", "0.3"}});
        const auto e = echo(c);
        auto again = e;
        again.erase("experiment");
        CHECK(echo(resolve(name, again)) == e);
    }
}

TEST_CASE("pool executor visits every index once and propagates errors") {
    for (const std::size_t jobs : {1u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(100);
        pool_executor(jobs)(hits.size(), [&](std::size_t i) { hits[i]++; });
        for (const auto& h : hits) CHECK(h.load() == 1);
        CHECK_THROWS_AS(pool_executor(jobs)(50, [](std::size_t i) {
            if (i == 17) throw std::runtime_error("boom");
        }),
                        std::runtime_error);
    }
}

TEST_CASE("csv quoting and missing cells") {
    Table t;
    t.columns = {"a", "b", "c"};
    t.add({std::string("x,y"), Cell{}, 1.5});
    t.add({std::string("plain"), 3ULL, true});
    std::ostringstream out;
    write_csv(out, t);
    CHECK(out.str() == "a,b,c\n\"x,y\",,1.5\nplain,3,true\n");
}

TEST_CASE("coverage rows: one per panel truth and n, identical across job counts") {
    const Settings s{{"n", "256,512"}, {"reps", "20"}, {"calib_reps", "200"}, {"M_reps", "50"}};
    const auto c = resolve("coverage", s);
    const auto a = run_coverage(c, pool_executor(1));
    const auto b = run_coverage(c, pool_executor(4));
    CHECK(a.rows.rows.size() == 2 * 5);
    std::ostringstream sa, sb;
    write_csv(sa, a.rows);
    write_csv(sb, b.rows);
    CHECK(sa.str() == sb.str());
}
