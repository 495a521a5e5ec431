#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bapal/check.hpp"
#include "bapal/fmp.hpp"

using namespace bapal;

TEST_CASE("first figure") {
    Model f1 = fig1_model();
    CHECK(f1.size() == 4);
    int A = f1.world_index("A"), B = f1.world_index("B"), TL = f1.world_index("TL"), TR = f1.world_index("TR");
    int a = f1.agent_index(intern("a")), b = f1.agent_index(intern("b"));
    auto& ba = f1.block[static_cast<std::size_t>(a)];
    auto& bb = f1.block[static_cast<std::size_t>(b)];
    CHECK(bb[static_cast<std::size_t>(A)] == bb[static_cast<std::size_t>(B)]);
    CHECK(ba[static_cast<std::size_t>(A)] == ba[static_cast<std::size_t>(TL)]);
    CHECK(ba[static_cast<std::size_t>(B)] == ba[static_cast<std::size_t>(TR)]);
    CHECK(ba[static_cast<std::size_t>(A)] != ba[static_cast<std::size_t>(B)]);

    auto cs = fmp_conjuncts();
    CHECK_FALSE(check(f1, A, fmp_formula()));
    for (int i = 0; i < 4; ++i) CHECK(check(f1, A, cs[static_cast<std::size_t>(i)]));
    CHECK_FALSE(check(f1, A, cs[4]));

    // as drawn: A and B cannot be told apart by a Boolean
    Model lit = fig1_literal();
    CHECK_FALSE(check(lit, "A", cs[3]));
    CHECK(check(lit, "A", cs[4]));
    CHECK_FALSE(check(lit, "A", fmp_formula()));
}

TEST_CASE("truncations of the infinite model") {
    auto cs = fmp_conjuncts();
    for (int m = 1; m <= 4; ++m) {
        Model t = fig2_truncation(m);
        CAPTURE(m);
        CHECK_FALSE(check(t, "A0", fmp_formula()));
    }
    Model t = fig2_truncation(3);
    for (int i = 0; i < 3; ++i) CHECK(check(t, "A0", cs[static_cast<std::size_t>(i)]));
    CHECK(check(t, "A0", cs[3]));
    CHECK_FALSE(check(t, "A0", cs[4]));

    // announcing p_i | ~x keeps A_i and the top row
    for (int i = 0; i < 3; ++i) {
        std::string s = std::to_string(i);
        WorldSet e = extension(t, disj(atom("p_" + s), neg(atom("x"))));
        std::set<std::string> kept;
        for (auto w : e.members()) kept.insert(t.worlds[w]);
        CHECK(kept == std::set<std::string>{"A" + s, "TL0", "TR0", "TL1", "TR1", "TL2", "TR2"});
    }
}

TEST_CASE("small models do not satisfy the formula") {
    for (int k : {1, 2, 3}) {
        FmpReport r = finite_search(k);
        CAPTURE(k);
        CHECK_FALSE(r.counterexample);
        CHECK(r.examined > 0);
        CHECK(r.examined <= r.enumerated);
    }
    auto j = to_json(finite_search(2));
    CHECK(j["outcome"] == "none_found");
}

TEST_CASE("search honours the deadline") {
    Deadline d(0.05);
    CHECK_THROWS_AS(finite_search(6, &d), ResourceExhausted);
}

TEST_CASE("formula file matches the built formula") {
    std::ifstream in(BAPAL_TEST_DATA "/fmp.txt");
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(equal(parse(ss.str()), fmp_formula()));
    std::ifstream mj(BAPAL_TEST_DATA "/fig1.json");
    REQUIRE(mj);
    CHECK(to_json(model_from_json(nlohmann::json::parse(mj))) == to_json(fig1_model()));
}
