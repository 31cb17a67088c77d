#include <doctest.h>

#include <random>

#include "fkdet/errors.hpp"
#include "fkdet/groups.hpp"

using namespace fkdet;

namespace {

GroupElement random_element(std::mt19937_64& rng, const GroupDescriptor& G, int spread) {
    std::uniform_int_distribution<std::int64_t> d(-spread, spread);
    GroupElement g{std::vector<std::int64_t>(G.dimension())};
    for (auto& c : g.coords) c = d(rng);
    return g;
}

}  // namespace

TEST_CASE("Z^2 multiplication is componentwise") {
    auto Z2 = GroupDescriptor::free_abelian(2);
    CHECK(multiply(Z2, {1, 0}, {0, 1}) == GroupElement{1, 1});
}

TEST_CASE("Heisenberg law and inverse") {
    auto H = GroupDescriptor::heisenberg();
    GroupElement a{1, 0, 0}, b{0, 1, 0};
    CHECK(multiply(H, a, b) == GroupElement{1, 1, 1});
    CHECK(multiply(H, b, a) == GroupElement{1, 1, 0});
    CHECK(inverse(H, {1, 1, 1}) == GroupElement{-1, -1, 0});
    CHECK(inverse(H, H.identity()) == H.identity());
    CHECK(inverse(GroupDescriptor::free_abelian(1), {3}) == GroupElement{-3});
}

TEST_CASE("mismatched descriptors are rejected") {
    auto H = GroupDescriptor::heisenberg();
    CHECK_THROWS_AS(multiply(H, {1, 0}, {0, 1, 0}), Error);
    try {
        multiply(H, {1, 0}, {0, 1, 0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DescriptorMismatch);
    }
}

TEST_CASE("random associativity and two-sided inverses") {
    std::mt19937_64 rng(7);
    std::vector<GroupDescriptor> groups = {
        GroupDescriptor::free_abelian(3), GroupDescriptor::heisenberg(),
        GroupDescriptor::direct_product({GroupDescriptor::heisenberg(), GroupDescriptor::free_abelian(1)}),
        GroupDescriptor::finite_cyclic_product({4, 6})};
    for (const auto& G : groups) {
        for (int trial = 0; trial < 200; ++trial) {
            GroupElement g = random_element(rng, G, 9), h = random_element(rng, G, 9), k = random_element(rng, G, 9);
            if (G.kind() == GroupKind::FiniteCyclicProduct) {
                g = FiniteQuotient(G, G.moduli()).project(GroupElement(std::vector<std::int64_t>{g[0] & 3, h[1] < 0 ? 0 : h[1] % 6}));
                h = G.identity();
                h.coords[0] = 3;
                h.coords[1] = 5;
                k = G.generators()[1].element;
            }
            CHECK(G.multiply(G.multiply(g, h), k) == G.multiply(g, G.multiply(h, k)));
            CHECK(G.multiply(g, G.inverse(g)) == G.identity());
            CHECK(G.multiply(G.inverse(g), g) == G.identity());
            CHECK(G.multiply(G.identity(), g) == g);
        }
    }
}

TEST_CASE("word balls") {
    auto Z = GroupDescriptor::free_abelian(1);
    auto B = word_ball(Z, 3);
    CHECK(B.size() == 7);
    for (int x = -3; x <= 3; ++x) CHECK(B.contains(GroupElement{x}));
    CHECK(B.length(GroupElement{-2}) == 2);
    CHECK(B.length(GroupElement{4}) == -1);

    auto H = GroupDescriptor::heisenberg();
    CHECK(word_ball(H, 0).size() == 1);
    CHECK(word_ball(H, 1).size() == 5);
    CHECK(word_ball(H, 2).size() == 17);

    std::size_t prev = 0;
    for (int r = 0; r <= 8; ++r) {
        auto ball = word_ball(H, r);
        CHECK(ball.size() >= prev);
        prev = ball.size();
        CHECK(ball.contains(H.identity()));
    }
    // polynomial growth of degree 4: doubling ratio stays in a sanity band
    for (int r = 2; r <= 6; ++r) {
        const double ratio = static_cast<double>(word_ball(H, 2 * r).size()) / static_cast<double>(word_ball(H, r).size());
        CHECK(ratio < 4.0 * 16.0);
        CHECK(ratio > 2.0);
    }
}

TEST_CASE("ball spheres are sorted and nested by length") {
    auto H = GroupDescriptor::heisenberg();
    auto ball = word_ball(H, 4);
    std::size_t total = 0;
    for (int r = 0; r <= 4; ++r) {
        auto s = ball.sphere(r);
        total += s.size();
        for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1] < s[i]);
        for (const auto& g : s) CHECK(ball.length(g) == r);
    }
    CHECK(total == ball.size());
}

TEST_CASE("word ball capacity") {
    auto H = GroupDescriptor::heisenberg();
    CHECK_THROWS_AS(word_ball(H, 10, 100), Error);
}

TEST_CASE("projection to finite quotients") {
    auto Z = GroupDescriptor::free_abelian(1);
    FiniteQuotient q4(Z, {4});
    CHECK(q4.project(GroupElement{7}) == GroupElement{3});
    CHECK(q4.project(GroupElement{-1}) == GroupElement{3});
    CHECK(q4.project(Z.identity()) == q4.group().identity());
    CHECK(q4.order() == 4);

    auto H = GroupDescriptor::heisenberg();
    auto q2 = FiniteQuotient::congruence(H, 2);
    CHECK(q2.order() == 8);
    GroupElement g{1, 1, 1};
    CHECK(q2.project(H.multiply(g, g)) == q2.group().multiply(q2.project(g), q2.project(g)));

    auto q5 = FiniteQuotient::congruence(H, 5);
    CHECK(q5.order() == 125);
    auto Z3 = GroupDescriptor::free_abelian(3);
    CHECK(FiniteQuotient(Z3, {2, 3, 5}).order() == 30);
}

TEST_CASE("projection is a homomorphism on random pairs") {
    std::mt19937_64 rng(11);
    auto H = GroupDescriptor::heisenberg();
    for (std::int64_t m : {2, 3, 4, 6}) {
        auto q = FiniteQuotient::congruence(H, m);
        for (int t = 0; t < 100; ++t) {
            auto g = random_element(rng, H, 20), h = random_element(rng, H, 20);
            CHECK(q.project(H.multiply(g, h)) == q.group().multiply(q.project(g), q.project(h)));
            CHECK(q.project(H.inverse(g)) == q.group().inverse(q.project(g)));
        }
    }
}

TEST_CASE("quotient index is a bijection") {
    auto H = GroupDescriptor::heisenberg();
    auto q = FiniteQuotient::congruence(H, 3);
    const auto& els = q.elements();
    REQUIRE(els.size() == 27);
    for (std::size_t i = 0; i < els.size(); ++i) {
        CHECK(q.index_of(els[i]) == i);
        if (i) CHECK(els[i - 1] < els[i]);
    }
}

TEST_CASE("Heisenberg quotient requires central modulus dividing the others") {
    auto H = GroupDescriptor::heisenberg();
    CHECK_THROWS_AS(FiniteQuotient(H, {2, 2, 4}), Error);
    CHECK_NOTHROW(FiniteQuotient(H, {4, 4, 2}));
}

TEST_CASE("symmetric lift") {
    auto Z = GroupDescriptor::free_abelian(1);
    FiniteQuotient q(Z, {5});
    CHECK(q.symmetric_lift(GroupElement{3}) == GroupElement{-2});
    CHECK(q.symmetric_lift(GroupElement{2}) == GroupElement{2});
    FiniteQuotient q4(Z, {4});
    CHECK(q4.symmetric_lift(GroupElement{2}) == GroupElement{2});
    CHECK(q4.symmetric_lift(GroupElement{3}) == GroupElement{-1});
}

TEST_CASE("chain validation") {
    auto Z = GroupDescriptor::free_abelian(1);
    CHECK_NOTHROW(QuotientChain(Z, {2, 4, 8}));
    CHECK_THROWS_AS(QuotientChain(Z, {2, 3}), Error);
    CHECK_THROWS_AS(QuotientChain(Z, {4, 2}), Error);
    CHECK_THROWS_AS(QuotientChain(Z, std::vector<std::int64_t>{}), Error);
}

TEST_CASE("chain separation") {
    auto Z = GroupDescriptor::free_abelian(1);
    QuotientChain c(Z, {2, 4, 8});
    std::vector<GroupElement> K = {GroupElement{-1}, GroupElement{0}, GroupElement{1}};
    CHECK(c[verify_chain_separation(c, K)].moduli()[0] == 4);
    std::vector<GroupElement> id = {Z.identity()};
    CHECK(verify_chain_separation(c, id) == 0);

    std::vector<GroupElement> wide = {GroupElement{-4}, GroupElement{4}};
    CHECK_THROWS_AS(verify_chain_separation(c, wide), Error);

    auto H = GroupDescriptor::heisenberg();
    QuotientChain ch(H, {2, 4});
    auto ball = word_ball(H, 1);
    CHECK(ch[verify_chain_separation(ch, ball.elements())].moduli()[0] == 4);
}

TEST_CASE("generator names") {
    CHECK(GroupDescriptor::free_abelian(2).generator("y") == GroupElement{0, 1});
    CHECK(GroupDescriptor::heisenberg().generator("b") == GroupElement{0, 1, 0});
    CHECK(!GroupDescriptor::heisenberg().generator("c").has_value());
    auto P = GroupDescriptor::direct_product({GroupDescriptor::free_abelian(1), GroupDescriptor::heisenberg()});
    CHECK(P.generator("a_1") == GroupElement{0, 1, 0, 0});
    CHECK(P.dimension() == 4);
}
