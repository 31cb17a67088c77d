#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fkdet/entropy_core.hpp"

using namespace fkdet;

namespace {

const GroupDescriptor Z = GroupDescriptor::free_abelian(1);
const GroupDescriptor H = GroupDescriptor::heisenberg();

IntElement zpoly(std::initializer_list<std::pair<std::int64_t, long>> terms) {
    IntElement h(Z);
    for (auto [k, c] : terms) h.add_term(GroupElement{k}, Integer(c));
    return h;
}

IntElement heis_laplacian(long center) {
    IntElement f(H);
    f.add_term({0, 0, 0}, Integer(center));
    for (GroupElement g : {GroupElement{1, 0, 0}, GroupElement{-1, 0, 0}, GroupElement{0, 1, 0}, GroupElement{0, -1, 0}})
        f.add_term(g, Integer(-1));
    return f;
}

FiniteQuotient zmod(std::int64_t n) { return FiniteQuotient::congruence(Z, n); }

// circulant oracle: prod_k |f(omega^k)| for f on Z/N
double circulant_logdet(const IntElement& f, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        std::complex<double> v = 0.0;
        for (const auto& [g, c] : f.coefficients()) v += c.get_d() * std::polar(1.0, 2.0 * M_PI * k * g[0] / n);
        s += std::log(std::abs(v));
    }
    return s;
}

IntElement random_dominant(const GroupDescriptor& G, std::mt19937_64& rng) {
    const auto gens = standard_generators(G);
    std::uniform_int_distribution<int> coef(-2, 2), pick(0, static_cast<int>(gens.size()) - 1), count(1, 3);
    IntElement f(G);
    long mass = 0;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const int c = coef(rng);
        if (c == 0) continue;
        f.add_term(gens[pick(rng)], Integer(c));
        mass += std::abs(c);
    }
    std::uniform_int_distribution<int> sign(0, 1);
    f.add_term(G.identity(), Integer((mass + 1 + sign(rng)) * (sign(rng) ? 1 : -1)));
    return f;
}

}  // namespace

TEST_CASE("logdet_dense examples") {
    Eigen::MatrixXd m(2, 2);
    m << 2, -1, -1, 2;
    CHECK(logdet_dense(m) == doctest::Approx(std::log(3.0)));
    CHECK(logdet_dense(m, true) == doctest::Approx(std::log(3.0)));
    CHECK(logdet_dense(Eigen::MatrixXd::Identity(7, 7) * -3.0) == doctest::Approx(7 * std::log(3.0)));
    CHECK(logdet_dense(transfer(convert<double>(zpoly({{0, 2}, {1, -1}})), zmod(8))) ==
          doctest::Approx(std::log(255.0)).epsilon(1e-13));
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
    CHECK(std::isinf(logdet_dense(z)));
    z(0, 0) = std::nan("");
    CHECK_THROWS_AS(logdet_dense(z), Error);
    // indefinite symmetric input falls back to LU
    Eigen::MatrixXd s(2, 2);
    s << 1, 2, 2, 1;
    CHECK(logdet_dense(s, true) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("entropy_at_level examples") {
    CHECK(entropy_at_level(zpoly({{0, 2}, {1, -1}}), zmod(2)) == doctest::Approx(0.5 * std::log(3.0)));
    CHECK(entropy_at_level(zpoly({{0, 2}}), zmod(5)) == doctest::Approx(std::log(2.0)));
    CHECK(entropy_at_level(zpoly({{0, 3}, {1, -1}, {-1, -1}}), zmod(3)) == doctest::Approx(std::log(16.0) / 3));
    for (int n : {5, 12, 31}) {
        auto f = zpoly({{0, 1}, {2, 3}, {-1, -5}});
        CHECK(entropy_at_level(f, zmod(n)) == doctest::Approx(circulant_logdet(f, n) / n).epsilon(1e-12));
    }
}

TEST_CASE("fixed_points_exact examples") {
    CHECK(*fixed_points_exact(zpoly({{0, 2}, {1, -1}}), zmod(4)).count == 15);
    CHECK(*fixed_points_exact(zpoly({{0, 3}, {1, -1}, {-1, -1}}), zmod(3)).count == 16);
    for (int n : {1, 2, 7}) CHECK(fixed_points_exact(zpoly({{0, 1}, {1, -1}}), zmod(n)).infinite());
    // 2^N - 1 beyond double precision
    Integer expect = (Integer(1) << 80) - 1;
    CHECK(*fixed_points_exact(zpoly({{0, 2}, {1, -1}}), zmod(80)).count == expect);
}

TEST_CASE("entropy_converge on 2 - x") {
    QuotientChain chain(Z, {2, 4, 8, 16, 32});
    ConvergeOptions opt;
    opt.cauchy_tol = 1e-12;
    opt.exact_order_cap = 32;
    auto rep = entropy_converge(zpoly({{0, 2}, {1, -1}}), chain, opt);
    REQUIRE(rep.rows.size() == 5);
    for (const auto& row : rep.rows) {
        const double n = static_cast<double>(row.order);
        CHECK(row.value == doctest::Approx(std::log(std::pow(2.0, n) - 1) / n).epsilon(1e-13));
        CHECK(*row.fixed_points == (Integer(1) << row.order) - 1);
        CHECK_FALSE(row.flagged);
    }
    CHECK(std::fabs(rep.estimate - std::log(2.0)) < 1e-9);
    CHECK(rep.monotone);
    CHECK_FALSE(rep.cauchy_fired);
    REQUIRE(rep.bracket);
    CHECK(rep.bracket->lower <= rep.estimate);
    CHECK(rep.estimate <= rep.bracket->upper);
}

TEST_CASE("entropy_converge stops on the Cauchy criterion") {
    QuotientChain chain(Z, {2, 4, 8, 16});
    auto rep = entropy_converge(zpoly({{0, 2}}), chain);
    CHECK(rep.rows.size() == 2);
    CHECK(rep.cauchy_fired);
    CHECK(rep.estimate == doctest::Approx(std::log(2.0)));
}

TEST_CASE("entropy_converge with threads matches sequential") {
    QuotientChain chain(Z, {3, 6, 12, 24, 48, 96});
    auto f = zpoly({{0, 3}, {1, -1}, {-1, -1}});
    ConvergeOptions a, b;
    a.cauchy_tol = b.cauchy_tol = 1e-14;
    b.threads = 4;
    auto ra = entropy_converge(f, chain, a);
    auto rb = entropy_converge(f, chain, b);
    REQUIRE(ra.rows.size() == rb.rows.size());
    for (std::size_t i = 0; i < ra.rows.size(); ++i) CHECK(ra.rows[i].value == rb.rows[i].value);
}

TEST_CASE("entropy_converge errors and advisories") {
    QuotientChain big(Z, {10000, 20000});
    CHECK_THROWS_AS(entropy_converge(zpoly({{0, 2}, {1, -1}}), big), Error);
    QuotientChain chain(Z, {2, 4});
    auto rep = entropy_converge(zpoly({{0, 1}, {1, -1}}), chain);
    CHECK(rep.advisory);
    CHECK(rep.rows[0].flagged);
    // a certified f with a singular level is an internal inconsistency
    ConvergeOptions opt;
    opt.certificate = certify_invertible(zpoly({{0, 2}, {1, -1}}));
    CHECK_THROWS_AS(entropy_converge(zpoly({{0, 1}, {1, -1}}), chain, opt), Error);
}

TEST_CASE("richardson is opt-in") {
    QuotientChain chain(Z, {4, 8});
    ConvergeOptions opt;
    auto rep = entropy_converge(zpoly({{0, 3}, {1, -1}, {-1, -1}}), chain, opt);
    CHECK_FALSE(rep.richardson);
    opt.richardson = true;
    rep = entropy_converge(zpoly({{0, 3}, {1, -1}, {-1, -1}}), chain, opt);
    CHECK(rep.richardson);
}

TEST_CASE("entropy_bounds examples") {
    auto f = convert<double>(zpoly({{0, 2}, {1, -1}}));
    auto cert = certify_invertible(f);
    auto b = entropy_bounds(f, cert, 1);
    CHECK(b.upper == doctest::Approx(std::log(3.0)));
    CHECK(b.lower == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    // positive coefficients: ||(f^{-1})^k|| = 1, the lower end stays at 0
    auto b4 = entropy_bounds(f, cert, 4);
    CHECK(std::fabs(b4.lower) < 1e-10);
    CHECK(b4.upper <= b.upper);

    auto s = convert<double>(zpoly({{0, 2}}));
    auto bs = entropy_bounds(s, certify_invertible(s), 3);
    CHECK(bs.lower == doctest::Approx(std::log(2.0)));
    CHECK(bs.upper == doctest::Approx(std::log(2.0)));

    auto h = convert<double>(heis_laplacian(5));
    auto hc = certify_invertible(h);
    auto bh = entropy_bounds(h, hc, 1);
    CHECK(bh.upper == doctest::Approx(std::log(9.0)));
    CHECK(bh.lower >= -1e-6);
    CHECK_THROWS_AS(entropy_bounds(h, InvertibilityCertificate{}, 1), Error);
}

TEST_CASE("level values lie in the bracket") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        auto f = random_dominant(Z, rng);
        auto fr = convert<double>(f);
        auto b = entropy_bounds(fr, certify_invertible(fr), 3);
        for (int n : {3, 8, 17}) {
            const double v = entropy_at_level(f, zmod(n));
            CHECK(v >= b.lower - 1e-9);
            CHECK(v <= b.upper + 1e-9);
        }
    }
}

TEST_CASE("multiplicativity and involution per level") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 8; ++t) {
        for (const auto& G : {Z, H}) {
            auto f = random_dominant(G, rng);
            auto g = random_dominant(G, rng);
            auto q = FiniteQuotient::congruence(G, G == H ? 3 : 7);
            const double hf = entropy_at_level(f, q), hg = entropy_at_level(g, q);
            CHECK(entropy_at_level(f * g, q) == doctest::Approx(hf + hg).epsilon(1e-10));
            CHECK(entropy_at_level(involute(f), q) == doctest::Approx(hf).epsilon(1e-10));
            auto ef = fixed_points_exact(f, q), eg = fixed_points_exact(g, q);
            CHECK(*fixed_points_exact(f * g, q).count == *ef.count * *eg.count);
            CHECK(*fixed_points_exact(involute(f), q).count == *ef.count);
        }
    }
}

TEST_CASE("monotonicity for self-adjoint pairs") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        auto f = random_dominant(Z, rng);
        auto g = f * involute(f);
        auto g2 = g;
        g2.add_term(Z.identity(), Integer(1));
        for (int n : {2, 5, 9}) CHECK(entropy_at_level(g, zmod(n)) <= entropy_at_level(g2, zmod(n)) + 1e-10);
    }
}

TEST_CASE("separated_lower_bound") {
    auto w = separated_lower_bound(zpoly({{0, 2}, {1, -1}}), zmod(4));
    CHECK(w.bound == doctest::Approx(std::log(2.0) / 4));
    CHECK(w.shifts.size() == 8);
    CHECK(w.points == 256);
    CHECK(w.base_distance == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(w.min_separation > w.base_distance / 2);

    auto w3 = separated_lower_bound(zpoly({{0, 3}, {1, -1}, {-1, -1}}), zmod(3));
    CHECK(w3.bound == doctest::Approx(std::log(2.0) / 3));
    CHECK(w3.points >= 2);

    CHECK_THROWS_AS(separated_lower_bound(zpoly({{0, 1}}), zmod(4)), Error);
    CHECK_THROWS_AS(separated_lower_bound(zpoly({{0, 1}, {1, -1}}), zmod(4)), Error);
}
