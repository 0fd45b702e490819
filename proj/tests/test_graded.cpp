#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "conedef/graded.hpp"
#include "conedef/linalg.hpp"

using namespace conedef;

TEST_CASE("rational helpers")
{
    CHECK(rat(2, 4) == rat(1, 2));
    CHECK(*parse_rational("5/3") == rat(5, 3));
    CHECK(*parse_rational("-7") == rat(-7));
    CHECK(!parse_rational("1/0").has_value());
    CHECK(!parse_rational("x").has_value());
    CHECK(rat_pow(rat(1, 2), 3) == rat(1, 8));
    CHECK(binomial(5, 2) == 10);
}

TEST_CASE("koszul sign basic cases")
{
    // identity permutation, any degrees -> +1
    CHECK(koszul_sign(Permutation::identity(3), {1, 2, 5}) == 1);
    // swap of two odd elements -> -1
    CHECK(koszul_sign(Permutation({1, 0}), {1, 1}) == -1);
    // odd*even product is even -> +1
    CHECK(koszul_sign(Permutation({1, 0}), {1, 2}) == 1);
    CHECK_THROWS(koszul_sign(Permutation({1, 0}), {1, 2, 3}));
}

TEST_CASE("koszul sign is multiplicative under composition")
{
    std::vector<int> degrees = {1, 2, 3, 1, 0};
    auto perms = all_permutations(5);
    for (int trial = 0; trial < 40; ++trial) {
        const Permutation& s = perms[(trial * 37) % perms.size()];
        const Permutation& t = perms[(trial * 53 + 11) % perms.size()];
        Permutation st = s.compose(t);
        // degrees permuted by s, as seen by t
        std::vector<int> sdeg(degrees.size());
        for (size_t k = 0; k < degrees.size(); ++k)
            sdeg[k] = degrees[s(static_cast<int>(k))];
        CHECK(koszul_sign(st, degrees) == koszul_sign(s, degrees) * koszul_sign(t, sdeg));
    }
}

TEST_CASE("unshuffles")
{
    auto s11 = unshuffles(1, 1);
    REQUIRE(s11.size() == 2);
    CHECK(s11[0] == Permutation::identity(2));
    CHECK(s11[1] == Permutation({1, 0}));

    CHECK(unshuffles(2, 1).size() == 3);
    auto s03 = unshuffles(0, 3);
    REQUIRE(s03.size() == 1);
    CHECK(s03[0] == Permutation::identity(3));

    // |S(p,q)| = C(p+q,p), monotone blocks, and block-image injectivity
    for (int p = 0; p <= 4; ++p)
        for (int q = 0; q <= 4; ++q) {
            auto list = unshuffles(p, q);
            CHECK(static_cast<long>(list.size()) == binomial(p + q, p).get_si());
            std::set<std::vector<int>> first_blocks;
            for (const auto& s : list) {
                REQUIRE(s.is_bijection());
                for (int k = 1; k < p; ++k)
                    CHECK(s(k - 1) < s(k));
                for (int k = p + 1; k < p + q; ++k)
                    CHECK(s(k - 1) < s(k));
                std::vector<int> fb;
                for (int k = 0; k < p; ++k)
                    fb.push_back(s(k));
                first_blocks.insert(fb);
            }
            CHECK(first_blocks.size() == list.size());
        }
}

TEST_CASE("graded space and shift")
{
    auto V = GradedSpace::make({{"a", 0}, {"b", 1}});
    CHECK(V.dim() == 2);
    CHECK(V.find("b") == 1);
    CHECK(V.find("zz") == -1);

    GradedSpace W = shift(V, 1);
    CHECK(W.degrees == std::vector<int>{-1, 0});
    CHECK(W.names == V.names);
    CHECK(shift(shift(V, 1), -1) == V);
    CHECK(shift(V, 0) == V);
}

TEST_CASE("graded map composition and degree validation")
{
    auto V = std::make_shared<GradedSpace>(GradedSpace::make({{"a", 0}, {"b", 1}}));
    GradedMap d(V, V, 1);
    d.set(0, 1, rat(3, 2)); // a -> 3/2 b
    CHECK(d.degree_violations().empty());
    CHECK(d.apply(sv_unit(0)) == sv_unit(1, rat(3, 2)));

    GradedMap id = GradedMap::identity(V);
    CHECK(id.compose(d) == d);
    CHECK(d.compose(id) == d);
    CHECK(d.compose(d).is_zero());
    CHECK(d.compose(d).degree == 2);

    GradedMap bad(V, V, 1);
    bad.set(1, 0, rat(1)); // b -> a has degree -1
    CHECK(bad.degree_violations().size() == 1);
}

TEST_CASE("linear algebra over Q")
{
    Mat m(3, 3);
    m.at(0, 0) = 1;
    m.at(0, 1) = 2;
    m.at(0, 2) = 3;
    m.at(1, 0) = 2;
    m.at(1, 1) = 4;
    m.at(1, 2) = 6;
    m.at(2, 0) = 1;
    m.at(2, 1) = 0;
    m.at(2, 2) = 1;
    CHECK(rank(m) == 2);

    auto ker = kernel_basis(m);
    REQUIRE(ker.size() == 1);
    Mat copy = m;
    CHECK(dv_is_zero(copy.apply(ker[0])));

    DenseVec b = {6, 12, 2};
    auto x = solve(m, b);
    REQUIRE(x.has_value());
    CHECK(m.apply(*x) == b);

    DenseVec bad = {1, 0, 0};
    CHECK(!solve(m, bad).has_value());

    RowSpace rs(3);
    CHECK(rs.insert({1, 2, 3}));
    CHECK(rs.insert({0, 1, 1}));
    CHECK(!rs.insert({1, 3, 4}));
    CHECK(rs.dim() == 2);
    CHECK(rs.contains({2, 5, 7}));
    CHECK(!rs.contains({0, 0, 1}));
}
