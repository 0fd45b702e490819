#include <catch2/catch_amalgamated.hpp>

#include "conedef/catalog.hpp"
#include "conedef/oracles.hpp"

using namespace conedef;

namespace {

const DglaPtr& empty_dgla()
{
    static const DglaPtr Z = [] {
        auto sp = std::make_shared<GradedSpace>(GradedSpace::make({}));
        return std::make_shared<const Dgla>(Dgla::abelian(sp));
    }();
    return Z;
}

// ring morphism from generator images (test helper for fiber products)
ArtinMorphism morphism_on_generators(const ArtinPtr& src, const ArtinPtr& tgt,
                                     const std::vector<RingPoly>& gen_images)
{
    ArtinMorphism f;
    f.src = src;
    f.tgt = tgt;
    for (int i = 0; i < src->dim(); ++i) {
        // image of the monomial = product of generator images
        DenseVec acc(tgt->dim(), Rational(0));
        bool started = false;
        for (size_t v = 0; v < src->vars.size(); ++v)
            for (int e = 0; e < src->monomials[i][v]; ++e) {
                DenseVec gi = ring_poly_element(*tgt, gen_images[v]);
                if (!started) {
                    acc = gi;
                    started = true;
                } else {
                    DenseVec next(tgt->dim(), Rational(0));
                    for (int a = 0; a < tgt->dim(); ++a)
                        if (acc[a] != 0)
                            for (int b = 0; b < tgt->dim(); ++b)
                                if (gi[b] != 0)
                                    for (const auto& [k, c] : tgt->mono_product(a, b))
                                        next[k] += acc[a] * gi[b] * c;
                    acc = next;
                }
            }
        f.images.push_back(acc);
    }
    if (!f.multiplicative())
        throw error("test helper: ring morphism not multiplicative");
    return f;
}

} // namespace

TEST_CASE("catalog entries validate and match pinned cohomology")
{
    for (const auto& e : catalog_entries()) {
        INFO(e.name);
        CHECK(e.diagram.validate().ok());
        CHECK(e.diagram.h.injective() == e.h_injective);
        bool nonneg = e.diagram.M->space->min_degree() >= 0;
        CHECK(nonneg == e.m_nonnegative);
        ConeComplex cone = build_cone(e.diagram);
        for (const auto& [deg, dim] : e.expected_cone_h)
            CHECK(cohomology(cone.cx, deg).dimension == dim);
    }
}

TEST_CASE("cone differential formula")
{
    const auto& e = catalog_entry("gl2-contract");
    const PairDiagram& P = e.diagram;
    auto A = make_artin({"eps"}, 3);

    // D(0,0,m) = (0,0,-dm)
    ConeNil v = cone_zero(P, A, 0);
    v.m.add_term(P.M->space->find("E12.o"), 0, rat(1));
    ConeNil Dv = cone_D(P, v);
    CHECK(Dv.l.is_zero());
    CHECK(Dv.n.is_zero());
    CHECK(Dv.m == -(v.m.d()));

    // D(l,0,0) = (dl, 0, h(l))
    ConeNil w = cone_zero(P, A, 0);
    w.l.add_term(P.L->space->find("E21"), 0, rat(1));
    ConeNil Dw = cone_D(P, w);
    CHECK(Dw.l == w.l.d());
    CHECK(Dw.n.is_zero());
    CHECK(Dw.m == w.l.mapped(P.h));

    // N = M = 0: the cone reduces to (L, d) itself
    PairDiagram lonely{P.L, empty_dgla(), empty_dgla(),
                       DglaMorphism::zero(P.L, empty_dgla()),
                       DglaMorphism::zero(empty_dgla(), empty_dgla())};
    lonely.g = DglaMorphism::zero(lonely.N, lonely.M);
    lonely.h = DglaMorphism::zero(lonely.L, lonely.M);
    ConeComplex cl = build_cone(lonely);
    CHECK(cl.cx.space->dim() == P.L->space->dim());
    for (int d = -1; d <= 1; ++d)
        CHECK(cohomology(cl.cx, d).dimension ==
              cohomology(dgla_complex(P.L), d).dimension);
}

TEST_CASE("long exact sequence of the cone")
{
    // zero diagram: everything zero, trivially exact
    auto Z = empty_dgla();
    PairDiagram zp{Z, Z, Z, DglaMorphism::zero(Z, Z), DglaMorphism::zero(Z, Z)};
    CHECK(cone_les_check(zp).all_exact);

    for (const auto& e : catalog_entries()) {
        INFO(e.name);
        ExactnessReport rep = cone_les_check(e.diagram);
        CHECK(rep.all_exact);
        // reported ranks match independent cohomology calls
        ConeComplex cone = build_cone(e.diagram);
        for (const auto& [deg, dim] : rep.dimC)
            CHECK(dim == cohomology(cone.cx, deg).dimension);
        for (const auto& [deg, dim] : rep.dimM)
            CHECK(dim == cohomology(dgla_complex(e.diagram.M), deg).dimension);
    }
}

TEST_CASE("h = id makes the cone acyclic and H(L) -> H(M) isomorphisms")
{
    const auto& e = catalog_entry("heis-wedge"); // h = g = id
    PairDiagram P = e.diagram;
    PairDiagram collapsed{P.L, P.M, empty_dgla(), P.h, DglaMorphism::zero(empty_dgla(), P.M)};
    collapsed.g = DglaMorphism::zero(collapsed.N, collapsed.M);
    ConeComplex cone = build_cone(collapsed);
    for (int d = cone.cx.space->min_degree(); d <= cone.cx.space->max_degree(); ++d)
        CHECK(cohomology(cone.cx, d).dimension == 0);
    CHECK(cone_les_check(collapsed).all_exact);
}

TEST_CASE("gamma quasi-isomorphism for injective h")
{
    for (const auto& e : catalog_entries()) {
        if (!e.h_injective)
            continue;
        INFO(e.name);
        GammaMap gm = gamma_map(e.diagram);
        CHECK(gm.report.chain_map_ok);
        CHECK(gm.report.quasi_iso);
    }

    // N = 0: gamma(l,n,m) = (0, pi(m)) into the cone over coker(h)
    const auto& e = catalog_entry("gl2-wedge");
    PairDiagram P = e.diagram;
    PairDiagram noN{P.L, P.M, empty_dgla(), P.h, DglaMorphism::zero(empty_dgla(), P.M)};
    GammaMap gm = gamma_map(noN);
    CHECK(gm.report.chain_map_ok);
    CHECK(gm.report.quasi_iso);

    // h = id: both cones acyclic
    PairDiagram idh{P.M, P.M, empty_dgla(), DglaMorphism::id(P.M),
                    DglaMorphism::zero(empty_dgla(), P.M)};
    GammaMap gm2 = gamma_map(idh);
    CHECK(gm2.report.quasi_iso);
    for (const auto& [d, dims] : gm2.report.dims) {
        CHECK(dims.first == 0);
        CHECK(dims.second == 0);
    }

    CHECK_THROWS(gamma_map(catalog_entry("obstructed-pair").diagram));
}

TEST_CASE("mc_pair_verify and its reductions")
{
    const auto& e = catalog_entry("gl2-contract");
    const PairDiagram& P = e.diagram;
    auto A = make_artin({"eps", "delta"}, 3);

    // trivial witness
    CHECK(mc_pair_verify(P, trivial_witness(P, A)));

    // M = N = 0 reduces to is_mc(x)
    auto Z = empty_dgla();
    const auto& ob = catalog_entry("obstructed-pair");
    PairDiagram onlyL{ob.diagram.L, Z, Z, DglaMorphism::zero(ob.diagram.L, Z),
                      DglaMorphism::zero(Z, Z)};
    auto dual = make_artin({"eps"}, 2);
    PairMCWitness w = trivial_witness(onlyL, dual);
    w.x.add_term(0, 0, rat(1)); // e*eps, MC over the dual numbers
    CHECK(mc_pair_verify(onlyL, w) == is_mc(w.x));

    auto A3 = make_artin({"eps"}, 3);
    PairMCWitness w3 = trivial_witness(onlyL, A3);
    w3.x.add_term(0, 0, rat(1));
    CHECK(!is_mc(w3.x)); // [e,e] = f obstructs at order 2
    CHECK(mc_pair_verify(onlyL, w3) == is_mc(w3.x));

    // N = g = 0 reduces to Manetti's MC_h: e^p * h(x) = 0
    PairDiagram mh{P.L, P.M, Z, P.h, DglaMorphism::zero(Z, P.M)};
    Rng rng(5);
    PairMCWitness wh = trivial_witness(mh, A);
    wh.p = random_nil_in(rng, P.M, A, 0, 2);
    std::string which;
    bool ok = mc_pair_verify(mh, wh, &which);
    bool manetti = gauge_action(wh.p, wh.x.mapped(mh.h)).is_zero();
    CHECK(ok == manetti);
}

TEST_CASE("equivalence relation: reflexivity, action, stabilizer move")
{
    const auto& e = catalog_entry("gl2-contract");
    const PairDiagram& P = e.diagram;
    auto A = make_artin({"eps", "delta"}, 3);
    Rng rng(31);

    for (uint64_t seed = 0; seed < 6; ++seed) {
        auto res = random_mc(P, A, seed);
        REQUIRE(res.witness.has_value());
        const PairMCWitness& w = *res.witness;

        // reflexivity with the zero equivalence witness
        CHECK(pair_equiv_verify(P, w, w, trivial_equiv(P, A)));

        // forward action always verifies
        EquivWitness ew = random_equiv(rng, P, A);
        PairMCWitness w2 = apply_equiv(P, w, ew);
        CHECK(mc_pair_verify(P, w2));
        CHECK(pair_equiv_verify(P, w, w2, ew));

        // pure stabilizer move: a = b = 0, p2 = T • p1
        EquivWitness stab = trivial_equiv(P, A);
        stab.c = random_nil_in(rng, P.M, A, -1, 2);
        PairMCWitness w3 = w;
        w3.p = bch(equiv_T(P, w, stab), w.p);
        CHECK(pair_equiv_verify(P, w, w3, stab));

        // a corrupted witness fails with a named equation
        PairMCWitness bad = w2;
        bad.p.add_term(P.M->space->indices_in_degree(0)[0], 0, rat(1));
        std::string which;
        if (mc_pair_verify(P, bad)) {
            CHECK(!pair_equiv_verify(P, w, bad, ew, &which));
            CHECK(!which.empty());
        }
    }
}

TEST_CASE("equiv_solve recovers equivalences order by order")
{
    for (const auto& name : {std::string("gl2-contract"), std::string("heis-wedge")}) {
        const PairDiagram& P = catalog_entry(name).diagram;
        auto A = make_artin({"eps", "delta"}, 3);
        Rng rng(41);
        for (uint64_t seed = 10; seed < 14; ++seed) {
            auto res = random_mc(P, A, seed);
            REQUIRE(res.witness.has_value());
            EquivWitness ew = random_equiv(rng, P, A);
            PairMCWitness w2 = apply_equiv(P, *res.witness, ew);
            EquivSolveOutcome out = equiv_solve(P, *res.witness, w2);
            REQUIRE(out.witness.has_value());
            CHECK(pair_equiv_verify(P, *res.witness, w2, *out.witness));
        }
    }
}

TEST_CASE("tangent space agrees with the independent first-order oracle")
{
    for (const auto& e : catalog_entries()) {
        INFO(e.name);
        TangentResult t = tangent_space(e.diagram);
        CHECK(t.dimension == e.expected_cone_h.at(1));
        CHECK(t.dimension == oracles::first_order_moduli_dimension(e.diagram));
    }
}

TEST_CASE("obstruction class of the obstructed pair is nonzero and no lift exists")
{
    const auto& e = catalog_entry("obstructed-pair");
    auto A3 = make_artin({"eps"}, 3);
    SmallExtension se = make_small_extension(A3, {{{rat(1), {2}}}});
    PairMCWitness w = obstructed_first_order_witness(se.quotient);
    REQUIRE(mc_pair_verify(e.diagram, w));

    ObstructionClass ob = obstruction_class(e.diagram, se, w);
    CHECK(!ob.zero);
    // the cocycle is (1/2) f eps^2 in the L component
    CHECK(ob.cocycle.l.c.at({1, 1}) == rat(1, 2));
    CHECK(ob.cocycle.n.is_zero());
    CHECK(ob.cocycle.m.is_zero());

    auto lifted = lift_mc(e.diagram, se, w);
    CHECK(std::holds_alternative<ObstructionClass>(lifted));

    // exhaustive linear oracle agrees: no lift exists
    CHECK(!oracles::lift_exists(e.diagram, se, w));
}

TEST_CASE("obstruction class is independent of the lift choice")
{
    const auto& e = catalog_entry("obstructed-pair");
    auto A3 = make_artin({"eps"}, 3);
    SmallExtension se = make_small_extension(A3, {{{rat(1), {2}}}});
    PairMCWitness w = obstructed_first_order_witness(se.quotient);

    ObstructionClass base = obstruction_class(e.diagram, se, w);
    Rng rng(53);
    for (int trial = 0; trial < 4; ++trial) {
        // random lift: canonical lift plus arbitrary J-terms
        PairMCWitness lift{lift_nil(se, w.x, e.diagram.L), lift_nil(se, w.y, e.diagram.N),
                           lift_nil(se, w.p, e.diagram.M)};
        lift.x.add_term(0, 1, rng.small_rational());
        lift.y.add_term(0, 1, rng.small_rational());
        lift.p.add_term(0, 1, rng.small_rational());
        ObstructionClass ob = obstruction_class(e.diagram, se, w, lift);
        CHECK(ob.reduced == base.reduced);
        CHECK(!ob.zero);
    }
}

TEST_CASE("unobstructed entries lift across small extensions")
{
    auto A3 = make_artin({"eps"}, 3);
    SmallExtension se = make_small_extension(A3, {{{rat(1), {2}}}});
    for (const auto& name :
         {std::string("abelian-line"), std::string("abelian-shift"), std::string("heis-wedge"),
          std::string("gl2-contract")}) {
        INFO(name);
        const PairDiagram& P = catalog_entry(name).diagram;
        for (uint64_t seed = 0; seed < 3; ++seed) {
            auto res = random_mc(P, se.quotient, seed);
            REQUIRE(res.witness.has_value());
            ObstructionClass ob = obstruction_class(P, se, *res.witness);
            CHECK(ob.zero);
            auto lifted = lift_mc(P, se, *res.witness);
            REQUIRE(std::holds_alternative<PairMCWitness>(lifted));
            CHECK(mc_pair_verify(P, std::get<PairMCWitness>(lifted)));
            CHECK(oracles::lift_exists(P, se, *res.witness));
        }
    }
}

TEST_CASE("trivial extension returns the witness itself")
{
    auto A2 = make_artin({"eps"}, 2);
    SmallExtension se = make_small_extension(A2, {});
    CHECK(se.J.dim() == 0);
    CHECK(se.quotient->dim() == A2->dim());
    const PairDiagram& P = catalog_entry("heis-wedge").diagram;
    auto res = random_mc(P, se.quotient, 3);
    REQUIRE(res.witness.has_value());
    auto lifted = lift_mc(P, se, *res.witness);
    REQUIRE(std::holds_alternative<PairMCWitness>(lifted));
    CHECK(std::get<PairMCWitness>(lifted).x.c == res.witness->x.c);
}

TEST_CASE("homogeneity: witnesses over a fiber product glue and project")
{
    // D = B ×_A C for B = Q[s]/s^3, C = Q[t]/t^3, A = Q[u]/u^2
    auto B = make_artin({"s"}, 3);
    auto C = make_artin({"t"}, 3);
    auto A = make_artin({"u"}, 2);
    auto D = make_artin({"x", "y"}, 4,
                        {{{rat(1), {3, 0}}}, {{rat(1), {1, 1}}}, {{rat(1), {0, 2}}}});

    ArtinMorphism pB = morphism_on_generators(D, B, {{{rat(1), {1}}}, {{rat(1), {2}}}});
    ArtinMorphism pC = morphism_on_generators(D, C, {{{rat(1), {1}}}, {}});
    ArtinMorphism bA = morphism_on_generators(B, A, {{{rat(1), {1}}}});
    ArtinMorphism cA = morphism_on_generators(C, A, {{{rat(1), {1}}}});

    const PairDiagram& P = catalog_entry("heis-wedge").diagram;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        auto res = random_mc(P, D, seed);
        REQUIRE(res.witness.has_value());
        const PairMCWitness& wD = *res.witness;

        auto project = [&](const ArtinMorphism& f, const PairMCWitness& w) {
            return PairMCWitness{apply_ring_morphism(f, w.x, P.L), apply_ring_morphism(f, w.y, P.N),
                                 apply_ring_morphism(f, w.p, P.M)};
        };
        PairMCWitness wB = project(pB, wD);
        PairMCWitness wC = project(pC, wD);
        CHECK(mc_pair_verify(P, wB));
        CHECK(mc_pair_verify(P, wC));

        // the two projections agree over A
        PairMCWitness wBA = project(bA, wB);
        PairMCWitness wCA = project(cA, wC);
        CHECK(wBA == wCA);

        // glue back: solve the stacked linear system per basis element
        const int nB = B->dim(), nC = C->dim(), nD = D->dim();
        std::vector<DenseVec> cols;
        for (int j = 0; j < nD; ++j) {
            DenseVec col(nB + nC, Rational(0));
            for (int k = 0; k < nB; ++k)
                col[k] = pB.images[j][k];
            for (int k = 0; k < nC; ++k)
                col[nB + k] = pC.images[j][k];
            cols.push_back(std::move(col));
        }
        Mat glue = Mat::from_columns(cols, nB + nC);
        auto glue_nil = [&](const Nil& xb, const Nil& xc, const DglaPtr& V, int deg) {
            Nil out(V, D, deg);
            for (int b = 0; b < V->space->dim(); ++b) {
                DenseVec rhs(nB + nC, Rational(0));
                DenseVec vb = xb.ring_vector(b), vc = xc.ring_vector(b);
                for (int k = 0; k < nB; ++k)
                    rhs[k] = vb[k];
                for (int k = 0; k < nC; ++k)
                    rhs[nB + k] = vc[k];
                auto sol = solve(glue, rhs);
                REQUIRE(sol.has_value());
                for (int j = 0; j < nD; ++j)
                    if ((*sol)[j] != 0)
                        out.add_term(b, j, (*sol)[j]);
            }
            return out;
        };
        PairMCWitness glued{glue_nil(wB.x, wC.x, P.L, 1), glue_nil(wB.y, wC.y, P.N, 1),
                            glue_nil(wB.p, wC.p, P.M, 0)};
        CHECK(glued == wD);
        CHECK(mc_pair_verify(P, glued));
    }
}
