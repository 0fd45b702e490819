#pragma once

#include <random>

#include "cone.hpp"
#include "nil.hpp"
#include "path.hpp"

namespace conedef {

// ---------------------------------------------------------------------------
// Deterministic RNG for samplers and property tests. mt19937_64 output is
// fully specified by the standard and reduction avoids std::uniform_*
// distributions, whose streams are implementation-defined.

struct Rng {
    std::mt19937_64 gen;

    explicit Rng(uint64_t seed) : gen(seed) {}

    int uniform(int lo, int hi) // inclusive bounds
    {
        return lo + static_cast<int>(gen() % static_cast<uint64_t>(hi - lo + 1));
    }

    Rational small_rational(int max_abs = 3)
    {
        int num = uniform(-max_abs, max_abs);
        int den = uniform(1, 2);
        return rat(num, den);
    }

    Rational nonzero_rational(int max_abs = 3)
    {
        Rational q = small_rational(max_abs);
        return q == 0 ? Rational(1) : q;
    }
};

// ---------------------------------------------------------------------------
// Lie algebra data (concentrated in degree 0) for the g ⊗ Λ construction.

struct LieAlgebra {
    std::vector<std::string> names;
    std::map<std::pair<int, int>, SparseVec> brackets; // i < j only

    static LieAlgebra gl2()
    {
        LieAlgebra g;
        g.names = {"E11", "E12", "E21", "E22"};
        const int E11 = 0, E12 = 1, E21 = 2, E22 = 3;
        g.brackets[{E11, E12}] = sv_unit(E12);
        g.brackets[{E11, E21}] = sv_unit(E21, rat(-1));
        g.brackets[{E12, E21}] = SparseVec{{E11, rat(1)}, {E22, rat(-1)}};
        g.brackets[{E12, E22}] = sv_unit(E12);
        g.brackets[{E21, E22}] = sv_unit(E21, rat(-1));
        return g;
    }

    // upper triangular 2x2
    static LieAlgebra borel2()
    {
        LieAlgebra g;
        g.names = {"E11", "E12", "E22"};
        g.brackets[{0, 1}] = sv_unit(1);
        g.brackets[{1, 2}] = sv_unit(1);
        return g;
    }

    // diagonal 2x2 (abelian)
    static LieAlgebra diag2()
    {
        LieAlgebra g;
        g.names = {"E11", "E22"};
        return g;
    }

    // Heisenberg: [X,Y] = Z
    static LieAlgebra heisenberg()
    {
        LieAlgebra g;
        g.names = {"X", "Y", "Z"};
        g.brackets[{0, 1}] = sv_unit(2);
        return g;
    }

    static LieAlgebra abelian(std::vector<std::string> names)
    {
        LieAlgebra g;
        g.names = std::move(names);
        return g;
    }
};

// Differential on the exterior factor: generator name -> value, a sum of
// scalar multiples of generator subsets (empty subset = the unit).
using ExteriorDifferential = std::map<std::string, std::vector<std::pair<Rational, std::vector<std::string>>>>;

// g ⊗ Λ(generators): bracket [x⊗α, y⊗β] = [x,y] ⊗ α∧β and differential
// 1 ⊗ d_Λ, with d_Λ the degree-+1 derivation given by differential_spec.
// Exterior generators must have odd degree.
inline DglaPtr make_tensor_dgla(const LieAlgebra& g,
                                const std::vector<std::pair<std::string, int>>& exterior_generators,
                                const ExteriorDifferential& differential_spec = {})
{
    const int ng = static_cast<int>(g.names.size());
    const int ne = static_cast<int>(exterior_generators.size());
    if (ne > 20)
        throw error("make_tensor_dgla: too many exterior generators");
    for (const auto& [name, deg] : exterior_generators)
        if (deg % 2 == 0)
            throw error("make_tensor_dgla: exterior generator " + name + " must have odd degree");

    auto subset_degree = [&](unsigned mask) {
        int d = 0;
        for (int k = 0; k < ne; ++k)
            if (mask & (1u << k))
                d += exterior_generators[k].second;
        return d;
    };
    auto subset_name = [&](unsigned mask) {
        std::string s;
        for (int k = 0; k < ne; ++k)
            if (mask & (1u << k))
                s += exterior_generators[k].first;
        return s;
    };

    std::vector<std::pair<std::string, int>> basis;
    const unsigned nmask = 1u << ne;
    for (unsigned mask = 0; mask < nmask; ++mask)
        for (int x = 0; x < ng; ++x) {
            std::string nm = g.names[x];
            if (mask)
                nm += "." + subset_name(mask);
            basis.emplace_back(nm, subset_degree(mask));
        }
    auto sp = std::make_shared<GradedSpace>(GradedSpace::make(basis));
    auto index_of = [&](int x, unsigned mask) { return static_cast<int>(mask) * ng + x; };

    // wedge of two subsets: zero on overlap, else merge sign (all gens odd)
    auto wedge = [&](unsigned a, unsigned b) -> std::pair<int, unsigned> {
        if (a & b)
            return {0, 0};
        int inv = 0;
        for (int i = 0; i < ne; ++i)
            if (a & (1u << i))
                for (int j = 0; j < i; ++j)
                    if (b & (1u << j))
                        ++inv;
        return {inv % 2 == 0 ? 1 : -1, a | b};
    };

    // d on a subset monomial, as a sparse vector over subset masks
    auto gen_diff = [&](int k) {
        std::map<unsigned, Rational> out;
        auto it = differential_spec.find(exterior_generators[k].first);
        if (it == differential_spec.end())
            return out;
        for (const auto& [c, gens] : it->second) {
            unsigned m = 0;
            int sign = 1;
            bool dead = false;
            for (const auto& gname : gens) {
                int gi = -1;
                for (int t = 0; t < ne; ++t)
                    if (exterior_generators[t].first == gname)
                        gi = t;
                if (gi < 0)
                    throw error("make_tensor_dgla: unknown generator in differential: " + gname);
                auto [s, merged] = wedge(m, 1u << gi);
                if (s == 0) {
                    dead = true;
                    break;
                }
                sign *= s;
                m = merged;
            }
            if (!dead)
                out[m] += c * sign;
        }
        return out;
    };

    GradedMap d(sp, sp, 1);
    for (unsigned mask = 0; mask < nmask; ++mask) {
        // derivation over the factors of the subset
        std::vector<int> members;
        for (int k = 0; k < ne; ++k)
            if (mask & (1u << k))
                members.push_back(k);
        std::map<unsigned, Rational> dmask;
        for (size_t j = 0; j < members.size(); ++j) {
            int sign = (j % 2 == 0) ? 1 : -1; // all generators odd
            unsigned prefix = 0, suffix = 0;
            for (size_t t = 0; t < j; ++t)
                prefix |= 1u << members[t];
            for (size_t t = j + 1; t < members.size(); ++t)
                suffix |= 1u << members[t];
            for (const auto& [dm, dc] : gen_diff(members[j])) {
                auto [s1, m1] = wedge(prefix, dm);
                if (s1 == 0)
                    continue;
                auto [s2, m2] = wedge(m1, suffix);
                if (s2 == 0)
                    continue;
                dmask[m2] += dc * Rational(sign * s1 * s2);
            }
        }
        for (const auto& [m2, c] : dmask)
            if (c != 0)
                for (int x = 0; x < ng; ++x)
                    d.set(index_of(x, mask), index_of(x, m2), c);
    }

    Dgla out(sp, std::move(d));
    auto lie_bracket = [&](int x, int y) -> SparseVec {
        if (x == y)
            return {};
        if (x < y) {
            auto it = g.brackets.find({x, y});
            return it == g.brackets.end() ? SparseVec{} : it->second;
        }
        auto it = g.brackets.find({y, x});
        return it == g.brackets.end() ? SparseVec{} : sv_scale(it->second, rat(-1));
    };
    for (unsigned ma = 0; ma < nmask; ++ma)
        for (unsigned mb = 0; mb < nmask; ++mb) {
            auto [s, mc] = wedge(ma, mb);
            if (s == 0)
                continue;
            for (int x = 0; x < ng; ++x)
                for (int y = 0; y < ng; ++y) {
                    int i = index_of(x, ma), j = index_of(y, mb);
                    if (i > j)
                        continue; // antisymmetry fills the rest
                    for (const auto& [z, c] : lie_bracket(x, y))
                        out.add_bracket(i, j, index_of(z, mc), c * s);
                }
        }

    auto ptr = std::make_shared<const Dgla>(std::move(out));
    ValidityReport rep = validate_dgla(*ptr);
    if (!rep.ok())
        throw error("make_tensor_dgla produced an invalid DGLA: " + rep.summary());
    return ptr;
}

// Inclusion morphism matching basis names; every source name must resolve.
inline DglaMorphism inclusion_by_names(const DglaPtr& src, const DglaPtr& tgt)
{
    GradedMap m(src->space, tgt->space, 0);
    for (int i = 0; i < src->space->dim(); ++i) {
        int t = tgt->space->find(src->space->names[i]);
        if (t < 0)
            throw error("inclusion_by_names: unresolved basis name " + src->space->names[i]);
        m.set(i, t, rat(1));
    }
    return DglaMorphism(src, tgt, std::move(m));
}

// ---------------------------------------------------------------------------
// Built-in pair diagrams with documented properties. Dimensions of the cone
// cohomology are pinned as golden data; regenerate with `conedef catalog
// --dims` after changing an entry.

struct CatalogEntry {
    std::string name;
    std::string description;
    PairDiagram diagram;
    bool h_injective = false;
    bool m_nonnegative = false;           // M^{<0} = 0
    std::map<int, int> expected_cone_h;   // degree -> dim H(cone)
};

namespace detail {

inline CatalogEntry make_abelian_line()
{
    auto sp = std::make_shared<GradedSpace>(GradedSpace::make({{"e", 1}}));
    auto L = std::make_shared<const Dgla>(Dgla::abelian(sp));
    CatalogEntry e;
    e.name = "abelian-line";
    e.description = "one-dimensional abelian DGLA in degree 1, h = g = id";
    e.diagram = {L, L, L, DglaMorphism::id(L), DglaMorphism::id(L)};
    e.h_injective = true;
    e.m_nonnegative = true;
    e.expected_cone_h = {{0, 0}, {1, 1}, {2, 0}};
    return e;
}

inline CatalogEntry make_abelian_shift()
{
    auto sp = std::make_shared<GradedSpace>(
        GradedSpace::make({{"u", -1}, {"v", 0}, {"w", 0}, {"e", 1}}));
    GradedMap d(sp, sp, 1);
    d.set(0, 1, rat(1)); // du = v
    auto L = std::make_shared<const Dgla>(Dgla(sp, std::move(d)));
    CatalogEntry e;
    e.name = "abelian-shift";
    e.description = "abelian with degrees -1..1 and du = v, h = g = id";
    e.diagram = {L, L, L, DglaMorphism::id(L), DglaMorphism::id(L)};
    e.h_injective = true;
    e.m_nonnegative = false;
    e.expected_cone_h = {{-1, 0}, {0, 1}, {1, 1}, {2, 0}};
    return e;
}

inline CatalogEntry make_gl2_wedge()
{
    auto M = make_tensor_dgla(LieAlgebra::gl2(), {{"n1", 1}, {"n2", 1}});
    auto L = make_tensor_dgla(LieAlgebra::diag2(), {{"n1", 1}});
    auto N = make_tensor_dgla(LieAlgebra::borel2(), {{"n2", 1}});
    CatalogEntry e;
    e.name = "gl2-wedge";
    e.description = "gl2 tensor the exterior algebra on two degree-1 generators, zero "
                    "differential; L = diagonal part with n1, N = Borel part with n2";
    e.diagram = {L, M, N, inclusion_by_names(L, M), inclusion_by_names(N, M)};
    e.h_injective = true;
    e.m_nonnegative = true;
    e.expected_cone_h = {{0, 2}, {1, 1}, {2, 3}, {3, 4}};
    return e;
}

inline CatalogEntry make_gl2_contract()
{
    ExteriorDifferential diff;
    diff["o"] = {{rat(1), {}}};
    auto M = make_tensor_dgla(LieAlgebra::gl2(), {{"o", -1}}, diff);
    auto L = make_tensor_dgla(LieAlgebra::gl2(), {});
    auto N = make_tensor_dgla(LieAlgebra::borel2(), {{"o", -1}}, diff);
    CatalogEntry e;
    e.name = "gl2-contract";
    e.description = "gl2 tensor a contractible exterior factor in degrees -1,0; "
                    "exercises M^{-1} and nontrivial stabilizers";
    e.diagram = {L, M, N, inclusion_by_names(L, M), inclusion_by_names(N, M)};
    e.h_injective = true;
    e.m_nonnegative = false;
    e.expected_cone_h = {{-1, 0}, {0, 4}, {1, 0}};
    return e;
}

inline CatalogEntry make_heis_wedge()
{
    auto L = make_tensor_dgla(LieAlgebra::heisenberg(), {{"w", 1}});
    CatalogEntry e;
    e.name = "heis-wedge";
    e.description = "nilpotent Heisenberg algebra tensor one degree-1 generator; "
                    "all gauge series terminate quickly";
    e.diagram = {L, L, L, DglaMorphism::id(L), DglaMorphism::id(L)};
    e.h_injective = true;
    e.m_nonnegative = true;
    e.expected_cone_h = {{0, 3}, {1, 3}, {2, 0}};
    return e;
}

inline CatalogEntry make_obstructed_pair()
{
    auto spL = std::make_shared<GradedSpace>(GradedSpace::make({{"e", 1}, {"f", 2}}));
    Dgla Ld(spL, GradedMap::zero(spL, spL, 1));
    Ld.add_bracket(0, 0, 1, rat(1)); // [e,e] = f
    auto L = std::make_shared<const Dgla>(std::move(Ld));
    auto spM = std::make_shared<GradedSpace>(GradedSpace::make({{"m", 0}}));
    auto M = std::make_shared<const Dgla>(Dgla::abelian(spM));
    auto spN = std::make_shared<GradedSpace>(GradedSpace::make({{"nn", 1}}));
    auto N = std::make_shared<const Dgla>(Dgla::abelian(spN));
    CatalogEntry e;
    e.name = "obstructed-pair";
    e.description = "[e,e] = f gives a nonzero H^2 class; the first-order witness "
                    "x = e*eps does not lift from Q[eps]/eps^2 to Q[eps]/eps^3";
    e.diagram = {L, M, N, DglaMorphism::zero(L, M), DglaMorphism::zero(N, M)};
    e.h_injective = false;
    e.m_nonnegative = true;
    e.expected_cone_h = {{0, 0}, {1, 3}, {2, 1}};
    return e;
}

} // namespace detail

inline const std::vector<CatalogEntry>& catalog_entries()
{
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> v;
        v.push_back(detail::make_abelian_line());
        v.push_back(detail::make_abelian_shift());
        v.push_back(detail::make_gl2_wedge());
        v.push_back(detail::make_gl2_contract());
        v.push_back(detail::make_heis_wedge());
        v.push_back(detail::make_obstructed_pair());
        return v;
    }();
    return entries;
}

inline std::vector<std::string> catalog_list()
{
    std::vector<std::string> names;
    for (const auto& e : catalog_entries())
        names.push_back(e.name);
    return names;
}

inline const CatalogEntry& catalog_entry(const std::string& name)
{
    for (const auto& e : catalog_entries())
        if (e.name == name)
            return e;
    throw error("unknown catalog entry: " + name);
}

// the first-order witness of the obstruction fixture, over Q[eps]/eps^2
inline PairMCWitness obstructed_first_order_witness(const ArtinPtr& dual_numbers)
{
    const CatalogEntry& e = catalog_entry("obstructed-pair");
    PairMCWitness w = trivial_witness(e.diagram, dual_numbers);
    w.x.add_term(0, 0, rat(1)); // e ⊗ eps
    return w;
}

// ---------------------------------------------------------------------------
// Seed-deterministic sampler: a random first-order class, corrected order by
// order (each order an exact linear solve), then scrambled by random gauge
// moves. Either the result passes mc_pair_verify or the order at which the
// correction system became inconsistent is reported.

struct RandomMCResult {
    std::optional<PairMCWitness> witness;
    int obstructed_order = -1;
};

inline Nil random_nil_in(Rng& rng, const DglaPtr& V, const ArtinPtr& A, int degree, int terms)
{
    Nil out(V, A, degree);
    auto idx = V->space->indices_in_degree(degree);
    if (idx.empty() || A->dim() == 0)
        return out;
    for (int t = 0; t < terms; ++t)
        out.add_term(idx[static_cast<size_t>(rng.uniform(0, static_cast<int>(idx.size()) - 1))],
                     rng.uniform(0, A->dim() - 1), rng.small_rational());
    return out;
}

inline RandomMCResult random_mc(const PairDiagram& P, const ArtinPtr& A, uint64_t seed)
{
    Rng rng(seed);
    ConeComplex cone = build_cone(P);
    CohomologyResult h1 = cohomology(cone.cx, 1);

    PairMCWitness w = trivial_witness(P, A);
    if (A->dim() == 0)
        return {w, -1};

    // random first-order term: combination of H^1 representatives tensor
    // order-one ring directions
    std::vector<int> order1;
    for (int r = 0; r < A->dim(); ++r)
        if (A->flag_order[r] == 1)
            order1.push_back(r);
    for (const auto& rep : h1.representatives) {
        if (order1.empty())
            break;
        Rational coef = rng.small_rational();
        if (coef == 0)
            continue;
        const DenseVec& fv = A->flag_basis[order1[static_cast<size_t>(
            rng.uniform(0, static_cast<int>(order1.size()) - 1))]];
        SparseVec l, n, m;
        cone.split(rep, l, n, m);
        for (int mono = 0; mono < A->dim(); ++mono) {
            if (fv[mono] == 0)
                continue;
            for (const auto& [i, c] : l)
                w.x.add_term(i, mono, coef * c * fv[mono]);
            for (const auto& [i, c] : n)
                w.y.add_term(i, mono, coef * c * fv[mono]);
            for (const auto& [i, c] : m)
                w.p.add_term(i, mono, coef * c * fv[mono]);
        }
    }

    // order-by-order correction: unknowns (xi, ups, rho) in C^1, equations
    //   d(xi) = -E1_k, d(ups) = -E2_k, g(ups) - h(xi) + d(rho) = -E3_k
    const auto d1L = P.L->space->indices_in_degree(1);
    const auto d2L = P.L->space->indices_in_degree(2);
    const auto d1N = P.N->space->indices_in_degree(1);
    const auto d2N = P.N->space->indices_in_degree(2);
    const auto d0M = P.M->space->indices_in_degree(0);
    const auto d1M = P.M->space->indices_in_degree(1);

    const int ncols = static_cast<int>(d1L.size() + d1N.size() + d0M.size());
    const int nrows = static_cast<int>(d2L.size() + d2N.size() + d1M.size());
    Mat sys(nrows, ncols);
    std::map<int, int> rowL, rowN, rowM;
    for (size_t i = 0; i < d2L.size(); ++i)
        rowL[d2L[i]] = static_cast<int>(i);
    for (size_t i = 0; i < d2N.size(); ++i)
        rowN[d2N[i]] = static_cast<int>(d2L.size() + i);
    for (size_t i = 0; i < d1M.size(); ++i)
        rowM[d1M[i]] = static_cast<int>(d2L.size() + d2N.size() + i);
    int col = 0;
    for (int j : d1L) {
        for (const auto& [t, c] : P.L->d.column(j))
            sys.at(rowL.at(t), col) += c;
        for (const auto& [t, c] : P.h.map.column(j))
            sys.at(rowM.at(t), col) -= c;
        ++col;
    }
    for (int j : d1N) {
        for (const auto& [t, c] : P.N->d.column(j))
            sys.at(rowN.at(t), col) += c;
        for (const auto& [t, c] : P.g.map.column(j))
            sys.at(rowM.at(t), col) += c;
        ++col;
    }
    for (int j : d0M) {
        for (const auto& [t, c] : P.M->d.column(j))
            sys.at(rowM.at(t), col) += c;
        ++col;
    }

    for (int order = 2; order < A->nilpotency_order; ++order) {
        Nil e1 = mc_residual(w.x);
        Nil e2 = mc_residual(w.y);
        Nil e3 = w.y.mapped(P.g) - gauge_action(w.p, w.x.mapped(P.h));
        if (e1.is_zero() && e2.is_zero() && e3.is_zero())
            break;
        for (int fr = 0; fr < A->dim(); ++fr) {
            if (A->flag_order[fr] != order)
                continue;
            DenseVec rhs(nrows, Rational(0));
            auto fill = [&](const Nil& r, const std::map<int, int>& rows) {
                for (int b = 0; b < r.V->space->dim(); ++b) {
                    DenseVec rv = r.ring_vector(b);
                    if (dv_is_zero(rv))
                        continue;
                    DenseVec coords = A->flag_coords(rv);
                    if (coords[fr] != 0)
                        rhs[rows.at(b)] = -coords[fr];
                }
            };
            fill(e1, rowL);
            fill(e2, rowN);
            fill(e3, rowM);
            if (dv_is_zero(rhs))
                continue;
            auto sol = solve(sys, rhs);
            if (!sol)
                return {std::nullopt, order};
            const DenseVec& fv = A->flag_basis[fr];
            int cc = 0;
            for (int j : d1L) {
                for (int mono = 0; mono < A->dim(); ++mono)
                    if (fv[mono] != 0 && (*sol)[cc] != 0)
                        w.x.add_term(j, mono, (*sol)[cc] * fv[mono]);
                ++cc;
            }
            for (int j : d1N) {
                for (int mono = 0; mono < A->dim(); ++mono)
                    if (fv[mono] != 0 && (*sol)[cc] != 0)
                        w.y.add_term(j, mono, (*sol)[cc] * fv[mono]);
                ++cc;
            }
            for (int j : d0M) {
                for (int mono = 0; mono < A->dim(); ++mono)
                    if (fv[mono] != 0 && (*sol)[cc] != 0)
                        w.p.add_term(j, mono, (*sol)[cc] * fv[mono]);
                ++cc;
            }
        }
    }

    std::string which;
    if (!mc_pair_verify(P, w, &which))
        return {std::nullopt, A->nilpotency_order};

    // scramble by random gauge moves
    EquivWitness ew{random_nil_in(rng, P.L, A, 0, 2), random_nil_in(rng, P.N, A, 0, 2),
                    random_nil_in(rng, P.M, A, -1, 2)};
    PairMCWitness moved = apply_equiv(P, w, ew);
    if (!mc_pair_verify(P, moved, &which))
        throw error("random_mc: gauge move broke the Maurer-Cartan property (" + which + ")");
    return {moved, -1};
}

// random equivalence witness for property tests
inline EquivWitness random_equiv(Rng& rng, const PairDiagram& P, const ArtinPtr& A, int terms = 2)
{
    return {random_nil_in(rng, P.L, A, 0, terms), random_nil_in(rng, P.N, A, 0, terms),
            random_nil_in(rng, P.M, A, -1, terms)};
}

inline ConeNil random_cone_nil(Rng& rng, const PairDiagram& P, const ArtinPtr& A, int degree,
                               int terms = 2)
{
    return {random_nil_in(rng, P.L, A, degree, terms), random_nil_in(rng, P.N, A, degree, terms),
            random_nil_in(rng, P.M, A, degree - 1, terms)};
}

// random member of H_{(h,g)} of the given degree, t-degree <= tdeg:
// endpoints pinned by (l, n), interior t(1-t)-bump plus free dt-part
inline PathTriple random_path_triple(Rng& rng, const PairDiagram& P, const ArtinPtr& A, int degree,
                                     int tdeg)
{
    Nil l = random_nil_in(rng, P.L, A, degree, 2);
    Nil n = random_nil_in(rng, P.N, A, degree, 2);
    PathNil m(P.M, A, degree);
    Nil gn = n.mapped(P.g);
    Nil hl = l.mapped(P.h);
    m.add_t(0, gn);
    m.add_t(1, hl - gn);
    for (int i = 0; i + 2 <= tdeg; ++i) {
        Nil r = random_nil_in(rng, P.M, A, degree, 2);
        m.add_t(i + 1, r);
        m.add_t(i + 2, -r);
    }
    for (int i = 0; i <= tdeg; ++i)
        m.add_dt(i, random_nil_in(rng, P.M, A, degree - 1, 2));
    PathTriple out{l, n, m};
    if (!in_H(P, out))
        throw error("random_path_triple: generated element left H");
    return out;
}

} // namespace conedef
