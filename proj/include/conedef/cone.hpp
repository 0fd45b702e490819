#pragma once

#include <optional>
#include <variant>

#include "nil.hpp"

namespace conedef {

// Diagram of DGLA morphisms h: L -> M <- N : g with common target.
struct PairDiagram {
    DglaPtr L;
    DglaPtr M;
    DglaPtr N;
    DglaMorphism h; // L -> M
    DglaMorphism g; // N -> M

    ValidityReport validate() const
    {
        ValidityReport rep;
        auto merge = [&rep](const ValidityReport& r, const std::string& tag) {
            for (const auto& it : r.items)
                rep.fail(tag + ":" + it.axiom, it.witness);
        };
        merge(validate_dgla(*L), "L");
        merge(validate_dgla(*M), "M");
        merge(validate_dgla(*N), "N");
        merge(validate_morphism(h), "h");
        merge(validate_morphism(g), "g");
        if (h.src.get() != L.get() || h.tgt.get() != M.get())
            rep.fail("diagram", "h does not map L to M");
        if (g.src.get() != N.get() || g.tgt.get() != M.get())
            rep.fail("diagram", "g does not map N to M");
        return rep;
    }
};

// Element (l, n, m) of the suspended mapping cone, tensored with m_A.
// For a cone element of degree k: deg l = deg n = k, deg m = k - 1.
struct ConeNil {
    Nil l;
    Nil n;
    Nil m;

    int cone_degree() const { return l.degree; }

    ConeNil operator+(const ConeNil& o) const { return {l + o.l, n + o.n, m + o.m}; }
    ConeNil operator-(const ConeNil& o) const { return {l - o.l, n - o.n, m - o.m}; }
    ConeNil operator*(const Rational& q) const { return {l * q, n * q, m * q}; }
    bool is_zero() const { return l.is_zero() && n.is_zero() && m.is_zero(); }
    bool operator==(const ConeNil& o) const { return l == o.l && n == o.n && m == o.m; }
};

inline ConeNil cone_zero(const PairDiagram& P, const ArtinPtr& A, int degree)
{
    return {Nil::zero(P.L, A, degree), Nil::zero(P.N, A, degree), Nil::zero(P.M, A, degree - 1)};
}

// D(l,n,m) = (dl, dn, -dm - g(n) + h(l))
inline ConeNil cone_D(const PairDiagram& P, const ConeNil& v)
{
    return {v.l.d(), v.n.d(), -(v.m.d()) - v.n.mapped(P.g) + v.l.mapped(P.h)};
}

// suspended differential <.>_1 = (-dl, -dn, dm + g(n) - h(l))
inline ConeNil cone_q1(const PairDiagram& P, const ConeNil& v)
{
    return cone_D(P, v) * rat(-1);
}

// ---------------------------------------------------------------------------
// The cone as a flat complex (for exact cohomology).

struct ConeComplex {
    PairDiagram P;
    Complex cx;
    int offL = 0, offN = 0, offM = 0;

    int flatL(int i) const { return offL + i; }
    int flatN(int i) const { return offN + i; }
    int flatM(int i) const { return offM + i; }

    // split a flat vector into cone components (plain coefficients)
    void split(const SparseVec& v, SparseVec& l, SparseVec& n, SparseVec& m) const
    {
        for (const auto& [i, c] : v) {
            if (i >= offM)
                m.emplace(i - offM, c);
            else if (i >= offN)
                n.emplace(i - offN, c);
            else
                l.emplace(i - offL, c);
        }
    }
};

inline ConeComplex build_cone(const PairDiagram& P)
{
    ValidityReport rep = P.validate();
    if (!rep.ok())
        throw error("build_cone: invalid pair diagram: " + rep.summary());

    ConeComplex cone;
    cone.P = P;
    std::vector<std::pair<std::string, int>> basis;
    cone.offL = 0;
    for (int i = 0; i < P.L->space->dim(); ++i)
        basis.emplace_back("L." + P.L->space->names[i], P.L->space->degrees[i]);
    cone.offN = static_cast<int>(basis.size());
    for (int i = 0; i < P.N->space->dim(); ++i)
        basis.emplace_back("N." + P.N->space->names[i], P.N->space->degrees[i]);
    cone.offM = static_cast<int>(basis.size());
    for (int i = 0; i < P.M->space->dim(); ++i)
        basis.emplace_back("M." + P.M->space->names[i], P.M->space->degrees[i] + 1);
    auto sp = std::make_shared<GradedSpace>(GradedSpace::make(basis));

    GradedMap D(sp, sp, 1);
    for (int i = 0; i < P.L->space->dim(); ++i) {
        for (const auto& [t, c] : P.L->d.column(i))
            D.add(cone.flatL(i), cone.flatL(t), c);
        for (const auto& [t, c] : P.h.map.column(i))
            D.add(cone.flatL(i), cone.flatM(t), c); // +h(l)
    }
    for (int i = 0; i < P.N->space->dim(); ++i) {
        for (const auto& [t, c] : P.N->d.column(i))
            D.add(cone.flatN(i), cone.flatN(t), c);
        for (const auto& [t, c] : P.g.map.column(i))
            D.add(cone.flatN(i), cone.flatM(t), -c); // -g(n)
    }
    for (int i = 0; i < P.M->space->dim(); ++i)
        for (const auto& [t, c] : P.M->d.column(i))
            D.add(cone.flatM(i), cone.flatM(t), -c); // -dm

    cone.cx = Complex{sp, std::move(D)};
    ValidityReport crep = cone.cx.validate();
    if (!crep.ok())
        throw error("build_cone: D^2 != 0: " + crep.summary());
    return cone;
}

// ---------------------------------------------------------------------------
// Cohomology coordinates: express a cocycle in terms of the chosen
// representatives modulo coboundaries. Used for induced maps on cohomology.

struct CohomCoords {
    std::vector<int> slice;      // flat indices of the degree slice
    std::map<int, int> slice_pos;
    std::vector<SparseVec> reps; // cohomology representatives (full-space coords)
    Mat colmat;                  // [coboundary basis | representatives]
    int nbound = 0;

    static CohomCoords make(const Complex& C, int degree)
    {
        CohomCoords cc;
        cc.slice = C.space->indices_in_degree(degree);
        for (size_t k = 0; k < cc.slice.size(); ++k)
            cc.slice_pos[cc.slice[k]] = static_cast<int>(k);

        std::vector<int> dom_prev, cod_prev;
        Mat dprev = degree_slice_matrix(C, degree - 1, dom_prev, cod_prev);
        RowSpace bound(static_cast<int>(cc.slice.size()));
        std::vector<DenseVec> bound_basis;
        for (int j = 0; j < dprev.ncols; ++j) {
            DenseVec col(dprev.nrows, Rational(0));
            for (int r = 0; r < dprev.nrows; ++r)
                col[r] = dprev.at(r, j);
            if (bound.insert(col))
                bound_basis.push_back(col);
        }
        cc.nbound = static_cast<int>(bound_basis.size());

        CohomologyResult coh = cohomology(C, degree);
        cc.reps = coh.representatives;

        std::vector<DenseVec> cols = bound_basis;
        for (const auto& rep : cc.reps) {
            DenseVec v(cc.slice.size(), Rational(0));
            for (const auto& [i, c] : rep)
                v[cc.slice_pos.at(i)] = c;
            cols.push_back(std::move(v));
        }
        cc.colmat = Mat::from_columns(cols, static_cast<int>(cc.slice.size()));
        return cc;
    }

    int dim() const { return static_cast<int>(reps.size()); }

    // coordinates of the class of a cocycle (throws if not in the span)
    DenseVec coords(const SparseVec& v) const
    {
        DenseVec b(slice.size(), Rational(0));
        for (const auto& [i, c] : v) {
            auto it = slice_pos.find(i);
            if (it == slice_pos.end())
                throw error("CohomCoords: vector leaves the degree slice");
            b[it->second] = c;
        }
        auto x = solve(colmat, b);
        if (!x)
            throw error("CohomCoords: vector is not a cocycle of this degree");
        DenseVec out(dim(), Rational(0));
        for (int k = 0; k < dim(); ++k)
            out[k] = (*x)[nbound + k];
        return out;
    }
};

// ---------------------------------------------------------------------------
// Long exact sequence of the cone:
//   ... -> H^i(C) -> H^i(L ⊕ N) -> H^i(M) -> H^{i+1}(C) -> ...
// with middle map (l,n) -> h(l) - g(n) and connecting map m -> (0,0,m).

struct ExactnessReport {
    struct Node {
        int degree;
        std::string at; // which group
        int rank_in, dim_kernel;
        bool exact;
    };
    std::vector<Node> nodes;
    std::map<int, int> dimC, dimLN, dimM;
    bool all_exact = true;
};

inline ExactnessReport cone_les_check(const PairDiagram& P)
{
    ConeComplex cone = build_cone(P);
    // L ⊕ N as a flat complex
    Dgla LN = product_dgla(*P.L, *P.N, "L.", "N.");
    Complex cln{LN.space, LN.d};
    Complex cm = dgla_complex(P.M);

    int lo = cone.cx.space->min_degree() - 1;
    int hi = cone.cx.space->max_degree() + 1;

    ExactnessReport report;

    std::map<int, CohomCoords> HC, HLN, HM;
    for (int i = lo; i <= hi + 1; ++i) {
        HC.emplace(i, CohomCoords::make(cone.cx, i));
        HLN.emplace(i, CohomCoords::make(cln, i));
        HM.emplace(i, CohomCoords::make(cm, i));
        report.dimC[i] = HC.at(i).dim();
        report.dimLN[i] = HLN.at(i).dim();
        report.dimM[i] = HM.at(i).dim();
    }

    const int dimL = P.L->space->dim();
    const int dimN = P.N->space->dim();

    // chain-level maps on flat coordinates
    auto pr = [&](const SparseVec& v) {
        SparseVec out; // cone flat -> LN flat (same layout for L,N parts)
        for (const auto& [i, c] : v)
            if (i < dimL + dimN)
                out.emplace(i, c);
        return out;
    };
    auto phi = [&](const SparseVec& v) {
        SparseVec l, n, out;
        for (const auto& [i, c] : v)
            if (i < dimL)
                l.emplace(i, c);
            else
                n.emplace(i - dimL, c);
        out = P.h.map.apply(l);
        sv_add(out, P.g.map.apply(n), rat(-1));
        return out;
    };
    auto conn = [&](const SparseVec& v) {
        SparseVec out;
        for (const auto& [i, c] : v)
            out.emplace(cone.flatM(i), c);
        return out;
    };

    auto induced = [](const CohomCoords& src, const CohomCoords& tgt, auto&& f) {
        Mat m(tgt.dim(), src.dim());
        for (int j = 0; j < src.dim(); ++j) {
            DenseVec col = tgt.coords(f(src.reps[j]));
            for (int i = 0; i < tgt.dim(); ++i)
                m.at(i, j) = col[i];
        }
        return m;
    };

    auto check_node = [&](int degree, const std::string& at, const Mat& into, const Mat& outof) {
        // exact iff outof ∘ into = 0 and rank(into) = dim ker(outof)
        bool composite_zero = true;
        for (int j = 0; j < into.ncols && composite_zero; ++j) {
            DenseVec col(into.nrows, Rational(0));
            for (int i = 0; i < into.nrows; ++i)
                col[i] = into.at(i, j);
            if (!dv_is_zero(outof.apply(col)))
                composite_zero = false;
        }
        int rk_in = into.ncols ? rank(into) : 0;
        int rk_out = outof.ncols ? rank(outof) : 0;
        int ker_out = into.nrows - rk_out;
        bool exact = composite_zero && (rk_in == ker_out);
        report.nodes.push_back({degree, at, rk_in, ker_out, exact});
        if (!exact)
            report.all_exact = false;
    };

    for (int i = lo; i <= hi; ++i) {
        Mat m_pr = induced(HC.at(i), HLN.at(i), pr);
        Mat m_phi = induced(HLN.at(i), HM.at(i), phi);
        Mat m_conn = induced(HM.at(i), HC.at(i + 1), conn);
        Mat m_pr_next = induced(HC.at(i + 1), HLN.at(i + 1), pr);

        check_node(i, "H^i(L+N)", m_pr, m_phi);
        check_node(i, "H^i(M)", m_phi, m_conn);
        check_node(i + 1, "H^i(C)", m_conn, m_pr_next);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Injective-h reduction: gamma(l,n,m) = (-n, pi(m)) into the cone of
// pi ∘ g : N -> coker(h), a quasi-isomorphism of complexes.

struct GammaReport {
    bool chain_map_ok = true;
    bool quasi_iso = true;
    std::map<int, std::pair<int, int>> dims; // degree -> (dim H(cone), dim H(target))
};

struct GammaMap {
    Complex target; // cone of pi∘g, flat: N-part then coker-part (degree+1)
    int dimN = 0;
    // pi per M basis element: expressed over the chosen coker basis
    std::vector<SparseVec> pi_of_basis;
    std::vector<int> coker_rep; // chosen M-basis positions representing coker basis
    GammaReport report;

    SparseVec apply(const ConeComplex& cone, const SparseVec& flat_cone_vec) const
    {
        SparseVec l, n, m;
        cone.split(flat_cone_vec, l, n, m);
        SparseVec out;
        for (const auto& [i, c] : n)
            out[i] -= c; // -n
        for (const auto& [i, c] : m)
            for (const auto& [k, pc] : pi_of_basis[i]) {
                out[dimN + k] += c * pc;
                if (out[dimN + k] == 0)
                    out.erase(dimN + k);
            }
        for (auto it = out.begin(); it != out.end();)
            it = it->second == 0 ? out.erase(it) : std::next(it);
        return out;
    }
};

inline GammaMap gamma_map(const PairDiagram& P)
{
    if (!P.h.injective())
        throw error("gamma_map: h is not injective");
    ConeComplex cone = build_cone(P);

    const GradedSpace& MS = *P.M->space;
    // image of h in each degree slice, in slice coordinates
    std::map<int, RowSpace> him;
    std::map<int, std::vector<int>> slice_of_degree;
    std::map<int, std::map<int, int>> pos_in_slice;
    for (int d = MS.min_degree(); d <= MS.max_degree(); ++d) {
        slice_of_degree[d] = MS.indices_in_degree(d);
        for (size_t k = 0; k < slice_of_degree[d].size(); ++k)
            pos_in_slice[d][slice_of_degree[d][k]] = static_cast<int>(k);
        him.emplace(d, RowSpace(static_cast<int>(slice_of_degree[d].size())));
    }
    for (int j = 0; j < P.L->space->dim(); ++j) {
        SparseVec col = P.h.map.column(j);
        if (col.empty())
            continue;
        int d = P.L->space->degrees[j];
        DenseVec v(slice_of_degree[d].size(), Rational(0));
        for (const auto& [i, c] : col)
            v[pos_in_slice[d].at(i)] = c;
        him.at(d).insert(std::move(v));
    }

    GammaMap gm;
    gm.dimN = P.N->space->dim();

    // coker basis: non-pivot slice positions, degree by degree
    std::map<int, std::vector<int>> coker_cols; // degree -> coker basis indices (global numbering)
    std::vector<int> coker_degree;
    for (int d = MS.min_degree(); d <= MS.max_degree(); ++d) {
        const auto& slice = slice_of_degree[d];
        std::vector<char> pivot(slice.size(), 0);
        for (int p : him.at(d).pivots)
            pivot[p] = 1;
        for (size_t k = 0; k < slice.size(); ++k)
            if (!pivot[k]) {
                coker_cols[d].push_back(static_cast<int>(gm.coker_rep.size()));
                gm.coker_rep.push_back(slice[k]);
                coker_degree.push_back(d);
            }
    }

    // pi: M -> coker on basis elements
    gm.pi_of_basis.assign(MS.dim(), {});
    for (int i = 0; i < MS.dim(); ++i) {
        int d = MS.degrees[i];
        const auto& slice = slice_of_degree[d];
        DenseVec v(slice.size(), Rational(0));
        v[pos_in_slice[d].at(i)] = 1;
        v = him.at(d).reduce(std::move(v));
        // read coordinates on non-pivot positions
        SparseVec out;
        std::vector<char> pivot(slice.size(), 0);
        for (int p : him.at(d).pivots)
            pivot[p] = 1;
        int pos = 0;
        for (size_t k = 0; k < slice.size(); ++k) {
            if (pivot[k])
                continue;
            if (v[k] != 0)
                out.emplace(coker_cols[d][pos], v[k]);
            ++pos;
        }
        gm.pi_of_basis[i] = std::move(out);
    }

    // coker differential: dbar(class of e) = pi(d e) on representatives
    const int nq = static_cast<int>(gm.coker_rep.size());
    std::vector<SparseVec> dbar(nq);
    for (int k = 0; k < nq; ++k) {
        SparseVec de = P.M->d.column(gm.coker_rep[k]);
        SparseVec out;
        for (const auto& [i, c] : de)
            for (const auto& [q, pc] : gm.pi_of_basis[i]) {
                out[q] += c * pc;
                if (out[q] == 0)
                    out.erase(q);
            }
        dbar[k] = std::move(out);
    }

    // flat target complex: C_phi^i = N^i ⊕ coker^{i-1}, delta(n,c) = (dn, phi(n) - dbar c)
    std::vector<std::pair<std::string, int>> basis;
    for (int i = 0; i < gm.dimN; ++i)
        basis.emplace_back("N." + P.N->space->names[i], P.N->space->degrees[i]);
    for (int k = 0; k < nq; ++k)
        basis.emplace_back("Q." + MS.names[gm.coker_rep[k]], coker_degree[k] + 1);
    auto sp = std::make_shared<GradedSpace>(GradedSpace::make(basis));
    GradedMap delta(sp, sp, 1);
    for (int i = 0; i < gm.dimN; ++i) {
        for (const auto& [t, c] : P.N->d.column(i))
            delta.add(i, t, c);
        // phi(n) = pi(g(n))
        for (const auto& [mi, c] : P.g.map.column(i))
            for (const auto& [q, pc] : gm.pi_of_basis[mi])
                delta.add(i, gm.dimN + q, c * pc);
    }
    for (int k = 0; k < nq; ++k)
        for (const auto& [q, c] : dbar[k])
            delta.add(gm.dimN + k, gm.dimN + q, -c);
    gm.target = Complex{sp, std::move(delta)};
    ValidityReport vr = gm.target.validate();
    if (!vr.ok())
        throw error("gamma_map: target complex invalid: " + vr.summary());

    // chain map: gamma ∘ D = delta ∘ gamma on every cone basis element
    for (int i = 0; i < cone.cx.space->dim(); ++i) {
        SparseVec lhs = gm.apply(cone, cone.cx.d.column(i));
        SparseVec rhs = gm.target.d.apply(gm.apply(cone, sv_unit(i)));
        sv_add(lhs, rhs, rat(-1));
        if (!lhs.empty()) {
            gm.report.chain_map_ok = false;
            break;
        }
    }

    // induced isomorphism on cohomology in every degree
    int lo = cone.cx.space->min_degree() - 1;
    int hi = cone.cx.space->max_degree() + 1;
    for (int d = lo; d <= hi; ++d) {
        CohomCoords src = CohomCoords::make(cone.cx, d);
        CohomCoords tgt = CohomCoords::make(gm.target, d);
        gm.report.dims[d] = {src.dim(), tgt.dim()};
        if (src.dim() != tgt.dim()) {
            gm.report.quasi_iso = false;
            continue;
        }
        if (src.dim() == 0)
            continue;
        Mat m(tgt.dim(), src.dim());
        for (int j = 0; j < src.dim(); ++j) {
            DenseVec col = tgt.coords(gm.apply(cone, src.reps[j]));
            for (int i = 0; i < tgt.dim(); ++i)
                m.at(i, j) = col[i];
        }
        if (rank(m) != src.dim())
            gm.report.quasi_iso = false;
    }
    if (!gm.report.chain_map_ok)
        gm.report.quasi_iso = false;
    return gm;
}

// ---------------------------------------------------------------------------
// The Maurer-Cartan functor of the pair and its equivalence relation.

struct PairMCWitness {
    Nil x; // L^1 ⊗ m_A
    Nil y; // N^1 ⊗ m_A
    Nil p; // log of the group element, M^0 ⊗ m_A

    bool operator==(const PairMCWitness& o) const { return x == o.x && y == o.y && p == o.p; }
};

struct EquivWitness {
    Nil a; // L^0 ⊗ m_A
    Nil b; // N^0 ⊗ m_A
    Nil c; // M^{-1} ⊗ m_A
};

inline PairMCWitness trivial_witness(const PairDiagram& P, const ArtinPtr& A)
{
    return {Nil::zero(P.L, A, 1), Nil::zero(P.N, A, 1), Nil::zero(P.M, A, 0)};
}

inline EquivWitness trivial_equiv(const PairDiagram& P, const ArtinPtr& A)
{
    return {Nil::zero(P.L, A, 0), Nil::zero(P.N, A, 0), Nil::zero(P.M, A, -1)};
}

// the three Maurer-Cartan conditions: dx + [x,x]/2 = 0, dy + [y,y]/2 = 0,
// g(y) = e^p * h(x)
inline bool mc_pair_verify(const PairDiagram& P, const PairMCWitness& w, std::string* which = nullptr)
{
    if (!mc_residual(w.x).is_zero()) {
        if (which)
            *which = "mc_x";
        return false;
    }
    if (!mc_residual(w.y).is_zero()) {
        if (which)
            *which = "mc_y";
        return false;
    }
    if (!(w.y.mapped(P.g) == gauge_action(w.p, w.x.mapped(P.h)))) {
        if (which)
            *which = "group_compatibility";
        return false;
    }
    return true;
}

// T = dc + [g(y1), c]
inline Nil equiv_T(const PairDiagram& P, const PairMCWitness& w1, const EquivWitness& ew)
{
    return ew.c.d() + bracket(w1.y.mapped(P.g), ew.c);
}

// the forward action of an equivalence witness
inline PairMCWitness apply_equiv(const PairDiagram& P, const PairMCWitness& w, const EquivWitness& ew)
{
    Nil T = equiv_T(P, w, ew);
    Nil p2 = bch(ew.b.mapped(P.g), bch(T, bch(w.p, -(ew.a.mapped(P.h)))));
    return {gauge_action(ew.a, w.x), gauge_action(ew.b, w.y), p2};
}

// x2 = e^a * x1, y2 = e^b * y1, e^{p2} = e^{g(b)} e^T e^{p1} e^{-h(a)}
inline bool pair_equiv_verify(const PairDiagram& P, const PairMCWitness& w1, const PairMCWitness& w2,
                              const EquivWitness& ew, std::string* which = nullptr)
{
    std::string sub;
    if (!mc_pair_verify(P, w1, &sub))
        throw error("pair_equiv_verify: first witness is not Maurer-Cartan (" + sub + ")");
    if (!mc_pair_verify(P, w2, &sub))
        throw error("pair_equiv_verify: second witness is not Maurer-Cartan (" + sub + ")");
    if (!(w2.x == gauge_action(ew.a, w1.x))) {
        if (which)
            *which = "x_gauge";
        return false;
    }
    if (!(w2.y == gauge_action(ew.b, w1.y))) {
        if (which)
            *which = "y_gauge";
        return false;
    }
    PairMCWitness moved = apply_equiv(P, w1, ew);
    if (!(w2.p == moved.p)) {
        if (which)
            *which = "group_relation";
        return false;
    }
    return true;
}

// tangent space: H^1 of the cone
struct TangentResult {
    int dimension = 0;
    std::vector<SparseVec> representatives; // flat cone coordinates
};

inline TangentResult tangent_space(const PairDiagram& P)
{
    ConeComplex cone = build_cone(P);
    CohomologyResult res = cohomology(cone.cx, 1);
    return {res.dimension, res.representatives};
}

// ---------------------------------------------------------------------------
// Obstruction theory across a small extension 0 -> J -> A~ -> A -> 0.

struct ObstructionClass {
    ConeNil cocycle;               // (l, k, r) over the total ring, support in J
    std::vector<DenseVec> reduced; // canonical residue per J-coordinate, over the C^2 slice
    bool zero = true;
};

namespace detail {

// flatten the degree-k slice of a ConeNil into per-J-coordinate dense vectors
struct ConeSlice {
    std::vector<int> flat;        // flat cone indices in this degree
    std::map<int, int> pos;       // flat index -> slice position
    const ConeComplex* cone;

    static ConeSlice make(const ConeComplex& cone, int degree)
    {
        ConeSlice s;
        s.cone = &cone;
        s.flat = cone.cx.space->indices_in_degree(degree);
        for (size_t k = 0; k < s.flat.size(); ++k)
            s.pos[s.flat[k]] = static_cast<int>(k);
        return s;
    }

    int dim() const { return static_cast<int>(flat.size()); }
};

inline std::vector<DenseVec> j_components(const ConeSlice& slice, const SmallExtension& se,
                                          const ConeNil& v)
{
    const ConeComplex& cone = *slice.cone;
    std::vector<DenseVec> out(se.J.dim(), DenseVec(slice.dim(), Rational(0)));
    auto scan = [&](const Nil& part, auto&& to_flat) {
        for (int b = 0; b < part.V->space->dim(); ++b) {
            DenseVec rv = part.ring_vector(b);
            if (dv_is_zero(rv))
                continue;
            DenseVec jc = se.j_coords(rv); // throws if not in J
            int flat = to_flat(b);
            for (int r = 0; r < se.J.dim(); ++r)
                if (jc[r] != 0)
                    out[r][slice.pos.at(flat)] = jc[r];
        }
    };
    scan(v.l, [&](int b) { return cone.flatL(b); });
    scan(v.n, [&](int b) { return cone.flatN(b); });
    scan(v.m, [&](int b) { return cone.flatM(b); });
    return out;
}

} // namespace detail

// the (l,k,r) cocycle of a witness over A, lifted arbitrarily to A~
inline ObstructionClass obstruction_class(const PairDiagram& P, const SmallExtension& se,
                                          const PairMCWitness& w,
                                          const std::optional<PairMCWitness>& lift_choice = std::nullopt)
{
    std::string sub;
    if (!mc_pair_verify(P, w, &sub))
        throw error("obstruction_class: witness is not Maurer-Cartan (" + sub + ")");

    PairMCWitness lifted = lift_choice
        ? *lift_choice
        : PairMCWitness{lift_nil(se, w.x, P.L), lift_nil(se, w.y, P.N), lift_nil(se, w.p, P.M)};
    if (lift_choice) {
        if (!(project_nil(se, lifted.x, P.L) == w.x) || !(project_nil(se, lifted.y, P.N) == w.y) ||
            !(project_nil(se, lifted.p, P.M) == w.p))
            throw error("obstruction_class: lift_choice does not lift the witness");
    }

    ConeNil ob{mc_residual(lifted.x), mc_residual(lifted.y),
               -(lifted.y.mapped(P.g)) + gauge_action(lifted.p, lifted.x.mapped(P.h))};

    // sanity: projects to zero, lies in J, and is a D-cocycle
    if (!project_nil(se, ob.l, P.L).is_zero() || !project_nil(se, ob.n, P.N).is_zero() ||
        !project_nil(se, ob.m, P.M).is_zero())
        throw error("obstruction_class: residual does not vanish over the quotient");
    if (!nil_in_J(se, ob.l) || !nil_in_J(se, ob.n) || !nil_in_J(se, ob.m))
        throw error("obstruction_class: residual does not lie in J");
    if (!cone_D(P, ob).is_zero())
        throw error("obstruction_class: residual is not a cocycle");

    ConeComplex cone = build_cone(P);
    detail::ConeSlice slice2 = detail::ConeSlice::make(cone, 2);

    // canonical reduction against the coboundary space D(C^1)
    RowSpace bound(slice2.dim());
    for (int j : cone.cx.space->indices_in_degree(1)) {
        SparseVec col = cone.cx.d.column(j);
        DenseVec v(slice2.dim(), Rational(0));
        for (const auto& [i, c] : col)
            v[slice2.pos.at(i)] = c;
        bound.insert(std::move(v));
    }

    ObstructionClass result;
    result.cocycle = ob;
    result.reduced = detail::j_components(slice2, se, ob);
    for (auto& v : result.reduced) {
        v = bound.reduce(std::move(v));
        if (!dv_is_zero(v))
            result.zero = false;
    }
    return result;
}

// either a verified lift of w over the total ring, or the nonzero class
inline std::variant<PairMCWitness, ObstructionClass> lift_mc(
    const PairDiagram& P, const SmallExtension& se, const PairMCWitness& w,
    const std::optional<PairMCWitness>& lift_choice = std::nullopt)
{
    ObstructionClass ob = obstruction_class(P, se, w, lift_choice);
    if (!ob.zero)
        return ob;

    PairMCWitness lifted = lift_choice
        ? *lift_choice
        : PairMCWitness{lift_nil(se, w.x, P.L), lift_nil(se, w.y, P.N), lift_nil(se, w.p, P.M)};

    ConeComplex cone = build_cone(P);
    detail::ConeSlice slice2 = detail::ConeSlice::make(cone, 2);
    detail::ConeSlice slice1 = detail::ConeSlice::make(cone, 1);

    // solve D(xi, ups, rho) = -(l,k,r) per J-coordinate; J·m = 0 makes the
    // correction exactly linear
    Mat D1(slice2.dim(), slice1.dim());
    for (int j = 0; j < slice1.dim(); ++j)
        for (const auto& [i, c] : cone.cx.d.column(slice1.flat[j]))
            D1.at(slice2.pos.at(i), j) = c;

    std::vector<DenseVec> rhs = detail::j_components(slice2, se, ob.cocycle);
    Nil xl = Nil::zero(P.L, se.total, 1);
    Nil xn = Nil::zero(P.N, se.total, 1);
    Nil xm = Nil::zero(P.M, se.total, 0);
    for (int r = 0; r < se.J.dim(); ++r) {
        for (auto& c : rhs[r])
            c = -c;
        auto sol = solve(D1, rhs[r]);
        if (!sol)
            throw error("lift_mc: class reduced to zero but linear system is inconsistent");
        // distribute the solution over the J basis vector
        const DenseVec& jvec = se.J.rows[r];
        for (int k = 0; k < slice1.dim(); ++k) {
            if ((*sol)[k] == 0)
                continue;
            int flat = slice1.flat[k];
            for (int mono = 0; mono < se.total->dim(); ++mono) {
                if (jvec[mono] == 0)
                    continue;
                Rational coef = (*sol)[k] * jvec[mono];
                if (flat >= cone.offM)
                    xm.add_term(flat - cone.offM, mono, coef);
                else if (flat >= cone.offN)
                    xn.add_term(flat - cone.offN, mono, coef);
                else
                    xl.add_term(flat, mono, coef);
            }
        }
    }

    PairMCWitness out{lifted.x + xl, lifted.y + xn, lifted.p + xm};
    std::string sub;
    if (!mc_pair_verify(P, out, &sub))
        throw error("lift_mc: corrected lift fails verification (" + sub + ")");
    return out;
}

// ---------------------------------------------------------------------------
// Best-effort equivalence solver: m_A-adic order-by-order, each order an
// exact linear system. Returns a verified witness or the failing order.

struct EquivSolveOutcome {
    std::optional<EquivWitness> witness;
    int failed_order = -1;
};

namespace detail {

inline EquivSolveOutcome equiv_solve_once(const PairDiagram& P, const PairMCWitness& w1,
                                          const PairMCWitness& w2)
{
    const ArtinPtr& A = w1.x.ring();
    EquivWitness ew = trivial_equiv(P, A);

    const auto d0L = P.L->space->indices_in_degree(0);
    const auto d1L = P.L->space->indices_in_degree(1);
    const auto d0N = P.N->space->indices_in_degree(0);
    const auto d1N = P.N->space->indices_in_degree(1);
    const auto dm1M = P.M->space->indices_in_degree(-1);
    const auto d0M = P.M->space->indices_in_degree(0);

    const int ncols = static_cast<int>(d0L.size() + d0N.size() + dm1M.size());
    const int nrows = static_cast<int>(d1L.size() + d1N.size() + d0M.size());

    // unknown order-k blocks (da, db, dc) enter the residuals linearly as
    //   -d(da) , -d(db) , g(db) - h(da) + d(dc)
    Mat sys(nrows, ncols);
    std::map<int, int> rowL, rowN, rowM;
    for (size_t i = 0; i < d1L.size(); ++i)
        rowL[d1L[i]] = static_cast<int>(i);
    for (size_t i = 0; i < d1N.size(); ++i)
        rowN[d1N[i]] = static_cast<int>(d1L.size() + i);
    for (size_t i = 0; i < d0M.size(); ++i)
        rowM[d0M[i]] = static_cast<int>(d1L.size() + d1N.size() + i);
    int col = 0;
    for (int j : d0L) {
        for (const auto& [t, c] : P.L->d.column(j))
            sys.at(rowL.at(t), col) -= c;
        for (const auto& [t, c] : P.h.map.column(j))
            sys.at(rowM.at(t), col) -= c;
        ++col;
    }
    for (int j : d0N) {
        for (const auto& [t, c] : P.N->d.column(j))
            sys.at(rowN.at(t), col) -= c;
        for (const auto& [t, c] : P.g.map.column(j))
            sys.at(rowM.at(t), col) += c;
        ++col;
    }
    for (int j : dm1M) {
        for (const auto& [t, c] : P.M->d.column(j))
            sys.at(rowM.at(t), col) += c;
        ++col;
    }

    for (int order = 1; order < A->nilpotency_order; ++order) {
        PairMCWitness moved = apply_equiv(P, w1, ew);
        Nil r1 = w2.x - moved.x;
        Nil r2 = w2.y - moved.y;
        Nil r3 = w2.p - moved.p;
        if (r1.is_zero() && r2.is_zero() && r3.is_zero())
            break;
        // flag components of exact order `order`, one dense rhs per flag vector
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
                        rhs[rows.at(b)] = coords[fr];
                }
            };
            fill(r1, rowL);
            fill(r2, rowN);
            fill(r3, rowM);
            if (dv_is_zero(rhs))
                continue;
            auto sol = solve(sys, rhs);
            if (!sol)
                return {std::nullopt, order};
            // add flag_basis[fr] ⊗ solution to (a, b, c)
            const DenseVec& fv = A->flag_basis[fr];
            int cc = 0;
            for (int j : d0L) {
                for (int mono = 0; mono < A->dim(); ++mono)
                    if (fv[mono] != 0 && (*sol)[cc] != 0)
                        ew.a.add_term(j, mono, (*sol)[cc] * fv[mono]);
                ++cc;
            }
            for (int j : d0N) {
                for (int mono = 0; mono < A->dim(); ++mono)
                    if (fv[mono] != 0 && (*sol)[cc] != 0)
                        ew.b.add_term(j, mono, (*sol)[cc] * fv[mono]);
                ++cc;
            }
            for (int j : dm1M) {
                for (int mono = 0; mono < A->dim(); ++mono)
                    if (fv[mono] != 0 && (*sol)[cc] != 0)
                        ew.c.add_term(j, mono, (*sol)[cc] * fv[mono]);
                ++cc;
            }
        }
    }

    if (pair_equiv_verify(P, w1, w2, ew))
        return {ew, -1};
    return {std::nullopt, A->nilpotency_order};
}

// Exact Newton fallback over all orders jointly. The defect of the greedy
// pass is that a free choice at a low order can block a higher order; the
// Jacobian couples the orders, and each step is still one exact linear
// solve. Directional derivatives are exact Lagrange differentiation of the
// polynomial residual.
inline EquivSolveOutcome equiv_solve_newton(const PairDiagram& P, const PairMCWitness& w1,
                                            const PairMCWitness& w2)
{
    const ArtinPtr& A = w1.x.ring();
    const auto d0L = P.L->space->indices_in_degree(0);
    const auto d0N = P.N->space->indices_in_degree(0);
    const auto dm1M = P.M->space->indices_in_degree(-1);
    const int nm = A->dim();
    const int nunk = static_cast<int>((d0L.size() + d0N.size() + dm1M.size())) * nm;

    auto from_u = [&](const DenseVec& u) {
        EquivWitness ew = trivial_equiv(P, A);
        int pos = 0;
        for (int j : d0L)
            for (int m = 0; m < nm; ++m)
                ew.a.add_term(j, m, u[pos++]);
        for (int j : d0N)
            for (int m = 0; m < nm; ++m)
                ew.b.add_term(j, m, u[pos++]);
        for (int j : dm1M)
            for (int m = 0; m < nm; ++m)
                ew.c.add_term(j, m, u[pos++]);
        return ew;
    };

    const auto d1L = P.L->space->indices_in_degree(1);
    const auto d1N = P.N->space->indices_in_degree(1);
    const auto d0M = P.M->space->indices_in_degree(0);
    const int nres = static_cast<int>((d1L.size() + d1N.size() + d0M.size())) * nm;

    auto residual = [&](const DenseVec& u) {
        PairMCWitness moved = apply_equiv(P, w1, from_u(u));
        DenseVec F(nres, Rational(0));
        int pos = 0;
        auto put = [&](const Nil& have, const Nil& want, const std::vector<int>& idx) {
            for (int j : idx) {
                DenseVec rv = have.ring_vector(j);
                DenseVec wv = want.ring_vector(j);
                for (int m = 0; m < nm; ++m)
                    F[pos++] = rv[m] - wv[m];
            }
        };
        put(moved.x, w2.x, d1L);
        put(moved.y, w2.y, d1N);
        put(moved.p, w2.p, d0M);
        return F;
    };

    // weights of d/dt at t = 0 for exact interpolation on nodes 0..D
    const int D = std::max(1, A->nilpotency_order - 1);
    Mat vand(D + 1, D + 1);
    for (int i = 0; i <= D; ++i) {
        Rational p(1);
        for (int j = 0; j <= D; ++j) {
            vand.at(i, j) = p;
            p *= i;
        }
    }
    std::vector<Rational> dweights(D + 1);
    {
        // solve V^T w = e_1 so that sum w_i f(i) = coefficient of t
        Mat vt(D + 1, D + 1);
        for (int i = 0; i <= D; ++i)
            for (int j = 0; j <= D; ++j)
                vt.at(i, j) = vand.at(j, i);
        DenseVec e1(D + 1, Rational(0));
        e1[1] = 1;
        auto w = solve(vt, e1);
        if (!w)
            throw error("internal: Vandermonde solve failed");
        dweights = *w;
    }

    DenseVec u(nunk, Rational(0));
    for (int iter = 0; iter < 8; ++iter) {
        DenseVec F = residual(u);
        if (dv_is_zero(F)) {
            EquivWitness ew = from_u(u);
            if (pair_equiv_verify(P, w1, w2, ew))
                return {ew, -1};
            return {std::nullopt, A->nilpotency_order};
        }
        Mat J(nres, nunk);
        for (int col = 0; col < nunk; ++col) {
            DenseVec deriv(nres, Rational(0));
            for (int node = 0; node <= D; ++node) {
                if (dweights[node] == 0)
                    continue;
                DenseVec shifted = u;
                shifted[col] += node;
                DenseVec Fv = node == 0 ? F : residual(shifted);
                for (int r = 0; r < nres; ++r)
                    if (Fv[r] != 0)
                        deriv[r] += dweights[node] * Fv[r];
            }
            for (int r = 0; r < nres; ++r)
                J.at(r, col) = deriv[r];
        }
        DenseVec rhs = F;
        for (auto& c : rhs)
            c = -c;
        auto step = solve(J, rhs);
        if (!step)
            return {std::nullopt, A->nilpotency_order};
        bool moved = false;
        for (int k = 0; k < nunk; ++k)
            if ((*step)[k] != 0) {
                u[k] += (*step)[k];
                moved = true;
            }
        if (!moved)
            break;
    }
    return {std::nullopt, A->nilpotency_order};
}

} // namespace detail

// Best-effort equivalence decision: the greedy m_A-adic pass first, then the
// joint Newton pass. Returns a verified witness or the failing order.
inline EquivSolveOutcome equiv_solve(const PairDiagram& P, const PairMCWitness& w1,
                                     const PairMCWitness& w2)
{
    EquivSolveOutcome out = detail::equiv_solve_once(P, w1, w2);
    if (out.witness)
        return out;
    EquivSolveOutcome newton = detail::equiv_solve_newton(P, w1, w2);
    if (newton.witness)
        return newton;
    return out;
}

} // namespace conedef
