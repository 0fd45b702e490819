#pragma once

#include <sstream>
#include <utility>

#include "graded.hpp"
#include "linalg.hpp"

namespace conedef {

struct ValidityReport {
    struct Item {
        std::string axiom;   // "degree", "d_squared", "antisymmetry", "jacobi", "leibniz", ...
        std::string witness; // basis tuple that fails
    };
    std::vector<Item> items;

    bool ok() const { return items.empty(); }

    void fail(std::string axiom, std::string witness)
    {
        items.push_back({std::move(axiom), std::move(witness)});
    }

    std::string summary() const
    {
        std::ostringstream os;
        for (const auto& it : items)
            os << it.axiom << " at " << it.witness << "; ";
        return os.str();
    }
};

// Presentation of a differential graded Lie algebra on a named basis:
// differential matrix plus bracket structure constants. Constants are stored
// only for i <= j; the i > j case is derived by graded antisymmetry.
struct Dgla {
    SpacePtr space;
    GradedMap d;
    std::map<std::pair<int, int>, SparseVec> bk;

    Dgla() = default;
    Dgla(SpacePtr s, GradedMap diff) : space(std::move(s)), d(std::move(diff)) {}

    static Dgla abelian(SpacePtr s)
    {
        return Dgla(s, GradedMap::zero(s, s, 1));
    }

    int deg(int i) const { return space->degrees[i]; }

    // Record [e_i, e_j] += c * e_k, normalizing i > j through antisymmetry.
    void add_bracket(int i, int j, int k, const Rational& c)
    {
        if (c == 0)
            return;
        if (i <= j) {
            auto& v = bk[{i, j}];
            v[k] += c;
            if (v[k] == 0)
                v.erase(k);
            if (v.empty())
                bk.erase({i, j});
        } else {
            int s = (deg(i) % 2 != 0 && deg(j) % 2 != 0) ? 1 : -1;
            add_bracket(j, i, k, Rational(s) * c);
        }
    }

    SparseVec bracket_basis(int i, int j) const
    {
        if (i <= j) {
            auto it = bk.find({i, j});
            return it == bk.end() ? SparseVec{} : it->second;
        }
        auto it = bk.find({j, i});
        if (it == bk.end())
            return {};
        int s = (deg(i) % 2 != 0 && deg(j) % 2 != 0) ? 1 : -1;
        return sv_scale(it->second, Rational(s));
    }

    // Bilinear extension; degrees are handled at basis level so mixed-degree
    // vectors are fine.
    SparseVec bracket_vec(const SparseVec& x, const SparseVec& y) const
    {
        SparseVec out;
        for (const auto& [i, ci] : x)
            for (const auto& [j, cj] : y) {
                SparseVec b = bracket_basis(i, j);
                if (!b.empty())
                    sv_add(out, b, ci * cj);
            }
        return out;
    }

    bool operator==(const Dgla& o) const
    {
        return *space == *o.space && d == o.d && bk == o.bk;
    }
};

using DglaPtr = std::shared_ptr<const Dgla>;

struct DglaMorphism {
    DglaPtr src;
    DglaPtr tgt;
    GradedMap map; // degree 0

    DglaMorphism() = default;
    DglaMorphism(DglaPtr s, DglaPtr t, GradedMap m)
        : src(std::move(s)), tgt(std::move(t)), map(std::move(m))
    {
    }

    static DglaMorphism zero(DglaPtr s, DglaPtr t)
    {
        DglaMorphism f;
        f.src = std::move(s);
        f.tgt = std::move(t);
        f.map = GradedMap(f.src->space, f.tgt->space, 0);
        return f;
    }

    static DglaMorphism id(DglaPtr s)
    {
        DglaMorphism f;
        f.src = s;
        f.tgt = s;
        f.map = GradedMap::identity(s->space);
        return f;
    }

    SparseVec apply(const SparseVec& v) const { return map.apply(v); }

    // Injectivity as a linear map.
    bool injective() const
    {
        std::vector<DenseVec> cols;
        for (int j = 0; j < src->space->dim(); ++j) {
            DenseVec col(tgt->space->dim(), Rational(0));
            for (const auto& [i, c] : map.column(j))
                col[i] = c;
            cols.push_back(std::move(col));
        }
        if (cols.empty())
            return true;
        Mat m = Mat::from_columns(cols, tgt->space->dim());
        return rank(std::move(m)) == src->space->dim();
    }
};

// ---------------------------------------------------------------------------
// Validation of the DGLA axioms, reported per failing basis tuple.

inline ValidityReport validate_dgla(const Dgla& L)
{
    ValidityReport rep;
    const GradedSpace& V = *L.space;
    const int n = V.dim();

    for (const auto& w : L.d.degree_violations())
        rep.fail("degree(d)", w);
    if (L.d.degree != 1)
        rep.fail("degree(d)", "differential declared with degree != +1");

    for (const auto& [pair, v] : L.bk) {
        auto [i, j] = pair;
        for (const auto& [k, c] : v)
            if (V.degrees[k] != V.degrees[i] + V.degrees[j])
                rep.fail("degree(bracket)",
                         "[" + V.names[i] + "," + V.names[j] + "] -> " + V.names[k]);
    }
    if (!rep.ok())
        return rep; // degree errors make the structural checks meaningless

    // d^2 = 0
    for (int i = 0; i < n; ++i)
        if (!L.d.apply(L.d.column(i)).empty())
            rep.fail("d_squared", V.names[i]);

    // graded antisymmetry: storage derives i > j, so the only live condition
    // is [e,e] = 0 for even-degree e
    for (int i = 0; i < n; ++i)
        if (V.degrees[i] % 2 == 0 && !L.bracket_basis(i, i).empty())
            rep.fail("antisymmetry", "[" + V.names[i] + "," + V.names[i] + "]");

    // graded Leibniz: d[x,y] = [dx,y] + (-1)^{|x|} [x,dy]
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            SparseVec lhs = L.d.apply(L.bracket_basis(i, j));
            SparseVec rhs = L.bracket_vec(L.d.column(i), sv_unit(j));
            int s = V.degrees[i] % 2 != 0 ? -1 : 1;
            sv_add(rhs, L.bracket_vec(sv_unit(i), L.d.column(j)), Rational(s));
            sv_add(lhs, rhs, Rational(-1));
            if (!lhs.empty())
                rep.fail("leibniz", "[" + V.names[i] + "," + V.names[j] + "]");
        }

    // graded Jacobi: [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                SparseVec lhs = L.bracket_vec(sv_unit(i), L.bracket_basis(j, k));
                SparseVec rhs = L.bracket_vec(L.bracket_basis(i, j), sv_unit(k));
                int s = (V.degrees[i] % 2 != 0 && V.degrees[j] % 2 != 0) ? -1 : 1;
                sv_add(rhs, L.bracket_vec(sv_unit(j), L.bracket_basis(i, k)), Rational(s));
                sv_add(lhs, rhs, Rational(-1));
                if (!lhs.empty())
                    rep.fail("jacobi",
                             "[" + V.names[i] + ",[" + V.names[j] + "," + V.names[k] + "]]");
            }

    return rep;
}

inline ValidityReport validate_morphism(const DglaMorphism& f)
{
    ValidityReport rep;
    if (f.map.degree != 0)
        rep.fail("degree(morphism)", "map declared with degree != 0");
    for (const auto& w : f.map.degree_violations())
        rep.fail("degree(morphism)", w);
    if (!rep.ok())
        return rep;

    const GradedSpace& V = *f.src->space;
    for (int i = 0; i < V.dim(); ++i) {
        SparseVec lhs = f.apply(f.src->d.column(i));
        sv_add(lhs, f.tgt->d.apply(f.map.column(i)), Rational(-1));
        if (!lhs.empty())
            rep.fail("chain_map", V.names[i]);
    }
    for (int i = 0; i < V.dim(); ++i)
        for (int j = i; j < V.dim(); ++j) {
            SparseVec lhs = f.apply(f.src->bracket_basis(i, j));
            sv_add(lhs, f.tgt->bracket_vec(f.map.column(i), f.map.column(j)), Rational(-1));
            if (!lhs.empty())
                rep.fail("bracket_preservation", "[" + V.names[i] + "," + V.names[j] + "]");
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Cochain complexes and exact cohomology.

struct Complex {
    SpacePtr space;
    GradedMap d; // degree +1, d² = 0

    ValidityReport validate() const
    {
        ValidityReport rep;
        if (d.degree != 1)
            rep.fail("degree(d)", "differential declared with degree != +1");
        for (const auto& w : d.degree_violations())
            rep.fail("degree(d)", w);
        for (int i = 0; i < space->dim(); ++i)
            if (!d.apply(d.column(i)).empty())
                rep.fail("d_squared", space->names[i]);
        return rep;
    }
};

inline Complex dgla_complex(const DglaPtr& L)
{
    return Complex{L->space, L->d};
}

// Matrix of d restricted to the degree-i slice, plus the slice bases.
inline Mat degree_slice_matrix(const Complex& C, int i, std::vector<int>& dom, std::vector<int>& cod)
{
    dom = C.space->indices_in_degree(i);
    cod = C.space->indices_in_degree(i + 1);
    std::map<int, int> cod_pos;
    for (size_t k = 0; k < cod.size(); ++k)
        cod_pos[cod[k]] = static_cast<int>(k);
    Mat m(static_cast<int>(cod.size()), static_cast<int>(dom.size()));
    for (size_t j = 0; j < dom.size(); ++j)
        for (const auto& [t, c] : C.d.column(dom[j]))
            m.at(cod_pos.at(t), static_cast<int>(j)) = c;
    return m;
}

struct CohomologyResult {
    int dimension = 0;
    // cocycles spanning a complement of the coboundaries, as sparse vectors
    // over the full space; deterministic (reduced-echelon) choice
    std::vector<SparseVec> representatives;
};

inline CohomologyResult cohomology(const Complex& C, int i)
{
    CohomologyResult res;
    std::vector<int> dom, cod, below;
    Mat di = degree_slice_matrix(C, i, dom, cod);
    if (dom.empty())
        return res;

    std::vector<DenseVec> kernel = kernel_basis(di);

    std::vector<int> dom_prev;
    Mat dprev = degree_slice_matrix(C, i - 1, dom_prev, below);
    RowSpace bound(static_cast<int>(dom.size()));
    for (int j = 0; j < dprev.ncols; ++j) {
        DenseVec col(dprev.nrows, Rational(0));
        for (int r = 0; r < dprev.nrows; ++r)
            col[r] = dprev.at(r, j);
        bound.insert(std::move(col));
    }

    RowSpace reps = bound;
    for (auto& kv : kernel) {
        DenseVec reduced = reps.reduce(kv);
        if (!dv_is_zero(reduced)) {
            reps.insert(reduced);
            SparseVec rep;
            for (size_t k = 0; k < reduced.size(); ++k)
                if (reduced[k] != 0)
                    rep.emplace(dom[k], reduced[k]);
            res.representatives.push_back(std::move(rep));
        }
    }
    res.dimension = static_cast<int>(res.representatives.size());
    return res;
}

// Direct sum with componentwise structure; cross brackets vanish.
// Basis names are prefixed to stay unique.
inline Dgla product_dgla(const Dgla& a, const Dgla& b,
                         const std::string& pa = "p1.", const std::string& pb = "p2.")
{
    std::vector<std::pair<std::string, int>> basis;
    for (int i = 0; i < a.space->dim(); ++i)
        basis.emplace_back(pa + a.space->names[i], a.space->degrees[i]);
    for (int i = 0; i < b.space->dim(); ++i)
        basis.emplace_back(pb + b.space->names[i], b.space->degrees[i]);
    auto sp = std::make_shared<GradedSpace>(GradedSpace::make(basis));
    const int off = a.space->dim();

    GradedMap d(sp, sp, 1);
    for (const auto& [j, col] : a.d.cols)
        for (const auto& [i, c] : col)
            d.set(j, i, c);
    for (const auto& [j, col] : b.d.cols)
        for (const auto& [i, c] : col)
            d.set(j + off, i + off, c);

    Dgla out(sp, std::move(d));
    for (const auto& [pair, v] : a.bk)
        for (const auto& [k, c] : v)
            out.add_bracket(pair.first, pair.second, k, c);
    for (const auto& [pair, v] : b.bk)
        for (const auto& [k, c] : v)
            out.add_bracket(pair.first + off, pair.second + off, k + off, c);
    return out;
}

} // namespace conedef
