#pragma once

// Deliberately naive reference computations. These define ground truth for
// the acceptance suite and stay off the production call paths: nothing else
// in the library includes this header.

#include "catalog.hpp"

namespace conedef::oracles {

// Re-evaluate the DGLA axioms from a fully expanded bracket table, written
// independently of Dgla::bracket_basis / validate_dgla.
inline bool dgla_axioms_hold(const Dgla& L)
{
    const GradedSpace& V = *L.space;
    const int n = V.dim();

    // full table from the stored constants, i > j filled by antisymmetry
    std::vector<std::vector<SparseVec>> full(n, std::vector<SparseVec>(n));
    for (const auto& [pair, v] : L.bk) {
        auto [i, j] = pair;
        full[i][j] = v;
        if (i != j) {
            Rational s = (V.degrees[i] % 2 != 0 && V.degrees[j] % 2 != 0) ? rat(1) : rat(-1);
            full[j][i] = sv_scale(v, s);
        }
    }

    auto bra = [&](const SparseVec& x, const SparseVec& y) {
        SparseVec out;
        for (const auto& [i, ci] : x)
            for (const auto& [j, cj] : y)
                sv_add(out, full[i][j], ci * cj);
        return out;
    };

    // degrees
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& [k, c] : full[i][j])
                if (V.degrees[k] != V.degrees[i] + V.degrees[j])
                    return false;
    for (const auto& [j, colv] : L.d.cols)
        for (const auto& [i, c] : colv)
            if (V.degrees[i] != V.degrees[j] + 1)
                return false;

    // d^2
    for (int i = 0; i < n; ++i)
        if (!L.d.apply(L.d.column(i)).empty())
            return false;

    // antisymmetry on all pairs including even diagonals
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rational s = (V.degrees[i] % 2 != 0 && V.degrees[j] % 2 != 0) ? rat(1) : rat(-1);
            SparseVec lhs = full[i][j];
            sv_add(lhs, full[j][i], -s);
            if (!lhs.empty())
                return false;
        }

    // Leibniz
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            SparseVec lhs = L.d.apply(full[i][j]);
            sv_add(lhs, bra(L.d.column(i), sv_unit(j)), rat(-1));
            Rational s = V.degrees[i] % 2 != 0 ? rat(-1) : rat(1);
            sv_add(lhs, bra(sv_unit(i), L.d.column(j)), -s);
            if (!lhs.empty())
                return false;
        }

    // Jacobi on all ordered triples
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                SparseVec lhs = bra(sv_unit(i), full[j][k]);
                sv_add(lhs, bra(full[i][j], sv_unit(k)), rat(-1));
                Rational s = (V.degrees[i] % 2 != 0 && V.degrees[j] % 2 != 0) ? rat(-1) : rat(1);
                sv_add(lhs, bra(sv_unit(j), full[i][k]), -s);
                if (!lhs.empty())
                    return false;
            }
    return true;
}

// First-order moduli count over Q[eps]/eps^2, through the real verifier code
// path (residuals and the equivalence action evaluated on basis directions),
// independent of the cone differential construction.
inline int first_order_moduli_dimension(const PairDiagram& P)
{
    auto A = make_artin({"eps"}, 2);
    ConeComplex cone = build_cone(P);
    detail::ConeSlice s1 = detail::ConeSlice::make(cone, 1);
    detail::ConeSlice s2 = detail::ConeSlice::make(cone, 2);
    detail::ConeSlice s0 = detail::ConeSlice::make(cone, 0);

    auto basis_witness = [&](int flat) {
        PairMCWitness w = trivial_witness(P, A);
        if (flat >= cone.offM)
            w.p.add_term(flat - cone.offM, 0, rat(1));
        else if (flat >= cone.offN)
            w.y.add_term(flat - cone.offN, 0, rat(1));
        else
            w.x.add_term(flat, 0, rat(1));
        return w;
    };

    // residual of a witness over the dual numbers (linear in the witness)
    auto residual = [&](const PairMCWitness& w) {
        DenseVec out(s2.dim(), Rational(0));
        Nil e1 = mc_residual(w.x);
        Nil e2 = mc_residual(w.y);
        Nil e3 = w.y.mapped(P.g) - gauge_action(w.p, w.x.mapped(P.h));
        for (const auto& [k, c] : e1.c)
            out[s2.pos.at(cone.flatL(k.first))] += c;
        for (const auto& [k, c] : e2.c)
            out[s2.pos.at(cone.flatN(k.first))] += c;
        for (const auto& [k, c] : e3.c)
            out[s2.pos.at(cone.flatM(k.first))] += c;
        return out;
    };

    Mat res(s2.dim(), s1.dim());
    for (int j = 0; j < s1.dim(); ++j) {
        DenseVec col = residual(basis_witness(s1.flat[j]));
        for (int i = 0; i < s2.dim(); ++i)
            res.at(i, j) = col[i];
    }
    int dim_witnesses = static_cast<int>(kernel_basis(res).size());

    // orbit directions at the trivial witness, through apply_equiv
    auto orbit_dir = [&](int flat) {
        EquivWitness ew = trivial_equiv(P, A);
        if (flat >= cone.offM)
            ew.c.add_term(flat - cone.offM, 0, rat(1));
        else if (flat >= cone.offN)
            ew.b.add_term(flat - cone.offN, 0, rat(1));
        else
            ew.a.add_term(flat, 0, rat(1));
        PairMCWitness moved = apply_equiv(P, trivial_witness(P, A), ew);
        DenseVec out(s1.dim(), Rational(0));
        for (const auto& [k, c] : moved.x.c)
            out[s1.pos.at(cone.flatL(k.first))] += c;
        for (const auto& [k, c] : moved.y.c)
            out[s1.pos.at(cone.flatN(k.first))] += c;
        for (const auto& [k, c] : moved.p.c)
            out[s1.pos.at(cone.flatM(k.first))] += c;
        return out;
    };

    RowSpace orbit(s1.dim());
    for (int j = 0; j < s0.dim(); ++j)
        orbit.insert(orbit_dir(s0.flat[j]));

    // sanity: orbit directions are themselves first-order witnesses
    for (const auto& row : orbit.rows) {
        PairMCWitness w = trivial_witness(P, A);
        for (int k = 0; k < s1.dim(); ++k) {
            if (row[k] == 0)
                continue;
            int flat = s1.flat[k];
            if (flat >= cone.offM)
                w.p.add_term(flat - cone.offM, 0, row[k]);
            else if (flat >= cone.offN)
                w.y.add_term(flat - cone.offN, 0, row[k]);
            else
                w.x.add_term(flat, 0, row[k]);
        }
        if (!dv_is_zero(residual(w)))
            throw error("first-order oracle: orbit direction is not a witness");
    }

    return dim_witnesses - orbit.dim();
}

// Does any lift of w across the small extension exist? Affine-linear search
// over the finite-dimensional J-coset, residuals evaluated through the real
// verifier machinery (not through the cone cocycle construction).
inline bool lift_exists(const PairDiagram& P, const SmallExtension& se, const PairMCWitness& w)
{
    ConeComplex cone = build_cone(P);
    detail::ConeSlice s1 = detail::ConeSlice::make(cone, 1);
    detail::ConeSlice s2 = detail::ConeSlice::make(cone, 2);

    PairMCWitness base{lift_nil(se, w.x, P.L), lift_nil(se, w.y, P.N), lift_nil(se, w.p, P.M)};

    auto residual_vec = [&](const PairMCWitness& cand) {
        Nil e1 = mc_residual(cand.x);
        Nil e2 = mc_residual(cand.y);
        Nil e3 = cand.y.mapped(P.g) - gauge_action(cand.p, cand.x.mapped(P.h));
        // stack (cone slice) x (total ring monomials)
        const int nm = se.total->dim();
        DenseVec out(static_cast<size_t>(s2.dim()) * nm, Rational(0));
        auto put = [&](const Nil& e, auto&& to_flat) {
            for (const auto& [k, c] : e.c)
                out[static_cast<size_t>(s2.pos.at(to_flat(k.first))) * nm + k.second] += c;
        };
        put(e1, [&](int b) { return cone.flatL(b); });
        put(e2, [&](int b) { return cone.flatN(b); });
        put(e3, [&](int b) { return cone.flatM(b); });
        return out;
    };

    DenseVec r0 = residual_vec(base);
    std::vector<DenseVec> cols;
    for (int j = 0; j < s1.dim(); ++j)
        for (int r = 0; r < se.J.dim(); ++r) {
            PairMCWitness cand = base;
            const DenseVec& jvec = se.J.rows[r];
            int flat = s1.flat[j];
            for (int mono = 0; mono < se.total->dim(); ++mono) {
                if (jvec[mono] == 0)
                    continue;
                if (flat >= cone.offM)
                    cand.p.add_term(flat - cone.offM, mono, jvec[mono]);
                else if (flat >= cone.offN)
                    cand.y.add_term(flat - cone.offN, mono, jvec[mono]);
                else
                    cand.x.add_term(flat, mono, jvec[mono]);
            }
            DenseVec col = residual_vec(cand);
            for (size_t t = 0; t < col.size(); ++t)
                col[t] -= r0[t];
            cols.push_back(std::move(col));
        }

    if (cols.empty())
        return dv_is_zero(r0);
    Mat m = Mat::from_columns(cols, static_cast<int>(r0.size()));
    DenseVec rhs = r0;
    for (auto& c : rhs)
        c = -c;
    return solve(m, rhs).has_value();
}

} // namespace conedef::oracles
