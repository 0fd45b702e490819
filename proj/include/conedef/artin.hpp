#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "graded.hpp"
#include "linalg.hpp"
#include "rational.hpp"

namespace conedef {

// Polynomial in the ring generators: list of (coefficient, exponent vector).
using RingPoly = std::vector<std::pair<Rational, std::vector<int>>>;

// Local Artinian algebra Q[x_1..x_k]/I with nilpotent maximal ideal m_A.
// Only m_A is materialized: its basis is a set of surviving monomials
// together with a multiplication table (products reduced to normal form,
// products of total degree >= truncation vanish).
struct ArtinAlgebra {
    std::vector<std::string> vars;
    int truncation_order = 0;
    std::vector<std::vector<int>> monomials;        // exponent vectors, the m_A basis
    std::map<std::vector<int>, int> mono_index;
    std::vector<std::vector<SparseVec>> mult;       // mult[i][j] over monomial indices
    int nilpotency_order = 1;                       // smallest N with m_A^N = 0
    // normal form of every monomial of the ambient polynomial ring that does
    // not survive into the basis (eliminated by relations); missing entries
    // of degree >= truncation are zero
    std::map<std::vector<int>, SparseVec> reduced_monomials;

    // m_A-adic filtration data: flag_order[r] is the filtration order of the
    // r-th flag basis vector; flag columns form an invertible matrix over the
    // monomial basis and coords() expresses an element in that flag basis.
    std::vector<DenseVec> flag_basis;
    std::vector<int> flag_order;
    Mat flag_solve; // RREF of [flag | I] used to compute coordinates

    int dim() const { return static_cast<int>(monomials.size()); }

    std::string mono_str(int idx) const
    {
        const auto& e = monomials[idx];
        std::string out;
        for (size_t v = 0; v < e.size(); ++v) {
            if (e[v] == 0)
                continue;
            if (!out.empty())
                out += "*";
            out += vars[v];
            if (e[v] > 1)
                out += "^" + std::to_string(e[v]);
        }
        return out.empty() ? "1" : out;
    }

    SparseVec mono_product(int i, int j) const { return mult[i][j]; }

    // Coordinates of a dense element in the flag basis.
    DenseVec flag_coords(const DenseVec& v) const
    {
        DenseVec x(dim(), Rational(0));
        // flag_solve is rref([B | I]); coords = (B^{ -1}) v  via stored inverse
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j)
                if (flag_solve.at(i, dim() + j) != 0 && v[j] != 0)
                    x[i] += flag_solve.at(i, dim() + j) * v[j];
        return x;
    }

    int order_of(const DenseVec& v) const
    {
        if (dv_is_zero(v))
            return nilpotency_order; // convention: 0 has maximal order
        DenseVec x = flag_coords(v);
        int best = nilpotency_order;
        for (int r = 0; r < dim(); ++r)
            if (x[r] != 0)
                best = std::min(best, flag_order[r]);
        return best;
    }

    // Component of v of exact filtration order k (with respect to the chosen
    // flag splitting).
    DenseVec component(const DenseVec& v, int k) const
    {
        DenseVec x = flag_coords(v);
        DenseVec out(dim(), Rational(0));
        for (int r = 0; r < dim(); ++r)
            if (x[r] != 0 && flag_order[r] == k)
                for (int j = 0; j < dim(); ++j)
                    out[j] += x[r] * flag_basis[r][j];
        return out;
    }
};

using ArtinPtr = std::shared_ptr<const ArtinAlgebra>;

namespace detail {

inline void enumerate_monomials(int nvars, int max_total, std::vector<std::vector<int>>& out)
{
    // all exponent vectors with 1 <= total degree <= max_total, ordered by
    // (total degree, lex)
    std::vector<int> cur(nvars, 0);
    std::vector<std::vector<int>> all;
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == nvars) {
            all.push_back(cur);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            cur[pos] = e;
            self(self, pos + 1, remaining - e);
        }
        cur[pos] = 0;
    };
    rec(rec, 0, max_total);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        int ta = 0, tb = 0;
        for (int x : a)
            ta += x;
        for (int x : b)
            tb += x;
        if (ta != tb)
            return ta < tb;
        return a < b;
    });
    for (auto& m : all) {
        int t = 0;
        for (int x : m)
            t += x;
        if (t >= 1)
            out.push_back(std::move(m));
    }
}

inline int total_deg(const std::vector<int>& e)
{
    int t = 0;
    for (int x : e)
        t += x;
    return t;
}

// Finish an algebra whose basis and multiplication table are fixed: compute
// the nilpotency order and the filtration flag.
inline void finish_ring(ArtinAlgebra& A)
{
    const int n = A.dim();
    // V_k = span of k-fold products; V_1 = m_A
    std::vector<RowSpace> filt;
    RowSpace v1(n);
    for (int i = 0; i < n; ++i) {
        DenseVec e(n, Rational(0));
        e[i] = 1;
        v1.insert(std::move(e));
    }
    filt.push_back(v1);
    while (filt.back().dim() > 0) {
        const RowSpace& prev = filt.back();
        RowSpace next(n);
        for (int b = 0; b < n; ++b)
            for (const auto& row : prev.rows) {
                DenseVec prod(n, Rational(0));
                for (int j = 0; j < n; ++j)
                    if (row[j] != 0)
                        for (const auto& [k, c] : A.mult[b][j])
                            prod[k] += row[j] * c;
                if (!dv_is_zero(prod))
                    next.insert(std::move(prod));
            }
        filt.push_back(next);
        if (static_cast<int>(filt.size()) > n + 2)
            throw error("artin algebra is not nilpotent");
    }
    A.nilpotency_order = static_cast<int>(filt.size()); // m^N = 0, filt[N-1] = 0-span

    // flag splitting: extend a basis of V_{k+1} to one of V_k, order by k
    A.flag_basis.clear();
    A.flag_order.clear();
    for (int k = static_cast<int>(filt.size()) - 2; k >= 0; --k) {
        RowSpace acc = filt[k + 1];
        std::vector<DenseVec> added;
        for (const auto& row : filt[k].rows)
            if (acc.insert(row))
                added.push_back(row);
        for (auto& v : added) {
            A.flag_basis.push_back(v);
            A.flag_order.push_back(k + 1);
        }
    }
    // invert the flag matrix once: rref([B | I]) where columns of B are the
    // flag vectors
    Mat aug(n, 2 * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            aug.at(i, j) = A.flag_basis[j][i];
    for (int i = 0; i < n; ++i)
        aug.at(i, n + i) = 1;
    std::vector<int> piv = rref(aug);
    if (static_cast<int>(piv.size()) != n || (n > 0 && piv.back() >= n))
        throw error("internal: flag basis is singular");
    A.flag_solve = std::move(aug);
}

} // namespace detail

// Quotient of Q[generators] by (generators)^truncation_order plus extra
// relations. Relations must lie in the maximal ideal (locality).
inline ArtinPtr make_artin(const std::vector<std::string>& generators, int truncation_order,
                           const std::vector<RingPoly>& extra_relations = {})
{
    if (truncation_order < 1)
        throw error("make_artin: truncation order must be >= 1");
    ArtinAlgebra A;
    A.vars = generators;
    A.truncation_order = truncation_order;
    const int nv = static_cast<int>(generators.size());

    std::vector<std::vector<int>> monos;
    detail::enumerate_monomials(nv, truncation_order - 1, monos);
    std::map<std::vector<int>, int> idx;
    for (size_t i = 0; i < monos.size(); ++i)
        idx[monos[i]] = static_cast<int>(i);
    const int n = static_cast<int>(monos.size());

    // span of the reduced ideal: relation * monomial, truncated at order
    RowSpace ideal(n);
    for (const auto& rel : extra_relations) {
        for (const auto& [c, e] : rel) {
            if (static_cast<int>(e.size()) != nv)
                throw error("make_artin: relation exponent arity mismatch");
            if (detail::total_deg(e) == 0 && c != 0)
                throw error("make_artin: relation has a constant term (ring would not be local)");
        }
        std::vector<std::vector<int>> mults;
        mults.push_back(std::vector<int>(nv, 0)); // the unit
        for (const auto& m : monos)
            mults.push_back(m);
        for (const auto& mu : mults) {
            DenseVec row(n, Rational(0));
            bool nonzero = false;
            for (const auto& [c, e] : rel) {
                std::vector<int> prod(nv);
                for (int v = 0; v < nv; ++v)
                    prod[v] = e[v] + mu[v];
                if (detail::total_deg(prod) >= truncation_order)
                    continue; // lands in (x)^T, already zero
                row[idx.at(prod)] += c;
                nonzero = true;
            }
            if (nonzero && !dv_is_zero(row))
                ideal.insert(std::move(row));
        }
    }

    std::vector<char> eliminated(n, 0);
    for (int p : ideal.pivots)
        eliminated[p] = 1;

    // quotient basis: surviving monomials
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (!eliminated[i])
            keep.push_back(i);
    std::map<int, int> new_of_old;
    for (size_t i = 0; i < keep.size(); ++i)
        new_of_old[keep[i]] = static_cast<int>(i);

    auto normal_form = [&](const std::vector<int>& exps) -> SparseVec {
        SparseVec out;
        if (detail::total_deg(exps) >= truncation_order)
            return out;
        DenseVec v(n, Rational(0));
        v[idx.at(exps)] = 1;
        v = ideal.reduce(std::move(v));
        for (int i = 0; i < n; ++i)
            if (v[i] != 0)
                out.emplace(new_of_old.at(i), v[i]);
        return out;
    };

    for (int i : keep)
        A.monomials.push_back(monos[i]);
    for (size_t i = 0; i < A.monomials.size(); ++i)
        A.mono_index[A.monomials[i]] = static_cast<int>(i);
    for (int i = 0; i < n; ++i) {
        if (!eliminated[i])
            continue;
        DenseVec v(n, Rational(0));
        v[i] = 1;
        v = ideal.reduce(std::move(v));
        SparseVec nf;
        for (int j = 0; j < n; ++j)
            if (v[j] != 0)
                nf.emplace(new_of_old.at(j), v[j]);
        A.reduced_monomials.emplace(monos[i], std::move(nf));
    }

    const int qn = A.dim();
    A.mult.assign(qn, std::vector<SparseVec>(qn));
    for (int i = 0; i < qn; ++i)
        for (int j = 0; j < qn; ++j) {
            std::vector<int> prod(nv);
            for (int v = 0; v < nv; ++v)
                prod[v] = A.monomials[i][v] + A.monomials[j][v];
            A.mult[i][j] = normal_form(prod);
        }

    detail::finish_ring(A);
    return std::make_shared<const ArtinAlgebra>(std::move(A));
}

// Evaluate a polynomial in the generators inside m_A (constant terms are
// rejected since those elements would not lie in the maximal ideal).
inline DenseVec ring_poly_element(const ArtinAlgebra& A, const RingPoly& p)
{
    DenseVec v(A.dim(), Rational(0));
    for (const auto& [c, e] : p) {
        if (c == 0)
            continue;
        if (detail::total_deg(e) == 0)
            throw error("ring element with a constant term is not in m_A");
        auto it = A.mono_index.find(e);
        if (it != A.mono_index.end()) {
            v[it->second] += c;
            continue;
        }
        auto rit = A.reduced_monomials.find(e);
        if (rit != A.reduced_monomials.end()) {
            for (const auto& [k, cc] : rit->second)
                v[k] += c * cc;
            continue;
        }
        // degree >= truncation order: zero
    }
    return v;
}

// ---------------------------------------------------------------------------
// Ring morphisms (needed for fiber products and small extensions).

struct ArtinMorphism {
    ArtinPtr src;
    ArtinPtr tgt;
    std::vector<DenseVec> images; // per source monomial, an element of target m_A

    DenseVec apply(const DenseVec& v) const
    {
        DenseVec out(tgt->dim(), Rational(0));
        for (int j = 0; j < src->dim(); ++j)
            if (v[j] != 0)
                for (int k = 0; k < tgt->dim(); ++k)
                    out[k] += v[j] * images[j][k];
        return out;
    }

    // multiplicative on the monomial basis?
    bool multiplicative() const
    {
        for (int i = 0; i < src->dim(); ++i)
            for (int j = 0; j < src->dim(); ++j) {
                DenseVec lhs(src->dim(), Rational(0));
                for (const auto& [k, c] : src->mult[i][j])
                    lhs[k] = c;
                DenseVec lhs_img = apply(lhs);
                DenseVec rhs(tgt->dim(), Rational(0));
                for (int a = 0; a < tgt->dim(); ++a)
                    if (images[i][a] != 0)
                        for (int b = 0; b < tgt->dim(); ++b)
                            if (images[j][b] != 0)
                                for (const auto& [k, c] : tgt->mult[a][b])
                                    rhs[k] += images[i][a] * images[j][b] * c;
                for (int k = 0; k < tgt->dim(); ++k)
                    if (lhs_img[k] != rhs[k])
                        return false;
            }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Small extensions 0 -> J -> A~ -> A -> 0 with J * m_{A~} = 0.

struct SmallExtension {
    ArtinPtr total;    // A~
    ArtinPtr quotient; // A
    RowSpace J;        // subspace of m_{A~}, in RREF
    std::vector<SparseVec> proj;  // per total monomial: image in quotient coordinates
    std::vector<int> section;     // per quotient monomial: the same monomial in total

    // J-coordinates of a dense element of m_{A~} known to lie in J.
    DenseVec j_coords(const DenseVec& v) const
    {
        DenseVec x(J.dim(), Rational(0));
        DenseVec rem = v;
        for (int r = 0; r < J.dim(); ++r) {
            x[r] = rem[J.pivots[r]];
            if (x[r] != 0)
                for (int j = 0; j < J.ncols; ++j)
                    rem[j] -= x[r] * J.rows[r][j];
        }
        if (!dv_is_zero(rem))
            throw error("element does not lie in J");
        return x;
    }
};

inline SmallExtension make_small_extension(const ArtinPtr& total,
                                           const std::vector<RingPoly>& ideal_generators)
{
    SmallExtension se;
    se.total = total;
    const int n = total->dim();

    RowSpace J(n);
    std::vector<DenseVec> gens;
    for (const auto& g : ideal_generators)
        gens.push_back(ring_poly_element(*total, g));
    // ideal closure: generators and all products with basis monomials
    for (const auto& g : gens) {
        J.insert(g);
        for (int b = 0; b < n; ++b) {
            DenseVec prod(n, Rational(0));
            for (int j = 0; j < n; ++j)
                if (g[j] != 0)
                    for (const auto& [k, c] : total->mult[b][j])
                        prod[k] += g[j] * c;
            if (!dv_is_zero(prod))
                J.insert(std::move(prod));
        }
    }

    // smallness: J * m = 0
    for (const auto& row : J.rows)
        for (int b = 0; b < n; ++b) {
            DenseVec prod(n, Rational(0));
            for (int j = 0; j < n; ++j)
                if (row[j] != 0)
                    for (const auto& [k, c] : total->mult[b][j])
                        prod[k] += row[j] * c;
            if (!dv_is_zero(prod))
                throw error("make_small_extension: smallness J*m = 0 violated");
        }

    std::vector<char> eliminated(n, 0);
    for (int p : J.pivots)
        eliminated[p] = 1;

    ArtinAlgebra Q;
    Q.vars = total->vars;
    Q.truncation_order = total->truncation_order;
    std::map<int, int> new_of_old;
    for (int i = 0; i < n; ++i)
        if (!eliminated[i]) {
            new_of_old[i] = Q.dim();
            Q.monomials.push_back(total->monomials[i]);
            Q.mono_index[total->monomials[i]] = static_cast<int>(Q.monomials.size()) - 1;
            se.section.push_back(i);
        }

    auto project = [&](const DenseVec& v) -> SparseVec {
        DenseVec r = J.reduce(v);
        SparseVec out;
        for (int i = 0; i < n; ++i)
            if (r[i] != 0)
                out.emplace(new_of_old.at(i), r[i]);
        return out;
    };

    se.proj.resize(n);
    for (int i = 0; i < n; ++i) {
        DenseVec e(n, Rational(0));
        e[i] = 1;
        se.proj[i] = project(e);
    }

    const int qn = Q.dim();
    Q.mult.assign(qn, std::vector<SparseVec>(qn));
    for (int i = 0; i < qn; ++i)
        for (int j = 0; j < qn; ++j) {
            DenseVec prod(n, Rational(0));
            for (const auto& [k, c] : total->mult[se.section[i]][se.section[j]])
                prod[k] = c;
            Q.mult[i][j] = project(prod);
        }
    for (int i = 0; i < n; ++i)
        if (eliminated[i])
            Q.reduced_monomials.emplace(total->monomials[i], se.proj[i]);
    for (const auto& [mono, nf] : total->reduced_monomials) {
        DenseVec v(n, Rational(0));
        for (const auto& [k, c] : nf)
            v[k] = c;
        Q.reduced_monomials.emplace(mono, project(v));
    }
    detail::finish_ring(Q);

    se.quotient = std::make_shared<const ArtinAlgebra>(std::move(Q));
    se.J = std::move(J);
    return se;
}

} // namespace conedef
