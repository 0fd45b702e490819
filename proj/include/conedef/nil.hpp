#pragma once

#include <functional>

#include "artin.hpp"
#include "dgla.hpp"

namespace conedef {

// Element of V ⊗ m_A for a DGLA V and Artin coefficient ring A, homogeneous
// of the declared degree. Coefficients are keyed by (basis index, monomial
// index); the unit of A never appears.
struct Nil {
    DglaPtr V;
    ArtinPtr A;
    int degree = 0;
    std::map<std::pair<int, int>, Rational> c;

    Nil() = default;
    Nil(DglaPtr v, ArtinPtr a, int deg) : V(std::move(v)), A(std::move(a)), degree(deg) {}

    static Nil zero(DglaPtr v, ArtinPtr a, int deg) { return Nil(std::move(v), std::move(a), deg); }

    Nil zero_like(int deg) const { return Nil(V, A, deg); }
    const ArtinPtr& ring() const { return A; }

    bool is_zero() const { return c.empty(); }

    void add_term(int basis, int mono, const Rational& coef)
    {
        if (coef == 0)
            return;
        if (V->space->degrees[basis] != degree)
            throw error("Nil::add_term: basis degree mismatch for " + V->space->names[basis]);
        auto key = std::make_pair(basis, mono);
        auto it = c.find(key);
        if (it == c.end()) {
            c.emplace(key, coef);
        } else {
            it->second += coef;
            if (it->second == 0)
                c.erase(it);
        }
    }

    Nil operator+(const Nil& o) const
    {
        check_compatible(o);
        if (degree != o.degree && !is_zero() && !o.is_zero())
            throw error("Nil: adding elements of different degree");
        Nil out = *this;
        if (out.is_zero())
            out.degree = o.degree;
        for (const auto& [k, v] : o.c) {
            out.c[k] += v;
            if (out.c[k] == 0)
                out.c.erase(k);
        }
        return out;
    }

    Nil operator-() const
    {
        Nil out = *this;
        for (auto& [k, v] : out.c)
            v = -v;
        return out;
    }

    Nil operator-(const Nil& o) const { return *this + (-o); }

    Nil operator*(const Rational& q) const
    {
        Nil out(V, A, degree);
        if (q == 0)
            return out;
        for (const auto& [k, v] : c)
            out.c.emplace(k, v * q);
        return out;
    }

    bool operator==(const Nil& o) const { return c == o.c; }

    // apply the ambient differential
    Nil d() const
    {
        Nil out(V, A, degree + 1);
        for (const auto& [k, v] : c)
            for (const auto& [t, dc] : V->d.column(k.first))
                out.add_term(t, k.second, v * dc);
        return out;
    }

    // apply a degree-0 graded map into the given target DGLA
    Nil mapped(const GradedMap& f, const DglaPtr& target) const
    {
        Nil out(target, A, degree + f.degree);
        for (const auto& [k, v] : c)
            for (const auto& [t, fc] : f.column(k.first))
                out.add_term(t, k.second, v * fc);
        return out;
    }

    Nil mapped(const DglaMorphism& f) const { return mapped(f.map, f.tgt); }

    // dense coefficient vector in m_A for one fixed basis element
    DenseVec ring_vector(int basis) const
    {
        DenseVec v(A->dim(), Rational(0));
        for (const auto& [k, coef] : c)
            if (k.first == basis)
                v[k.second] = coef;
        return v;
    }

    // component of exact m_A-adic order k (flag splitting of the ring)
    Nil component_order(int k) const
    {
        Nil out(V, A, degree);
        for (int b = 0; b < V->space->dim(); ++b) {
            DenseVec v = ring_vector(b);
            if (dv_is_zero(v))
                continue;
            DenseVec comp = A->component(v, k);
            for (int m = 0; m < A->dim(); ++m)
                if (comp[m] != 0)
                    out.add_term(b, m, comp[m]);
        }
        return out;
    }

    int min_order() const
    {
        int best = A->nilpotency_order;
        for (int b = 0; b < V->space->dim(); ++b) {
            DenseVec v = ring_vector(b);
            if (!dv_is_zero(v))
                best = std::min(best, A->order_of(v));
        }
        return best;
    }

    void check_compatible(const Nil& o) const
    {
        if (V.get() != o.V.get() || A.get() != o.A.get())
            throw error("Nil: mismatched ambient DGLA or coefficient ring");
    }
};

inline Nil bracket(const Nil& x, const Nil& y)
{
    x.check_compatible(y);
    Nil out(x.V, x.A, x.degree + y.degree);
    for (const auto& [kx, cx] : x.c)
        for (const auto& [ky, cy] : y.c) {
            SparseVec b = x.V->bracket_basis(kx.first, ky.first);
            if (b.empty())
                continue;
            const SparseVec& mono = x.A->mono_product(kx.second, ky.second);
            if (mono.empty())
                continue;
            Rational coef = cx * cy;
            for (const auto& [t, cb] : b)
                for (const auto& [m, cm] : mono)
                    out.add_term(t, m, coef * cb * cm);
        }
    return out;
}

// scale coefficients by a ring element (given as a dense m_A vector)
inline Nil ring_scale(const Nil& x, const DenseVec& r)
{
    Nil out(x.V, x.A, x.degree);
    for (const auto& [k, v] : x.c)
        for (int m = 0; m < x.A->dim(); ++m)
            if (r[m] != 0)
                for (const auto& [t, cm] : x.A->mono_product(k.second, m))
                    out.add_term(k.first, t, v * r[m] * cm);
    return out;
}

// Group elements of exp(V^0 ⊗ m_A), represented by their logarithm;
// equality of group elements is equality of logarithms.
struct GroupElement {
    Nil log;

    GroupElement() = default;
    explicit GroupElement(Nil l) : log(std::move(l))
    {
        if (log.degree != 0)
            throw error("GroupElement: logarithm must have degree 0");
    }

    bool operator==(const GroupElement& o) const { return log == o.log; }
};

// ---------------------------------------------------------------------------
// Baker-Campbell-Hausdorff product by the Dynkin series, truncated at the
// nilpotency order of the coefficient ring. exp(bch(p,q)) = exp(p) exp(q).

namespace detail {

inline const std::vector<Rational>& factorial_table()
{
    static const std::vector<Rational> table = [] {
        std::vector<Rational> t;
        for (int i = 0; i <= 40; ++i)
            t.emplace_back(factorial(i));
        return t;
    }();
    return table;
}

template <class E>
E nested_right_bracket(const std::vector<const E*>& word)
{
    E acc = *word.back();
    for (int i = static_cast<int>(word.size()) - 2; i >= 0; --i) {
        if (acc.is_zero())
            return acc;
        acc = bracket(*word[i], acc);
    }
    return acc;
}

} // namespace detail

template <class E>
E bch(const E& p, const E& q)
{
    if (p.degree != 0 || q.degree != 0)
        throw error("bch: arguments must have degree 0");
    p.check_compatible(q);
    const int cap = p.ring()->nilpotency_order - 1;
    E acc = p.zero_like(0);

    const auto& fact = detail::factorial_table();
    // sequences of blocks (r_i, s_i), each nonzero, total word length <= cap
    std::vector<std::pair<int, int>> seq;
    std::function<void(int)> rec = [&](int used) {
        if (!seq.empty()) {
            const int n = static_cast<int>(seq.size());
            const int m = used;
            // word x^{r1} y^{s1} ... ; right-nested bracket
            std::vector<const E*> word;
            for (const auto& [r, s] : seq) {
                for (int i = 0; i < r; ++i)
                    word.push_back(&p);
                for (int i = 0; i < s; ++i)
                    word.push_back(&q);
            }
            E val = detail::nested_right_bracket(word);
            if (!val.is_zero()) {
                Rational denom = Rational(n) * Rational(m);
                for (const auto& [r, s] : seq)
                    denom *= fact[r] * fact[s];
                Rational coef = Rational(n % 2 == 1 ? 1 : -1) / denom;
                acc = acc + val * coef;
            }
        }
        if (used >= cap)
            return;
        for (int r = 0; r + used <= cap; ++r)
            for (int s = (r == 0 ? 1 : 0); r + s + used <= cap; ++s) {
                seq.emplace_back(r, s);
                rec(used + r + s);
                seq.pop_back();
            }
    };
    rec(0);
    return acc;
}

// Gauge action e^a * x = x + Σ_{n>=0} ad_a^n/(n+1)! ([a,x] - da).
template <class E>
E gauge_action(const E& a, const E& x)
{
    if (a.degree != 0)
        throw error("gauge_action: gauge parameter must have degree 0");
    a.check_compatible(x);
    const auto& fact = detail::factorial_table();
    E result = x;
    E term = bracket(a, x) - a.d();
    int n = 0;
    const int cap = a.ring()->nilpotency_order + 2;
    while (!term.is_zero()) {
        result = result + term * (Rational(1) / fact[n + 1]);
        term = bracket(a, term);
        if (++n > cap)
            throw error("gauge_action: series failed to terminate");
    }
    return result;
}

// Maurer-Cartan test: dx + 1/2 [x,x] = 0.
template <class E>
bool is_mc(const E& x)
{
    if (x.degree != 1)
        throw error("is_mc: element must have degree 1");
    E r = x.d() + bracket(x, x) * Rational(1, 2);
    return r.is_zero();
}

template <class E>
E mc_residual(const E& x)
{
    return x.d() + bracket(x, x) * Rational(1, 2);
}

// T = d(hh) + [x, hh]; exp(T) lies in the irrelevant stabilizer of x, so
// gauge_action(T, x) = x whenever x is Maurer-Cartan.
template <class E>
E stabilizer_element(const E& x, const E& hh)
{
    if (x.degree != 1 || hh.degree != -1)
        throw error("stabilizer_element: expected degrees (1, -1)");
    return hh.d() + bracket(x, hh);
}

// ---------------------------------------------------------------------------
// Transport of Nil elements along small extensions.

inline Nil project_nil(const SmallExtension& se, const Nil& x, const DglaPtr& same_dgla)
{
    Nil out(same_dgla, se.quotient, x.degree);
    for (const auto& [k, v] : x.c)
        for (const auto& [m, c] : se.proj[k.second])
            out.add_term(k.first, m, v * c);
    return out;
}

// canonical lift along the monomial section
inline Nil lift_nil(const SmallExtension& se, const Nil& x, const DglaPtr& same_dgla)
{
    Nil out(same_dgla, se.total, x.degree);
    for (const auto& [k, v] : x.c)
        out.add_term(k.first, se.section[k.second], v);
    return out;
}

// does every coefficient vector of x lie in the subspace J?
inline bool nil_in_J(const SmallExtension& se, const Nil& x)
{
    for (int b = 0; b < x.V->space->dim(); ++b) {
        DenseVec v = x.ring_vector(b);
        if (!dv_is_zero(v) && !se.J.contains(v))
            return false;
    }
    return true;
}

inline Nil apply_ring_morphism(const ArtinMorphism& f, const Nil& x, const DglaPtr& same_dgla)
{
    Nil out(same_dgla, f.tgt, x.degree);
    for (const auto& [k, v] : x.c) {
        const DenseVec& img = f.images[k.second];
        for (int m = 0; m < f.tgt->dim(); ++m)
            if (img[m] != 0)
                out.add_term(k.first, m, v * img[m]);
    }
    return out;
}

} // namespace conedef
