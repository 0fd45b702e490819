#pragma once

#include "cone.hpp"
#include "nil.hpp"

namespace conedef {

// Element of V[t,dt] ⊗ m_A: finitely many coefficients m_i (of t^i) and
// n_i (of t^i dt). Forms are written on the left, so with |t| = 0, |dt| = 1:
//   d(t^i ⊗ m)    = i t^{i-1} dt ⊗ m + t^i ⊗ dm
//   d(t^i dt ⊗ n) = -t^i dt ⊗ dn
//   [a ⊗ x, b ⊗ y] = (-1)^{|x||b|} ab ⊗ [x,y]   (a, b scalar forms)
struct PathNil {
    DglaPtr V;
    ArtinPtr A;
    int degree = 0;               // total degree
    std::map<int, Nil> tpart;     // i -> coefficient of t^i, degree `degree`
    std::map<int, Nil> dtpart;    // i -> coefficient of t^i dt, degree `degree - 1`

    PathNil() = default;
    PathNil(DglaPtr v, ArtinPtr a, int deg) : V(std::move(v)), A(std::move(a)), degree(deg) {}

    static PathNil zero(DglaPtr v, ArtinPtr a, int deg) { return PathNil(std::move(v), std::move(a), deg); }

    static PathNil constant(const Nil& m)
    {
        PathNil p(m.V, m.A, m.degree);
        if (!m.is_zero())
            p.tpart.emplace(0, m);
        return p;
    }

    PathNil zero_like(int deg) const { return PathNil(V, A, deg); }
    const ArtinPtr& ring() const { return A; }

    void add_t(int i, const Nil& m)
    {
        if (m.is_zero())
            return;
        if (m.degree != degree)
            throw error("PathNil: t-coefficient degree mismatch");
        auto it = tpart.find(i);
        if (it == tpart.end()) {
            tpart.emplace(i, m);
        } else {
            it->second = it->second + m;
            if (it->second.is_zero())
                tpart.erase(it);
        }
    }

    void add_dt(int i, const Nil& n)
    {
        if (n.is_zero())
            return;
        if (n.degree != degree - 1)
            throw error("PathNil: dt-coefficient degree mismatch");
        auto it = dtpart.find(i);
        if (it == dtpart.end()) {
            dtpart.emplace(i, n);
        } else {
            it->second = it->second + n;
            if (it->second.is_zero())
                dtpart.erase(it);
        }
    }

    bool is_zero() const { return tpart.empty() && dtpart.empty(); }

    void check_compatible(const PathNil& o) const
    {
        if (V.get() != o.V.get() || A.get() != o.A.get())
            throw error("PathNil: mismatched ambient DGLA or coefficient ring");
    }

    PathNil operator+(const PathNil& o) const
    {
        check_compatible(o);
        if (degree != o.degree && !is_zero() && !o.is_zero())
            throw error("PathNil: adding elements of different degree");
        PathNil out = *this;
        if (out.is_zero())
            out.degree = o.degree;
        for (const auto& [i, m] : o.tpart)
            out.add_t(i, m);
        for (const auto& [i, n] : o.dtpart)
            out.add_dt(i, n);
        return out;
    }

    PathNil operator-() const
    {
        PathNil out = *this;
        for (auto& [i, m] : out.tpart)
            m = -m;
        for (auto& [i, n] : out.dtpart)
            n = -n;
        return out;
    }

    PathNil operator-(const PathNil& o) const { return *this + (-o); }

    PathNil operator*(const Rational& q) const
    {
        PathNil out(V, A, degree);
        if (q == 0)
            return out;
        for (const auto& [i, m] : tpart)
            out.tpart.emplace(i, m * q);
        for (const auto& [i, n] : dtpart)
            out.dtpart.emplace(i, n * q);
        return out;
    }

    bool operator==(const PathNil& o) const { return tpart == o.tpart && dtpart == o.dtpart; }

    PathNil d() const
    {
        PathNil out(V, A, degree + 1);
        for (const auto& [i, m] : tpart) {
            out.add_t(i, m.d());
            if (i > 0)
                out.add_dt(i - 1, m * Rational(i));
        }
        for (const auto& [i, n] : dtpart)
            out.add_dt(i, -(n.d()));
        return out;
    }

    // e_a: substitute t = a, drop dt-terms; a DGLA morphism
    Nil eval_at(const Rational& a) const
    {
        Nil out(V, A, degree);
        for (const auto& [i, m] : tpart)
            out = out + m * rat_pow(a, i);
        return out;
    }

    // degree -1: only dt-terms contribute
    Nil integrate(const Rational& a, const Rational& b) const
    {
        Nil out(V, A, degree - 1);
        for (const auto& [i, n] : dtpart)
            out = out + n * ((rat_pow(b, i + 1) - rat_pow(a, i + 1)) / Rational(i + 1));
        return out;
    }

    // indefinite integral from 0: t-polynomial of degree one higher
    PathNil integrate_from_zero() const
    {
        PathNil out(V, A, degree - 1);
        for (const auto& [i, n] : dtpart)
            out.add_t(i + 1, n * Rational(1, i + 1));
        return out;
    }

    // substitution t -> alpha t + beta; dt-coefficients pick up the Jacobian
    PathNil substitute_affine(const Rational& alpha, const Rational& beta) const
    {
        PathNil out(V, A, degree);
        auto expand = [&](int i, const Nil& coeff, bool is_dt) {
            for (int j = 0; j <= i; ++j) {
                Rational c = Rational(binomial(i, j)) * rat_pow(alpha, j) * rat_pow(beta, i - j);
                if (c == 0)
                    continue;
                if (is_dt)
                    out.add_dt(j, coeff * (c * alpha));
                else
                    out.add_t(j, coeff * c);
            }
        };
        for (const auto& [i, m] : tpart)
            expand(i, m, false);
        for (const auto& [i, n] : dtpart)
            expand(i, n, true);
        return out;
    }

    int t_degree() const
    {
        int deg = 0;
        for (const auto& [i, m] : tpart)
            deg = std::max(deg, i);
        for (const auto& [i, n] : dtpart)
            deg = std::max(deg, i);
        return deg;
    }

    PathNil component_order(int k) const
    {
        PathNil out(V, A, degree);
        for (const auto& [i, m] : tpart)
            out.add_t(i, m.component_order(k));
        for (const auto& [i, n] : dtpart)
            out.add_dt(i, n.component_order(k));
        return out;
    }

    bool is_constant() const { return dtpart.empty() && (tpart.empty() || (tpart.size() == 1 && tpart.begin()->first == 0)); }
};

inline PathNil bracket(const PathNil& x, const PathNil& y)
{
    x.check_compatible(y);
    PathNil out(x.V, x.A, x.degree + y.degree);
    for (const auto& [i, a] : x.tpart) {
        for (const auto& [j, b] : y.tpart)
            out.add_t(i + j, bracket(a, b));
        for (const auto& [j, b] : y.dtpart) {
            Nil br = bracket(a, b);
            out.add_dt(i + j, x.degree % 2 != 0 ? -br : br); // (-1)^{|a|} moving dt past a
        }
    }
    for (const auto& [i, a] : x.dtpart)
        for (const auto& [j, b] : y.tpart)
            out.add_dt(i + j, bracket(a, b));
    // dt ∧ dt = 0
    return out;
}

// map the coefficients through a DGLA morphism
inline PathNil mapped(const PathNil& x, const DglaMorphism& f)
{
    PathNil out(f.tgt, x.A, x.degree);
    for (const auto& [i, m] : x.tpart)
        out.add_t(i, m.mapped(f));
    for (const auto& [i, n] : x.dtpart)
        out.add_dt(i, n.mapped(f));
    return out;
}

// t^i ⊗ m and t^i dt ⊗ m constructors
inline PathNil path_t(int i, const Nil& m)
{
    PathNil out(m.V, m.A, m.degree);
    out.add_t(i, m);
    return out;
}

inline PathNil path_dt(int i, const Nil& m)
{
    PathNil out(m.V, m.A, m.degree + 1);
    out.add_dt(i, m);
    return out;
}

// ---------------------------------------------------------------------------
// The DGLA H_{(h,g)} = {(l, n, m(t,dt)) | h(l) = e_1(m), g(n) = e_0(m)}
// with componentwise structure, and the contraction (iota, pi, K) onto the
// cone.

struct PathTriple {
    Nil l;      // constant, over L
    Nil n;      // constant, over N
    PathNil m;  // over M[t,dt]

    int degree() const { return m.degree; }

    PathTriple operator+(const PathTriple& o) const { return {l + o.l, n + o.n, m + o.m}; }
    PathTriple operator-(const PathTriple& o) const { return {l - o.l, n - o.n, m - o.m}; }
    PathTriple operator*(const Rational& q) const { return {l * q, n * q, m * q}; }
    bool is_zero() const { return l.is_zero() && n.is_zero() && m.is_zero(); }
    bool operator==(const PathTriple& o) const { return l == o.l && n == o.n && m == o.m; }
};

inline bool in_H(const PairDiagram& P, const PathTriple& v)
{
    return v.l.mapped(P.h) == v.m.eval_at(1) && v.n.mapped(P.g) == v.m.eval_at(0);
}

inline PathTriple h_zero(const PairDiagram& P, const ArtinPtr& A, int degree)
{
    return {Nil::zero(P.L, A, degree), Nil::zero(P.N, A, degree), PathNil::zero(P.M, A, degree)};
}

// componentwise differential and bracket of H (closed by the endpoint
// conditions, since the evaluations are DGLA morphisms)
inline PathTriple h_d(const PathTriple& v)
{
    return {v.l.d(), v.n.d(), v.m.d()};
}

inline PathTriple h_bracket(const PathTriple& x, const PathTriple& y)
{
    return {bracket(x.l, y.l), bracket(x.n, y.n), bracket(x.m, y.m)};
}

// suspended structure maps of H[1]
inline PathTriple h_q1(const PathTriple& v)
{
    return {-(v.l.d()), -(v.n.d()), -(v.m.d())};
}

inline PathTriple h_q2(const PathTriple& x, const PathTriple& y)
{
    PathTriple br = h_bracket(x, y);
    return x.degree() % 2 != 0 ? br * rat(-1) : br; // (-1)^{deg_H x}
}

// iota(l,n,m) = (l, n, (1-t) g(n) + t h(l) + dt m)
inline PathTriple iota(const PairDiagram& P, const ConeNil& v)
{
    PathNil path(P.M, v.l.A, v.cone_degree());
    Nil gn = v.n.mapped(P.g);
    Nil hl = v.l.mapped(P.h);
    path.add_t(0, gn);
    path.add_t(1, hl - gn);
    path.add_dt(0, v.m);
    return {v.l, v.n, path};
}

// pi(l,n,m) = (l, n, ∫_0^1 m)
inline ConeNil pi(const PairDiagram& P, const PathTriple& v)
{
    if (!in_H(P, v))
        throw error("pi: element is not in H");
    return {v.l, v.n, v.m.integrate(0, 1)};
}

// K(l,n,m) = (0, 0, t ∫_0^1 m - ∫_0^t m)
inline PathTriple homotopy_K(const PairDiagram& P, const PathTriple& v)
{
    PathNil out(P.M, v.m.A, v.degree() - 1);
    Nil total = v.m.integrate(0, 1);
    out.add_t(1, total);
    PathNil cumulative = v.m.integrate_from_zero();
    out = out - cumulative;
    return {Nil::zero(P.L, v.l.A, v.degree() - 1), Nil::zero(P.N, v.n.A, v.degree() - 1), out};
}

inline PathTriple iota_pi(const PairDiagram& P, const PathTriple& v)
{
    return iota(P, pi(P, v));
}

// contraction identities: pi ∘ iota = id,  id - iota ∘ pi = K q1 + q1 K,
// and the side condition q2(Im K ⊗ Im K) ⊆ ker pi ∩ ker K
struct ContractionReport {
    bool pi_iota_identity = true;
    bool homotopy_identity = true;
    bool side_condition = true;
    bool ok() const { return pi_iota_identity && homotopy_identity && side_condition; }
};

inline ContractionReport contraction_check(const PairDiagram& P,
                                           const std::vector<ConeNil>& cone_samples,
                                           const std::vector<PathTriple>& path_samples)
{
    ContractionReport rep;
    for (const auto& v : cone_samples)
        if (!(pi(P, iota(P, v)) == v))
            rep.pi_iota_identity = false;

    for (const auto& v : path_samples) {
        if (!in_H(P, v))
            throw error("contraction_check: sample not in H");
        PathTriple lhs = v - iota_pi(P, v);
        PathTriple rhs = homotopy_K(P, h_q1(v)) + h_q1(homotopy_K(P, v));
        if (!(lhs == rhs))
            rep.homotopy_identity = false;
    }

    for (size_t i = 0; i + 1 < path_samples.size(); i += 2) {
        PathTriple a = homotopy_K(P, path_samples[i]);
        PathTriple b = homotopy_K(P, path_samples[i + 1]);
        PathTriple q = h_q2(a, b);
        if (!pi(P, q).m.is_zero() || !homotopy_K(P, q).is_zero())
            rep.side_condition = false;
        ConeNil piq = pi(P, q);
        if (!piq.l.is_zero() || !piq.n.is_zero())
            rep.side_condition = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Quadruples (l, n, m1(t,dt), m2(s,ds)) with h(l) = e_1(m2), g(n) = e_0(m1);
// the barycentric embedding sends (l,n,m) to (l, n, m(t/2), m((s+1)/2)).

struct KQuadruple {
    Nil l;
    Nil n;
    PathNil m1;
    PathNil m2;

    bool operator==(const KQuadruple& o) const
    {
        return l == o.l && n == o.n && m1 == o.m1 && m2 == o.m2;
    }
};

inline bool in_K(const PairDiagram& P, const KQuadruple& v)
{
    return v.l.mapped(P.h) == v.m2.eval_at(1) && v.n.mapped(P.g) == v.m1.eval_at(0);
}

inline KQuadruple barycentric_embed(const PairDiagram& P, const PathTriple& v)
{
    if (!in_H(P, v))
        throw error("barycentric_embed: element is not in H");
    KQuadruple out{v.l, v.n, v.m.substitute_affine(rat(1, 2), rat(0)),
                   v.m.substitute_affine(rat(1, 2), rat(1, 2))};
    if (!in_K(P, out))
        throw error("barycentric_embed: image violates the K membership conditions");
    if (!(out.m1.eval_at(1) == out.m2.eval_at(0)))
        throw error("barycentric_embed: midpoint values do not match");
    return out;
}

inline KQuadruple kq_d(const KQuadruple& v)
{
    return {v.l.d(), v.n.d(), v.m1.d(), v.m2.d()};
}

inline KQuadruple kq_bracket(const KQuadruple& x, const KQuadruple& y)
{
    return {bracket(x.l, y.l), bracket(x.n, y.n), bracket(x.m1, y.m1), bracket(x.m2, y.m2)};
}

// ---------------------------------------------------------------------------
// Path-object lemmas.

// e^{gpoly(t)} * x in M[t,dt]; the output is verified Maurer-Cartan.
inline PathNil mc_path_from_gauge(const Nil& x, const PathNil& gpoly)
{
    if (!gpoly.dtpart.empty())
        throw error("mc_path_from_gauge: gauge polynomial must have no dt part");
    if (!gpoly.eval_at(0).is_zero())
        throw error("mc_path_from_gauge: gauge polynomial must vanish at t = 0");
    if (!is_mc(x))
        throw error("mc_path_from_gauge: base element is not Maurer-Cartan");
    PathNil out = gauge_action(gpoly, PathNil::constant(x));
    if (!is_mc(out))
        throw error("mc_path_from_gauge: result failed the Maurer-Cartan check");
    return out;
}

// Solve e^{lambda(t)} * xpath(0) = xpath for a t-polynomial lambda with
// lambda(0) = 0, order by order in m_A; correctness is enforced by the exact
// reconstruction check, not trusted from the solver.
inline PathNil mc_path_decompose(const PathNil& xpath)
{
    if (!is_mc(xpath))
        throw error("mc_path_decompose: input is not Maurer-Cartan in M[t,dt]");
    const ArtinPtr& A = xpath.A;
    Nil x0 = xpath.eval_at(0);
    PathNil lambda = PathNil::zero(xpath.V, A, 0);

    for (int order = 1; order < A->nilpotency_order; ++order) {
        PathNil residual = gauge_action(lambda, PathNil::constant(x0)) - xpath;
        if (residual.is_zero())
            break;
        PathNil rk = residual.component_order(order);
        // dt-part of the residual changes by -(d/dt) dlambda; integrate it
        PathNil dl = PathNil::zero(xpath.V, A, 0);
        for (const auto& [i, n] : rk.dtpart)
            dl.add_t(i + 1, n * Rational(1, i + 1));
        lambda = lambda + dl;
    }

    if (!(gauge_action(lambda, PathNil::constant(x0)) == xpath))
        throw error("mc_path_decompose: reconstruction failed");
    return lambda;
}

// Given a Maurer-Cartan path fixed by e^{mu}, produce C in M^{-1} ⊗ m_A with
// mu(1) = d C + [x(1), C]. Constant case: C = -∫_0^1 mu^{-1}(s) ds; the
// general case decomposes the path, conjugates the loop to the constant
// case, and transports back by one exact linear solve (the stabilizer
// conjugation property guarantees solvability). Verified by substitution.
inline Nil stabilizer_from_loop(const PathNil& xpath, const PathNil& mu)
{
    if (mu.degree != 0)
        throw error("stabilizer_from_loop: mu must have degree 0");
    if (!mu.eval_at(0).is_zero())
        throw error("stabilizer_from_loop: mu(0) != 0");
    if (!(gauge_action(mu, xpath) == xpath))
        throw error("stabilizer_from_loop: e^mu does not fix the path");

    const ArtinPtr& A = xpath.A;
    const DglaPtr& M = xpath.V;
    Nil x1 = xpath.eval_at(1);
    Nil C(M, A, -1);

    if (xpath.is_constant()) {
        C = -(mu.integrate(0, 1));
    } else {
        PathNil lambda = mc_path_decompose(xpath);
        PathNil q = bch(bch(-lambda, mu), lambda); // -lambda • mu • lambda
        Nil C0 = -(q.integrate(0, 1));
        // sanity on the constant case: q(1) = d C0 + [x(0), C0]
        Nil x0 = xpath.eval_at(0);
        if (!(q.eval_at(1) == C0.d() + bracket(x0, C0)))
            throw error("stabilizer_from_loop: constant-case extraction failed");
        // transport: solve mu(1) = d C + [x(1), C] exactly
        const auto dm1 = M->space->indices_in_degree(-1);
        const auto d0 = M->space->indices_in_degree(0);
        const int nm = A->dim();
        std::map<int, int> row_of;
        for (size_t i = 0; i < d0.size(); ++i)
            row_of[d0[i]] = static_cast<int>(i);
        Mat sys(static_cast<int>(d0.size()) * nm, static_cast<int>(dm1.size()) * nm);
        int col = 0;
        for (int j : dm1)
            for (int mono = 0; mono < nm; ++mono, ++col) {
                Nil e(M, A, -1);
                e.add_term(j, mono, rat(1));
                Nil img = e.d() + bracket(x1, e);
                for (const auto& [key, cc] : img.c)
                    sys.at(row_of.at(key.first) * nm + key.second, col) = cc;
            }
        DenseVec rhs(static_cast<size_t>(d0.size()) * nm, Rational(0));
        Nil mu1 = mu.eval_at(1);
        for (const auto& [key, cc] : mu1.c)
            rhs[static_cast<size_t>(row_of.at(key.first)) * nm + key.second] = cc;
        auto sol = solve(sys, rhs);
        if (!sol)
            throw error("stabilizer_from_loop: transport system inconsistent");
        col = 0;
        for (int j : dm1)
            for (int mono = 0; mono < nm; ++mono, ++col)
                if ((*sol)[col] != 0)
                    C.add_term(j, mono, (*sol)[col]);
    }

    if (!(mu.eval_at(1) == C.d() + bracket(x1, C)))
        throw error("stabilizer_from_loop: verification failed");
    return C;
}

} // namespace conedef
