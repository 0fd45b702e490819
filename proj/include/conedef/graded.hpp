#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "rational.hpp"

namespace conedef {

// Sparse vector over a basis, keyed by basis index. Entries are kept
// nonzero; helpers erase zeros eagerly so is_zero() == empty().
using SparseVec = std::map<int, Rational>;

inline void sv_add(SparseVec& dst, const SparseVec& src, const Rational& coef = Rational(1))
{
    if (coef == 0)
        return;
    for (const auto& [i, c] : src) {
        auto it = dst.find(i);
        if (it == dst.end()) {
            dst.emplace(i, c * coef);
        } else {
            it->second += c * coef;
            if (it->second == 0)
                dst.erase(it);
        }
    }
}

inline SparseVec sv_scale(const SparseVec& v, const Rational& coef)
{
    SparseVec out;
    if (coef == 0)
        return out;
    for (const auto& [i, c] : v)
        out.emplace(i, c * coef);
    return out;
}

inline SparseVec sv_unit(int i, const Rational& c = Rational(1))
{
    SparseVec v;
    if (c != 0)
        v.emplace(i, c);
    return v;
}

// ---------------------------------------------------------------------------
// Permutations of {1..n}, stored 0-based.

struct Permutation {
    std::vector<int> img; // img[k] = sigma(k+1)-1

    explicit Permutation(std::vector<int> images = {}) : img(std::move(images)) {}

    static Permutation identity(int n)
    {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return Permutation(std::move(v));
    }

    int size() const { return static_cast<int>(img.size()); }
    int operator()(int k) const { return img[k]; }

    bool is_bijection() const
    {
        std::vector<char> seen(img.size(), 0);
        for (int v : img) {
            if (v < 0 || v >= size() || seen[v])
                return false;
            seen[v] = 1;
        }
        return true;
    }

    Permutation compose(const Permutation& other) const
    {
        // (this∘other)(k) = this(other(k))
        std::vector<int> v(img.size());
        for (int k = 0; k < size(); ++k)
            v[k] = img[other.img[k]];
        return Permutation(std::move(v));
    }

    bool operator==(const Permutation& o) const { return img == o.img; }
    bool operator<(const Permutation& o) const { return img < o.img; }
};

// Koszul sign of sigma acting on graded symbols v_1..v_n:
//   sigma(v_1 ⊗...⊗ v_n) = eps(sigma) v_{sigma(1)} ⊗...⊗ v_{sigma(n)},
// a factor (-1)^{|x||y|} per transposed pair of odd symbols.
inline int koszul_sign(const Permutation& sigma, const std::vector<int>& degrees)
{
    const int n = sigma.size();
    if (static_cast<int>(degrees.size()) != n)
        throw error("koszul_sign: degree list does not match permutation size");
    int sign = 1;
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l)
            if (sigma(k) > sigma(l) && (degrees[sigma(k)] % 2 != 0) && (degrees[sigma(l)] % 2 != 0))
                sign = -sign;
    return sign;
}

// Unshuffles S(p,q): permutations increasing on the first p and last q slots.
// Each is determined by the image set of the first block; subsets are emitted
// in lexicographic order, so the listing is deterministic.
inline std::vector<Permutation> unshuffles(int p, int q)
{
    if (p < 0 || q < 0)
        throw error("unshuffles: negative arguments");
    const int n = p + q;
    std::vector<Permutation> out;
    std::vector<int> pick(p);
    std::iota(pick.begin(), pick.end(), 0);
    auto emit = [&]() {
        std::vector<char> used(n, 0);
        std::vector<int> img(n);
        for (int k = 0; k < p; ++k) {
            img[k] = pick[k];
            used[pick[k]] = 1;
        }
        int pos = p;
        for (int v = 0; v < n; ++v)
            if (!used[v])
                img[pos++] = v;
        out.emplace_back(std::move(img));
    };
    if (p == 0 || q == 0) {
        out.push_back(Permutation::identity(n));
        return out;
    }
    while (true) {
        emit();
        int i = p - 1;
        while (i >= 0 && pick[i] == n - p + i)
            --i;
        if (i < 0)
            break;
        ++pick[i];
        for (int j = i + 1; j < p; ++j)
            pick[j] = pick[j - 1] + 1;
    }
    return out;
}

inline std::vector<Permutation> all_permutations(int n)
{
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    std::vector<Permutation> out;
    do {
        out.emplace_back(img);
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

// ---------------------------------------------------------------------------
// Finite-dimensional graded vector space with a named basis.

struct GradedSpace {
    std::vector<std::string> names;
    std::vector<int> degrees;
    std::map<std::string, int> index;

    static GradedSpace make(const std::vector<std::pair<std::string, int>>& basis)
    {
        GradedSpace s;
        for (const auto& [name, deg] : basis) {
            if (s.index.count(name))
                throw error("duplicate basis name: " + name);
            s.index.emplace(name, static_cast<int>(s.names.size()));
            s.names.push_back(name);
            s.degrees.push_back(deg);
        }
        return s;
    }

    int dim() const { return static_cast<int>(names.size()); }

    int find(const std::string& name) const
    {
        auto it = index.find(name);
        return it == index.end() ? -1 : it->second;
    }

    std::vector<int> indices_in_degree(int d) const
    {
        std::vector<int> out;
        for (int i = 0; i < dim(); ++i)
            if (degrees[i] == d)
                out.push_back(i);
        return out;
    }

    int min_degree() const
    {
        int m = 0;
        for (int i = 0; i < dim(); ++i)
            m = std::min(m, degrees[i]);
        return m;
    }

    int max_degree() const
    {
        int m = 0;
        for (int i = 0; i < dim(); ++i)
            m = std::max(m, degrees[i]);
        return m;
    }

    bool operator==(const GradedSpace& o) const
    {
        return names == o.names && degrees == o.degrees;
    }
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

// V[k]: same basis, every degree decreased by k.
inline GradedSpace shift(const GradedSpace& v, int k)
{
    GradedSpace s = v;
    for (int& d : s.degrees)
        d -= k;
    return s;
}

// ---------------------------------------------------------------------------
// Graded linear map of pure degree, stored column-sparse.

struct GradedMap {
    SpacePtr src;
    SpacePtr tgt;
    int degree = 0;
    std::map<int, SparseVec> cols; // src index -> target vector

    GradedMap() = default;
    GradedMap(SpacePtr s, SpacePtr t, int deg) : src(std::move(s)), tgt(std::move(t)), degree(deg) {}

    static GradedMap zero(SpacePtr s, SpacePtr t, int deg) { return GradedMap(std::move(s), std::move(t), deg); }

    static GradedMap identity(SpacePtr s)
    {
        GradedMap m(s, s, 0);
        for (int i = 0; i < s->dim(); ++i)
            m.cols.emplace(i, sv_unit(i));
        return m;
    }

    void set(int src_idx, int tgt_idx, const Rational& c)
    {
        if (c == 0)
            return;
        cols[src_idx][tgt_idx] = c;
    }

    void add(int src_idx, int tgt_idx, const Rational& c)
    {
        auto& col = cols[src_idx];
        col[tgt_idx] += c;
        if (col[tgt_idx] == 0)
            col.erase(tgt_idx);
        if (col.empty())
            cols.erase(src_idx);
    }

    SparseVec column(int src_idx) const
    {
        auto it = cols.find(src_idx);
        return it == cols.end() ? SparseVec{} : it->second;
    }

    SparseVec apply(const SparseVec& v) const
    {
        SparseVec out;
        for (const auto& [i, c] : v) {
            auto it = cols.find(i);
            if (it != cols.end())
                sv_add(out, it->second, c);
        }
        return out;
    }

    // this ∘ other
    GradedMap compose(const GradedMap& other) const
    {
        if (!(*other.tgt == *src))
            throw error("GradedMap::compose: space mismatch");
        GradedMap out(other.src, tgt, degree + other.degree);
        for (const auto& [j, col] : other.cols) {
            SparseVec v = apply(col);
            if (!v.empty())
                out.cols.emplace(j, std::move(v));
        }
        return out;
    }

    bool is_zero() const { return cols.empty(); }

    // Entries must connect basis elements whose degrees differ by `degree`.
    std::vector<std::string> degree_violations() const
    {
        std::vector<std::string> out;
        for (const auto& [j, col] : cols)
            for (const auto& [i, c] : col)
                if (tgt->degrees[i] != src->degrees[j] + degree)
                    out.push_back(src->names[j] + " -> " + tgt->names[i]);
        return out;
    }

    bool operator==(const GradedMap& o) const
    {
        return degree == o.degree && *src == *o.src && *tgt == *o.tgt && cols == o.cols;
    }
};

} // namespace conedef
