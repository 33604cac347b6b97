#pragma once

// The Boolean poset of subsets of {1..n}: faces as bitmasks, simplicial
// complexes as downward-closed families, links, chains and multidegrees.
//
// Library code indexes vertices from 0 (vertex v is bit v).  Text formats and
// human-readable output use 1-based vertex names.

#include "errors.hpp"
#include "exactlin.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace hochster {

inline constexpr int max_vertices = 16;

struct Face {
    std::uint32_t mask = 0;

    constexpr Face() = default;
    constexpr explicit Face(std::uint32_t m) : mask(m) {}

    static Face from_vertices(const std::vector<int>& zero_based)
    {
        Face f;
        for (int v : zero_based) {
            if (v < 0 || v >= max_vertices)
                throw Error(ErrorKind::vertex_range, "vertex " + std::to_string(v + 1) + " outside 1.." +
                                                         std::to_string(max_vertices));
            f.mask |= 1u << v;
        }
        return f;
    }

    static Face full(int n) { return Face(n >= 32 ? ~0u : ((1u << n) - 1u)); }

    int size() const { return std::popcount(mask); }
    bool empty() const { return mask == 0; }
    bool contains(int v) const { return (mask >> v) & 1u; }
    bool subset_of(Face other) const { return (mask & ~other.mask) == 0; }
    Face with(int v) const { return Face(mask | (1u << v)); }
    Face without(int v) const { return Face(mask & ~(1u << v)); }
    Face complement(int n) const { return Face(full(n).mask & ~mask); }
    Face operator|(Face o) const { return Face(mask | o.mask); }
    Face operator&(Face o) const { return Face(mask & o.mask); }
    Face operator-(Face o) const { return Face(mask & ~o.mask); }

    std::vector<int> vertices() const
    {
        std::vector<int> out;
        for (std::uint32_t m = mask; m; m &= m - 1)
            out.push_back(std::countr_zero(m));
        return out;
    }

    /// 1-based rendering, e.g. "{1,3}"; the empty face is "{}".
    std::string to_string() const
    {
        std::string out = "{";
        bool first = true;
        for (int v : vertices()) {
            if (!first)
                out += ',';
            out += std::to_string(v + 1);
            first = false;
        }
        return out + "}";
    }

    friend constexpr auto operator<=>(Face a, Face b) = default;
};

/// All 2^n faces in increasing bitmask order.
inline std::vector<Face> all_faces(int n)
{
    std::vector<Face> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t m = 0; m < (1u << n); ++m)
        out.emplace_back(m);
    return out;
}

inline void check_vertex_bound(int n)
{
    if (n < 0 || n > max_vertices)
        throw Error(ErrorKind::capacity, "vertex bound " + std::to_string(n) + " outside 0.." + std::to_string(max_vertices));
}

// ---------------------------------------------------------------------------
// Simplicial complexes
// ---------------------------------------------------------------------------

class SRComplex {
public:
    SRComplex() = default;

    /// Builds from an explicit face set, rejecting families that are not
    /// downward closed.
    SRComplex(int n, const std::vector<Face>& faces) : n_(n)
    {
        check_vertex_bound(n);
        member_.assign(std::size_t{1} << n, 0);
        for (Face f : faces) {
            if (!f.subset_of(Face::full(n)))
                throw Error(ErrorKind::vertex_range, "face " + f.to_string() + " not inside 1.." + std::to_string(n));
            member_[f.mask] = 1;
        }
        for (std::uint32_t m = 0; m < member_.size(); ++m)
            if (member_[m])
                for (int v : Face(m).vertices())
                    if (!member_[Face(m).without(v).mask])
                        throw Error(ErrorKind::invalid_argument, "face set is not downward closed at " + Face(m).to_string());
    }

    static SRComplex from_facets(int n, const std::vector<Face>& facets)
    {
        check_vertex_bound(n);
        SRComplex k;
        k.n_ = n;
        k.member_.assign(std::size_t{1} << n, 0);
        for (Face f : facets) {
            if (!f.subset_of(Face::full(n)))
                throw Error(ErrorKind::vertex_range, "facet " + f.to_string() + " not inside 1.." + std::to_string(n));
            k.member_[f.mask] = 1;
        }
        // downward closure, processing larger masks first
        for (std::uint32_t m = static_cast<std::uint32_t>(k.member_.size()); m-- > 0;)
            if (k.member_[m])
                for (int v : Face(m).vertices())
                    k.member_[Face(m).without(v).mask] = 1;
        return k;
    }

    static SRComplex full_simplex(int n) { return from_facets(n, {Face::full(n)}); }
    static SRComplex void_complex(int n) { return from_facets(n, {}); }
    static SRComplex irrelevant(int n) { return from_facets(n, {Face()}); }

    int n() const { return n_; }
    bool contains(Face f) const { return f.mask < member_.size() && member_[f.mask]; }
    bool is_void() const { return member_.empty() || !member_[0]; }

    std::vector<Face> faces() const
    {
        std::vector<Face> out;
        for (std::uint32_t m = 0; m < member_.size(); ++m)
            if (member_[m])
                out.emplace_back(m);
        return out;
    }

    std::size_t face_count() const
    {
        std::size_t c = 0;
        for (char b : member_)
            c += b;
        return c;
    }

    std::vector<Face> facets() const
    {
        std::vector<Face> out;
        for (Face f : faces()) {
            bool maximal = true;
            for (int v = 0; v < n_ && maximal; ++v)
                if (!f.contains(v) && contains(f.with(v)))
                    maximal = false;
            if (maximal)
                out.push_back(f);
        }
        return out;
    }

    /// 1-based facet list, e.g. "{1,2} {1,3} {2,3}"; "void" for the void complex.
    std::string to_string() const
    {
        if (is_void())
            return "void";
        std::string out;
        for (Face f : facets()) {
            if (!out.empty())
                out += ' ';
            out += f.to_string();
        }
        return out;
    }

    friend bool operator==(const SRComplex& a, const SRComplex& b) { return a.n_ == b.n_ && a.member_ == b.member_; }

private:
    int n_ = 0;
    std::vector<char> member_;
};

/// {q : q disjoint from p, q u p in K}, including the empty face.
inline SRComplex link(const SRComplex& k, Face p)
{
    if (!k.contains(p))
        throw Error(ErrorKind::domain, "face " + p.to_string() + " is not in the complex");
    std::vector<Face> faces;
    for (Face q : k.faces())
        if ((q & p).empty() && k.contains(q | p))
            faces.push_back(q);
    return SRComplex(k.n(), faces);
}

/// Every downward-closed family of subsets of {1..n}, the void complex first.
inline std::vector<SRComplex> enumerate_complexes(int n)
{
    if (n < 0 || n > 4)
        throw Error(ErrorKind::capacity, "exhaustive enumeration is limited to n <= 4, got " + std::to_string(n));
    const std::uint32_t total = 1u << n;
    std::vector<SRComplex> out;
    std::vector<Face> chosen;
    std::vector<char> in(total, 0);
    // Faces are decided in increasing mask order, so all proper subfaces of a
    // face are decided before the face itself.
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t m) {
        if (m == total) {
            out.emplace_back(n, chosen);
            return;
        }
        rec(m + 1);
        bool allowed = true;
        for (int v : Face(m).vertices())
            if (!in[Face(m).without(v).mask])
                allowed = false;
        if (m == 0 || allowed) {
            in[m] = 1;
            chosen.emplace_back(m);
            rec(m + 1);
            chosen.pop_back();
            in[m] = 0;
        }
    };
    rec(0);
    return out;
}

/// Augmented simplicial cochain complex of K: degree d has the faces with
/// d+1 vertices, so the empty face sits in degree -1.
inline CochainComplex reduced_cochain_complex(const SRComplex& k, const CoefficientRing& ring)
{
    const int n = k.n();
    std::vector<std::vector<Face>> by_size(static_cast<std::size_t>(n) + 1);
    for (Face f : k.faces())
        by_size[static_cast<std::size_t>(f.size())].push_back(f);
    int top = -1;
    for (int s = 0; s <= n; ++s)
        if (!by_size[static_cast<std::size_t>(s)].empty())
            top = s - 1;
    if (top < -1 || k.is_void())
        return CochainComplex(ring, -1, {0}, {});
    std::vector<std::size_t> dims;
    std::vector<std::map<std::uint32_t, std::size_t>> index(static_cast<std::size_t>(top) + 2);
    for (int d = -1; d <= top; ++d) {
        const auto& list = by_size[static_cast<std::size_t>(d + 1)];
        dims.push_back(list.size());
        for (std::size_t i = 0; i < list.size(); ++i)
            index[static_cast<std::size_t>(d + 1)][list[i].mask] = i;
    }
    std::vector<ExactMatrix> diffs;
    for (int d = -1; d < top; ++d) {
        const auto& tgt = by_size[static_cast<std::size_t>(d + 2)];
        const auto& src_index = index[static_cast<std::size_t>(d + 1)];
        ExactMatrix m(ring, tgt.size(), by_size[static_cast<std::size_t>(d + 1)].size());
        for (std::size_t r = 0; r < tgt.size(); ++r) {
            auto verts = tgt[r].vertices();
            for (std::size_t j = 0; j < verts.size(); ++j)
                m.set(r, src_index.at(tgt[r].without(verts[j]).mask), (j % 2 == 0) ? 1 : -1);
        }
        diffs.push_back(std::move(m));
    }
    return CochainComplex(ring, -1, std::move(dims), std::move(diffs));
}

/// Reduced cohomology H~^d(K), d >= -1.
inline ModuleSummary reduced_cohomology(const SRComplex& k, int d, const CoefficientRing& ring)
{
    return cohomology_at(reduced_cochain_complex(k, ring), d);
}

// ---------------------------------------------------------------------------
// Multidegrees and windows
// ---------------------------------------------------------------------------

class Multidegree {
public:
    Multidegree() = default;
    explicit Multidegree(std::vector<int> a) : a_(std::move(a)) {}
    Multidegree(std::initializer_list<int> a) : a_(a) {}

    static Multidegree zero(int n) { return Multidegree(std::vector<int>(static_cast<std::size_t>(n), 0)); }

    int n() const { return static_cast<int>(a_.size()); }
    int operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
    int& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& values() const { return a_; }

    Face pos_support() const
    {
        Face f;
        for (int i = 0; i < n(); ++i)
            if ((*this)[i] > 0)
                f = f.with(i);
        return f;
    }

    Face neg_support() const
    {
        Face f;
        for (int i = 0; i < n(); ++i)
            if ((*this)[i] < 0)
                f = f.with(i);
        return f;
    }

    bool nonnegative() const { return neg_support().empty(); }

    int total() const
    {
        int t = 0;
        for (int v : a_)
            t += v;
        return t;
    }

    Multidegree plus_unit(int j, int amount = 1) const
    {
        Multidegree out = *this;
        out[j] += amount;
        return out;
    }

    Multidegree operator+(const Multidegree& o) const
    {
        if (o.n() != n())
            throw Error(ErrorKind::shape_mismatch, "multidegree lengths differ");
        Multidegree out = *this;
        for (int i = 0; i < n(); ++i)
            out[i] += o[i];
        return out;
    }

    Multidegree operator-(const Multidegree& o) const
    {
        Multidegree neg = o;
        for (int i = 0; i < n(); ++i)
            neg[i] = -neg[i];
        return *this + neg;
    }

    std::string to_string() const
    {
        std::string out = "(";
        for (int i = 0; i < n(); ++i) {
            if (i)
                out += ',';
            out += std::to_string((*this)[i]);
        }
        return out + ")";
    }

    friend auto operator<=>(const Multidegree&, const Multidegree&) = default;

private:
    std::vector<int> a_;
};

/// l on the coordinates of p, 0 elsewhere.
inline Multidegree shift_vector(int l, Face p, int n)
{
    Multidegree out = Multidegree::zero(n);
    for (int v : p.vertices())
        if (v < n)
            out[v] = l;
    return out;
}

/// A finite box of multidegrees, lo[i] <= a_i <= hi[i].
struct Window {
    std::vector<int> lo;
    std::vector<int> hi;

    static Window cube(int n, int lo, int hi)
    {
        return Window{std::vector<int>(static_cast<std::size_t>(n), lo), std::vector<int>(static_cast<std::size_t>(n), hi)};
    }

    int n() const { return static_cast<int>(lo.size()); }

    void validate() const
    {
        if (lo.size() != hi.size())
            throw Error(ErrorKind::invalid_argument, "window bounds have different lengths");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (lo[i] > hi[i])
                throw Error(ErrorKind::invalid_argument, "empty window in coordinate " + std::to_string(i + 1));
    }

    bool contains(const Multidegree& a) const
    {
        if (a.n() != n())
            return false;
        for (int i = 0; i < n(); ++i)
            if (a[i] < lo[static_cast<std::size_t>(i)] || a[i] > hi[static_cast<std::size_t>(i)])
                return false;
        return true;
    }

    /// Points in lexicographic order (first coordinate slowest).
    std::vector<Multidegree> points() const
    {
        validate();
        std::vector<Multidegree> out;
        Multidegree cur(lo);
        if (n() == 0)
            return {cur};
        for (;;) {
            out.push_back(cur);
            int i = n() - 1;
            while (i >= 0 && cur[i] == hi[static_cast<std::size_t>(i)]) {
                cur[i] = lo[static_cast<std::size_t>(i)];
                --i;
            }
            if (i < 0)
                break;
            ++cur[i];
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

using Chain = std::vector<Face>;

/// Strictly increasing chains of the sub-poset `elements` (which need not be
/// sorted), grouped by length - 1 and ordered lexicographically by bitmask.
/// When `keep` is given, only chains whose top element satisfies it are kept
/// (extensions are still explored through rejected tops).
inline std::vector<std::vector<Chain>> enumerate_chains(std::vector<Face> elements,
                                                        const std::function<bool(const Chain&)>& keep = {})
{
    std::sort(elements.begin(), elements.end());
    std::vector<std::vector<Chain>> out;
    Chain cur;
    std::function<void(std::size_t)> extend = [&](std::size_t start) {
        const std::size_t len = cur.size();
        if (!keep || keep(cur)) {
            if (out.size() < len)
                out.resize(len);
            out[len - 1].push_back(cur);
        }
        for (std::size_t k = start; k < elements.size(); ++k) {
            if (cur.back() != elements[k] && cur.back().subset_of(elements[k])) {
                cur.push_back(elements[k]);
                extend(k + 1);
                cur.pop_back();
            }
        }
    };
    for (std::size_t k = 0; k < elements.size(); ++k) {
        cur.assign(1, elements[k]);
        extend(k + 1);
    }
    return out;
}

/// Faces of the open set U_p (supersets of p) within {1..n}.
inline std::vector<Face> open_star(Face p, int n)
{
    const Face rest = p.complement(n);
    // enumerate submasks of rest in increasing order
    std::vector<Face> subs;
    for (std::uint32_t s = rest.mask;; s = (s - 1) & rest.mask) {
        subs.emplace_back(s | p.mask);
        if (s == 0)
            break;
    }
    std::sort(subs.begin(), subs.end());
    return subs;
}

/// Faces of the closure C_p (subsets of p).
inline std::vector<Face> closure(Face p)
{
    std::vector<Face> subs;
    for (std::uint32_t s = p.mask;; s = (s - 1) & p.mask) {
        subs.emplace_back(s);
        if (s == 0)
            break;
    }
    std::sort(subs.begin(), subs.end());
    return subs;
}

} // namespace hochster
