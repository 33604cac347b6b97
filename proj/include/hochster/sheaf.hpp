#pragma once

// Sheaves of finite free modules on the Boolean poset, their sections
// complexes, cohomology with supports and the injective decomposition.
//
// A sheaf is a stalk rank for every face plus a restriction matrix for every
// covering pair p -> p u {v}.  Sections over a sub-poset S are computed with
// the cochain complex on strictly increasing chains p_0 < ... < p_i of S,
// whose cochains take values in the stalk at the top element p_i.

#include "cube_poset.hpp"
#include "exactlin.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <variant>

namespace hochster {

class Sheaf {
public:
    Sheaf() : ring_(CoefficientRing::rationals()) {}

    int n() const { return n_; }
    const CoefficientRing& ring() const { return ring_; }
    std::size_t rank(Face p) const { return ranks_[p.mask]; }

    /// r_{p, p u {v}} for v not in p.
    const ExactMatrix& cover_restriction(Face p, int v) const
    {
        if (p.contains(v) || v < 0 || v >= n_)
            throw Error(ErrorKind::invalid_argument, "no covering pair " + p.to_string() + " + " + std::to_string(v + 1));
        return covers_[p.mask][static_cast<std::size_t>(v)];
    }

    /// r_{pq} for p subset of q, composed by adding the missing vertices in
    /// increasing order (any order gives the same map on a validated sheaf).
    ExactMatrix restriction(Face p, Face q) const
    {
        if (!p.subset_of(q))
            throw Error(ErrorKind::invalid_argument, p.to_string() + " is not below " + q.to_string());
        if (p == q)
            return ExactMatrix::identity(ring_, rank(p));
        const std::uint64_t key = (std::uint64_t{p.mask} << 32) | q.mask;
        {
            std::shared_lock lock(cache_->mutex);
            auto it = cache_->maps.find(key);
            if (it != cache_->maps.end())
                return it->second;
        }
        ExactMatrix m = ExactMatrix::identity(ring_, rank(p));
        Face cur = p;
        for (int v : (q - p).vertices()) {
            m = cover_restriction(cur, v) * m;
            cur = cur.with(v);
        }
        std::unique_lock lock(cache_->mutex);
        cache_->maps.emplace(key, m);
        return m;
    }

    /// Faces with a nonzero stalk.
    std::vector<Face> support() const
    {
        std::vector<Face> out;
        for (Face f : all_faces(n_))
            if (rank(f) > 0)
                out.push_back(f);
        return out;
    }

    /// Downward closure of the support, as a complex.
    SRComplex support_closure() const { return SRComplex::from_facets(n_, support()); }

    friend class SheafBuilder;

private:
    struct Cache {
        std::shared_mutex mutex;
        std::unordered_map<std::uint64_t, ExactMatrix> maps;
    };

    int n_ = 0;
    CoefficientRing ring_;
    std::vector<std::size_t> ranks_;
    std::vector<std::vector<ExactMatrix>> covers_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Collects stalk ranks and covering restrictions, then validates shapes and
/// commuting squares in build().
class SheafBuilder {
public:
    SheafBuilder(int n, CoefficientRing ring) : n_(n), ring_(ring)
    {
        check_vertex_bound(n);
        ranks_.assign(std::size_t{1} << n, 0);
    }

    SheafBuilder& set_rank(Face p, std::size_t r)
    {
        check_face(p);
        ranks_[p.mask] = r;
        return *this;
    }

    SheafBuilder& set_restriction(Face p, int v, ExactMatrix m)
    {
        check_face(p);
        if (v < 0 || v >= n_)
            throw Error(ErrorKind::vertex_range, "vertex " + std::to_string(v + 1) + " outside 1.." + std::to_string(n_));
        if (p.contains(v))
            throw Error(ErrorKind::invalid_argument, "vertex " + std::to_string(v + 1) + " already in " + p.to_string());
        if (m.ring() != ring_) {
            ExactMatrix converted(ring_, m.rows(), m.cols());
            for (std::size_t r = 0; r < m.rows(); ++r)
                for (const auto& e : m.row(r))
                    converted.set(r, e.col, e.value);
            m = std::move(converted);
        }
        given_[{p.mask, v}] = std::move(m);
        return *this;
    }

    Sheaf build() const
    {
        Sheaf s;
        s.n_ = n_;
        s.ring_ = ring_;
        s.ranks_ = ranks_;
        s.covers_.assign(ranks_.size(), std::vector<ExactMatrix>(static_cast<std::size_t>(n_)));
        for (Face p : all_faces(n_))
            for (int v = 0; v < n_; ++v) {
                if (p.contains(v))
                    continue;
                const Face q = p.with(v);
                const std::string pair = p.to_string() + " -> " + q.to_string();
                auto it = given_.find({p.mask, v});
                if (it == given_.end()) {
                    if (ranks_[p.mask] > 0 && ranks_[q.mask] > 0)
                        throw Error(ErrorKind::missing_restriction, "no restriction for covering pair " + pair);
                    s.covers_[p.mask][static_cast<std::size_t>(v)] = ExactMatrix(ring_, ranks_[q.mask], ranks_[p.mask]);
                    continue;
                }
                const ExactMatrix& m = it->second;
                if (m.rows() != ranks_[q.mask] || m.cols() != ranks_[p.mask])
                    throw Error(ErrorKind::shape_mismatch, "restriction for " + pair + " is " + m.shape() + ", expected " +
                                                               std::to_string(ranks_[q.mask]) + "x" +
                                                               std::to_string(ranks_[p.mask]));
                s.covers_[p.mask][static_cast<std::size_t>(v)] = m;
            }
        for (Face p : all_faces(n_))
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j) {
                    if (p.contains(i) || p.contains(j))
                        continue;
                    const ExactMatrix a = s.covers_[p.with(i).mask][static_cast<std::size_t>(j)] *
                                          s.covers_[p.mask][static_cast<std::size_t>(i)];
                    const ExactMatrix b = s.covers_[p.with(j).mask][static_cast<std::size_t>(i)] *
                                          s.covers_[p.mask][static_cast<std::size_t>(j)];
                    if (!(a == b))
                        throw Error(ErrorKind::non_commuting, "square at " + p.to_string() + " with vertices " +
                                                                  std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                                  " does not commute");
                }
        return s;
    }

private:
    void check_face(Face p) const
    {
        if (!p.subset_of(Face::full(n_)))
            throw Error(ErrorKind::vertex_range, "face " + p.to_string() + " not inside 1.." + std::to_string(n_));
    }

    int n_;
    CoefficientRing ring_;
    std::vector<std::size_t> ranks_;
    std::map<std::pair<std::uint32_t, int>, ExactMatrix> given_;
};

// ---------------------------------------------------------------------------
// Constant sheaves on locally closed carriers
// ---------------------------------------------------------------------------

struct SupportedConstant {
    struct ClosedPoint {
        Face p;
    }; // C_p
    struct OpenStar {
        Face p;
    }; // U_p
    struct Point {
        Face p;
    };
    struct Closed {
        SRComplex k;
    };
    struct Interval {
        Face lo, hi;
    }; // C_hi intersected with U_lo
    using Carrier = std::variant<ClosedPoint, OpenStar, Point, Closed, Interval>;

    Carrier carrier;
    std::size_t multiplicity = 1;

    bool contains(Face f) const
    {
        return std::visit(
            [&](const auto& c) -> bool {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, ClosedPoint>)
                    return f.subset_of(c.p);
                else if constexpr (std::is_same_v<T, OpenStar>)
                    return c.p.subset_of(f);
                else if constexpr (std::is_same_v<T, Point>)
                    return f == c.p;
                else if constexpr (std::is_same_v<T, Interval>)
                    return c.lo.subset_of(f) && f.subset_of(c.hi);
                else
                    return c.k.contains(f);
            },
            carrier);
    }
};

/// Multiplicity m on the carrier, identity restrictions inside it.
inline Sheaf build_constant(const SupportedConstant& spec, const CoefficientRing& ring, int n)
{
    if (const auto* c = std::get_if<SupportedConstant::Closed>(&spec.carrier); c && c->k.n() != n)
        throw Error(ErrorKind::invalid_argument, "complex has vertex bound " + std::to_string(c->k.n()) + ", expected " +
                                                     std::to_string(n));
    SheafBuilder b(n, ring);
    const std::size_t m = spec.multiplicity;
    for (Face p : all_faces(n))
        if (spec.contains(p))
            b.set_rank(p, m);
    for (Face p : all_faces(n))
        for (int v = 0; v < n; ++v)
            if (!p.contains(v) && spec.contains(p) && spec.contains(p.with(v)))
                b.set_restriction(p, v, ExactMatrix::identity(ring, m));
    return b.build();
}

inline Sheaf constant_on(const SRComplex& k, const CoefficientRing& ring)
{
    return build_constant({SupportedConstant::Closed{k}, 1}, ring, k.n());
}

/// Stalkwise direct sum.
inline Sheaf direct_sum(const std::vector<Sheaf>& parts, int n, const CoefficientRing& ring)
{
    SheafBuilder b(n, ring);
    for (Face p : all_faces(n)) {
        std::size_t r = 0;
        for (const auto& s : parts)
            r += s.rank(p);
        b.set_rank(p, r);
    }
    for (Face p : all_faces(n))
        for (int v = 0; v < n; ++v) {
            if (p.contains(v))
                continue;
            std::size_t rows = 0, cols = 0;
            for (const auto& s : parts) {
                rows += s.rank(p.with(v));
                cols += s.rank(p);
            }
            ExactMatrix m(ring, rows, cols);
            std::size_t r0 = 0, c0 = 0;
            for (const auto& s : parts) {
                m.add_block(r0, c0, s.cover_restriction(p, v));
                r0 += s.rank(p.with(v));
                c0 += s.rank(p);
            }
            b.set_restriction(p, v, std::move(m));
        }
    return b.build();
}

/// External product of sheaves on the two-point poset; the first factor is
/// the most significant one in the Kronecker ordering of stalk bases.
inline Sheaf box_product(const std::vector<Sheaf>& factors)
{
    if (factors.empty())
        throw Error(ErrorKind::invalid_argument, "box product of no factors");
    const auto ring = factors.front().ring();
    for (const auto& f : factors) {
        if (f.n() != 1)
            throw Error(ErrorKind::invalid_argument, "box product factors must live on one vertex");
        if (f.ring() != ring)
            throw Error(ErrorKind::invalid_argument, "box product factors over different rings");
    }
    const int n = static_cast<int>(factors.size());
    auto stalk = [&](std::size_t i, Face p) -> std::size_t {
        return factors[i].rank(Face(p.contains(static_cast<int>(i)) ? 1u : 0u));
    };
    SheafBuilder b(n, ring);
    for (Face p : all_faces(n)) {
        std::size_t r = 1;
        for (std::size_t i = 0; i < factors.size(); ++i)
            r *= stalk(i, p);
        b.set_rank(p, r);
    }
    for (Face p : all_faces(n))
        for (int v = 0; v < n; ++v) {
            if (p.contains(v))
                continue;
            ExactMatrix m = ExactMatrix::identity(ring, 1);
            for (std::size_t i = 0; i < factors.size(); ++i) {
                const ExactMatrix piece = (static_cast<int>(i) == v) ? factors[i].cover_restriction(Face(0), 0)
                                                                     : ExactMatrix::identity(ring, stalk(i, p));
                m = ExactMatrix::kronecker(m, piece);
            }
            b.set_restriction(p, v, std::move(m));
        }
    return b.build();
}

// ---------------------------------------------------------------------------
// Sections complexes
// ---------------------------------------------------------------------------

/// The chain cochain complex together with the chain bookkeeping needed to
/// build maps between such complexes.
struct SectionsComplex {
    CochainComplex complex;
    std::vector<std::vector<Chain>> chains;        // chains[i] index the blocks of term i
    std::vector<std::vector<std::size_t>> offsets; // start row of each block
    std::vector<std::map<Chain, std::size_t>> index;

    std::optional<std::size_t> block(int i, const Chain& c) const
    {
        if (i < 0 || static_cast<std::size_t>(i) >= index.size())
            return std::nullopt;
        auto it = index[static_cast<std::size_t>(i)].find(c);
        if (it == index[static_cast<std::size_t>(i)].end())
            return std::nullopt;
        return it->second;
    }
};

namespace detail {

inline SectionsComplex assemble_sections(const Sheaf& f, std::vector<std::vector<Chain>> chains)
{
    const auto& ring = f.ring();
    SectionsComplex out;
    // drop trailing empty levels, keep at least one term
    while (!chains.empty() && chains.back().empty())
        chains.pop_back();
    if (chains.empty()) {
        out.complex = CochainComplex(ring, 0, {0}, {});
        out.chains.assign(1, {});
        out.offsets.assign(1, {});
        out.index.assign(1, {});
        return out;
    }
    std::vector<std::size_t> dims;
    for (const auto& level : chains) {
        std::vector<std::size_t> offs;
        std::map<Chain, std::size_t> idx;
        std::size_t total = 0;
        for (std::size_t k = 0; k < level.size(); ++k) {
            offs.push_back(total);
            idx.emplace(level[k], k);
            total += f.rank(level[k].back());
        }
        out.offsets.push_back(std::move(offs));
        out.index.push_back(std::move(idx));
        dims.push_back(total);
    }
    std::vector<ExactMatrix> diffs;
    for (std::size_t i = 0; i + 1 < chains.size(); ++i) {
        ExactMatrix d(ring, dims[i + 1], dims[i]);
        for (std::size_t t = 0; t < chains[i + 1].size(); ++t) {
            const Chain& c = chains[i + 1][t];
            const std::size_t row = out.offsets[i + 1][t];
            for (std::size_t j = 0; j < c.size(); ++j) {
                Chain del = c;
                del.erase(del.begin() + static_cast<std::ptrdiff_t>(j));
                auto it = out.index[i].find(del);
                if (it == out.index[i].end())
                    continue;
                const std::size_t col = out.offsets[i][it->second];
                const int sign = (j % 2 == 0) ? 1 : -1;
                if (j + 1 == c.size())
                    d.add_block(row, col, f.restriction(del.back(), c.back()), sign);
                else
                    d.add_block(row, col, ExactMatrix::identity(ring, f.rank(c.back())), sign);
            }
        }
        diffs.push_back(std::move(d));
    }
    out.complex = CochainComplex(ring, 0, std::move(dims), std::move(diffs));
    out.chains = std::move(chains);
    return out;
}

inline std::function<bool(const Chain&)> nonzero_top(const Sheaf& f)
{
    return [&f](const Chain& c) { return f.rank(c.back()) > 0; };
}

} // namespace detail

/// R Gamma(S, F) for the sub-poset S given by its elements.
inline SectionsComplex sections_complex(const Sheaf& f, const std::vector<Face>& s)
{
    return detail::assemble_sections(f, enumerate_chains(s, detail::nonzero_top(f)));
}

inline SectionsComplex sections_complex(const Sheaf& f, const std::function<bool(Face)>& in_s)
{
    std::vector<Face> elements;
    for (Face p : all_faces(f.n()))
        if (in_s(p))
            elements.push_back(p);
    return sections_complex(f, elements);
}

/// Cochains of R Gamma(S, F) supported on chains that start in Z, where Z is
/// a downward-closed part of S.  This subcomplex is the kernel of the
/// (degreewise split) surjection R Gamma(S) -> R Gamma(S - Z), hence computes
/// cohomology of S with supports in Z.
inline SectionsComplex supported_sections_complex(const Sheaf& f, const std::vector<Face>& s,
                                                  const std::function<bool(Face)>& in_z)
{
    auto keep = [&f, &in_z](const Chain& c) { return f.rank(c.back()) > 0 && in_z(c.front()); };
    return detail::assemble_sections(f, enumerate_chains(s, keep));
}

/// The kernel model of R Gamma_p(U_p, F): chains p = p_0 < p_1 < ... in U_p.
inline SectionsComplex point_supported_complex(const Sheaf& f, Face p)
{
    std::vector<Face> up = open_star(p, f.n());
    auto keep = [&f, p](const Chain& c) { return c.front() == p && f.rank(c.back()) > 0; };
    std::vector<std::vector<Chain>> chains;
    // only chains starting at p; enumerate from U_p* and prepend p
    std::vector<Face> punctured(up.begin() + 1, up.end());
    chains.push_back({});
    if (f.rank(p) > 0)
        chains[0].push_back(Chain{p});
    auto rest = enumerate_chains(punctured);
    for (std::size_t len = 0; len < rest.size(); ++len) {
        std::vector<Chain> level;
        for (const auto& c : rest[len]) {
            Chain full{p};
            full.insert(full.end(), c.begin(), c.end());
            if (keep(full))
                level.push_back(std::move(full));
        }
        chains.push_back(std::move(level));
    }
    return detail::assemble_sections(f, std::move(chains));
}

/// cone(R Gamma(U_p) -> R Gamma(U_p*))[-1], with the projection of cochains
/// onto chains avoiding p as the chain map.
inline CochainComplex point_supported_cone(const Sheaf& f, Face p)
{
    std::vector<Face> up = open_star(p, f.n());
    std::vector<Face> punctured(up.begin() + 1, up.end());
    SectionsComplex a = sections_complex(f, up);
    SectionsComplex b = sections_complex(f, punctured);
    std::map<int, ExactMatrix> proj;
    for (int i = 0; i <= a.complex.hi(); ++i) {
        ExactMatrix m(f.ring(), b.complex.dim(i), a.complex.dim(i));
        if (static_cast<std::size_t>(i) < b.chains.size())
            for (std::size_t k = 0; k < b.chains[static_cast<std::size_t>(i)].size(); ++k) {
                const Chain& c = b.chains[static_cast<std::size_t>(i)][k];
                auto src = a.block(i, c);
                if (!src)
                    continue;
                const std::size_t r = f.rank(c.back());
                m.add_block(b.offsets[static_cast<std::size_t>(i)][k],
                            a.offsets[static_cast<std::size_t>(i)][*src], ExactMatrix::identity(f.ring(), r));
            }
        proj.emplace(i, std::move(m));
    }
    return shifted_cone(a.complex, b.complex, proj);
}

/// H^i_p(U_p, F); zero outside the closure of the support.
inline ModuleSummary local_cohomology_at_point(const Sheaf& f, Face p, int i)
{
    return cohomology_at(point_supported_complex(f, p).complex, i);
}

/// All H^i_p(U_p, F), indexed from 0.
inline std::vector<ModuleSummary> local_cohomology_at_point_all(const Sheaf& f, Face p)
{
    return cohomology_all(point_supported_complex(f, p).complex);
}

/// Cohomology of U_p with supports in the interval [p, q] of U_p.
inline std::vector<ModuleSummary> interval_local_cohomology_all(const Sheaf& f, Face p, Face q)
{
    if (!p.subset_of(q))
        throw Error(ErrorKind::invalid_argument, p.to_string() + " is not below " + q.to_string());
    if (p == q)
        return local_cohomology_at_point_all(f, p);
    auto complex = supported_sections_complex(f, open_star(p, f.n()), [q](Face s) { return s.subset_of(q); });
    return cohomology_all(complex.complex);
}

/// The cochain map "prepend p'" from the kernel model at p to the kernel
/// model at p' = p - {v}, raising degree by one.  It anticommutes with the
/// differentials and realises the connecting map of the support triangle for
/// p' in U_{p'} composed with excision at p.
inline ExactMatrix prepend_map(const Sheaf& f, const SectionsComplex& at_p, Face pp, const SectionsComplex& at_pp, int k)
{
    ExactMatrix m(f.ring(), at_pp.complex.dim(k + 1), at_p.complex.dim(k));
    if (k < 0 || static_cast<std::size_t>(k) >= at_p.chains.size())
        return m;
    const auto& level = at_p.chains[static_cast<std::size_t>(k)];
    for (std::size_t b = 0; b < level.size(); ++b) {
        Chain longer{pp};
        longer.insert(longer.end(), level[b].begin(), level[b].end());
        auto target = at_pp.block(k + 1, longer);
        if (!target)
            continue;
        m.add_block(at_pp.offsets[static_cast<std::size_t>(k) + 1][*target],
                    at_p.offsets[static_cast<std::size_t>(k)][b], ExactMatrix::identity(f.ring(), f.rank(level[b].back())));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Concurrent-read-safe memo of per-point cohomology
// ---------------------------------------------------------------------------

/// Memoizes cohomology with supports for one sheaf, keyed by the support
/// interval [p, q] (p == q is the point case).  Lookups take a shared lock.
class LocalCohomologyCache {
public:
    explicit LocalCohomologyCache(const Sheaf& f) : f_(f) {}

    const Sheaf& sheaf() const { return f_; }

    ModuleSummary at_point(Face p, int i) const { return lookup(p, p, i); }
    ModuleSummary on_interval(Face p, Face q, int i) const { return lookup(p, q, i); }

private:
    ModuleSummary lookup(Face p, Face q, int i) const
    {
        if (i < 0)
            return {};
        const std::uint64_t key = (std::uint64_t{p.mask} << 32) | q.mask;
        const std::vector<ModuleSummary>* values = nullptr;
        {
            std::shared_lock lock(mutex_);
            auto it = memo_.find(key);
            if (it != memo_.end())
                values = &it->second;
        }
        if (!values) {
            auto computed = interval_local_cohomology_all(f_, p, q);
            std::unique_lock lock(mutex_);
            values = &memo_.emplace(key, std::move(computed)).first->second;
        }
        if (static_cast<std::size_t>(i) >= values->size())
            return {};
        return (*values)[static_cast<std::size_t>(i)];
    }

    Sheaf f_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::uint64_t, std::vector<ModuleSummary>> memo_;
};

// ---------------------------------------------------------------------------
// Injective decomposition
// ---------------------------------------------------------------------------

struct InjectiveDecomposition {
    bool injective = false;
    std::map<Face, std::size_t> multiplicities; // nonzero J(x) only
    std::optional<Face> witness;                // a stalk where the comparison fails
    std::string reason;
};

/// Splits an injective sheaf of vector spaces as a sum of k_{C_x}^{m(x)} with
/// m(x) = dim J(x), J(x) = ker(J_x -> prod of J_y over covers y of x).
inline InjectiveDecomposition decompose_injective(const Sheaf& j)
{
    if (!j.ring().is_field())
        throw Error(ErrorKind::unsupported_ring, "injective decomposition needs a field, got " + j.ring().name());
    const int n = j.n();
    const auto ring = j.ring();
    return with_field(ring, [&](const auto& field) {
        using Field = std::decay_t<decltype(field)>;
        using Dense = detail::Dense<Field>;
        InjectiveDecomposition out;

        // kernel basis K_x (columns in J_x) and a retraction R_x : J_x -> J(x)
        std::vector<Dense> retraction(std::size_t{1} << n);
        std::vector<std::size_t> socle(std::size_t{1} << n, 0);
        for (Face x : all_faces(n)) {
            const std::size_t dx = j.rank(x);
            std::size_t rows = 0;
            for (int v = 0; v < n; ++v)
                if (!x.contains(v))
                    rows += j.rank(x.with(v));
            ExactMatrix stacked(ring, rows, dx);
            std::size_t r0 = 0;
            for (int v = 0; v < n; ++v)
                if (!x.contains(v)) {
                    stacked.add_block(r0, 0, j.cover_restriction(x, v));
                    r0 += j.rank(x.with(v));
                }
            Dense kernel = detail::kernel_basis(Dense::from(stacked, field), field);
            socle[x.mask] = kernel.cols;
            // Retraction: complete the kernel basis to a basis of J_x and
            // read off the kernel coordinates.
            Dense ident(dx, dx, field);
            for (std::size_t k = 0; k < dx; ++k)
                ident(k, k) = field.one();
            Dense combined = Dense::hconcat({&kernel, &ident}, dx, field);
            Dense reduced = combined;
            auto pivots = detail::rref(reduced, field);
            std::vector<std::size_t> cols(pivots.begin(), pivots.end());
            Dense full_basis = combined.column_block(cols, field); // first kernel.cols columns are the kernel
            // invert full_basis (square, dx x dx)
            Dense aug = Dense::hconcat({&full_basis, &ident}, dx, field);
            detail::rref(aug, field, dx);
            Dense r(kernel.cols, dx, field);
            for (std::size_t a = 0; a < kernel.cols; ++a)
                for (std::size_t b = 0; b < dx; ++b)
                    r(a, b) = aug(a, dx + b);
            retraction[x.mask] = std::move(r);
            if (socle[x.mask] > 0)
                out.multiplicities[x] = socle[x.mask];
        }

        for (Face p : all_faces(n)) {
            std::size_t expected = 0;
            for (Face x : open_star(p, n))
                expected += socle[x.mask];
            if (expected != j.rank(p)) {
                out.witness = p;
                out.reason = "stalk " + p.to_string() + " has rank " + std::to_string(j.rank(p)) + " but the socles above it sum to " +
                             std::to_string(expected);
                out.multiplicities.clear();
                return out;
            }
            // comparison map J_p -> sum over x >= p of J(x)
            Dense cmp(expected, j.rank(p), field);
            std::size_t r0 = 0;
            for (Face x : open_star(p, n)) {
                if (socle[x.mask] == 0)
                    continue;
                Dense piece = detail::multiply(retraction[x.mask], Dense::from(j.restriction(p, x), field), field);
                for (std::size_t a = 0; a < piece.rows; ++a)
                    for (std::size_t b = 0; b < piece.cols; ++b)
                        cmp(r0 + a, b) = piece(a, b);
                r0 += socle[x.mask];
            }
            Dense reduced = cmp;
            if (detail::rref(reduced, field).size() != expected) {
                out.witness = p;
                out.reason = "comparison map at stalk " + p.to_string() + " is not an isomorphism";
                out.multiplicities.clear();
                return out;
            }
        }
        out.injective = true;
        return out;
    });
}

/// The sum of k_{C_x}^{m(x)}.
inline Sheaf assemble_injective(const std::map<Face, std::size_t>& multiplicities, int n, const CoefficientRing& ring)
{
    std::vector<Sheaf> parts;
    for (const auto& [x, m] : multiplicities)
        if (m > 0)
            parts.push_back(build_constant({SupportedConstant::ClosedPoint{x}, m}, ring, n));
    if (parts.empty())
        return SheafBuilder(n, ring).build();
    return direct_sum(parts, n, ring);
}

} // namespace hochster
