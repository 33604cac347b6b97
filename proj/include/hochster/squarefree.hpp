#pragma once

// Bridge between sheaves and Z^n-graded modules.
//
//   pi^*F      the squarefree module of a sheaf, evaluated one degree at a time
//   pi_*M      the graded sheaf p |-> M(1_p), again degree by degree
//
// Modules never get materialised as a whole: anything satisfying the
// GradedModule concept (a piece dimension and the x_j action per degree)
// can be pushed down.  Shift convention: M(b)_g = M_{g+b}.

#include "cube_poset.hpp"
#include "exactlin.hpp"
#include "sheaf.hpp"

#include <concepts>
#include <limits>
#include <map>
#include <optional>

namespace hochster {

// ---------------------------------------------------------------------------
// pi^* of a sheaf, degreewise
// ---------------------------------------------------------------------------

/// (pi^*F)_a = F_{supp a} for a >= 0, zero otherwise.
inline ModuleSummary pi_star_dim(const Sheaf& f, const Multidegree& a)
{
    if (!a.nonnegative())
        return {};
    return free_summary(f.rank(a.pos_support()));
}

/// x_j : (pi^*F)_a -> (pi^*F)_{a+e_j}: identity once a_j > 0, the restriction
/// when a_j = 0, zero when a has a negative coordinate.
inline ExactMatrix pi_star_mult(const Sheaf& f, const Multidegree& a, int j)
{
    const Multidegree b = a.plus_unit(j);
    const std::size_t src = a.nonnegative() ? f.rank(a.pos_support()) : 0;
    const std::size_t tgt = b.nonnegative() ? f.rank(b.pos_support()) : 0;
    if (src == 0 || tgt == 0)
        return ExactMatrix(f.ring(), tgt, src);
    if (a[j] > 0)
        return ExactMatrix::identity(f.ring(), src);
    return f.restriction(a.pos_support(), b.pos_support());
}

// ---------------------------------------------------------------------------
// Graded modules
// ---------------------------------------------------------------------------

template <class M>
concept GradedModule = requires(const M& m, const Multidegree& a, int j) {
    { m.n() } -> std::convertible_to<int>;
    { m.ring() } -> std::convertible_to<CoefficientRing>;
    { m.dim(a) } -> std::convertible_to<std::size_t>;
    { m.mult(a, j) } -> std::convertible_to<ExactMatrix>;
};

/// The squarefree module pi^*F seen through the GradedModule interface.
class SquarefreeView {
public:
    explicit SquarefreeView(Sheaf f) : f_(std::move(f)) {}
    int n() const { return f_.n(); }
    CoefficientRing ring() const { return f_.ring(); }
    std::size_t dim(const Multidegree& a) const { return pi_star_dim(f_, a).free_rank; }
    ExactMatrix mult(const Multidegree& a, int j) const { return pi_star_mult(f_, a, j); }
    const Sheaf& sheaf() const { return f_; }

private:
    Sheaf f_;
};

/// A module with finitely many nonzero pieces and explicit x_i actions.
/// Unspecified actions are zero maps.
class FiniteMultigradedModule {
public:
    FiniteMultigradedModule(int n, CoefficientRing ring, std::map<Multidegree, std::size_t> components,
                            std::map<std::pair<Multidegree, int>, ExactMatrix> actions)
        : n_(n), ring_(ring), components_(std::move(components)), actions_(std::move(actions))
    {
        for (auto it = components_.begin(); it != components_.end();) {
            if (it->first.n() != n_)
                throw Error(ErrorKind::shape_mismatch, "component degree " + it->first.to_string() + " has wrong length");
            it = (it->second == 0) ? components_.erase(it) : std::next(it);
        }
        for (const auto& [key, m] : actions_) {
            const auto& [a, j] = key;
            if (j < 0 || j >= n_)
                throw Error(ErrorKind::vertex_range, "action variable " + std::to_string(j + 1));
            if (m.rows() != dim(a.plus_unit(j)) || m.cols() != dim(a))
                throw Error(ErrorKind::shape_mismatch, "action x_" + std::to_string(j + 1) + " at " + a.to_string() +
                                                           " has shape " + m.shape());
        }
        for (const auto& [a, d] : components_)
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j) {
                    const ExactMatrix ij = mult(a.plus_unit(i), j) * mult(a, i);
                    const ExactMatrix ji = mult(a.plus_unit(j), i) * mult(a, j);
                    if (!(ij == ji))
                        throw Error(ErrorKind::non_commuting, "actions x_" + std::to_string(i + 1) + " and x_" +
                                                                  std::to_string(j + 1) + " do not commute at " + a.to_string());
                }
    }

    int n() const { return n_; }
    CoefficientRing ring() const { return ring_; }

    std::size_t dim(const Multidegree& a) const
    {
        auto it = components_.find(a);
        return it == components_.end() ? 0 : it->second;
    }

    ExactMatrix mult(const Multidegree& a, int j) const
    {
        auto it = actions_.find({a, j});
        if (it != actions_.end())
            return it->second;
        return ExactMatrix(ring_, dim(a.plus_unit(j)), dim(a));
    }

    const std::map<Multidegree, std::size_t>& components() const { return components_; }

private:
    int n_;
    CoefficientRing ring_;
    std::map<Multidegree, std::size_t> components_;
    std::map<std::pair<Multidegree, int>, ExactMatrix> actions_;
};

/// A module with 0/1-dimensional pieces on a product of intervals, x_j acting
/// as the identity between adjacent lattice points of the box.  A missing
/// bound means the interval is unbounded on that side.
class MonomialBoxModule {
public:
    struct Interval {
        std::optional<int> lo;
        std::optional<int> hi;

        bool contains(int v) const { return (!lo || *lo <= v) && (!hi || v <= *hi); }
        bool empty() const { return lo && hi && *lo > *hi; }
    };

    MonomialBoxModule(CoefficientRing ring, std::vector<Interval> intervals)
        : ring_(ring), intervals_(std::move(intervals))
    {
    }

    int n() const { return static_cast<int>(intervals_.size()); }
    CoefficientRing ring() const { return ring_; }
    const std::vector<Interval>& intervals() const { return intervals_; }

    bool is_zero() const
    {
        for (const auto& iv : intervals_)
            if (iv.empty())
                return true;
        return false;
    }

    bool is_finite() const
    {
        if (is_zero())
            return true;
        for (const auto& iv : intervals_)
            if (!iv.lo || !iv.hi)
                return false;
        return true;
    }

    std::size_t dim(const Multidegree& a) const
    {
        if (a.n() != n())
            throw Error(ErrorKind::shape_mismatch, "degree " + a.to_string() + " for a module in " + std::to_string(n()) + " variables");
        for (int i = 0; i < n(); ++i)
            if (!intervals_[static_cast<std::size_t>(i)].contains(a[i]))
                return 0;
        return 1;
    }

    ExactMatrix mult(const Multidegree& a, int j) const
    {
        const std::size_t s = dim(a), t = dim(a.plus_unit(j));
        if (s && t)
            return ExactMatrix::identity(ring_, 1);
        return ExactMatrix(ring_, t, s);
    }

    /// M(b): the piece of degree g is M_{g+b}.
    MonomialBoxModule shifted(const Multidegree& b) const
    {
        auto iv = intervals_;
        for (int i = 0; i < n(); ++i) {
            auto& x = iv[static_cast<std::size_t>(i)];
            if (x.lo)
                *x.lo -= b[i];
            if (x.hi)
                *x.hi -= b[i];
        }
        return MonomialBoxModule(ring_, iv);
    }

    /// Finite box of exponents in the support (requires is_finite()).
    Window support_window() const
    {
        if (!is_finite() || is_zero())
            throw Error(ErrorKind::capacity, "module support is not a finite nonempty box");
        Window w;
        for (const auto& iv : intervals_) {
            w.lo.push_back(*iv.lo);
            w.hi.push_back(*iv.hi);
        }
        return w;
    }

    /// H^{|p|}_m(R_{C_p}): (-inf,-1] on p, {0} off p.
    static MonomialBoxModule top_local_cohomology_of_closure(CoefficientRing ring, int n, Face p)
    {
        std::vector<Interval> iv;
        for (int i = 0; i < n; ++i)
            iv.push_back(p.contains(i) ? Interval{std::nullopt, -1} : Interval{0, 0});
        return MonomialBoxModule(ring, iv);
    }

    /// H^n_m(Omega^n) = H^n_m(R(-1)): (-inf,0] everywhere.
    static MonomialBoxModule top_local_cohomology_of_canonical(CoefficientRing ring, int n)
    {
        return MonomialBoxModule(ring, std::vector<Interval>(static_cast<std::size_t>(n), Interval{std::nullopt, 0}));
    }

    /// (R/m_l)^* = Hom(R/m_l, H^n_m(Omega^n)): the box [-(l-1), 0]^n.
    static MonomialBoxModule dual_truncation(CoefficientRing ring, int n, int l)
    {
        return MonomialBoxModule(ring, std::vector<Interval>(static_cast<std::size_t>(n), Interval{-(l - 1), 0}));
    }

    /// R/m_l: the box [0, l-1]^n.
    static MonomialBoxModule truncation(CoefficientRing ring, int n, int l)
    {
        return MonomialBoxModule(ring, std::vector<Interval>(static_cast<std::size_t>(n), Interval{0, l - 1}));
    }

    /// The cofactor attached to a pair p <= q in the Ext decomposition:
    /// (R_{C_p}/m_{l-1}) shifted by l-1 on p and by l on q - p, i.e. the box
    /// [-(l-1), -1] on p, {-l} on q - p, {0} off q.
    static MonomialBoxModule ext_cofactor(CoefficientRing ring, int n, int l, Face p, Face q)
    {
        std::vector<Interval> iv;
        for (int i = 0; i < n; ++i) {
            if (p.contains(i))
                iv.push_back(Interval{-(l - 1), -1});
            else if (q.contains(i))
                iv.push_back(Interval{-l, -l});
            else
                iv.push_back(Interval{0, 0});
        }
        return MonomialBoxModule(ring, iv);
    }

private:
    CoefficientRing ring_;
    std::vector<Interval> intervals_;
};

/// M_1 (x) ... (x) M_n for modules in one variable each; the first factor is
/// the most significant in the Kronecker ordering.
template <GradedModule M>
class TensorModule {
public:
    explicit TensorModule(std::vector<M> factors) : factors_(std::move(factors))
    {
        if (factors_.empty())
            throw Error(ErrorKind::invalid_argument, "tensor product of no modules");
        for (const auto& f : factors_)
            if (f.n() != 1)
                throw Error(ErrorKind::invalid_argument, "tensor factors must be modules in one variable");
    }

    int n() const { return static_cast<int>(factors_.size()); }
    CoefficientRing ring() const { return factors_.front().ring(); }

    std::size_t dim(const Multidegree& a) const
    {
        std::size_t d = 1;
        for (int i = 0; i < n(); ++i)
            d *= factors_[static_cast<std::size_t>(i)].dim(Multidegree{a[i]});
        return d;
    }

    ExactMatrix mult(const Multidegree& a, int j) const
    {
        ExactMatrix m = ExactMatrix::identity(ring(), 1);
        for (int i = 0; i < n(); ++i) {
            const auto& f = factors_[static_cast<std::size_t>(i)];
            m = ExactMatrix::kronecker(m, i == j ? f.mult(Multidegree{a[i]}, 0)
                                                 : ExactMatrix::identity(ring(), f.dim(Multidegree{a[i]})));
        }
        return m;
    }

private:
    std::vector<M> factors_;
};

// ---------------------------------------------------------------------------
// pi_* of a graded module
// ---------------------------------------------------------------------------

/// Degree-a slice of pi_*M: the sheaf with stalk M_{a+1_p} at p and
/// restriction x_v : M_{a+1_p} -> M_{a+1_p+e_v} on the covering p -> p u {v}.
template <GradedModule M>
Sheaf pi_lower_star_at(const M& m, const Multidegree& a)
{
    const int n = m.n();
    SheafBuilder b(n, m.ring());
    for (Face p : all_faces(n))
        b.set_rank(p, m.dim(a + shift_vector(1, p, n)));
    for (Face p : all_faces(n))
        for (int v = 0; v < n; ++v)
            if (!p.contains(v))
                b.set_restriction(p, v, m.mult(a + shift_vector(1, p, n), v));
    return b.build();
}

/// Every nonzero degree slice of pi_*M for a finite module.
inline std::map<Multidegree, Sheaf> pi_lower_star(const FiniteMultigradedModule& m)
{
    std::map<Multidegree, Sheaf> out;
    for (const auto& [beta, d] : m.components())
        for (Face p : all_faces(m.n())) {
            const Multidegree a = beta - shift_vector(1, p, m.n());
            if (!out.count(a))
                out.emplace(a, pi_lower_star_at(m, a));
        }
    return out;
}

/// Same for a monomial box module; refuses modules with infinite support.
inline std::map<Multidegree, Sheaf> pi_lower_star(const MonomialBoxModule& m)
{
    std::map<Multidegree, Sheaf> out;
    if (m.is_zero())
        return out;
    if (!m.is_finite())
        throw Error(ErrorKind::capacity, "pi_* of a module with infinite support needs a degree window");
    for (const auto& beta : m.support_window().points())
        for (Face p : all_faces(m.n())) {
            const Multidegree a = beta - shift_vector(1, p, m.n());
            if (!out.count(a))
                out.emplace(a, pi_lower_star_at(m, a));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Standard resolution
// ---------------------------------------------------------------------------

/// C_i F = sum over chains p_0 < ... < p_i of F_{p_0} (x) k_{U_{p_i}}, with
/// boundary the alternating sum of deletions (deleting p_0 applies the
/// restriction F_{p_0} -> F_{p_1}) and augmentation C_0 F -> F.
class StandardResolution {
public:
    explicit StandardResolution(Sheaf f) : f_(std::move(f))
    {
        chains_ = enumerate_chains(all_faces(f_.n()), [this](const Chain& c) { return f_.rank(c.front()) > 0; });
    }

    const Sheaf& sheaf() const { return f_; }

    /// Largest i with C_i nonzero (-1 for the zero sheaf).
    int length() const { return static_cast<int>(chains_.size()) - 1; }

    const std::vector<Chain>& chains(int i) const { return chains_.at(static_cast<std::size_t>(i)); }

    /// Generator degree of the summand indexed by a chain after pi^*.
    static Multidegree generator_degree(const Chain& c, int n) { return shift_vector(1, c.back(), n); }

    /// Rank of the stalk of C_i at s.
    std::size_t term_rank(int i, Face s) const
    {
        std::size_t r = 0;
        if (i < 0 || i > length())
            return 0;
        for (const auto& c : chains(i))
            if (c.back().subset_of(s))
                r += f_.rank(c.front());
        return r;
    }

    /// The stalk at s as a cochain complex: C_i sits in degree -i and, when
    /// augmented, F_s sits in degree 1.
    CochainComplex stalk_complex(Face s, bool augmented) const
    {
        return build([s](const Chain& c) { return c.back().subset_of(s); }, augmented ? std::optional<Face>(s) : std::nullopt);
    }

    /// Degree-b piece of pi^* of the resolution (without augmentation): the
    /// summand of a chain is present when b >= 1_{p_i}.
    CochainComplex free_complex_piece(const Multidegree& b) const
    {
        const int n = f_.n();
        return build(
            [&b, n](const Chain& c) {
                const Multidegree rest = b - generator_degree(c, n);
                return rest.nonnegative();
            },
            std::nullopt);
    }

private:
    CochainComplex build(const std::function<bool(const Chain&)>& present, std::optional<Face> augment_at) const
    {
        const auto& ring = f_.ring();
        const int top = std::max(length(), 0);
        // blocks per level
        std::vector<std::vector<const Chain*>> blocks(static_cast<std::size_t>(top) + 1);
        std::vector<std::map<Chain, std::size_t>> offset(static_cast<std::size_t>(top) + 1);
        std::vector<std::size_t> level_dim(static_cast<std::size_t>(top) + 1, 0);
        for (int i = 0; i <= length(); ++i)
            for (const auto& c : chains(i))
                if (present(c)) {
                    blocks[static_cast<std::size_t>(i)].push_back(&c);
                    offset[static_cast<std::size_t>(i)][c] = level_dim[static_cast<std::size_t>(i)];
                    level_dim[static_cast<std::size_t>(i)] += f_.rank(c.front());
                }
        // cochain degrees -top .. 0 (and 1 for the augmentation)
        std::vector<std::size_t> dims;
        for (int i = top; i >= 0; --i)
            dims.push_back(level_dim[static_cast<std::size_t>(i)]);
        if (augment_at)
            dims.push_back(f_.rank(*augment_at));
        std::vector<ExactMatrix> diffs;
        for (int i = top; i >= 1; --i) {
            ExactMatrix d(ring, level_dim[static_cast<std::size_t>(i) - 1], level_dim[static_cast<std::size_t>(i)]);
            for (const Chain* c : blocks[static_cast<std::size_t>(i)]) {
                const std::size_t col = offset[static_cast<std::size_t>(i)].at(*c);
                for (std::size_t j = 0; j < c->size(); ++j) {
                    Chain del = *c;
                    del.erase(del.begin() + static_cast<std::ptrdiff_t>(j));
                    auto it = offset[static_cast<std::size_t>(i) - 1].find(del);
                    if (it == offset[static_cast<std::size_t>(i) - 1].end())
                        continue;
                    const int sign = (j % 2 == 0) ? 1 : -1;
                    if (j == 0)
                        d.add_block(it->second, col, f_.restriction((*c)[0], (*c)[1]), sign);
                    else
                        d.add_block(it->second, col, ExactMatrix::identity(ring, f_.rank(c->front())), sign);
                }
            }
            diffs.push_back(std::move(d));
        }
        if (augment_at) {
            ExactMatrix e(ring, f_.rank(*augment_at), level_dim[0]);
            for (const Chain* c : blocks[0])
                e.add_block(0, offset[0].at(*c), f_.restriction(c->front(), *augment_at));
            diffs.push_back(std::move(e));
        }
        return CochainComplex(ring, -top, std::move(dims), std::move(diffs));
    }

    Sheaf f_;
    std::vector<std::vector<Chain>> chains_;
};

// ---------------------------------------------------------------------------
// Degreewise checks of the two decompositions of injective modules
// ---------------------------------------------------------------------------

struct DecompositionReport {
    std::size_t checked = 0;             // (stalk or covering pair, degree) comparisons
    std::vector<std::string> mismatches; // human-readable, deterministic order

    bool ok() const { return mismatches.empty(); }
};

namespace detail {

inline void compare_sheaves(const Sheaf& left, const Sheaf& right, const Multidegree& a, DecompositionReport& report)
{
    const int n = left.n();
    for (Face p : all_faces(n)) {
        ++report.checked;
        if (left.rank(p) != right.rank(p))
            report.mismatches.push_back("degree " + a.to_string() + " stalk " + p.to_string() + ": left " +
                                        std::to_string(left.rank(p)) + ", right " + std::to_string(right.rank(p)));
        for (int v = 0; v < n; ++v) {
            if (p.contains(v))
                continue;
            ++report.checked;
            const std::size_t rl = rank(left.cover_restriction(p, v));
            const std::size_t rr = rank(right.cover_restriction(p, v));
            if (rl != rr)
                report.mismatches.push_back("degree " + a.to_string() + " transition " + p.to_string() + " -> " +
                                            p.with(v).to_string() + ": left rank " + std::to_string(rl) + ", right rank " +
                                            std::to_string(rr));
        }
    }
}

} // namespace detail

/// Degree-a slice of the sum of H^{|p|}_m(R_{C_p}) (x) k_{C_p} over all p.
inline Sheaf prop_a_right_side(const CoefficientRing& ring, int n, const Multidegree& a)
{
    std::vector<Sheaf> parts;
    for (Face p : all_faces(n)) {
        const std::size_t d = MonomialBoxModule::top_local_cohomology_of_closure(ring, n, p).dim(a);
        if (d)
            parts.push_back(build_constant({SupportedConstant::ClosedPoint{p}, d}, ring, n));
    }
    if (parts.empty())
        return SheafBuilder(n, ring).build();
    return direct_sum(parts, n, ring);
}

/// Compares pi_* H^n_m(Omega^n) with the sum over p of
/// H^{|p|}_m(R_{C_p}) (x) k_{C_p}, stalk ranks and transition ranks, at every
/// degree of the window.
inline DecompositionReport check_prop_a(int n, const Window& window, const CoefficientRing& ring = CoefficientRing::rationals())
{
    if (window.n() != n)
        throw Error(ErrorKind::invalid_argument, "window dimension differs from n");
    const auto omega = MonomialBoxModule::top_local_cohomology_of_canonical(ring, n);
    DecompositionReport report;
    for (const auto& a : window.points())
        detail::compare_sheaves(pi_lower_star_at(omega, a), prop_a_right_side(ring, n, a), a, report);
    return report;
}

/// Degree-a slice of the sum over p <= q of the Ext cofactor of (p, q)
/// tensored with the constant sheaf on the interval [q - p, q].
inline Sheaf prop_b_right_side(const CoefficientRing& ring, int n, int l, const Multidegree& a)
{
    std::vector<Sheaf> parts;
    for (Face q : all_faces(n))
        for (Face p : closure(q)) {
            const std::size_t d = MonomialBoxModule::ext_cofactor(ring, n, l, p, q).dim(a);
            if (d)
                parts.push_back(build_constant({SupportedConstant::Interval{q - p, q}, d}, ring, n));
        }
    if (parts.empty())
        return SheafBuilder(n, ring).build();
    return direct_sum(parts, n, ring);
}

/// Complete comparison of pi_* (R/m_l)^* with its decomposition.  Both sides
/// vanish outside [-l, 0]^n, so checking [-l-1, 1]^n covers every degree.
inline DecompositionReport check_prop_b(int n, int l, const CoefficientRing& ring = CoefficientRing::rationals())
{
    if (l < 1)
        throw Error(ErrorKind::invalid_argument, "l must be at least 1");
    const auto dual = MonomialBoxModule::dual_truncation(ring, n, l);
    DecompositionReport report;
    for (const auto& a : Window::cube(n, -l - 1, 1).points())
        detail::compare_sheaves(pi_lower_star_at(dual, a), prop_b_right_side(ring, n, l, a), a, report);
    return report;
}

} // namespace hochster
