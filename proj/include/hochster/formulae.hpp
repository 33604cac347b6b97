#pragma once

// Formula side: local cohomology and Ext of pi^*F from cohomology with
// supports on the poset, the Hilbert series, and the x_j action.
//
//   H^i_m(pi^*F)_a        = H^{i-|p|}_p(U_p, F)            p = neg(a), a <= 0
//   Ext^i(R/m_l, pi^*F)_a = H^{i-|q|}_{[p,q]}(U_p, F)      q = neg(a),
//                                                        p = {j : -l < a_j < 0},
//                                                        a_j = -l on q - p
// and zero in every other degree.  The Ext cofactor of (p, q) is the box
// [-(l-1), -1] on p, {-l} on q - p, {0} off q, so each degree meets at most
// one pair.

#include "cube_poset.hpp"
#include "exactlin.hpp"
#include "sheaf.hpp"
#include "squarefree.hpp"

#include <sstream>

namespace hochster {

struct LCFormulaTerm {
    Face p;
    ModuleSummary summand;
    MonomialBoxModule cofactor;
};

struct ExtFormulaTerm {
    Face p;
    Face q;
    ModuleSummary summand;
    MonomialBoxModule cofactor;
};

/// Sum over faces p of coeff_p * prod_{i in p} u_i, u_i = t_i^{-1}/(1 - t_i^{-1}).
class RationalSeries {
public:
    RationalSeries(int n, std::vector<std::pair<Face, ModuleSummary>> terms) : n_(n), terms_(std::move(terms)) {}

    int n() const { return n_; }
    const std::vector<std::pair<Face, ModuleSummary>>& terms() const { return terms_; }

    /// Coefficient of t^a in the expansion (free ranks).
    std::size_t coefficient(const Multidegree& a) const
    {
        for (int i = 0; i < a.n(); ++i)
            if (a[i] > 0)
                return 0;
        const Face p = a.neg_support();
        for (const auto& [face, c] : terms_)
            if (face == p)
                return c.free_rank;
        return 0;
    }

    /// Coarse coefficients: entry k is the sum of free ranks over |p| = k.
    std::vector<std::size_t> coarse() const
    {
        std::vector<std::size_t> out(static_cast<std::size_t>(n_) + 1, 0);
        for (const auto& [p, c] : terms_)
            out[static_cast<std::size_t>(p.size())] += c.free_rank;
        return out;
    }

    /// Coefficient of t^{-d} after substituting t_i = t: each face p
    /// contributes coeff_p * binom(d-1, |p|-1) (compositions of d into |p| parts).
    mpz_class coarse_expansion(int d) const
    {
        mpz_class total = 0;
        for (const auto& [p, c] : terms_) {
            const int k = p.size();
            if (k == 0) {
                if (d == 0)
                    total += c.free_rank;
                continue;
            }
            if (d < k)
                continue;
            mpz_class b;
            mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(d - 1), static_cast<unsigned long>(k - 1));
            total += b * static_cast<unsigned long>(c.free_rank);
        }
        return total;
    }

    /// e.g. "1 + 3u + 3u^2"; "0" for the zero series.
    std::string coarse_string() const
    {
        std::string out;
        auto coeffs = coarse();
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (coeffs[k] == 0)
                continue;
            if (!out.empty())
                out += " + ";
            std::string mono = k == 0 ? "" : (k == 1 ? "u" : "u^" + std::to_string(k));
            if (coeffs[k] != 1 || k == 0)
                out += std::to_string(coeffs[k]);
            out += mono;
        }
        return out.empty() ? "0" : out;
    }

    /// e.g. "1 + u1 + u1*u2"; torsion of a coefficient is shown in brackets.
    std::string fine_string() const
    {
        std::string out;
        for (const auto& [p, c] : terms_) {
            if (c.is_zero())
                continue;
            if (!out.empty())
                out += " + ";
            std::string mono;
            for (int v : p.vertices())
                mono += (mono.empty() ? "" : "*") + ("u" + std::to_string(v + 1));
            std::string coef = c.free_rank == 1 && !mono.empty() ? "" : std::to_string(c.free_rank);
            if (!c.torsion.empty())
                coef += "[" + c.torsion_string() + "]";
            if (!coef.empty() && !mono.empty())
                coef += "*";
            out += coef + mono;
        }
        return out.empty() ? "0" : out;
    }

private:
    int n_;
    std::vector<std::pair<Face, ModuleSummary>> terms_;
};

/// Evaluates the formulae for one sheaf, memoizing cohomology with supports.
/// Safe to share between threads.
class HochsterEvaluator {
public:
    explicit HochsterEvaluator(Sheaf f) : f_(std::move(f)), cache_(f_) {}

    const Sheaf& sheaf() const { return f_; }

    /// The unique contributing term of H^i_m(pi^*F)_a, if any.
    std::optional<LCFormulaTerm> lc_term(int i, const Multidegree& a) const
    {
        check_degree(a);
        for (int k = 0; k < a.n(); ++k)
            if (a[k] > 0)
                return std::nullopt;
        const Face p = a.neg_support();
        return LCFormulaTerm{p, cache_.at_point(p, i - p.size()),
                             MonomialBoxModule::top_local_cohomology_of_closure(f_.ring(), f_.n(), p)};
    }

    ModuleSummary lc(int i, const Multidegree& a) const
    {
        auto t = lc_term(i, a);
        return t ? t->summand : ModuleSummary{};
    }

    std::optional<ExtFormulaTerm> ext_term(int l, int i, const Multidegree& a) const
    {
        if (l < 1)
            throw Error(ErrorKind::invalid_argument, "l must be at least 1");
        check_degree(a);
        Face p, q;
        for (int k = 0; k < a.n(); ++k) {
            if (a[k] == 0)
                continue;
            if (a[k] > 0 || a[k] < -l)
                return std::nullopt;
            q = q.with(k);
            if (a[k] > -l)
                p = p.with(k);
        }
        return ExtFormulaTerm{p, q, cache_.on_interval(p, q, i - q.size()),
                              MonomialBoxModule::ext_cofactor(f_.ring(), f_.n(), l, p, q)};
    }

    ModuleSummary ext(int l, int i, const Multidegree& a) const
    {
        auto t = ext_term(l, i, a);
        return t ? t->summand : ModuleSummary{};
    }

    RationalSeries hilbert_series(int i) const
    {
        std::vector<std::pair<Face, ModuleSummary>> terms;
        for (Face p : all_faces(f_.n())) {
            auto c = cache_.at_point(p, i - p.size());
            if (!c.is_zero())
                terms.emplace_back(p, c);
        }
        return RationalSeries(f_.n(), std::move(terms));
    }

    /// Matrix of x_j : H^i_m(pi^*F)_a -> H^i_m(pi^*F)_{a+e_j} on the formula
    /// side.  Within a p-block (a_j < -1) it is the identity; from the p-block
    /// to the p - {j} block (a_j = -1) it is the connecting map realised by
    /// prepending p - {j} to chains; all other cases map to a zero piece.
    ExactMatrix lc_mult_map(int i, const Multidegree& a, int j) const
    {
        if (!f_.ring().is_field())
            throw Error(ErrorKind::unsupported_ring, "module structure maps are computed over fields only");
        check_degree(a);
        if (j < 0 || j >= f_.n())
            throw Error(ErrorKind::vertex_range, "variable " + std::to_string(j + 1));
        const Multidegree b = a.plus_unit(j);
        const std::size_t src = lc(i, a).free_rank;
        const std::size_t tgt = lc(i, b).free_rank;
        if (src == 0 || tgt == 0)
            return ExactMatrix(f_.ring(), tgt, src);
        const Face p = a.neg_support();
        if (a[j] < -1)
            return ExactMatrix::identity(f_.ring(), src);
        // a_j == -1: from the p block to the p' = p - {j} block
        const Face pp = p.without(j);
        const int k = i - p.size();
        const auto at_p = point_supported_complex(f_, p);
        const auto at_pp = point_supported_complex(f_, pp);
        return induced_map(at_p.complex, k, at_pp.complex, k + 1, prepend_map(f_, at_p, pp, at_pp, k));
    }

private:
    void check_degree(const Multidegree& a) const
    {
        if (a.n() != f_.n())
            throw Error(ErrorKind::shape_mismatch, "degree " + a.to_string() + " for a sheaf on " + std::to_string(f_.n()) + " vertices");
    }

    Sheaf f_;
    LocalCohomologyCache cache_;
};

inline ModuleSummary lc_formula(const Sheaf& f, int i, const Multidegree& a) { return HochsterEvaluator(f).lc(i, a); }

inline ModuleSummary ext_formula(const Sheaf& f, int l, int i, const Multidegree& a)
{
    return HochsterEvaluator(f).ext(l, i, a);
}

inline RationalSeries hilbert_series(const Sheaf& f, int i) { return HochsterEvaluator(f).hilbert_series(i); }

inline ExactMatrix lc_mult_map(const Sheaf& f, int i, const Multidegree& a, int j)
{
    return HochsterEvaluator(f).lc_mult_map(i, a, j);
}

} // namespace hochster
