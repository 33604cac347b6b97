#pragma once

// Brute-force reference computations, deliberately independent of the
// formula side: they only use pi^*F degree by degree.
//
//   Cech:    C^W = (pi^*F)_{x_W} in degree a, i.e. F at pos(a) u W when
//            neg(a) is inside W, with W -> W u {j} signed by (-1)^{#{w in W : w < j}}.
//   Koszul:  Hom(K(x_1^l, ..., x_n^l), pi^*F) in degree a; term S is
//            (pi^*F)_{a + l_S}, maps are x_j^l with the same signs.

#include "cube_poset.hpp"
#include "exactlin.hpp"
#include "sheaf.hpp"
#include "squarefree.hpp"

#include <stdexcept>

namespace hochster {

struct CechDegreePiece {
    Multidegree degree;
    CochainComplex complex;
    std::vector<std::vector<Face>> terms; // W's of each cohomological degree with a nonzero term
    std::vector<std::map<std::uint32_t, std::size_t>> offsets;

    Face stalk_of(Face w) const { return degree.pos_support() | w; }
};

inline int cech_sign(Face w, int j)
{
    return (Face(w.mask & ((1u << j) - 1u)).size() % 2 == 0) ? 1 : -1;
}

inline CechDegreePiece cech_complex(const Sheaf& f, const Multidegree& a)
{
    const int n = f.n();
    if (a.n() != n)
        throw Error(ErrorKind::shape_mismatch, "degree " + a.to_string() + " for a sheaf on " + std::to_string(n) + " vertices");
    const auto& ring = f.ring();
    CechDegreePiece piece;
    piece.degree = a;
    const Face neg = a.neg_support(), pos = a.pos_support();
    piece.terms.assign(static_cast<std::size_t>(n) + 1, {});
    piece.offsets.assign(static_cast<std::size_t>(n) + 1, {});
    std::vector<std::size_t> dims(static_cast<std::size_t>(n) + 1, 0);
    for (Face w : all_faces(n)) {
        if (!neg.subset_of(w))
            continue;
        const std::size_t r = f.rank(pos | w);
        if (r == 0)
            continue;
        const auto k = static_cast<std::size_t>(w.size());
        piece.terms[k].push_back(w);
        piece.offsets[k][w.mask] = dims[k];
        dims[k] += r;
    }
    std::vector<ExactMatrix> diffs;
    for (int k = 0; k < n; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        ExactMatrix d(ring, dims[ks + 1], dims[ks]);
        for (Face w : piece.terms[ks])
            for (int j = 0; j < n; ++j) {
                if (w.contains(j))
                    continue;
                auto it = piece.offsets[ks + 1].find(w.with(j).mask);
                if (it == piece.offsets[ks + 1].end())
                    continue;
                const Face s = pos | w, t = pos | w.with(j);
                d.add_block(it->second, piece.offsets[ks].at(w.mask), f.restriction(s, t), cech_sign(w, j));
            }
        diffs.push_back(std::move(d));
    }
    piece.complex = CochainComplex(ring, 0, std::move(dims), std::move(diffs));
    return piece;
}

/// H^i_m(pi^*F)_a via the Cech complex.
inline ModuleSummary cech_local_cohomology(const Sheaf& f, int i, const Multidegree& a)
{
    return cohomology_at(cech_complex(f, a).complex, i);
}

/// H^i_m(pi^*F)_a for i = 0..n.
inline std::vector<ModuleSummary> cech_local_cohomology_all(const Sheaf& f, const Multidegree& a)
{
    return cohomology_all(cech_complex(f, a).complex);
}

/// Degree-a piece of Hom(K(x^l), pi^*F): term S in cohomological degree |S|.
inline CochainComplex koszul_complex(const Sheaf& f, int l, const Multidegree& a)
{
    if (l < 1)
        throw Error(ErrorKind::invalid_argument, "l must be at least 1");
    const int n = f.n();
    const auto& ring = f.ring();
    auto degree_of = [&](Face s) { return a + shift_vector(l, s, n); };
    std::vector<std::vector<Face>> terms(static_cast<std::size_t>(n) + 1);
    std::vector<std::map<std::uint32_t, std::size_t>> offsets(static_cast<std::size_t>(n) + 1);
    std::vector<std::size_t> dims(static_cast<std::size_t>(n) + 1, 0);
    for (Face s : all_faces(n)) {
        const std::size_t r = pi_star_dim(f, degree_of(s)).free_rank;
        if (r == 0)
            continue;
        const auto k = static_cast<std::size_t>(s.size());
        terms[k].push_back(s);
        offsets[k][s.mask] = dims[k];
        dims[k] += r;
    }
    std::vector<ExactMatrix> diffs;
    for (int k = 0; k < n; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        ExactMatrix d(ring, dims[ks + 1], dims[ks]);
        for (Face s : terms[ks])
            for (int j = 0; j < n; ++j) {
                if (s.contains(j))
                    continue;
                auto it = offsets[ks + 1].find(s.with(j).mask);
                if (it == offsets[ks + 1].end())
                    continue;
                // x_j^l as an l-fold composite of single multiplications
                Multidegree cur = degree_of(s);
                ExactMatrix m = ExactMatrix::identity(ring, pi_star_dim(f, cur).free_rank);
                for (int step = 0; step < l; ++step) {
                    m = pi_star_mult(f, cur, j) * m;
                    cur = cur.plus_unit(j);
                }
                d.add_block(it->second, offsets[ks].at(s.mask), m, cech_sign(s, j));
            }
        diffs.push_back(std::move(d));
    }
    return CochainComplex(ring, 0, std::move(dims), std::move(diffs));
}

/// Ext^i_R(R/m_l, pi^*F)_a via the Koszul complex on x_1^l, ..., x_n^l.
inline ModuleSummary koszul_ext(const Sheaf& f, int l, int i, const Multidegree& a)
{
    return cohomology_at(koszul_complex(f, l, a), i);
}

inline std::vector<ModuleSummary> koszul_ext_all(const Sheaf& f, int l, const Multidegree& a)
{
    return cohomology_all(koszul_complex(f, l, a));
}

/// Termwise x_j from the Cech piece at a to the piece at a + e_j: the
/// identity on terms where the stalk does not move (j in W or a_j > 0), the
/// restriction F_s -> F_{s u j} otherwise.  Throws std::logic_error when the
/// assembled map fails to commute with the differentials.
inline std::map<int, ExactMatrix> cech_mult_chain_map(const Sheaf& f, const CechDegreePiece& src, const CechDegreePiece& tgt,
                                                      int j)
{
    const auto& ring = f.ring();
    std::map<int, ExactMatrix> out;
    for (int k = 0; k <= f.n(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        ExactMatrix m(ring, tgt.complex.dim(k), src.complex.dim(k));
        for (Face w : src.terms[ks]) {
            auto it = tgt.offsets[ks].find(w.mask);
            if (it == tgt.offsets[ks].end())
                continue;
            const Face s = src.stalk_of(w), t = tgt.stalk_of(w);
            m.add_block(it->second, src.offsets[ks].at(w.mask), f.restriction(s, t));
        }
        out.emplace(k, std::move(m));
    }
    for (int k = 0; k < f.n(); ++k) {
        const ExactMatrix lhs = tgt.complex.differential(k) * out.at(k);
        const ExactMatrix rhs = out.at(k + 1) * src.complex.differential(k);
        if (!(lhs == rhs))
            throw std::logic_error("multiplication by x_" + std::to_string(j + 1) + " is not a chain map at degree " +
                                   src.degree.to_string());
    }
    return out;
}

/// Rank of x_j : H^i_m(pi^*F)_a -> H^i_m(pi^*F)_{a+e_j}, field coefficients.
inline std::size_t cech_mult_map(const Sheaf& f, int i, const Multidegree& a, int j)
{
    if (!f.ring().is_field())
        throw Error(ErrorKind::unsupported_ring, "multiplication ranks are computed over fields only");
    if (j < 0 || j >= f.n())
        throw Error(ErrorKind::vertex_range, "variable " + std::to_string(j + 1));
    const auto src = cech_complex(f, a);
    const auto tgt = cech_complex(f, a.plus_unit(j));
    const auto chain_map = cech_mult_chain_map(f, src, tgt, j);
    if (i < 0 || i > f.n())
        return 0;
    return rank(induced_map(src.complex, i, tgt.complex, i, chain_map.at(i)));
}

} // namespace hochster
