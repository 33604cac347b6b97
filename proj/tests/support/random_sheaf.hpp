#pragma once

// Random validated sheaves for property tests.
//
// A sheaf is drawn as the image of a random morphism
//     sum_x k_{U_x}^{a_x}  ->  sum_y k_{C_y}^{b_y},
// one scalar per pair of generators with x contained in y.  Images of maps
// between sheaves are sheaves, so the result always passes validation and
// the family includes non-injective, non-flasque examples.

#include <hochster/sheaf.hpp>

#include <random>

namespace hochster::fixtures {

struct RandomSheafOptions {
    int n = 3;
    std::size_t max_rank = 3;
    int generators = 3; // upper bound on the number of sources and of targets
    int scalar_range = 2;
};

inline Sheaf random_sheaf(std::mt19937& rng, const CoefficientRing& ring, const RandomSheafOptions& opt = {})
{
    const int n = opt.n;
    for (;;) {
        std::uniform_int_distribution<std::uint32_t> face_dist(0, (1u << n) - 1);
        std::uniform_int_distribution<int> count_dist(1, opt.generators);
        std::uniform_int_distribution<int> scalar_dist(-opt.scalar_range, opt.scalar_range);
        std::vector<Face> sources, targets;
        const int ns = count_dist(rng), nt = count_dist(rng);
        for (int k = 0; k < ns; ++k)
            sources.emplace_back(face_dist(rng));
        for (int k = 0; k < nt; ++k)
            targets.emplace_back(face_dist(rng));
        std::sort(sources.begin(), sources.end());
        std::sort(targets.begin(), targets.end());
        std::vector<std::vector<mpq_class>> coef(targets.size(), std::vector<mpq_class>(sources.size(), 0));
        for (std::size_t t = 0; t < targets.size(); ++t)
            for (std::size_t s = 0; s < sources.size(); ++s)
                if (sources[s].subset_of(targets[t]))
                    coef[t][s] = scalar_dist(rng);

        auto result = with_field(ring, [&](const auto& field) -> std::optional<Sheaf> {
            using Field = std::decay_t<decltype(field)>;
            using Dense = detail::Dense<Field>;
            // phi at stalk p: rows = targets containing p, cols = sources inside p
            std::vector<Dense> basis(std::size_t{1} << n);
            std::vector<std::vector<std::size_t>> rows_at(std::size_t{1} << n);
            for (Face p : all_faces(n)) {
                std::vector<std::size_t> cols;
                for (std::size_t t = 0; t < targets.size(); ++t)
                    if (p.subset_of(targets[t]))
                        rows_at[p.mask].push_back(t);
                for (std::size_t s = 0; s < sources.size(); ++s)
                    if (sources[s].subset_of(p))
                        cols.push_back(s);
                Dense phi(rows_at[p.mask].size(), cols.size(), field);
                for (std::size_t r = 0; r < phi.rows; ++r)
                    for (std::size_t c = 0; c < phi.cols; ++c)
                        phi(r, c) = field.from(coef[rows_at[p.mask][r]][cols[c]]);
                Dense reduced = phi;
                auto pivots = detail::rref(reduced, field);
                basis[p.mask] = phi.column_block(pivots, field);
                if (basis[p.mask].cols > opt.max_rank)
                    return std::nullopt;
            }
            SheafBuilder b(n, ring);
            for (Face p : all_faces(n))
                b.set_rank(p, basis[p.mask].cols);
            for (Face p : all_faces(n))
                for (int v = 0; v < n; ++v) {
                    if (p.contains(v))
                        continue;
                    const Face q = p.with(v);
                    const Dense& bp = basis[p.mask];
                    const Dense& bq = basis[q.mask];
                    // project basis vectors of I_p onto the targets containing q
                    Dense projected(rows_at[q.mask].size(), bp.cols, field);
                    for (std::size_t r = 0; r < rows_at[q.mask].size(); ++r) {
                        auto it = std::find(rows_at[p.mask].begin(), rows_at[p.mask].end(), rows_at[q.mask][r]);
                        const std::size_t src_row = static_cast<std::size_t>(it - rows_at[p.mask].begin());
                        for (std::size_t c = 0; c < bp.cols; ++c)
                            projected(r, c) = bp(src_row, c);
                    }
                    // coordinates in the basis of I_q
                    Dense system = Dense::hconcat({&bq, &projected}, bq.rows, field);
                    detail::rref(system, field, bq.cols);
                    ExactMatrix m(ring, bq.cols, bp.cols);
                    for (std::size_t r = 0; r < bq.cols; ++r)
                        for (std::size_t c = 0; c < bp.cols; ++c)
                            if (!field.is_zero(system(r, bq.cols + c)))
                                m.set(r, c, field.to_rational(system(r, bq.cols + c)));
                    b.set_restriction(p, v, std::move(m));
                }
            return b.build();
        });
        if (result)
            return *result;
    }
}

/// A random multiplicity function on faces, mostly zero.
inline std::map<Face, std::size_t> random_multiplicities(std::mt19937& rng, int n, std::size_t max_mult = 2)
{
    std::map<Face, std::size_t> out;
    std::uniform_int_distribution<int> coin(0, 2);
    std::uniform_int_distribution<std::size_t> mult(1, max_mult);
    for (Face x : all_faces(n))
        if (coin(rng) == 0)
            out[x] = mult(rng);
    return out;
}

} // namespace hochster::fixtures
