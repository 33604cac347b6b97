// Local cohomology of the Stanley-Reisner ring of the boundary of a triangle,
// computed from links and cross-checked against the Cech complex.

#include <hochster/formulae.hpp>
#include <hochster/oracle.hpp>

#include <iostream>

int main()
{
    using namespace hochster;
    const auto ring = CoefficientRing::rationals();
    const auto triangle = SRComplex::from_facets(3, {Face::from_vertices({0, 1}), Face::from_vertices({0, 2}),
                                                     Face::from_vertices({1, 2})});
    HochsterEvaluator ev(constant_on(triangle, ring));

    std::cout << "complex " << triangle.to_string() << "\n";
    for (const auto& a : Window::cube(3, -1, 0).points()) {
        const auto h = ev.lc(2, a);
        if (h.is_zero())
            continue;
        std::cout << "H^2 in degree " << a.to_string() << ": " << h.to_string() << " (Cech: "
                  << cech_local_cohomology(ev.sheaf(), 2, a).to_string() << ")\n";
    }
    std::cout << "Hilbert series of H^2: " << ev.hilbert_series(2).coarse_string() << "  with u = t^-1/(1 - t^-1)\n";
    return 0;
}
