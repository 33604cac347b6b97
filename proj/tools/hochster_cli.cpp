#include <hochster/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Local cohomology and Ext of squarefree modules over a polynomial ring"};
    app.require_subcommand(1);

    hochster::JobConfig job;
    std::string coeff;
    std::string window, i_range, l_range, n_range;

    const std::map<std::string, std::string> descriptions{
        {"lc", "table of H^i_m(pi^*F) from the formula"},
        {"ext", "table of Ext^i(R/m_l, pi^*F) from the formula"},
        {"series", "Hilbert series of H^i_m(pi^*F), fine and coarse"},
        {"oracle-lc", "table of H^i_m(pi^*F) from the Cech complex"},
        {"oracle-ext", "table of Ext^i(R/m_l, pi^*F) from the Koszul complex"},
        {"verify-lc", "compare the local cohomology formula with the Cech oracle"},
        {"verify-ext", "compare the Ext formula with the Koszul oracle"},
        {"verify-props", "check both decompositions of pi_* on a window"},
        {"verify-multi", "compare ranks of the x_j action with the Cech oracle"},
        {"decompose-injective", "split an injective sheaf into constant sheaves on closures"},
        {"enumerate", "run a verification over every complex on --n vertices"},
    };

    for (const auto& name : hochster::cli_commands()) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--input", job.inputs, "facet file, or sheaf file ending in .json (repeatable)");
        sub->add_option("--coeff", coeff, "coefficients: q, z or fp:<prime>; comma-separated to run several");
        sub->add_option("--window", window, "degree window lo..hi, or one lo..hi per coordinate separated by commas");
        sub->add_option("--i", i_range, "cohomological index k or range a..b (default 0..n)");
        sub->add_option("--l", l_range, "power l of the maximal ideal, or a range a..b");
        sub->add_option("--n", n_range, "vertex count or range (enumerate, verify-props)");
        sub->add_option("--verify", job.verify, "sweep run by enumerate: lc, ext or multi")->check(CLI::IsMember({"lc", "ext", "multi"}));
        sub->add_option("--format", job.format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));
        sub->add_option("--jobs", job.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->callback([&job, name] { job.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? 0 : hochster::exit_code::input_error;
    }

    if (!coeff.empty()) {
        job.coefficients.clear();
        std::istringstream in(coeff);
        for (std::string c; std::getline(in, c, ',');)
            job.coefficients.push_back(c);
        job.coefficient_given = true;
    }
    if (!window.empty())
        job.window = window;
    if (!i_range.empty())
        job.i_range = i_range;
    if (!l_range.empty())
        job.l_range = l_range;
    if (!n_range.empty())
        job.n_range = n_range;

    return hochster::run(job, std::cout, std::cerr);
}
