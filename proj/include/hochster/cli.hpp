#pragma once

// Batch driver behind the hochster_cli tool.  run() never touches the process
// environment: it reads input files named in the JobConfig, writes reports to
// the given streams and returns the exit status.

#include "cube_poset.hpp"
#include "exactlin.hpp"
#include "formulae.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "sheaf.hpp"
#include "squarefree.hpp"

#include <json.hpp>

#include <atomic>
#include <functional>
#include <ostream>
#include <thread>

namespace hochster {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int mismatch = 1; // also: not injective
inline constexpr int input_error = 2;
inline constexpr int capacity = 3;
} // namespace exit_code

struct JobConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::vector<std::string> coefficients{"q"}; // ring selectors, each run separately
    bool coefficient_given = false;             // overrides the "coeff" of sheaf files when set
    std::optional<std::string> window;          // "lo..hi" or "lo1..hi1,lo2..hi2,..."
    std::optional<std::string> i_range;         // "k" or "a..b"
    std::optional<std::string> l_range;         // "l" or "a..b", default 1
    std::optional<std::string> n_range;         // enumerate and verify-props
    std::string verify = "lc";                  // sweep used by enumerate
    std::string format = "tsv";
    unsigned jobs = 1;
    std::size_t max_window_points = 1'000'000;
};

namespace cli_detail {

using nlohmann::json;

struct Range {
    int lo = 0;
    int hi = 0;
};

inline int parse_int(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size())
        throw Error(ErrorKind::invalid_argument, what + ": malformed integer '" + text + "'");
    return v;
}

inline Range parse_range(const std::string& text, const std::string& what)
{
    const auto dots = text.find("..");
    Range r;
    if (dots == std::string::npos) {
        r.lo = r.hi = parse_int(text, what);
    } else {
        r.lo = parse_int(text.substr(0, dots), what);
        r.hi = parse_int(text.substr(dots + 2), what);
    }
    if (r.lo > r.hi)
        throw Error(ErrorKind::invalid_argument, what + ": empty range '" + text + "'");
    return r;
}

inline Window resolve_window(const std::optional<std::string>& spec, int n, int default_lo, int default_hi,
                             std::size_t max_points)
{
    Window w = Window::cube(n, default_lo, default_hi);
    if (spec) {
        std::vector<Range> parts;
        std::string piece;
        std::istringstream in(*spec);
        while (std::getline(in, piece, ','))
            parts.push_back(parse_range(piece, "--window"));
        if (parts.size() == 1) {
            w = Window::cube(n, parts[0].lo, parts[0].hi);
        } else if (static_cast<int>(parts.size()) == n) {
            for (std::size_t k = 0; k < parts.size(); ++k) {
                w.lo[k] = parts[k].lo;
                w.hi[k] = parts[k].hi;
            }
        } else {
            throw Error(ErrorKind::invalid_argument, "--window has " + std::to_string(parts.size()) +
                                                         " ranges for a problem on " + std::to_string(n) + " vertices");
        }
    }
    double points = 1;
    for (int k = 0; k < n; ++k)
        points *= static_cast<double>(w.hi[static_cast<std::size_t>(k)] - w.lo[static_cast<std::size_t>(k)] + 1);
    if (points > static_cast<double>(max_points))
        throw Error(ErrorKind::capacity, "window has more than " + std::to_string(max_points) + " points");
    return w;
}

/// Something to compute on: a constant sheaf k_K or a sheaf read from a file.
struct Subject {
    std::string label;
    std::optional<SRComplex> complex;
    std::function<Sheaf(const CoefficientRing&)> sheaf;
};

inline bool is_sheaf_path(const std::string& path)
{
    return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

inline Subject load_subject(const std::string& path, const JobConfig& job)
{
    Subject s;
    s.label = path;
    if (is_sheaf_path(path)) {
        const std::string text = detail::read_whole_file(path);
        const Sheaf native = parse_sheaf_text(text, path);
        const bool override_ring = job.coefficient_given;
        s.sheaf = [text, path, native, override_ring](const CoefficientRing& ring) {
            return override_ring ? parse_sheaf_text(text, path, ring) : native;
        };
    } else {
        SRComplex k = parse_complex_file(path);
        s.complex = k;
        s.sheaf = [k](const CoefficientRing& ring) { return constant_on(k, ring); };
    }
    return s;
}

inline std::vector<Subject> load_subjects(const JobConfig& job)
{
    if (job.inputs.empty())
        throw Error(ErrorKind::invalid_argument, job.command + " needs --input");
    std::vector<Subject> out;
    for (const auto& path : job.inputs)
        out.push_back(load_subject(path, job));
    return out;
}

inline std::vector<CoefficientRing> rings_of(const JobConfig& job, const std::vector<Subject>& subjects,
                                             std::size_t subject_index)
{
    // A sheaf file without --coeff runs over its own ring only.
    if (!job.coefficient_given && !subjects[subject_index].complex)
        return {subjects[subject_index].sheaf(CoefficientRing::rationals()).ring()};
    std::vector<CoefficientRing> out;
    for (const auto& c : job.coefficients)
        out.push_back(CoefficientRing::parse(c));
    return out;
}

inline json degree_json(const Multidegree& a) { return json(a.values()); }

inline std::string degree_tsv(const Multidegree& a) { return a.to_string(); }

class Table {
public:
    Table(std::ostream& out, std::string format, std::vector<std::string> columns)
        : out_(out), json_(format == "json"), columns_(std::move(columns))
    {
        if (!json_) {
            for (std::size_t k = 0; k < columns_.size(); ++k)
                out_ << (k ? "\t" : "") << columns_[k];
            out_ << '\n';
        }
    }

    /// `cells` are (tsv text, json value) pairs in column order.
    void row(const std::vector<std::pair<std::string, json>>& cells)
    {
        if (json_) {
            json obj = json::object();
            for (std::size_t k = 0; k < columns_.size(); ++k)
                obj[columns_[k]] = cells[k].second;
            out_ << obj.dump() << '\n';
        } else {
            for (std::size_t k = 0; k < cells.size(); ++k)
                out_ << (k ? "\t" : "") << cells[k].first;
            out_ << '\n';
        }
    }

private:
    std::ostream& out_;
    bool json_;
    std::vector<std::string> columns_;
};

inline std::pair<std::string, json> cell(const std::string& s) { return {s, s}; }
inline std::pair<std::string, json> cell(int v) { return {std::to_string(v), v}; }
inline std::pair<std::string, json> cell(std::size_t v) { return {std::to_string(v), v}; }
inline std::pair<std::string, json> cell(const Multidegree& a) { return {degree_tsv(a), degree_json(a)}; }
inline std::pair<std::string, json> torsion_cell(const ModuleSummary& m)
{
    const std::string t = m.torsion_string();
    return {t.empty() ? "-" : t, t};
}

/// Runs fn(k) for k in [0, count) on `jobs` threads; results land by index so
/// the report order never depends on scheduling.
template <class R>
std::vector<R> parallel_map(std::size_t count, unsigned jobs, const std::function<R(std::size_t)>& fn)
{
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < count;) {
            try {
                out[k] = fn(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

inline Range i_range_for(const JobConfig& job, int n)
{
    return job.i_range ? parse_range(*job.i_range, "--i") : Range{0, n};
}

inline Range l_range_for(const JobConfig& job)
{
    Range r = job.l_range ? parse_range(*job.l_range, "--l") : Range{1, 1};
    if (r.lo < 1)
        throw Error(ErrorKind::invalid_argument, "--l must be at least 1");
    return r;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

inline int run_table(const JobConfig& job, std::ostream& out, bool ext, bool oracle)
{
    auto subjects = load_subjects(job);
    std::vector<std::string> cols{"input", "coeff"};
    if (ext)
        cols.push_back("l");
    for (const char* c : {"i", "alpha", "rank", "torsion"})
        cols.emplace_back(c);
    Table table(out, job.format, cols);
    const Range ls = ext ? l_range_for(job) : Range{1, 1};
    for (std::size_t si = 0; si < subjects.size(); ++si)
        for (const auto& ring : rings_of(job, subjects, si)) {
            HochsterEvaluator ev(subjects[si].sheaf(ring));
            const int n = ev.sheaf().n();
            const Range is = i_range_for(job, n);
            for (int l = ls.lo; l <= ls.hi; ++l) {
                const Window w = ext ? resolve_window(job.window, n, -l - 1, 1, job.max_window_points)
                                     : resolve_window(job.window, n, -n - 1, 1, job.max_window_points);
                const auto points = w.points();
                auto rows = parallel_map<std::vector<ModuleSummary>>(points.size(), job.jobs, [&](std::size_t k) {
                    std::vector<ModuleSummary> per_i;
                    const auto& a = points[k];
                    if (oracle) {
                        auto all = ext ? koszul_ext_all(ev.sheaf(), l, a) : cech_local_cohomology_all(ev.sheaf(), a);
                        for (int i = is.lo; i <= is.hi; ++i)
                            per_i.push_back(i >= 0 && i < static_cast<int>(all.size()) ? all[static_cast<std::size_t>(i)]
                                                                                     : ModuleSummary{});
                    } else {
                        for (int i = is.lo; i <= is.hi; ++i)
                            per_i.push_back(ext ? ev.ext(l, i, a) : ev.lc(i, a));
                    }
                    return per_i;
                });
                for (int i = is.lo; i <= is.hi; ++i)
                    for (std::size_t k = 0; k < points.size(); ++k) {
                        const auto& m = rows[k][static_cast<std::size_t>(i - is.lo)];
                        if (m.is_zero())
                            continue;
                        std::vector<std::pair<std::string, json>> cells{cell(subjects[si].label), cell(ring.name())};
                        if (ext)
                            cells.push_back(cell(l));
                        cells.push_back(cell(i));
                        cells.push_back(cell(points[k]));
                        cells.push_back(cell(m.free_rank));
                        cells.push_back(torsion_cell(m));
                        table.row(cells);
                    }
            }
        }
    return exit_code::ok;
}

inline int run_series(const JobConfig& job, std::ostream& out)
{
    auto subjects = load_subjects(job);
    Table table(out, job.format, {"input", "coeff", "i", "coarse", "fine"});
    for (std::size_t si = 0; si < subjects.size(); ++si)
        for (const auto& ring : rings_of(job, subjects, si)) {
            HochsterEvaluator ev(subjects[si].sheaf(ring));
            const Range is = i_range_for(job, ev.sheaf().n());
            for (int i = is.lo; i <= is.hi; ++i) {
                auto s = ev.hilbert_series(i);
                table.row({cell(subjects[si].label), cell(ring.name()), cell(i), cell(s.coarse_string()), cell(s.fine_string())});
            }
        }
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// Verification sweeps
// ---------------------------------------------------------------------------

struct Mismatch {
    std::string label;
    std::string coeff;
    std::optional<int> l;
    int i = 0;
    Multidegree alpha;
    std::optional<int> j;
    std::string formula;
    std::string oracle;
};

struct SweepResult {
    std::size_t checked = 0;
    std::vector<Mismatch> mismatches;
};

/// One sweep unit: a subject, a ring and (for Ext) a value of l, over the whole window.
struct SweepTask {
    std::size_t subject = 0;
    CoefficientRing ring;
    int l = 1;
};

inline SweepResult sweep_one(const JobConfig& job, const Subject& subject, const SweepTask& task, const std::string& kind)
{
    SweepResult res;
    HochsterEvaluator ev(subject.sheaf(task.ring));
    const Sheaf& f = ev.sheaf();
    const int n = f.n();
    const Range is = i_range_for(job, n);
    const int l = task.l;
    const Window w = kind == "ext" ? resolve_window(job.window, n, -l - 1, 1, job.max_window_points)
                                   : resolve_window(job.window, n, -n - 1, 1, job.max_window_points);
    for (const auto& a : w.points()) {
        if (kind == "multi") {
            for (int j = 0; j < n; ++j)
                for (int i = is.lo; i <= is.hi; ++i) {
                    const std::size_t lhs = rank(ev.lc_mult_map(i, a, j));
                    const std::size_t rhs = cech_mult_map(f, i, a, j);
                    ++res.checked;
                    if (lhs != rhs)
                        res.mismatches.push_back({subject.label, task.ring.name(), std::nullopt, i, a, j + 1,
                                                  std::to_string(lhs), std::to_string(rhs)});
                }
            continue;
        }
        const auto all = kind == "ext" ? koszul_ext_all(f, l, a) : cech_local_cohomology_all(f, a);
        for (int i = is.lo; i <= is.hi; ++i) {
            const ModuleSummary lhs = kind == "ext" ? ev.ext(l, i, a) : ev.lc(i, a);
            const ModuleSummary rhs = i >= 0 && i < static_cast<int>(all.size()) ? all[static_cast<std::size_t>(i)] : ModuleSummary{};
            ++res.checked;
            if (!(lhs == rhs))
                res.mismatches.push_back({subject.label, task.ring.name(), kind == "ext" ? std::optional<int>(l) : std::nullopt, i,
                                          a, std::nullopt, lhs.to_string(), rhs.to_string()});
        }
    }
    return res;
}

inline int run_sweep(const JobConfig& job, const std::vector<Subject>& subjects, const std::string& kind, std::ostream& out)
{
    if (kind != "lc" && kind != "ext" && kind != "multi")
        throw Error(ErrorKind::invalid_argument, "unknown verification '" + kind + "' (expected lc, ext or multi)");
    std::vector<SweepTask> tasks;
    const Range ls = kind == "ext" ? l_range_for(job) : Range{1, 1};
    for (std::size_t si = 0; si < subjects.size(); ++si)
        for (const auto& ring : rings_of(job, subjects, si)) {
            if (kind == "multi" && !ring.is_field())
                throw Error(ErrorKind::unsupported_ring, "verify-multi needs a field, got " + ring.name());
            for (int l = ls.lo; l <= ls.hi; ++l)
                tasks.push_back({si, ring, l});
        }
    auto results = parallel_map<SweepResult>(tasks.size(), job.jobs, [&](std::size_t k) {
        return sweep_one(job, subjects[tasks[k].subject], tasks[k], kind);
    });

    std::size_t checked = 0, bad = 0;
    const bool as_json = job.format == "json";
    if (!as_json)
        out << "status\tinput\tcoeff\tl\ti\talpha\tj\tformula\toracle\n";
    for (const auto& r : results) {
        checked += r.checked;
        bad += r.mismatches.size();
        for (const auto& m : r.mismatches) {
            if (as_json) {
                json obj{{"status", "mismatch"}, {"input", m.label}, {"coeff", m.coeff}, {"i", m.i},
                         {"alpha", degree_json(m.alpha)}, {"formula", m.formula}, {"oracle", m.oracle}};
                if (m.l)
                    obj["l"] = *m.l;
                if (m.j)
                    obj["j"] = *m.j;
                out << obj.dump() << '\n';
            } else {
                out << "mismatch\t" << m.label << '\t' << m.coeff << '\t' << (m.l ? std::to_string(*m.l) : "-") << '\t' << m.i
                    << '\t' << degree_tsv(m.alpha) << '\t' << (m.j ? std::to_string(*m.j) : "-") << '\t' << m.formula << '\t'
                    << m.oracle << '\n';
            }
        }
    }
    if (as_json)
        out << json{{"status", "summary"}, {"verify", kind}, {"checked", checked}, {"mismatches", bad}}.dump() << '\n';
    else
        out << "summary\tverify=" << kind << "\tchecked=" << checked << "\tmismatches=" << bad << '\n';
    return bad == 0 ? exit_code::ok : exit_code::mismatch;
}

inline int run_enumerate(const JobConfig& job, std::ostream& out)
{
    if (!job.n_range)
        throw Error(ErrorKind::invalid_argument, "enumerate needs --n");
    const Range ns = parse_range(*job.n_range, "--n");
    if (ns.lo < 0)
        throw Error(ErrorKind::invalid_argument, "--n must be non-negative");
    std::vector<Subject> subjects;
    for (int n = ns.lo; n <= ns.hi; ++n)
        for (const auto& k : enumerate_complexes(n)) {
            Subject s;
            s.label = "n=" + std::to_string(n) + ":" + k.to_string();
            s.complex = k;
            s.sheaf = [k](const CoefficientRing& ring) { return constant_on(k, ring); };
            subjects.push_back(std::move(s));
        }
    return run_sweep(job, subjects, job.verify, out);
}

inline int run_props(const JobConfig& job, std::ostream& out)
{
    const Range ns = job.n_range ? parse_range(*job.n_range, "--n") : Range{1, 3};
    if (ns.lo < 1)
        throw Error(ErrorKind::invalid_argument, "--n must be at least 1");
    const Range ls = job.l_range ? l_range_for(job) : Range{1, 3};
    Table table(out, job.format, {"check", "coeff", "n", "l", "checked", "mismatches"});
    bool ok = true;
    std::vector<std::string> details;
    for (const auto& c : job.coefficients) {
        const auto ring = CoefficientRing::parse(c);
        for (int n = ns.lo; n <= ns.hi; ++n) {
            auto rep = check_prop_a(n, resolve_window(job.window, n, -3, 0, job.max_window_points), ring);
            ok = ok && rep.ok();
            table.row({cell("dualizing"), cell(ring.name()), cell(n), cell("-"), cell(rep.checked), cell(rep.mismatches.size())});
            for (const auto& m : rep.mismatches)
                details.push_back("dualizing n=" + std::to_string(n) + ": " + m);
        }
        // the truncation side is swept on n <= 2 only
        for (int n = ns.lo; n <= std::min(ns.hi, 2); ++n)
            for (int l = ls.lo; l <= ls.hi; ++l) {
                auto rep = check_prop_b(n, l, ring);
                ok = ok && rep.ok();
                table.row({cell("truncation"), cell(ring.name()), cell(n), cell(l), cell(rep.checked), cell(rep.mismatches.size())});
                for (const auto& m : rep.mismatches)
                    details.push_back("truncation n=" + std::to_string(n) + " l=" + std::to_string(l) + ": " + m);
            }
    }
    for (const auto& d : details)
        out << "# " << d << '\n';
    return ok ? exit_code::ok : exit_code::mismatch;
}

inline int run_decompose(const JobConfig& job, std::ostream& out)
{
    auto subjects = load_subjects(job);
    Table table(out, job.format, {"input", "coeff", "status", "face", "multiplicity"});
    bool all_injective = true;
    for (std::size_t si = 0; si < subjects.size(); ++si)
        for (const auto& ring : rings_of(job, subjects, si)) {
            auto d = decompose_injective(subjects[si].sheaf(ring));
            if (d.injective) {
                for (const auto& [face, m] : d.multiplicities)
                    table.row({cell(subjects[si].label), cell(ring.name()), cell("injective"), cell(face.to_string()), cell(m)});
                if (d.multiplicities.empty())
                    table.row({cell(subjects[si].label), cell(ring.name()), cell("injective"), cell("-"), cell(std::size_t{0})});
            } else {
                all_injective = false;
                table.row({cell(subjects[si].label), cell(ring.name()), cell("not-injective"),
                           cell(d.witness ? d.witness->to_string() : "-"), cell(d.reason)});
            }
        }
    return all_injective ? exit_code::ok : exit_code::mismatch;
}

} // namespace cli_detail

inline const std::vector<std::string>& cli_commands()
{
    static const std::vector<std::string> names{"lc",         "ext",        "series",       "oracle-lc",
                                                "oracle-ext", "verify-lc",  "verify-ext",   "verify-props",
                                                "verify-multi", "decompose-injective", "enumerate"};
    return names;
}

/// Executes one job.  Exit statuses: 0 success, 1 verification mismatch or a
/// sheaf that is not injective, 2 input error, 3 capacity refusal.
inline int run(const JobConfig& job, std::ostream& out, std::ostream& err)
{
    using namespace cli_detail;
    try {
        if (job.format != "tsv" && job.format != "json")
            throw Error(ErrorKind::invalid_argument, "--format must be tsv or json");
        if (job.jobs == 0)
            throw Error(ErrorKind::invalid_argument, "--jobs must be at least 1");
        const std::string& c = job.command;
        if (c == "lc" || c == "oracle-lc")
            return run_table(job, out, false, c == "oracle-lc");
        if (c == "ext" || c == "oracle-ext")
            return run_table(job, out, true, c == "oracle-ext");
        if (c == "series")
            return run_series(job, out);
        if (c == "verify-lc" || c == "verify-ext" || c == "verify-multi")
            return run_sweep(job, load_subjects(job), c.substr(7), out);
        if (c == "verify-props")
            return run_props(job, out);
        if (c == "decompose-injective")
            return run_decompose(job, out);
        if (c == "enumerate")
            return run_enumerate(job, out);
        throw Error(ErrorKind::invalid_argument, "unknown command '" + c + "'");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::capacity ? exit_code::capacity : exit_code::input_error;
    } catch (const std::logic_error& e) {
        // raised when an oracle's chain map fails to commute
        err << "error: internal inconsistency: " << e.what() << '\n';
        return exit_code::mismatch;
    }
}

} // namespace hochster
