#include <hochster/cli.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hochster;

namespace {

namespace fs = std::filesystem;

const std::string samples = HOCHSTER_SAMPLES_DIR;

class TempFiles : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("hochster_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text)
    {
        const auto path = dir_ / name;
        std::ofstream(path) << text;
        return path.string();
    }

    fs::path dir_;
};

struct RunResult {
    int status;
    std::string out;
    std::string err;
};

RunResult run_job(const JobConfig& job)
{
    std::ostringstream out, err;
    const int status = run(job, out, err);
    return {status, out.str(), err.str()};
}

JobConfig job_for(std::string command, std::vector<std::string> inputs = {})
{
    JobConfig job;
    job.command = std::move(command);
    job.inputs = std::move(inputs);
    return job;
}

Face f(std::initializer_list<int> one_based)
{
    std::vector<int> v;
    for (int x : one_based)
        v.push_back(x - 1);
    return Face::from_vertices(v);
}

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::invalid_argument;
}

} // namespace

TEST(FacetFile, BoundaryTriangle)
{
    auto k = parse_complex_text("1 2\n1 3\n2 3\n");
    EXPECT_EQ(k, SRComplex::from_facets(3, {f({1, 2}), f({1, 3}), f({2, 3})}));
}

TEST(FacetFile, MalformedTokenReportsLine)
{
    try {
        parse_complex_text("1 2\n1 x\n", "k.txt");
        FAIL() << "expected a parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("k.txt:2"), std::string::npos) << e.what();
    }
}

TEST(FacetFile, HeaderCommentsAndEmptyFacet)
{
    auto k = parse_complex_text("# two isolated vertices among four\nn=4\n\n1   # first\n3\n");
    EXPECT_EQ(k.n(), 4);
    EXPECT_EQ(k.facets(), (std::vector<Face>{f({1}), f({3})}));
    EXPECT_EQ(parse_complex_text("n=2\n{}\n"), SRComplex::irrelevant(2));
    EXPECT_EQ(parse_complex_text("n=3\n"), SRComplex::void_complex(3));
    EXPECT_EQ(parse_complex_text(""), SRComplex::void_complex(0));
}

TEST(FacetFile, Diagnostics)
{
    EXPECT_EQ(kind_of([] { parse_complex_text("n=2\n1 3\n"); }), ErrorKind::vertex_range);
    EXPECT_EQ(kind_of([] { parse_complex_text("0 1\n"); }), ErrorKind::vertex_range);
    EXPECT_EQ(kind_of([] { parse_complex_text("1\nn=3\n"); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([] { parse_complex_text("n=x\n"); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([] { parse_complex_text("n=17\n"); }), ErrorKind::capacity);
    EXPECT_EQ(kind_of([] { parse_complex_file("/nonexistent/complex.txt"); }), ErrorKind::parse);
}

TEST(FacetFile, RoundTrip)
{
    for (const auto& k : enumerate_complexes(3))
        EXPECT_EQ(parse_complex_text(to_facet_text(k)), k) << k.to_string();
}

TEST(SheafFile, SampleInjective)
{
    auto s = parse_sheaf_file(samples + "/injective_two_closures.json");
    EXPECT_EQ(s.n(), 2);
    EXPECT_EQ(s.ring(), CoefficientRing::prime_field(3));
    EXPECT_EQ(s.rank(Face()), 2u);
    EXPECT_EQ(s.rank(f({1, 2})), 0u);
    auto over_q = parse_sheaf_file(samples + "/injective_two_closures.json", CoefficientRing::rationals());
    EXPECT_EQ(over_q.ring(), CoefficientRing::rationals());
}

TEST(SheafFile, ShapeMismatchNamesPair)
{
    try {
        parse_sheaf_file(samples + "/bad_shape.json");
        FAIL() << "expected a shape mismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::shape_mismatch);
        EXPECT_NE(std::string(e.what()).find("{1} -> {1,2}"), std::string::npos) << e.what();
    }
}

TEST(SheafFile, Diagnostics)
{
    const std::string missing = R"({"n": 1, "stalks": {"": 1, "1": 1}})";
    EXPECT_EQ(kind_of([&] { parse_sheaf_text(missing); }), ErrorKind::missing_restriction);

    const std::string twisted = R"({"n": 2, "stalks": {"": 1, "1": 1, "2": 1, "1,2": 1},
        "restrictions": [{"face": [], "add": 1, "matrix": [[1]]}, {"face": [], "add": 2, "matrix": [[1]]},
                         {"face": [1], "add": 2, "matrix": [[1]]}, {"face": [2], "add": 1, "matrix": [[-1]]}]})";
    EXPECT_EQ(kind_of([&] { parse_sheaf_text(twisted); }), ErrorKind::non_commuting);

    EXPECT_EQ(kind_of([] { parse_sheaf_text("{\"n\": 2,"); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([] { parse_sheaf_text(R"({"stalks": {}})"); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([] { parse_sheaf_text(R"({"n": 2, "stalks": {"3": 1}})"); }), ErrorKind::vertex_range);
    EXPECT_EQ(kind_of([] { parse_sheaf_text(R"({"n": 1, "stalks": [{"face": [1], "rank": -1}]})"); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([] { parse_sheaf_text(R"({"n": 1, "coeff": "fp:4"})"); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] {
                  parse_sheaf_text(R"({"n": 1, "stalks": {"": 1, "1": 2},
                      "restrictions": [{"face": [], "add": 1, "matrix": [[1], [0, 1]]}]})");
              }),
              ErrorKind::shape_mismatch);
}

TEST(SheafFile, ListAndObjectStalksAgree)
{
    const std::string as_list = R"({"n": 1, "coeff": "q", "stalks": [{"face": [], "rank": 1}, {"face": [1], "rank": 1}],
        "restrictions": [{"face": [], "add": 1, "matrix": [[2]]}]})";
    const std::string as_object = R"({"n": 1, "coeff": "q", "stalks": {"": 1, "1": 1},
        "restrictions": [{"face": [], "add": 1, "matrix": [[2]]}]})";
    auto a = parse_sheaf_text(as_list), b = parse_sheaf_text(as_object);
    EXPECT_EQ(a.cover_restriction(Face(), 0), b.cover_restriction(Face(), 0));
    EXPECT_EQ(a.rank(Face(1)), 1u);
}

TEST(Cli, LcTableContainsExample)
{
    auto job = job_for("lc", {samples + "/boundary_triangle.txt"});
    job.i_range = "2";
    job.window = "-2..0";
    auto r = run_job(job);
    EXPECT_EQ(r.status, exit_code::ok) << r.err;
    EXPECT_NE(r.out.find("\tq\t2\t(0,0,0)\t1\t-\n"), std::string::npos) << r.out;
    EXPECT_EQ(r.out.find("\t0\t-\n"), std::string::npos) << "zero rows are omitted";
}

TEST_F(TempFiles, SeriesOfFullSimplex)
{
    auto job = job_for("series", {write("simplex.txt", "1 2 3\n")});
    job.i_range = "3";
    auto r = run_job(job);
    EXPECT_EQ(r.status, exit_code::ok) << r.err;
    EXPECT_NE(r.out.find("\t3\tu^3\tu1*u2*u3\n"), std::string::npos) << r.out;
}

TEST(Cli, EnumerateVerifyLcPasses)
{
    auto job = job_for("enumerate");
    job.n_range = "3";
    job.verify = "lc";
    job.coefficients = {"q", "fp:2"};
    job.coefficient_given = true;
    job.window = "-3..1";
    auto r = run_job(job);
    EXPECT_EQ(r.status, exit_code::ok) << r.out << r.err;
    EXPECT_NE(r.out.find("mismatches=0"), std::string::npos);
}

TEST(Cli, ParallelSweepMatchesSerial)
{
    for (const std::string kind : {"lc", "ext", "multi"}) {
        auto job = job_for("enumerate");
        job.n_range = "0..3";
        job.verify = kind;
        job.l_range = "1..2";
        job.coefficients = {"fp:2", "q"};
        job.coefficient_given = true;
        auto serial = run_job(job);
        job.jobs = 4;
        auto parallel = run_job(job);
        EXPECT_EQ(serial.status, exit_code::ok) << serial.out;
        EXPECT_EQ(serial.out, parallel.out) << kind;
    }
}

TEST(Cli, JsonLinesParse)
{
    auto job = job_for("oracle-lc", {samples + "/projective_plane.txt"});
    job.coefficients = {"z"};
    job.coefficient_given = true;
    job.window = "0..0";
    job.format = "json";
    auto r = run_job(job);
    ASSERT_EQ(r.status, exit_code::ok) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(lines, line))
        rows.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(rows.size(), 1u) << r.out;
    EXPECT_EQ(rows[0]["i"], 3);
    EXPECT_EQ(rows[0]["rank"], 0);
    EXPECT_EQ(rows[0]["torsion"], "2");
    EXPECT_EQ(rows[0]["alpha"], nlohmann::json::array({0, 0, 0, 0, 0, 0}));
}

TEST(Cli, FormulaAndOracleTablesAgree)
{
    for (const std::string cmd : {"lc", "ext"}) {
        auto job = job_for(cmd, {samples + "/boundary_triangle.txt", samples + "/irrelevant.txt"});
        job.l_range = "1..3";
        auto formula = run_job(job);
        job.command = "oracle-" + cmd;
        auto oracle = run_job(job);
        EXPECT_EQ(formula.status, exit_code::ok);
        EXPECT_EQ(formula.out, oracle.out) << cmd;
    }
}

TEST(Cli, VerifyOnSheafFile)
{
    for (const std::string cmd : {"verify-lc", "verify-ext", "verify-multi"}) {
        auto job = job_for(cmd, {samples + "/injective_two_closures.json"});
        auto r = run_job(job);
        EXPECT_EQ(r.status, exit_code::ok) << cmd << "\n" << r.out << r.err;
        EXPECT_NE(r.out.find("\tcoeff\t"), std::string::npos);
    }
}

TEST(Cli, VerifyProps)
{
    auto job = job_for("verify-props");
    job.n_range = "1..2";
    auto r = run_job(job);
    EXPECT_EQ(r.status, exit_code::ok) << r.out << r.err;
    EXPECT_NE(r.out.find("truncation\tq\t2\t3\t"), std::string::npos) << r.out;
}

TEST(Cli, DecomposeInjective)
{
    auto ok = run_job(job_for("decompose-injective", {samples + "/injective_two_closures.json"}));
    EXPECT_EQ(ok.status, exit_code::ok) << ok.err;
    EXPECT_NE(ok.out.find("injective\t{1}\t1"), std::string::npos) << ok.out;

    auto job = job_for("decompose-injective", {samples + "/boundary_triangle.txt"});
    job.coefficients = {"fp:3"};
    job.coefficient_given = true;
    auto bad = run_job(job);
    EXPECT_EQ(bad.status, exit_code::mismatch);
    EXPECT_NE(bad.out.find("not-injective\t{}"), std::string::npos) << bad.out;
}

TEST(Cli, ExitCodes)
{
    auto parse_error = run_job(job_for("lc", {samples + "/bad_shape.json"}));
    EXPECT_EQ(parse_error.status, exit_code::input_error);
    EXPECT_NE(parse_error.err.find("shape-mismatch"), std::string::npos);

    EXPECT_EQ(run_job(job_for("lc")).status, exit_code::input_error);
    EXPECT_EQ(run_job(job_for("no-such-command", {samples + "/irrelevant.txt"})).status, exit_code::input_error);

    auto big = job_for("enumerate");
    big.n_range = "5";
    auto refused = run_job(big);
    EXPECT_EQ(refused.status, exit_code::capacity);
    EXPECT_NE(refused.err.find("capacity"), std::string::npos);

    auto wide = job_for("lc", {samples + "/projective_plane.txt"});
    wide.window = "-20..20";
    EXPECT_EQ(run_job(wide).status, exit_code::capacity);

    auto empty_window = job_for("lc", {samples + "/boundary_triangle.txt"});
    empty_window.window = "1..0";
    EXPECT_EQ(run_job(empty_window).status, exit_code::input_error);

    auto integers = job_for("verify-multi", {samples + "/boundary_triangle.txt"});
    integers.coefficients = {"z"};
    integers.coefficient_given = true;
    EXPECT_EQ(run_job(integers).status, exit_code::input_error);
}

TEST(Cli, WindowPerCoordinate)
{
    auto job = job_for("lc", {samples + "/boundary_triangle.txt"});
    job.window = "-1..0,0..0,0..0";
    job.i_range = "2";
    auto r = run_job(job);
    EXPECT_EQ(r.status, exit_code::ok) << r.err;
    std::size_t rows = 0;
    for (char c : r.out)
        rows += c == '\n';
    EXPECT_EQ(rows, 3u) << r.out; // header, (-1,0,0), (0,0,0)

    job.window = "-1..0,0..0";
    EXPECT_EQ(run_job(job).status, exit_code::input_error);
}

TEST_F(TempFiles, DeterministicOutput)
{
    const auto path = write("k.txt", "1 2\n3\n");
    auto job = job_for("lc", {path});
    EXPECT_EQ(run_job(job).out, run_job(job).out);
}
