#include <filesystem>
#include <string>

#include <doctest.h>

#include "daebvp/error.hpp"
#include "daebvp/problem_io.hpp"
#include "support/corpus.hpp"

using namespace daebvp;

namespace
{

std::string message_of(const std::string &text)
{
    try
    {
        load_problem_text(text);
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::InvalidInput);
        return e.what();
    }
    FAIL("expected InvalidInput");
    return {};
}

bool contains(const std::string &haystack, const std::string &needle)
{
    return haystack.find(needle) != std::string::npos;
}

const char *minimal = R"({
  "schema_version": "1.0",
  "E": [[1]], "A": [[0]], "B": [[1]], "C": [[1]],
  "d": [1], "T": 1, "f": []
})";

} // namespace

TEST_CASE("minimal problem parses")
{
    const ProblemFile p = load_problem_text(minimal);
    CHECK(p.mode == ProblemMode::bvp);
    CHECK(p.E.rows() == 1);
    CHECK(p.T == 1.0);
    CHECK(p.f.is_zero());
    const BvpProblem prob = p.to_problem();
    CHECK(prob.n() == 1);
}

TEST_CASE("ivp mode needs no boundary matrices")
{
    const ProblemFile p = load_problem_text(R"({"schema_version": "1.0", "mode": "ivp",
        "E": [[1, 0], [0, 1]], "A": [[0, 1], [-1, 0]], "d": [1, 0], "T": 2, "f": []})");
    const BvpProblem prob = p.to_problem();
    CHECK(prob.B == Matrix::Identity(2, 2));
    CHECK(prob.C == Matrix::Zero(2, 2));
}

TEST_CASE("diagnostics name the offending field")
{
    CHECK(contains(message_of(R"({"schema_version": "1.0", "E": [[1, 0], [0]], "A": [[0,0],[0,0]], "B": [[1,0],[0,1]],
        "C": [[1,0],[0,1]], "d": [1, 1], "T": 1, "f": []})"),
                   "E[1]"));
    CHECK(contains(message_of(R"({"schema_version": "1.0", "E": [[1]], "A": [[0]], "B": [[1]], "C": [[1]], "d": [1, 2], "T": 1})"),
                   "'d'"));
    CHECK(contains(message_of(R"({"schema_version": "1.0", "E": [[1]], "A": [[0]], "B": [[1]], "C": [[1]], "d": [1], "T": -1})"),
                   "'T'"));
    CHECK(contains(message_of(R"({"schema_version": "1.0", "E": [[1]], "A": [[0]], "B": [[1]], "C": [[1]], "d": ["x"], "T": 1})"),
                   "d[0]"));
    CHECK(contains(message_of(R"({"schema_version": "1.0", "E": [[1]], "B": [[1]], "C": [[1]], "d": [1], "T": 1})"), "'A'"));
    CHECK(contains(message_of(R"({"schema_version": "1.0", "E": [[1]], "A": [[0]], "B": [[1]], "C": [[1]], "d": [1], "T": 1,
        "f": [{"alpha": 0, "omega": 1, "kind": "tan", "poly": [[1]]}]})"),
                   "f[0]"));
    CHECK(contains(message_of(R"({"schema_version": "1.0", "E": [[1]], "A": [[0]], "B": [[1]], "C": [[1]], "d": [1], "T": 1,
        "f": [{"alpha": 0, "omega": 0, "kind": "none", "poly": [[1, 2]]}]})"),
                   "f[0].poly[0]"));
    CHECK(contains(message_of(R"({"schema_version": "9.0", "E": [[1]], "A": [[0]], "B": [[1]], "C": [[1]],
        "d": [1], "T": 1})"),
                   "schema_version"));
    CHECK(contains(message_of(R"({"schema_version": "1.0", "mode": "dae", "E": [[1]], "A": [[0]], "d": [1], "T": 1})"), "mode"));
}

TEST_CASE("syntax errors report line and column")
{
    const std::string msg = message_of("{\n  \"schema_version\": \"1.0\", \"E\": [[1]],\n  \"A\": [[0]] oops\n}");
    CHECK(contains(msg, "line 3"));
    CHECK(contains(msg, "column"));
}

TEST_CASE("missing file is an input error")
{
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), Error);
}

TEST_CASE("bundled problems load")
{
    for (const auto &entry : std::filesystem::directory_iterator(DAEBVP_DATA_DIR))
    {
        CAPTURE(entry.path().string());
        const ProblemFile p = load_problem(entry.path());
        CHECK(p.schema == schema_version);
        CHECK_NOTHROW(p.to_problem().validate());
    }
}

TEST_CASE("random problems survive a save and load")
{
    testing::CorpusGenerator gen(41);
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "daebvp_io_roundtrip";
    std::filesystem::create_directories(dir);
    for (int trial = 0; trial < 20; ++trial)
    {
        const testing::CorpusProblem c = gen.random_structured();
        ProblemFile file;
        file.E = c.problem.pencil.E();
        file.A = c.problem.pencil.A();
        file.B = c.problem.B;
        file.C = c.problem.C;
        file.d = c.problem.d;
        file.T = c.problem.T;
        file.f = c.problem.f;
        const std::filesystem::path path = dir / ("p" + std::to_string(trial) + ".json");
        save_problem(file, path);
        const ProblemFile back = load_problem(path);
        CHECK(back.E == file.E);
        CHECK(back.A == file.A);
        CHECK(back.B == file.B);
        CHECK(back.C == file.C);
        CHECK(back.d == file.d);
        CHECK(back.T == file.T);
        for (double t : {0.0, 0.5, 1.7})
            CHECK(back.f(t) == file.f(t));
    }
    std::filesystem::remove_all(dir);
}
