#include "daebvp/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "daebvp/error.hpp"

namespace daebvp
{

namespace
{

[[noreturn]] void fail(const std::string &field, const std::string &what)
{
    throw Error(ErrorCode::InvalidInput, "field '" + field + "': " + what);
}

double number(const nlohmann::json &j, const std::string &field)
{
    if (!j.is_number())
        fail(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        fail(field, "must be finite");
    return v;
}

Vector vector_field(const nlohmann::json &j, const std::string &field, Index expected)
{
    if (!j.is_array())
        fail(field, "expected an array");
    if (expected >= 0 && static_cast<Index>(j.size()) != expected)
        fail(field, "expected length " + std::to_string(expected) + ", got " + std::to_string(j.size()));
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Index>(i)) = number(j[i], field + "[" + std::to_string(i) + "]");
    return v;
}

Matrix matrix_field(const nlohmann::json &root, const std::string &field, Index expected)
{
    if (!root.contains(field))
        fail(field, "missing");
    const nlohmann::json &j = root.at(field);
    if (!j.is_array() || j.empty())
        fail(field, "expected a non-empty array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (expected >= 0 && rows != expected)
        fail(field, "expected " + std::to_string(expected) + " rows, got " + std::to_string(rows));
    Matrix m(rows, rows);
    for (Index i = 0; i < rows; ++i)
    {
        const std::string row_name = field + "[" + std::to_string(i) + "]";
        m.row(i) = vector_field(j[static_cast<std::size_t>(i)], row_name, rows).transpose();
    }
    return m;
}

PhaseKind phase_kind(const nlohmann::json &j, const std::string &field)
{
    if (!j.is_string())
        fail(field, "expected \"none\", \"cos\" or \"sin\"");
    const std::string s = j.get<std::string>();
    if (s == "none")
        return PhaseKind::none;
    if (s == "cos")
        return PhaseKind::cos;
    if (s == "sin")
        return PhaseKind::sin;
    fail(field, "unknown kind \"" + s + "\"");
}

const char *kind_name(PhaseKind k)
{
    switch (k)
    {
    case PhaseKind::cos: return "cos";
    case PhaseKind::sin: return "sin";
    case PhaseKind::none: break;
    }
    return "none";
}

ExpPolySignal forcing_field(const nlohmann::json &root, Index n)
{
    ExpPolySignal f(n);
    if (!root.contains("f"))
        return f;
    const nlohmann::json &j = root.at("f");
    if (!j.is_array())
        fail("f", "expected an array of terms");
    for (std::size_t t = 0; t < j.size(); ++t)
    {
        const std::string base = "f[" + std::to_string(t) + "]";
        const nlohmann::json &term = j[t];
        if (!term.is_object())
            fail(base, "expected an object");
        ExpPolyTerm out;
        out.alpha = term.contains("alpha") ? number(term.at("alpha"), base + ".alpha") : 0.0;
        out.omega = term.contains("omega") ? number(term.at("omega"), base + ".omega") : 0.0;
        out.kind = term.contains("kind") ? phase_kind(term.at("kind"), base + ".kind") : PhaseKind::none;
        if (out.kind == PhaseKind::none && out.omega != 0.0)
            fail(base + ".omega", "must be 0 when kind is \"none\"");
        if (!term.contains("poly") || !term.at("poly").is_array() || term.at("poly").empty())
            fail(base + ".poly", "expected a non-empty array of coefficient vectors");
        const nlohmann::json &poly = term.at("poly");
        for (std::size_t k = 0; k < poly.size(); ++k)
            out.coeffs.push_back(vector_field(poly[k], base + ".poly[" + std::to_string(k) + "]", n));
        f.add_term(std::move(out));
    }
    return f;
}

nlohmann::ordered_json matrix_json(const Matrix &m)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Index i = 0; i < m.rows(); ++i)
    {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Index k = 0; k < m.cols(); ++k)
            row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::ordered_json vector_json(const Vector &v)
{
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

} // namespace

BvpProblem ProblemFile::to_problem() const
{
    const Index n = E.rows();
    if (mode == ProblemMode::ivp)
        return BvpProblem{Pencil(E, A), Matrix::Identity(n, n), Matrix::Zero(n, n), d, T, f};
    return BvpProblem{Pencil(E, A), B, C, d, T, f};
}

ProblemFile parse_problem(const nlohmann::json &j)
{
    if (!j.is_object())
        fail("<root>", "expected a JSON object");

    ProblemFile p;
    if (!j.contains("schema_version") || !j.at("schema_version").is_string())
        fail("schema_version", "missing or not a string");
    p.schema = j.at("schema_version").get<std::string>();
    if (p.schema.rfind("1.", 0) != 0 && p.schema != "1")
        fail("schema_version", "unsupported version \"" + p.schema + "\" (expected 1.x)");

    if (j.contains("mode"))
    {
        if (!j.at("mode").is_string())
            fail("mode", "expected \"bvp\" or \"ivp\"");
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "bvp")
            p.mode = ProblemMode::bvp;
        else if (mode == "ivp")
            p.mode = ProblemMode::ivp;
        else
            fail("mode", "expected \"bvp\" or \"ivp\", got \"" + mode + "\"");
    }

    p.E = matrix_field(j, "E", -1);
    const Index n = p.E.rows();
    p.A = matrix_field(j, "A", n);
    if (p.mode == ProblemMode::bvp)
    {
        p.B = matrix_field(j, "B", n);
        p.C = matrix_field(j, "C", n);
    }
    else
    {
        p.B = Matrix::Identity(n, n);
        p.C = Matrix::Zero(n, n);
    }
    if (!j.contains("d"))
        fail("d", "missing");
    p.d = vector_field(j.at("d"), "d", n);
    if (!j.contains("T"))
        fail("T", "missing");
    p.T = number(j.at("T"), "T");
    if (!(p.T > 0.0))
        fail("T", "must be positive");
    p.f = forcing_field(j, n);
    return p;
}

ProblemFile load_problem_text(const std::string &text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        // byte offset -> line / column
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                column = 1;
            }
            else
                ++column;
        }
        std::ostringstream msg;
        msg << "JSON syntax error at line " << line << ", column " << column << ": " << e.what();
        throw Error(ErrorCode::InvalidInput, msg.str());
    }
    return parse_problem(j);
}

ProblemFile load_problem(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::InvalidInput, "cannot open problem file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try
    {
        return load_problem_text(buffer.str());
    }
    catch (const Error &e)
    {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

nlohmann::ordered_json to_json(const ProblemFile &problem)
{
    nlohmann::ordered_json j;
    j["schema_version"] = problem.schema;
    j["mode"] = problem.mode == ProblemMode::bvp ? "bvp" : "ivp";
    j["E"] = matrix_json(problem.E);
    j["A"] = matrix_json(problem.A);
    if (problem.mode == ProblemMode::bvp)
    {
        j["B"] = matrix_json(problem.B);
        j["C"] = matrix_json(problem.C);
    }
    j["d"] = vector_json(problem.d);
    j["T"] = problem.T;
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const ExpPolyTerm &t : problem.f.terms())
    {
        nlohmann::ordered_json term;
        term["alpha"] = t.alpha;
        term["omega"] = t.omega;
        term["kind"] = kind_name(t.kind);
        nlohmann::ordered_json poly = nlohmann::ordered_json::array();
        for (const Vector &v : t.coeffs)
            poly.push_back(vector_json(v));
        term["poly"] = poly;
        terms.push_back(term);
    }
    j["f"] = terms;
    return j;
}

void save_problem(const ProblemFile &problem, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
    out << to_json(problem).dump(2) << '\n';
}

} // namespace daebvp
