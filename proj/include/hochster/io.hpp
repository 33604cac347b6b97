#pragma once

// Text formats.
//
// Facet files: one facet per line as whitespace-separated 1-based vertices,
// `#` starts a comment, blank lines are skipped, an optional first
// statement `n=<count>` fixes the vertex count (otherwise the largest vertex
// seen).  A line holding only `{}` declares the empty facet, so a file with
// just `{}` is the irrelevant complex and a file with no facets is void.
//
// Sheaf files are JSON:
//   {"n": 3, "coeff": "q",
//    "stalks": [{"face": [1, 2], "rank": 1}, ...]      or {"1,2": 1, "": 1, ...},
//    "restrictions": [{"face": [1], "add": 2, "matrix": [[1]]}, ...]}
// Matrices are row-major with rows indexed by the larger face's stalk.

#include "cube_poset.hpp"
#include "exactlin.hpp"
#include "sheaf.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace hochster {

namespace detail {

inline std::string read_whole_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::parse, path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline int parse_vertex_token(const std::string& token, const std::string& where)
{
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || token.empty())
        throw Error(ErrorKind::parse, where + ": malformed token '" + token + "'");
    if (v < 1 || v > max_vertices)
        throw Error(ErrorKind::vertex_range, where + ": vertex " + token + " outside 1.." + std::to_string(max_vertices));
    return static_cast<int>(v);
}

} // namespace detail

inline SRComplex parse_complex_text(std::string_view text, const std::string& source = "<input>")
{
    std::optional<int> header_n;
    std::vector<std::pair<int, std::vector<int>>> facets; // (line, 1-based vertices)
    int max_seen = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const std::string where = source + ":" + std::to_string(lineno);
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream tokens(line);
        std::vector<std::string> words;
        for (std::string w; tokens >> w;)
            words.push_back(w);
        if (words.empty())
            continue;
        if (words[0].rfind("n=", 0) == 0) {
            if (words.size() != 1)
                throw Error(ErrorKind::parse, where + ": trailing text after header");
            if (header_n || !facets.empty())
                throw Error(ErrorKind::parse, where + ": header n=<count> must come first and only once");
            const std::string count = words[0].substr(2);
            std::size_t used = 0;
            int v = -1;
            try {
                v = std::stoi(count, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (count.empty() || used != count.size() || v < 0)
                throw Error(ErrorKind::parse, where + ": malformed header '" + words[0] + "'");
            if (v > max_vertices)
                throw Error(ErrorKind::capacity, where + ": n=" + count + " exceeds " + std::to_string(max_vertices));
            header_n = v;
            continue;
        }
        std::vector<int> facet;
        if (words.size() == 1 && words[0] == "{}") {
            facets.emplace_back(lineno, facet);
            continue;
        }
        for (const auto& w : words) {
            int v = detail::parse_vertex_token(w, where);
            if (header_n && v > *header_n)
                throw Error(ErrorKind::vertex_range, where + ": vertex " + w + " outside 1.." + std::to_string(*header_n));
            facet.push_back(v);
            max_seen = std::max(max_seen, v);
        }
        facets.emplace_back(lineno, std::move(facet));
    }
    const int n = header_n.value_or(max_seen);
    std::vector<Face> faces;
    for (const auto& [lineno, vs] : facets) {
        std::vector<int> zero_based;
        for (int v : vs)
            zero_based.push_back(v - 1);
        faces.push_back(Face::from_vertices(zero_based));
    }
    return SRComplex::from_facets(n, faces);
}

inline SRComplex parse_complex_file(const std::string& path)
{
    return parse_complex_text(detail::read_whole_file(path), path);
}

namespace detail {

using nlohmann::json;

inline Face json_face(const json& j, int n, const std::string& where)
{
    if (!j.is_array())
        throw Error(ErrorKind::parse, where + ": face must be an array of vertices");
    Face f;
    for (const auto& v : j) {
        if (!v.is_number_integer())
            throw Error(ErrorKind::parse, where + ": vertex must be an integer");
        const auto x = v.get<long>();
        if (x < 1 || x > n)
            throw Error(ErrorKind::vertex_range, where + ": vertex " + std::to_string(x) + " outside 1.." + std::to_string(n));
        f = f.with(static_cast<int>(x - 1));
    }
    return f;
}

inline Face key_face(const std::string& key, int n, const std::string& where)
{
    Face f;
    std::string token;
    std::istringstream in(key);
    while (std::getline(in, token, ',')) {
        const auto a = token.find_first_not_of(' '), b = token.find_last_not_of(' ');
        if (a == std::string::npos)
            throw Error(ErrorKind::parse, where + ": empty vertex in '" + key + "'");
        const int v = parse_vertex_token(token.substr(a, b - a + 1), where);
        if (v > n)
            throw Error(ErrorKind::vertex_range, where + ": vertex " + std::to_string(v) + " outside 1.." + std::to_string(n));
        f = f.with(v - 1);
    }
    return f;
}

inline std::size_t json_rank(const json& j, const std::string& where)
{
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw Error(ErrorKind::parse, where + ": rank must be a non-negative integer");
    return j.get<std::size_t>();
}

} // namespace detail

/// Parses a sheaf description.  `coefficient` overrides the file's "coeff".
inline Sheaf parse_sheaf_text(std::string_view text, const std::string& source = "<input>",
                              std::optional<CoefficientRing> coefficient = std::nullopt)
{
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, source + ": " + e.what());
    }
    if (!doc.is_object())
        throw Error(ErrorKind::parse, source + ": top level must be an object");
    if (!doc.contains("n") || !doc["n"].is_number_integer())
        throw Error(ErrorKind::parse, source + ": field n: missing or not an integer");
    const long n = doc["n"].get<long>();
    if (n < 0 || n > max_vertices)
        throw Error(ErrorKind::capacity, source + ": field n: " + std::to_string(n) + " outside 0.." + std::to_string(max_vertices));
    CoefficientRing ring = CoefficientRing::rationals();
    if (coefficient) {
        ring = *coefficient;
    } else if (doc.contains("coeff")) {
        if (!doc["coeff"].is_string())
            throw Error(ErrorKind::parse, source + ": field coeff: expected a string");
        ring = CoefficientRing::parse(doc["coeff"].get<std::string>());
    }
    const int nn = static_cast<int>(n);
    SheafBuilder builder(nn, ring);
    std::vector<std::size_t> ranks(std::size_t{1} << nn, 0);

    if (doc.contains("stalks")) {
        const json& stalks = doc["stalks"];
        if (stalks.is_object()) {
            for (const auto& [key, value] : stalks.items()) {
                const std::string where = source + ": stalks[\"" + key + "\"]";
                const Face f = detail::key_face(key, nn, where);
                ranks[f.mask] = detail::json_rank(value, where);
            }
        } else if (stalks.is_array()) {
            for (std::size_t k = 0; k < stalks.size(); ++k) {
                const std::string where = source + ": stalks[" + std::to_string(k) + "]";
                const json& e = stalks[k];
                if (!e.is_object() || !e.contains("face") || !e.contains("rank"))
                    throw Error(ErrorKind::parse, where + ": expected {\"face\": [...], \"rank\": r}");
                const Face f = detail::json_face(e["face"], nn, where + ".face");
                ranks[f.mask] = detail::json_rank(e["rank"], where + ".rank");
            }
        } else {
            throw Error(ErrorKind::parse, source + ": field stalks: expected an object or an array");
        }
    }
    for (Face f : all_faces(nn))
        builder.set_rank(f, ranks[f.mask]);

    if (doc.contains("restrictions")) {
        const json& rs = doc["restrictions"];
        if (!rs.is_array())
            throw Error(ErrorKind::parse, source + ": field restrictions: expected an array");
        for (std::size_t k = 0; k < rs.size(); ++k) {
            const std::string where = source + ": restrictions[" + std::to_string(k) + "]";
            const json& e = rs[k];
            if (!e.is_object() || !e.contains("face") || !e.contains("add") || !e.contains("matrix"))
                throw Error(ErrorKind::parse, where + ": expected {\"face\", \"add\", \"matrix\"}");
            const Face f = detail::json_face(e["face"], nn, where + ".face");
            if (!e["add"].is_number_integer())
                throw Error(ErrorKind::parse, where + ".add: expected a vertex");
            const long add = e["add"].get<long>();
            if (add < 1 || add > n)
                throw Error(ErrorKind::vertex_range, where + ".add: vertex " + std::to_string(add) + " outside 1.." + std::to_string(n));
            if (f.contains(static_cast<int>(add - 1)))
                throw Error(ErrorKind::invalid_argument, where + ".add: vertex " + std::to_string(add) + " already in the face");
            const json& m = e["matrix"];
            if (!m.is_array())
                throw Error(ErrorKind::parse, where + ".matrix: expected an array of rows");
            const std::size_t rows = m.size();
            std::size_t cols = rows == 0 ? ranks[f.mask] : 0;
            if (rows > 0) {
                if (!m[0].is_array())
                    throw Error(ErrorKind::parse, where + ".matrix[0]: expected an array");
                cols = m[0].size();
            }
            ExactMatrix mat(ring, rows, cols);
            for (std::size_t r = 0; r < rows; ++r) {
                if (!m[r].is_array() || m[r].size() != cols)
                    throw Error(ErrorKind::shape_mismatch, where + ".matrix[" + std::to_string(r) + "]: ragged row");
                for (std::size_t c = 0; c < cols; ++c) {
                    if (!m[r][c].is_number_integer())
                        throw Error(ErrorKind::parse, where + ".matrix[" + std::to_string(r) + "][" + std::to_string(c) +
                                                          "]: expected an integer");
                    const long long v = m[r][c].get<long long>();
                    if (v != 0)
                        mat.set(r, c, mpq_class(mpz_class(std::to_string(v))));
                }
            }
            builder.set_restriction(f, static_cast<int>(add - 1), std::move(mat));
        }
    }
    try {
        return builder.build();
    } catch (const Error& e) {
        throw Error(e.kind(), source + ": " + e.message());
    }
}

inline Sheaf parse_sheaf_file(const std::string& path, std::optional<CoefficientRing> coefficient = std::nullopt)
{
    return parse_sheaf_text(detail::read_whole_file(path), path, coefficient);
}

/// Facet-file rendering of a complex, readable by parse_complex_text.
inline std::string to_facet_text(const SRComplex& k)
{
    std::string out = "n=" + std::to_string(k.n()) + "\n";
    for (Face f : k.facets()) {
        if (f.size() == 0) {
            out += "{}\n";
            continue;
        }
        std::string line;
        for (int v : f.vertices())
            line += (line.empty() ? "" : " ") + std::to_string(v + 1);
        out += line + "\n";
    }
    return out;
}

} // namespace hochster
