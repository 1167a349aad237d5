#pragma once

// File formats. Inputs and reports are JSON documents; matrices are row-major
// flat lists, complex scalars are [re, im] pairs and complex matrices are
// row-major lists of interleaved re, im values.
//
//   problem:        {"n": 2, "C": [...n*n], "K": [...n*n],
//                    "pairing": {...}?, "vecs": {...}?}
//   pairing:        {"lambda1": [[re, im], ...], "lambda2": [[re, im], ...]}
//   vecs:           {"V1": [re, im, re, im, ...2*n*n], "V2": [...]}
//   transformation: {"n": 2, "T1": [...], "T2": [...], "T3": [...], "T4": [...]}
//   target:         {"D": [...n], "B": [...n]}   (diagonals)
//
// Transformation and target documents may also be nested under the keys
// "transformation" / "target", so a decouple report can be fed back directly.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasync/synchro.hpp"

namespace phasync::io {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& source, const std::string& msg) {
    fail(ErrorCode::ParseError, source + ": " + msg);
}

inline Json parse_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into line:column.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        parse_fail(source, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                               ": malformed JSON");
    }
}

inline const Json& field(const Json& doc, const char* key, const std::string& source) {
    if (!doc.is_object() || !doc.contains(key)) {
        parse_fail(source, "field '" + std::string(key) + "': missing");
    }
    return doc.at(key);
}

inline double number(const Json& v, const std::string& where, const std::string& source) {
    if (!v.is_number()) parse_fail(source, "field '" + where + "': expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) parse_fail(source, "field '" + where + "': non-finite value");
    return x;
}

inline std::vector<double> numbers(const Json& v, const char* key, std::size_t expected,
                                   const std::string& source, const std::string& hint) {
    if (!v.is_array()) parse_fail(source, "field '" + std::string(key) + "': expected an array");
    if (v.size() != expected) {
        parse_fail(source, "field '" + std::string(key) + "': expected " +
                               std::to_string(expected) + " entries (" + hint + "), got " +
                               std::to_string(v.size()));
    }
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(number(v[i], std::string(key) + "[" + std::to_string(i) + "]", source));
    }
    return out;
}

inline Index dimension(const Json& doc, const std::string& source) {
    const Json& n = field(doc, "n", source);
    if (!n.is_number_integer() || n.get<long long>() < 1) {
        parse_fail(source, "field 'n': expected a positive integer");
    }
    return static_cast<Index>(n.get<long long>());
}

inline Matrix square(const Json& doc, const char* key, Index n, const std::string& source) {
    const auto flat = numbers(field(doc, key, source), key, static_cast<std::size_t>(n * n), source,
                              "n*n with n = " + std::to_string(n));
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = flat[static_cast<std::size_t>(i * n + j)];
    return m;
}

inline CMatrix complex_square(const Json& doc, const char* key, Index n, const std::string& source) {
    const auto flat = numbers(field(doc, key, source), key, static_cast<std::size_t>(2 * n * n),
                              source, "interleaved re/im, 2*n*n with n = " + std::to_string(n));
    CMatrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(2 * (i * n + j));
            m(i, j) = Complex(flat[k], flat[k + 1]);
        }
    return m;
}

inline std::vector<Complex> complex_list(const Json& doc, const char* key, Index n,
                                         const std::string& source) {
    const Json& v = field(doc, key, source);
    if (!v.is_array() || v.size() != static_cast<std::size_t>(n)) {
        parse_fail(source, "field '" + std::string(key) + "': expected " + std::to_string(n) +
                               " [re, im] pairs");
    }
    std::vector<Complex> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string where = std::string(key) + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != 2) {
            parse_fail(source, "field '" + where + "': expected [re, im]");
        }
        out.emplace_back(number(v[i][0], where, source), number(v[i][1], where, source));
    }
    return out;
}

inline const Json& unwrap(const Json& doc, const char* key) {
    return doc.is_object() && doc.contains(key) && doc.at(key).is_object() ? doc.at(key) : doc;
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ParseError, path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::InvalidArgument, path + ": cannot write file");
    out << text;
}

/// Requested Lambda1/Lambda2 diagonals; matched against the computed spectrum.
struct PairingOverride {
    std::vector<Complex> lambda1;
    std::vector<Complex> lambda2;
};

struct ProblemFile {
    SodeSystem system;
    std::optional<PairingOverride> pairing;
    std::optional<EigvecMatrices> vecs;
};

inline PairingOverride parse_pairing(const Json& doc, Index n, const std::string& source) {
    return {detail::complex_list(doc, "lambda1", n, source),
            detail::complex_list(doc, "lambda2", n, source)};
}

inline EigvecMatrices parse_vecs(const Json& doc, Index n, const std::string& source) {
    return {detail::complex_square(doc, "V1", n, source),
            detail::complex_square(doc, "V2", n, source)};
}

inline ProblemFile parse_problem(const std::string& text, const std::string& source) {
    const Json doc = detail::parse_text(text, source);
    const Index n = detail::dimension(doc, source);
    ProblemFile out{SodeSystem(detail::square(doc, "C", n, source),
                               detail::square(doc, "K", n, source)),
                    std::nullopt, std::nullopt};
    if (doc.contains("pairing")) out.pairing = parse_pairing(doc.at("pairing"), n, source);
    if (doc.contains("vecs")) out.vecs = parse_vecs(doc.at("vecs"), n, source);
    return out;
}

inline PairingOverride parse_pairing_text(const std::string& text, Index n,
                                          const std::string& source) {
    return parse_pairing(detail::unwrap(detail::parse_text(text, source), "pairing"), n, source);
}

inline EigvecMatrices parse_vecs_text(const std::string& text, Index n, const std::string& source) {
    return parse_vecs(detail::unwrap(detail::parse_text(text, source), "vecs"), n, source);
}

inline Transformation parse_transformation(const std::string& text, const std::string& source) {
    const Json doc = detail::unwrap(detail::parse_text(text, source), "transformation");
    const Index n = detail::dimension(doc, source);
    return Transformation::from_blocks(
        detail::square(doc, "T1", n, source), detail::square(doc, "T2", n, source),
        detail::square(doc, "T3", n, source), detail::square(doc, "T4", n, source));
}

inline DecoupledSystem parse_target(const std::string& text, Index n, const std::string& source) {
    const Json doc = detail::unwrap(detail::parse_text(text, source), "target");
    const std::string hint = "n = " + std::to_string(n);
    const auto d = detail::numbers(detail::field(doc, "D", source), "D",
                                   static_cast<std::size_t>(n), source, hint);
    const auto b = detail::numbers(detail::field(doc, "B", source), "B",
                                   static_cast<std::size_t>(n), source, hint);
    return {Vector::Map(d.data(), n), Vector::Map(b.data(), n)};
}

// ---- rendering

/// %.17g, so every double round-trips; non-finite values become strings.
inline Json number_json(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_json(const Matrix& m) {
    Json out = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

inline Json vector_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline Json complex_vector_json(const CVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
    return out;
}

inline Json complex_matrix_json(const CMatrix& m) {
    Json out = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            out.push_back(m(i, j).real());
            out.push_back(m(i, j).imag());
        }
    return out;
}

namespace detail {

inline bool is_flat(const Json& j) {
    if (!j.is_array()) return false;
    for (const auto& x : j) {
        if (x.is_object()) return false;
        if (x.is_array() && !std::all_of(x.begin(), x.end(),
                                         [](const Json& y) { return y.is_primitive(); }))
            return false;
    }
    return true;
}

inline void render(const Json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case Json::value_t::number_float: out += format_number(j.get<double>()); return;
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                out += pad + "  " + Json(it.key()).dump() + ": ";
                render(it.value(), out, indent + 2);
                out += i + 1 < j.size() ? ",\n" : "\n";
            }
            out += pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (is_flat(j)) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    render(j[i], out, indent);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += pad + "  ";
                render(j[i], out, indent + 2);
                out += i + 1 < j.size() ? ",\n" : "\n";
            }
            out += pad + "]";
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace detail

/// Byte-deterministic rendering: insertion-ordered keys, %.17g numbers,
/// numeric arrays on one line.
inline std::string render(const Json& j) {
    std::string out;
    detail::render(j, out, 0);
    out += "\n";
    return out;
}

}  // namespace phasync::io
