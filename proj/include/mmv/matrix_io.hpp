#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmv/complex_matrix.hpp"

namespace mmv {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& message) : std::runtime_error(message) {}
};

// Shortest representation that round-trips through from_chars.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Complex entry encoding: `a`, `a+bi` or `a-bi`.  A zero imaginary part is
// omitted so that real data stays readable.
inline std::string format_complex(Complex z) {
    std::string s = format_double(z.real());
    if (z.imag() == 0.0) return s;
    if (!(z.imag() < 0.0)) s += '+';
    s += format_double(z.imag());
    s += 'i';
    return s;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Reads one double; returns the number of characters consumed, 0 on failure.
inline std::size_t scan_double(std::string_view s, double& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc()) return 0;
    return static_cast<std::size_t>(res.ptr - s.data());
}

}  // namespace detail

// Accepts `a`, `a+bi`, `a-bi`, and the pure-imaginary shorthands `bi`, `i`,
// `+i`, `-i`, `a+i`, `a-i`.
inline Complex parse_complex(std::string_view token) {
    const std::string_view s = detail::trim(token);
    if (s.empty()) throw ParseError("empty complex entry");
    if (s == "i" || s == "+i") return Complex(0.0, 1.0);
    if (s == "-i") return Complex(0.0, -1.0);

    double first = 0.0;
    const std::size_t used = detail::scan_double(s, first);
    if (used == 0) throw ParseError("invalid complex entry '" + std::string(s) + "'");
    std::string_view rest = s.substr(used);
    if (rest.empty()) return Complex(first, 0.0);
    if (rest == "i") return Complex(0.0, first);
    if (rest == "+i") return Complex(first, 1.0);
    if (rest == "-i") return Complex(first, -1.0);

    const char sign = rest.front();
    if (sign != '+' && sign != '-') throw ParseError("invalid complex entry '" + std::string(s) + "'");
    double mag = 0.0;
    const std::size_t used2 = detail::scan_double(rest.substr(1), mag);
    if (used2 == 0 || rest.substr(1 + used2) != "i")
        throw ParseError("invalid complex entry '" + std::string(s) + "'");
    return Complex(first, sign == '-' ? -mag : mag);
}

// CSV with one matrix row per line.  An optional first line of the form
// `# rows=<n> cols=<p>` is validated against the parsed body.
inline ComplexMatrix read_complex_csv(std::istream& in) {
    std::vector<std::vector<Complex>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::size_t header_rows = 0;
    std::size_t header_cols = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = detail::trim(line);
        if (stripped.empty()) continue;
        if (stripped.front() == '#') {
            if (line_no != 1 || saw_header)
                throw ParseError("line " + std::to_string(line_no) + ": unexpected comment line");
            if (std::sscanf(std::string(stripped).c_str(), "# rows=%zu cols=%zu", &header_rows,
                            &header_cols) != 2)
                throw ParseError("line 1: malformed header, expected '# rows=<n> cols=<p>'");
            saw_header = true;
            continue;
        }
        std::vector<Complex> row;
        std::string_view remaining = stripped;
        while (true) {
            const std::size_t comma = remaining.find(',');
            const std::string_view token = remaining.substr(0, comma);
            try {
                row.push_back(parse_complex(token));
            } catch (const ParseError& err) {
                throw ParseError("line " + std::to_string(line_no) + ": " + err.what());
            }
            if (!std::isfinite(row.back().real()) || !std::isfinite(row.back().imag()))
                throw ParseError("line " + std::to_string(line_no) + ": entry is not finite");
            if (comma == std::string_view::npos) break;
            remaining = remaining.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("line " + std::to_string(line_no) + ": ragged row, expected " +
                             std::to_string(rows.front().size()) + " entries");
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw ParseError("matrix file has no data rows");
    if (saw_header && (header_rows != rows.size() || header_cols != rows.front().size()))
        throw ParseError("header declares " + std::to_string(header_rows) + "x" +
                         std::to_string(header_cols) + " but body is " +
                         std::to_string(rows.size()) + "x" + std::to_string(rows.front().size()));

    ComplexMatrix out(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j) out(i, j) = rows[i][j];
    return out;
}

inline ComplexMatrix load_complex_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_complex_csv(in);
}

inline void write_complex_csv(std::ostream& out, const ComplexMatrix& m, bool header = true) {
    if (header) out << "# rows=" << m.rows() << " cols=" << m.cols() << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_complex(m(i, j));
        }
        out << "\n";
    }
}

inline void save_complex_csv(const std::string& path, const ComplexMatrix& m, bool header = true) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_complex_csv(out, m, header);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace mmv
