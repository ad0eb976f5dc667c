#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "params.hpp"

namespace dockette {

namespace detail {

/// Splits text into whitespace tokens per line, dropping `#` comments and
/// blank lines. Line numbers are 1-based.
class LineCursor {
public:
    explicit LineCursor(std::string_view text) : text_(text) {}

    /// Advances to the next non-empty line; false at end of input.
    bool next() {
        tokens_.clear();
        while (!done_) {
            std::size_t end = text_.find('\n', pos_);
            if (end == std::string_view::npos) {
                end = text_.size();
                done_ = true;
            }
            std::string_view line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_no_;
            if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            split(line);
            if (!tokens_.empty()) return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_no_; }
    const std::vector<std::string_view>& tokens() const noexcept { return tokens_; }

private:
    void split(std::string_view line) {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && is_space(line[i])) ++i;
            std::size_t j = i;
            while (j < line.size() && !is_space(line[j])) ++j;
            if (j > i) tokens_.push_back(line.substr(i, j - i));
            i = j;
        }
    }
    static bool is_space(char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
    bool done_ = false;
    std::vector<std::string_view> tokens_;
};

inline double parse_real(std::string_view token, std::size_t line, const char* what) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(token) + "'");
    return value;
}

inline long long parse_integer(std::string_view token, std::size_t line, const char* what) {
    long long value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(line, std::string("non-integer ") + what + " '" + std::string(token) + "'");
    return value;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

inline void expect_header(const LineCursor& cur, std::string_view keyword, std::size_t arity) {
    const auto& t = cur.tokens();
    if (t.front() != keyword) throw ParseError(cur.line(), "malformed header: expected " + std::string(keyword) + ", got '" + std::string(t.front()) + "'");
    if (t.size() != arity + 1) throw ParseError(cur.line(), "malformed header: " + std::string(keyword) + " takes " + std::to_string(arity) + " value(s)");
}

} // namespace detail

/// Parses the LIGAND text format:
///
///     NATOMS <n>
///     ATOM <index> <type> <charge> <x> <y> <z>     (n lines, index 0..n-1 in order)
///     NTORS <m>
///     TORSION <axis_a> <axis_b> <k> <i1> ... <ik>  (m lines)
///     NPAIRS <p>                                   (optional section)
///     PAIR <i> <j>                                 (p lines)
inline Ligand parse_ligand(std::string_view text, const TypeTable& types = builtin_type_table()) {
    using detail::parse_integer;
    using detail::parse_real;
    detail::LineCursor cur(text);
    Ligand lig;

    auto require_line = [&](const char* section) {
        if (!cur.next()) throw ParseError(cur.line(), std::string("count mismatch: unexpected end of input in ") + section);
    };

    require_line("NATOMS header");
    detail::expect_header(cur, "NATOMS", 1);
    const long long natoms = parse_integer(cur.tokens()[1], cur.line(), "atom count");
    if (natoms < 1) throw ParseError(cur.line(), "malformed header: NATOMS must be positive");
    const int n = static_cast<int>(natoms);

    auto atom_index = [&](std::string_view token, const char* what) {
        const long long v = parse_integer(token, cur.line(), what);
        if (v < 0 || v >= n) throw ParseError(cur.line(), "index out of range: " + std::string(token) + " (atoms 0.." + std::to_string(n - 1) + ")");
        return static_cast<int>(v);
    };

    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int a = 0; a < n; ++a) {
        require_line("ATOM records");
        const auto& t = cur.tokens();
        if (t[0] != "ATOM") throw ParseError(cur.line(), "count mismatch: expected " + std::to_string(n) + " ATOM records, found " + std::to_string(a));
        if (t.size() != 7) throw ParseError(cur.line(), "malformed ATOM record");
        Atom atom;
        atom.index = atom_index(t[1], "atom index");
        if (seen[static_cast<std::size_t>(atom.index)]) throw ParseError(cur.line(), "duplicate atom index " + std::to_string(atom.index));
        if (atom.index != a) throw ParseError(cur.line(), "atom index out of sequence: expected " + std::to_string(a));
        seen[static_cast<std::size_t>(atom.index)] = true;
        atom.type = std::string(t[2]);
        if (!types.contains(atom.type)) throw ParseError(cur.line(), "unknown atom_type '" + atom.type + "'");
        atom.charge = parse_real(t[3], cur.line(), "charge");
        atom.position = {parse_real(t[4], cur.line(), "coordinate"), parse_real(t[5], cur.line(), "coordinate"),
                         parse_real(t[6], cur.line(), "coordinate")};
        lig.atoms.push_back(std::move(atom));
    }

    require_line("NTORS header");
    if (cur.tokens()[0] == "ATOM") throw ParseError(cur.line(), "count mismatch: more ATOM records than NATOMS " + std::to_string(n));
    detail::expect_header(cur, "NTORS", 1);
    const long long ntors = parse_integer(cur.tokens()[1], cur.line(), "torsion count");
    if (ntors < 0) throw ParseError(cur.line(), "malformed header: NTORS must be non-negative");
    for (long long m = 0; m < ntors; ++m) {
        require_line("TORSION records");
        const auto& t = cur.tokens();
        if (t[0] != "TORSION") throw ParseError(cur.line(), "count mismatch: expected " + std::to_string(ntors) + " TORSION records, found " + std::to_string(m));
        if (t.size() < 4) throw ParseError(cur.line(), "malformed TORSION record");
        Torsion tor;
        tor.axis_a = atom_index(t[1], "axis atom");
        tor.axis_b = atom_index(t[2], "axis atom");
        if (tor.axis_a == tor.axis_b) throw ParseError(cur.line(), "torsion axis atoms must differ");
        const long long k = parse_integer(t[3], cur.line(), "moved count");
        if (k < 0 || static_cast<std::size_t>(k) + 4 != t.size()) throw ParseError(cur.line(), "count mismatch: TORSION declares " + std::string(t[3]) + " moved atoms");
        std::set<int> moved;
        for (std::size_t q = 4; q < t.size(); ++q) {
            const int idx = atom_index(t[q], "moved atom");
            if (idx == tor.axis_a || idx == tor.axis_b) throw ParseError(cur.line(), "moved set contains an axis atom");
            if (!moved.insert(idx).second) throw ParseError(cur.line(), "duplicate atom in moved set");
            tor.moved.push_back(idx);
        }
        lig.torsions.push_back(std::move(tor));
    }

    if (!cur.next()) return lig;
    if (cur.tokens()[0] == "TORSION") throw ParseError(cur.line(), "count mismatch: more TORSION records than NTORS " + std::to_string(ntors));
    detail::expect_header(cur, "NPAIRS", 1);
    const long long npairs = parse_integer(cur.tokens()[1], cur.line(), "pair count");
    if (npairs < 0) throw ParseError(cur.line(), "malformed header: NPAIRS must be non-negative");
    std::set<std::pair<int, int>> unique;
    for (long long p = 0; p < npairs; ++p) {
        require_line("PAIR records");
        const auto& t = cur.tokens();
        if (t[0] != "PAIR") throw ParseError(cur.line(), "count mismatch: expected " + std::to_string(npairs) + " PAIR records, found " + std::to_string(p));
        if (t.size() != 3) throw ParseError(cur.line(), "malformed PAIR record");
        const int i = atom_index(t[1], "pair atom");
        const int j = atom_index(t[2], "pair atom");
        if (i == j) throw ParseError(cur.line(), "pair connects an atom to itself");
        if (!unique.insert({std::min(i, j), std::max(i, j)}).second) throw ParseError(cur.line(), "duplicate pair");
        lig.intra_pairs.emplace_back(i, j);
    }
    if (cur.next()) {
        if (cur.tokens()[0] == "PAIR") throw ParseError(cur.line(), "count mismatch: more PAIR records than NPAIRS " + std::to_string(npairs));
        throw ParseError(cur.line(), "unexpected record '" + std::string(cur.tokens()[0]) + "'");
    }
    return lig;
}

inline std::string serialize_ligand(const Ligand& lig) {
    using detail::format_real;
    std::string out;
    out += "NATOMS " + std::to_string(lig.atoms.size()) + "\n";
    for (const auto& a : lig.atoms) {
        out += "ATOM " + std::to_string(a.index) + " " + a.type + " " + format_real(a.charge) + " " + format_real(a.position.x) + " " +
               format_real(a.position.y) + " " + format_real(a.position.z) + "\n";
    }
    out += "NTORS " + std::to_string(lig.torsions.size()) + "\n";
    for (const auto& t : lig.torsions) {
        out += "TORSION " + std::to_string(t.axis_a) + " " + std::to_string(t.axis_b) + " " + std::to_string(t.moved.size());
        for (int m : t.moved) out += " " + std::to_string(m);
        out += "\n";
    }
    out += "NPAIRS " + std::to_string(lig.intra_pairs.size()) + "\n";
    for (const auto& [i, j] : lig.intra_pairs) out += "PAIR " + std::to_string(i) + " " + std::to_string(j) + "\n";
    return out;
}

/// Parses the GRID text format:
///
///     GRID
///     DIM nx ny nz
///     SPACING s
///     ORIGIN ox oy oz
///     MAPS <t1> ... <tm> E D
///
/// followed by (m + 2) * nx * ny * nz values, maps in declared order, each
/// map x-fastest.
inline GridMaps parse_grid(std::string_view text) {
    using detail::parse_integer;
    using detail::parse_real;
    detail::LineCursor cur(text);
    GridMaps g;

    auto header = [&](const char* keyword) {
        if (!cur.next()) throw ParseError(cur.line(), std::string("malformed header: missing ") + keyword);
        if (cur.tokens().front() != keyword) throw ParseError(cur.line(), std::string("malformed header: expected ") + keyword);
    };

    header("GRID");
    if (cur.tokens().size() != 1) throw ParseError(cur.line(), "malformed header: GRID takes no values");
    header("DIM");
    detail::expect_header(cur, "DIM", 3);
    for (int a = 0; a < 3; ++a) {
        const long long d = parse_integer(cur.tokens()[a + 1], cur.line(), "dimension");
        if (d < 1 || d > (1 << 20)) throw ParseError(cur.line(), "dimensions must be positive");
        g.dims[a] = static_cast<int>(d);
    }
    if (g.dims[0] < 2 || g.dims[1] < 2 || g.dims[2] < 2) throw ParseError(cur.line(), "dimensions must be at least 2 nodes per axis");
    header("SPACING");
    detail::expect_header(cur, "SPACING", 1);
    g.spacing = parse_real(cur.tokens()[1], cur.line(), "spacing");
    if (!(g.spacing > 0.0)) throw ParseError(cur.line(), "spacing must be positive");
    header("ORIGIN");
    detail::expect_header(cur, "ORIGIN", 3);
    g.origin = {parse_real(cur.tokens()[1], cur.line(), "origin"), parse_real(cur.tokens()[2], cur.line(), "origin"),
                parse_real(cur.tokens()[3], cur.line(), "origin")};
    header("MAPS");
    const auto& maps = cur.tokens();
    if (maps.size() < 3 || maps[maps.size() - 2] != "E" || maps.back() != "D")
        throw ParseError(cur.line(), "malformed header: MAPS must end with E D");
    for (std::size_t m = 1; m + 2 < maps.size(); ++m) {
        std::string name(maps[m]);
        if (g.find_type_map(name) != nullptr) throw ParseError(cur.line(), "malformed header: duplicate map '" + name + "'");
        g.type_names.push_back(std::move(name));
    }
    const std::size_t header_line = cur.line();

    const std::size_t per_map = g.node_count();
    const std::size_t map_count = g.type_names.size() + 2;
    const std::size_t expected = per_map * map_count;
    std::vector<double> values;
    values.reserve(expected);
    while (cur.next()) {
        for (auto token : cur.tokens()) {
            if (values.size() == expected)
                throw ParseError(cur.line(), "value count mismatch: more than " + std::to_string(expected) + " values");
            values.push_back(parse_real(token, cur.line(), "value"));
        }
    }
    if (values.size() != expected)
        throw ParseError(header_line, "value count mismatch: expected " + std::to_string(expected) + " values, found " + std::to_string(values.size()));

    auto slice = [&](std::size_t m) {
        return std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(m * per_map),
                                   values.begin() + static_cast<std::ptrdiff_t>((m + 1) * per_map));
    };
    for (std::size_t m = 0; m < g.type_names.size(); ++m) g.type_maps.push_back(slice(m));
    g.elec_map = slice(map_count - 2);
    g.desolv_map = slice(map_count - 1);
    return g;
}

inline std::string serialize_grid(const GridMaps& g) {
    using detail::format_real;
    std::string out = "GRID\n";
    out += "DIM " + std::to_string(g.dims[0]) + " " + std::to_string(g.dims[1]) + " " + std::to_string(g.dims[2]) + "\n";
    out += "SPACING " + format_real(g.spacing) + "\n";
    out += "ORIGIN " + format_real(g.origin.x) + " " + format_real(g.origin.y) + " " + format_real(g.origin.z) + "\n";
    out += "MAPS";
    for (const auto& t : g.type_names) out += " " + t;
    out += " E D\n";
    auto dump = [&](const std::vector<double>& v) {
        for (double x : v) {
            out += format_real(x);
            out += '\n';
        }
    };
    for (const auto& m : g.type_maps) dump(m);
    dump(g.elec_map);
    dump(g.desolv_map);
    return out;
}

} // namespace dockette
