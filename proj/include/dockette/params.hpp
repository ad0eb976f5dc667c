#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "error.hpp"

namespace dockette {

/// Per-atom-type force-field parameters.
struct TypeParams {
    double r_eq = 1.0;      // Å, per-type equilibrium radius term
    double eps = 0.0;       // kcal/mol
    double solvation = 0.0; // S_i
    double volume = 0.0;    // V_i, Å^3
    bool hbond = false;

    friend bool operator==(const TypeParams&, const TypeParams&) = default;
};

/// Hydrogen-bond role is implied by the token: flagged types whose name
/// starts with 'H' donate, other flagged types accept.
inline bool is_hbond_donor(const std::string& type, const TypeParams& p) { return p.hbond && !type.empty() && type[0] == 'H'; }
inline bool is_hbond_acceptor(const std::string& type, const TypeParams& p) { return p.hbond && !type.empty() && type[0] != 'H'; }

/// Combined parameters for one intramolecular pair.
struct PairParams {
    double r_eq = 1.0;
    double eps = 0.0;
    bool is_hbond = false;
    double s_i = 0.0, v_i = 0.0, s_j = 0.0, v_j = 0.0;
};

class TypeTable {
public:
    TypeTable() = default;

    void set(const std::string& type, const TypeParams& p) { types_[type] = p; }
    bool contains(const std::string& type) const { return types_.count(type) != 0; }
    const TypeParams& at(const std::string& type) const { return types_.at(type); }
    const std::map<std::string, TypeParams>& entries() const noexcept { return types_; }

    PairParams combine(const std::string& a, const std::string& b) const {
        const TypeParams& pa = at(a);
        const TypeParams& pb = at(b);
        PairParams out;
        out.r_eq = 0.5 * (pa.r_eq + pb.r_eq);
        out.eps = std::sqrt(pa.eps * pb.eps);
        out.is_hbond = (is_hbond_donor(a, pa) && is_hbond_acceptor(b, pb)) || (is_hbond_acceptor(a, pa) && is_hbond_donor(b, pb));
        out.s_i = pa.solvation;
        out.v_i = pa.volume;
        out.s_j = pb.solvation;
        out.v_j = pb.volume;
        return out;
    }

private:
    std::map<std::string, TypeParams> types_;
};

/// AutoDock4-flavoured defaults for the eight built-in types.
inline const TypeTable& builtin_type_table() {
    static const TypeTable table = [] {
        TypeTable t;
        t.set("C", {4.00, 0.150, -0.00143, 33.5103, false});
        t.set("A", {4.00, 0.150, -0.00052, 33.5103, false});
        t.set("N", {3.50, 0.160, -0.00162, 22.4493, false});
        t.set("NA", {3.50, 0.160, -0.00162, 22.4493, true});
        t.set("O", {3.20, 0.200, -0.00251, 17.1573, false});
        t.set("OA", {3.20, 0.200, -0.00251, 17.1573, true});
        t.set("H", {2.00, 0.020, 0.00051, 0.0000, false});
        t.set("HD", {2.00, 0.020, 0.00051, 0.0000, true});
        return t;
    }();
    return table;
}

/// Parses `TYPE <token> <r_i> <eps_i> <S_i> <V_i> <hbond 0|1>` lines over a
/// copy of `base`; listed tokens replace or extend the base entries.
inline TypeTable parse_type_table(const std::string& text, const TypeTable& base = builtin_type_table()) {
    TypeTable table = base;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string keyword;
        if (!(ls >> keyword)) continue;
        if (keyword != "TYPE") throw ParseError(line_no, "expected TYPE record, got '" + keyword + "'");
        std::string token;
        TypeParams p;
        int hbond = -1;
        if (!(ls >> token >> p.r_eq >> p.eps >> p.solvation >> p.volume >> hbond))
            throw ParseError(line_no, "malformed TYPE record");
        std::string extra;
        if (ls >> extra) throw ParseError(line_no, "trailing tokens in TYPE record");
        if (hbond != 0 && hbond != 1) throw ParseError(line_no, "hbond flag must be 0 or 1");
        if (!(p.r_eq > 0.0) || !std::isfinite(p.r_eq)) throw ParseError(line_no, "r_eq must be positive");
        if (!(p.eps >= 0.0) || !std::isfinite(p.eps)) throw ParseError(line_no, "eps must be non-negative");
        if (!std::isfinite(p.solvation) || !std::isfinite(p.volume)) throw ParseError(line_no, "non-finite solvation parameter");
        p.hbond = hbond == 1;
        table.set(token, p);
    }
    return table;
}

} // namespace dockette
