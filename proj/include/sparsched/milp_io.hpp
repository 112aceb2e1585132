#pragma once

// Deterministic LP and MPS text emission plus strict parsers for both. The
// same model always emits identical bytes, and parsing an emitted file
// reconstructs the model exactly (numbers are written with round-trip
// precision). MPS is the solver interchange format; LP is the human surface.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sparsched/common.hpp"
#include "sparsched/milp.hpp"

namespace sparsched {

constexpr std::size_t kMaxNameLen = 255;

// Map a name onto [A-Za-z0-9_]{1,255} without losing identity for names that
// are already clean (every name our builders mint is).
inline std::string sanitize_name(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_';
        out.push_back(ok ? c : '_');
    }
    if (out.empty()) out = "_";
    if (out[0] >= '0' && out[0] <= '9') out.insert(out.begin(), 'n');
    if (out.size() > kMaxNameLen) out.resize(kMaxNameLen);
    return out;
}

namespace detail {

struct NameTables {
    std::vector<std::string> vars;
    std::vector<std::string> cons;
};

inline NameTables sanitize_model_names(const MilpModel& m) {
    NameTables t;
    std::unordered_set<std::string> seen;
    seen.insert("obj");  // reserved for the objective row
    seen.insert("MARKER");
    t.vars.reserve(static_cast<std::size_t>(m.num_vars()));
    for (int i = 0; i < m.num_vars(); ++i) {
        std::string s = sanitize_name(m.var(i).name);
        if (!seen.insert(s).second) {
            throw EmissionError("variable name collides after sanitization: '" +
                                m.var(i).name + "' -> '" + s + "'");
        }
        t.vars.push_back(std::move(s));
    }
    for (int i = 0; i < m.num_constraints(); ++i) {
        std::string s = sanitize_name(m.con(i).name);
        if (!seen.insert(s).second) {
            throw EmissionError("constraint name collides after sanitization: '" +
                                m.con(i).name + "' -> '" + s + "'");
        }
        t.cons.push_back(std::move(s));
    }
    return t;
}

// Render "c1 x1 + c2 x2 ... [+ const]" pieces for LP output.
inline std::vector<std::string> lp_term_pieces(
    const std::map<int, double>& terms, double constant,
    const std::vector<std::string>& names) {
    std::vector<std::string> pieces;
    bool first = true;
    auto push = [&](double c, const std::string& body) {
        const bool neg = c < 0.0;
        const double a = std::abs(c);
        std::string term = body.empty()
                               ? fmt_full(a)
                               : (a == 1.0 ? body : fmt_full(a) + " " + body);
        if (first) {
            pieces.push_back(neg ? "- " + term : term);
            first = false;
        } else {
            pieces.push_back((neg ? "- " : "+ ") + term);
        }
    };
    for (const auto& [v, c] : terms) push(c, names[static_cast<std::size_t>(v)]);
    if (constant != 0.0 || terms.empty()) push(constant, "");
    return pieces;
}

inline void lp_emit_wrapped(std::ostringstream& os, const std::string& head,
                            const std::vector<std::string>& pieces,
                            const std::string& tail) {
    std::string line = head;
    for (const auto& p : pieces) {
        if (line.size() + 1 + p.size() > 76 && line != head) {
            os << line << '\n';
            line = "   ";
        }
        line += ' ';
        line += p;
    }
    if (!tail.empty()) {
        line += ' ';
        line += tail;
    }
    os << line << '\n';
}

inline std::string lp_bound_token(double v) {
    if (v == kInf) return "+inf";
    if (v == -kInf) return "-inf";
    return fmt_full(v);
}

}  // namespace detail

inline std::string emit_lp(const MilpModel& m) {
    const auto names = detail::sanitize_model_names(m);
    std::ostringstream os;
    os << "\\ sparsched model " << sanitize_name(m.name()) << '\n';
    os << "Minimize\n";
    detail::lp_emit_wrapped(
        os, " obj:",
        detail::lp_term_pieces(m.objective(), m.objective_constant(), names.vars),
        "");
    os << "Subject To\n";
    for (int i = 0; i < m.num_constraints(); ++i) {
        const Constraint& c = m.con(i);
        detail::lp_emit_wrapped(
            os, " " + names.cons[static_cast<std::size_t>(i)] + ":",
            detail::lp_term_pieces(c.terms, 0.0, names.vars),
            std::string(sense_text(c.sense)) + " " + fmt_full(c.rhs));
    }
    // A variable that appears in no expression exists only through its bounds
    // (or Binary) record, so default-bounded orphans still need a line.
    std::vector<char> mentioned(static_cast<std::size_t>(m.num_vars()), 0);
    for (const auto& [vi, c] : m.objective()) {
        (void)c;
        mentioned[static_cast<std::size_t>(vi)] = 1;
    }
    for (int i = 0; i < m.num_constraints(); ++i) {
        for (const auto& [vi, c] : m.con(i).terms) {
            (void)c;
            mentioned[static_cast<std::size_t>(vi)] = 1;
        }
    }
    std::vector<std::string> bound_lines;
    std::vector<std::string> binaries;
    for (int i = 0; i < m.num_vars(); ++i) {
        const Variable& v = m.var(i);
        const std::string& nm = names.vars[static_cast<std::size_t>(i)];
        if (v.kind == VarKind::Binary) {
            binaries.push_back(nm);
            continue;
        }
        if (v.lb == 0.0 && v.ub == kInf) {
            if (!mentioned[static_cast<std::size_t>(i)]) {
                bound_lines.push_back(" " + nm + " >= 0");
            }
            continue;
        }
        if (v.lb == -kInf && v.ub == kInf) {
            bound_lines.push_back(" " + nm + " free");
        } else if (v.lb == v.ub) {
            bound_lines.push_back(" " + nm + " = " + fmt_full(v.lb));
        } else {
            bound_lines.push_back(" " + detail::lp_bound_token(v.lb) + " <= " + nm +
                                  " <= " + detail::lp_bound_token(v.ub));
        }
    }
    if (!bound_lines.empty()) {
        os << "Bounds\n";
        for (const auto& l : bound_lines) os << l << '\n';
    }
    if (!binaries.empty()) {
        os << "Binary\n";
        std::string line;
        int on_line = 0;
        for (const auto& b : binaries) {
            line += ' ';
            line += b;
            if (++on_line == 8) {
                os << line << '\n';
                line.clear();
                on_line = 0;
            }
        }
        if (!line.empty()) os << line << '\n';
    }
    os << "End\n";
    return os.str();
}

inline std::string emit_mps(const MilpModel& m) {
    const auto names = detail::sanitize_model_names(m);
    std::ostringstream os;
    os << "NAME " << sanitize_name(m.name()) << '\n';
    os << "OBJSENSE\n    MIN\n";
    os << "ROWS\n N obj\n";
    for (int i = 0; i < m.num_constraints(); ++i) {
        char r = 'L';
        switch (m.con(i).sense) {
            case Sense::LE: r = 'L'; break;
            case Sense::EQ: r = 'E'; break;
            case Sense::GE: r = 'G'; break;
        }
        os << ' ' << r << ' ' << names.cons[static_cast<std::size_t>(i)] << '\n';
    }
    // Column-wise transpose of the constraint matrix, in declaration order.
    std::vector<std::vector<std::pair<int, double>>> by_var(
        static_cast<std::size_t>(m.num_vars()));
    for (int i = 0; i < m.num_constraints(); ++i) {
        for (const auto& [v, c] : m.con(i).terms) {
            by_var[static_cast<std::size_t>(v)].push_back({i, c});
        }
    }
    os << "COLUMNS\n";
    bool in_int = false;
    for (int i = 0; i < m.num_vars(); ++i) {
        const bool want_int = m.var(i).kind == VarKind::Binary;
        if (want_int != in_int) {
            os << "    MARKER 'MARKER' " << (want_int ? "'INTORG'" : "'INTEND'")
               << '\n';
            in_int = want_int;
        }
        const std::string& nm = names.vars[static_cast<std::size_t>(i)];
        const auto it = m.objective().find(i);
        const bool has_obj = it != m.objective().end();
        if (has_obj) {
            os << "    " << nm << " obj " << fmt_full(it->second) << '\n';
        } else if (by_var[static_cast<std::size_t>(i)].empty()) {
            // A variable in no row still needs a column entry to exist at all.
            os << "    " << nm << " obj 0\n";
        }
        for (const auto& [row, c] : by_var[static_cast<std::size_t>(i)]) {
            os << "    " << nm << ' ' << names.cons[static_cast<std::size_t>(row)]
               << ' ' << fmt_full(c) << '\n';
        }
    }
    if (in_int) os << "    MARKER 'MARKER' 'INTEND'\n";
    std::ostringstream rhs;
    for (int i = 0; i < m.num_constraints(); ++i) {
        if (m.con(i).rhs != 0.0) {
            rhs << "    RHS " << names.cons[static_cast<std::size_t>(i)] << ' '
                << fmt_full(m.con(i).rhs) << '\n';
        }
    }
    if (m.objective_constant() != 0.0) {
        rhs << "    RHS obj " << fmt_full(-m.objective_constant()) << '\n';
    }
    if (!rhs.str().empty()) os << "RHS\n" << rhs.str();
    std::ostringstream bnd;
    for (int i = 0; i < m.num_vars(); ++i) {
        const Variable& v = m.var(i);
        const std::string& nm = names.vars[static_cast<std::size_t>(i)];
        if (v.kind == VarKind::Binary) {
            bnd << " BV BND " << nm << '\n';
            continue;
        }
        if (v.lb == 0.0 && v.ub == kInf) continue;
        if (v.lb == -kInf && v.ub == kInf) {
            bnd << " FR BND " << nm << '\n';
        } else if (v.lb == v.ub) {
            bnd << " FX BND " << nm << ' ' << fmt_full(v.lb) << '\n';
        } else {
            if (v.lb == -kInf) {
                bnd << " MI BND " << nm << '\n';
            } else if (v.lb != 0.0) {
                bnd << " LO BND " << nm << ' ' << fmt_full(v.lb) << '\n';
            }
            if (v.ub != kInf) {
                bnd << " UP BND " << nm << ' ' << fmt_full(v.ub) << '\n';
            }
        }
    }
    if (!bnd.str().empty()) os << "BOUNDS\n" << bnd.str();
    os << "ENDATA\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct PendingVar {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0;
    double ub = kInf;
    bool bounded = false;  // explicit bound record seen
};

struct PendingCon {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

struct PendingModel {
    std::string name = "model";
    std::vector<PendingVar> vars;
    std::unordered_map<std::string, std::size_t> var_index;
    std::vector<PendingCon> cons;
    std::vector<std::pair<std::string, double>> obj;
    double obj_constant = 0.0;

    std::size_t touch(const std::string& nm) {
        auto it = var_index.find(nm);
        if (it != var_index.end()) return it->second;
        var_index.emplace(nm, vars.size());
        vars.push_back({nm});
        return vars.size() - 1;
    }

    MilpModel build() const {
        MilpModel m(name);
        for (const auto& v : vars) {
            if (v.kind == VarKind::Binary) {
                m.add_binary(v.name);
            } else {
                m.add_continuous(v.name, v.lb, v.ub);
            }
        }
        for (const auto& c : cons) {
            LinExpr e;
            for (const auto& [nm, coef] : c.terms) e.add(m.var_index(nm), coef);
            m.add_constraint(c.name, e, c.sense, c.rhs);
        }
        LinExpr e;
        for (const auto& [nm, coef] : obj) e.add(m.var_index(nm), coef);
        m.add_objective(e);
        m.set_objective_constant(obj_constant);
        return m;
    }
};

inline bool looks_numeric(const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
    if (i >= t.size()) return false;
    return (t[i] >= '0' && t[i] <= '9') || t[i] == '.';
}

inline double parse_num(const std::string& t, long line) {
    if (t == "inf" || t == "+inf") return kInf;
    if (t == "-inf") return -kInf;
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad number '" + t + "'", line);
    }
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace detail

inline MilpModel parse_lp(const std::string& text) {
    detail::PendingModel pm;
    enum Section { kNone, kObjective, kConstraints, kBounds, kBinary, kEnd };
    Section sec = kNone;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;

    // Token accumulator for the (possibly wrapped) current expression.
    std::vector<std::pair<std::string, long>> toks;
    auto flush_expr = [&](bool is_objective) {
        if (toks.empty()) return;
        std::size_t i = 0;
        std::string label;
        if (!toks[i].first.empty() && toks[i].first.back() == ':') {
            label = toks[i].first.substr(0, toks[i].first.size() - 1);
            ++i;
        } else if (!is_objective) {
            throw ParseError("constraint missing 'name:' label", toks[0].second);
        }
        detail::PendingCon con;
        con.name = label;
        std::vector<std::pair<std::string, double>> terms;
        double constant = 0.0;
        bool saw_sense = false;
        Sense sense = Sense::LE;
        double rhs = 0.0;
        double sign = 1.0;
        bool sign_pending = false;
        while (i < toks.size()) {
            const auto& [t, ln] = toks[i];
            if (t == "+" || t == "-") {
                if (sign_pending) throw ParseError("dangling sign", ln);
                sign = t == "-" ? -1.0 : 1.0;
                sign_pending = true;
                ++i;
                continue;
            }
            if (t == "<=" || t == ">=" || t == "=") {
                if (is_objective) throw ParseError("unexpected sense in objective", ln);
                if (sign_pending) throw ParseError("dangling sign", ln);
                if (saw_sense) throw ParseError("duplicate sense", ln);
                saw_sense = true;
                sense = t == "<=" ? Sense::LE : (t == ">=" ? Sense::GE : Sense::EQ);
                ++i;
                if (i + 1 != toks.size()) {
                    throw ParseError("expected single right-hand side", ln);
                }
                rhs = detail::parse_num(toks[i].first, toks[i].second);
                ++i;
                continue;
            }
            if (detail::looks_numeric(t)) {
                const double v = detail::parse_num(t, ln);
                // number followed by a name token => coefficient
                if (i + 1 < toks.size() && !detail::looks_numeric(toks[i + 1].first) &&
                    toks[i + 1].first != "+" && toks[i + 1].first != "-" &&
                    toks[i + 1].first != "<=" && toks[i + 1].first != ">=" &&
                    toks[i + 1].first != "=") {
                    terms.push_back({toks[i + 1].first, sign * v});
                    i += 2;
                } else {
                    constant += sign * v;
                    ++i;
                }
                sign = 1.0;
                sign_pending = false;
                continue;
            }
            terms.push_back({t, sign});
            sign = 1.0;
            sign_pending = false;
            ++i;
        }
        if (sign_pending) throw ParseError("dangling sign", toks.back().second);
        if (is_objective) {
            for (const auto& [nm, c] : terms) {
                pm.touch(nm);
                pm.obj.push_back({nm, c});
            }
            pm.obj_constant = constant;
        } else {
            if (!saw_sense) throw ParseError("constraint has no sense", toks[0].second);
            if (terms.empty()) {
                throw ParseError("constraint has no variable terms", toks[0].second);
            }
            con.terms = terms;
            con.sense = sense;
            con.rhs = rhs - constant;
            for (const auto& [nm, c] : con.terms) {
                pm.touch(nm);
                (void)c;
            }
            pm.cons.push_back(std::move(con));
        }
        toks.clear();
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        static const std::string kNameTag = "\\ sparsched model ";
        if (sec == kNone && line.rfind(kNameTag, 0) == 0) {
            const std::string nm = line.substr(kNameTag.size());
            if (!nm.empty()) pm.name = nm;
        }
        const auto slash = line.find('\\');
        if (slash != std::string::npos) line.resize(slash);
        std::istringstream ls(line);
        std::vector<std::string> words;
        std::string w;
        while (ls >> w) words.push_back(w);
        if (words.empty()) continue;
        const std::string low = detail::lower(words[0]);
        Section next = kNone;
        bool is_section = false;
        if (low == "minimize" || low == "min") {
            next = kObjective;
            is_section = words.size() == 1;
        } else if ((low == "subject" && words.size() == 2 &&
                    detail::lower(words[1]) == "to") ||
                   low == "st" || low == "s.t.") {
            next = kConstraints;
            is_section = true;
        } else if (low == "bounds") {
            next = kBounds;
            is_section = words.size() == 1;
        } else if (low == "binary" || low == "binaries") {
            next = kBinary;
            is_section = words.size() == 1;
        } else if (low == "end") {
            next = kEnd;
            is_section = words.size() == 1;
        } else if (low == "maximize" || low == "max") {
            throw ParseError("maximization not supported", lineno);
        } else if (low == "general" || low == "generals" || low == "integer" ||
                   low == "integers" || low == "semi-continuous") {
            throw ParseError("unsupported section '" + words[0] + "'", lineno);
        }
        if (is_section) {
            if (sec == kObjective) flush_expr(true);
            if (sec == kConstraints) flush_expr(false);
            sec = next;
            if (sec == kEnd) break;
            continue;
        }
        switch (sec) {
            case kNone:
                throw ParseError("content before Minimize", lineno);
            case kObjective:
                for (const auto& t : words) toks.push_back({t, lineno});
                break;
            case kConstraints: {
                // A label token starts a new constraint.
                if (!words[0].empty() && words[0].back() == ':') flush_expr(false);
                for (const auto& t : words) toks.push_back({t, lineno});
                break;
            }
            case kBounds: {
                if (words.size() == 2 && detail::lower(words[1]) == "free") {
                    auto& v = pm.vars[pm.touch(words[0])];
                    v.lb = -kInf;
                    v.ub = kInf;
                    v.bounded = true;
                } else if (words.size() == 3 && words[1] == "=") {
                    auto& v = pm.vars[pm.touch(words[0])];
                    v.lb = v.ub = detail::parse_num(words[2], lineno);
                    v.bounded = true;
                } else if (words.size() == 3 && (words[1] == "<=" || words[1] == ">=")) {
                    auto& v = pm.vars[pm.touch(words[0])];
                    if (words[1] == "<=") {
                        v.ub = detail::parse_num(words[2], lineno);
                    } else {
                        v.lb = detail::parse_num(words[2], lineno);
                    }
                    v.bounded = true;
                } else if (words.size() == 5 && words[1] == "<=" && words[3] == "<=") {
                    auto& v = pm.vars[pm.touch(words[2])];
                    v.lb = detail::parse_num(words[0], lineno);
                    v.ub = detail::parse_num(words[4], lineno);
                    v.bounded = true;
                } else {
                    throw ParseError("unrecognized bounds line", lineno);
                }
                break;
            }
            case kBinary:
                for (const auto& t : words) {
                    auto& v = pm.vars[pm.touch(t)];
                    if (v.bounded) {
                        throw ParseError("explicit bounds on binary '" + t +
                                             "' not supported",
                                         lineno);
                    }
                    v.kind = VarKind::Binary;
                    v.lb = 0.0;
                    v.ub = 1.0;
                }
                break;
            case kEnd:
                break;
        }
    }
    if (sec == kObjective) flush_expr(true);
    if (sec == kConstraints) flush_expr(false);
    if (sec == kNone) throw ParseError("no Minimize section found");
    return pm.build();
}

inline MilpModel parse_mps(const std::string& text) {
    detail::PendingModel pm;
    enum Section { kNone, kName, kObjsense, kRows, kColumns, kRhs, kBounds, kDone };
    Section sec = kNone;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    std::string obj_row;
    std::unordered_map<std::string, std::size_t> row_index;
    bool in_int = false;
    bool saw_rows = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '*') continue;  // comment
        const bool is_header = line[0] != ' ' && line[0] != '\t';
        std::istringstream ls(line);
        std::vector<std::string> t;
        std::string w;
        while (ls >> w) t.push_back(w);
        if (t.empty()) continue;
        if (is_header) {
            const std::string& kw = t[0];
            if (kw == "NAME") {
                if (t.size() > 1) pm.name = t[1];
                sec = kName;
            } else if (kw == "OBJSENSE") {
                sec = kObjsense;
            } else if (kw == "ROWS") {
                sec = kRows;
                saw_rows = true;
            } else if (kw == "COLUMNS") {
                sec = kColumns;
            } else if (kw == "RHS") {
                sec = kRhs;
            } else if (kw == "BOUNDS") {
                sec = kBounds;
            } else if (kw == "RANGES") {
                throw ParseError("RANGES section not supported", lineno);
            } else if (kw == "ENDATA") {
                sec = kDone;
                break;
            } else {
                throw ParseError("unknown MPS section '" + kw + "'", lineno);
            }
            continue;
        }
        switch (sec) {
            case kObjsense: {
                const std::string s = detail::lower(t[0]);
                if (s == "max" || s == "maximize") {
                    throw ParseError("maximization not supported", lineno);
                }
                if (s != "min" && s != "minimize") {
                    throw ParseError("bad OBJSENSE '" + t[0] + "'", lineno);
                }
                break;
            }
            case kRows: {
                if (t.size() != 2) throw ParseError("bad ROWS record", lineno);
                if (t[0] == "N") {
                    if (!obj_row.empty()) {
                        throw ParseError("multiple objective rows", lineno);
                    }
                    obj_row = t[1];
                } else {
                    Sense s;
                    if (t[0] == "L") {
                        s = Sense::LE;
                    } else if (t[0] == "G") {
                        s = Sense::GE;
                    } else if (t[0] == "E") {
                        s = Sense::EQ;
                    } else {
                        throw ParseError("bad row type '" + t[0] + "'", lineno);
                    }
                    if (row_index.count(t[1]) || t[1] == obj_row) {
                        throw ParseError("duplicate row '" + t[1] + "'", lineno);
                    }
                    row_index.emplace(t[1], pm.cons.size());
                    pm.cons.push_back({t[1], {}, s, 0.0});
                }
                break;
            }
            case kColumns: {
                if (t.size() >= 3 && (t[1] == "'MARKER'" || t[0] == "MARKER")) {
                    bool handled = false;
                    for (const auto& m : t) {
                        if (m == "'INTORG'") {
                            in_int = true;
                            handled = true;
                        }
                        if (m == "'INTEND'") {
                            in_int = false;
                            handled = true;
                        }
                    }
                    if (handled) break;
                }
                if (t.size() < 3 || (t.size() - 1) % 2 != 0) {
                    throw ParseError("bad COLUMNS record", lineno);
                }
                const std::size_t vi = pm.touch(t[0]);
                if (in_int) {
                    pm.vars[vi].kind = VarKind::Binary;
                    pm.vars[vi].lb = 0.0;
                    pm.vars[vi].ub = 1.0;
                }
                for (std::size_t i = 1; i + 1 < t.size(); i += 2) {
                    const std::string& row = t[i];
                    const double val = detail::parse_num(t[i + 1], lineno);
                    if (row == obj_row) {
                        if (val != 0.0) pm.obj.push_back({t[0], val});
                    } else {
                        auto it = row_index.find(row);
                        if (it == row_index.end()) {
                            throw ParseError("unknown row '" + row + "'", lineno);
                        }
                        pm.cons[it->second].terms.push_back({t[0], val});
                    }
                }
                break;
            }
            case kRhs: {
                if (t.size() < 3 || (t.size() - 1) % 2 != 0) {
                    throw ParseError("bad RHS record", lineno);
                }
                for (std::size_t i = 1; i + 1 < t.size(); i += 2) {
                    const std::string& row = t[i];
                    const double val = detail::parse_num(t[i + 1], lineno);
                    if (row == obj_row) {
                        pm.obj_constant = -val;
                    } else {
                        auto it = row_index.find(row);
                        if (it == row_index.end()) {
                            throw ParseError("unknown row '" + row + "'", lineno);
                        }
                        pm.cons[it->second].rhs = val;
                    }
                }
                break;
            }
            case kBounds: {
                const std::string& kind = t[0];
                if (t.size() < 3) throw ParseError("bad BOUNDS record", lineno);
                auto it = pm.var_index.find(t[2]);
                if (it == pm.var_index.end()) {
                    throw ParseError("bound on unknown variable '" + t[2] + "'",
                                     lineno);
                }
                auto& v = pm.vars[it->second];
                if (kind == "BV") {
                    v.kind = VarKind::Binary;
                    v.lb = 0.0;
                    v.ub = 1.0;
                } else if (kind == "FR") {
                    v.lb = -kInf;
                    v.ub = kInf;
                } else if (kind == "MI") {
                    v.lb = -kInf;
                } else if (kind == "PL") {
                    v.ub = kInf;
                } else {
                    if (t.size() != 4) throw ParseError("bad BOUNDS record", lineno);
                    const double val = detail::parse_num(t[3], lineno);
                    if (kind == "UP") {
                        v.ub = val;
                    } else if (kind == "LO") {
                        v.lb = val;
                    } else if (kind == "FX") {
                        v.lb = v.ub = val;
                    } else {
                        throw ParseError("unsupported bound type '" + kind + "'",
                                         lineno);
                    }
                }
                break;
            }
            case kName:
            case kNone:
            case kDone:
                throw ParseError("unexpected data line", lineno);
        }
    }
    if (!saw_rows) throw ParseError("no ROWS section found");
    if (obj_row.empty()) throw ParseError("no objective row declared");
    if (sec != kDone) throw ParseError("missing ENDATA");
    // Drop emitter-artifact zero objective entries (handled above: zero obj
    // coefficients were skipped when reading COLUMNS).
    for (auto& c : pm.cons) {
        if (c.terms.empty()) {
            throw ParseError("row '" + c.name + "' has no entries");
        }
    }
    return pm.build();
}

// ---------------------------------------------------------------------------
// Semantic equality (used by round-trip tests)

// Compares variables by name (kind and bounds exact), the constraint sequence
// (name, sense, rhs, terms), and the objective. Variable declaration order is
// not compared: the LP surface does not record it for default-bounded
// variables.
inline bool models_semantically_equal(const MilpModel& a, const MilpModel& b,
                                      std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.num_vars() != b.num_vars()) {
        return fail("variable count " + std::to_string(a.num_vars()) + " vs " +
                    std::to_string(b.num_vars()));
    }
    if (a.num_constraints() != b.num_constraints()) {
        return fail("constraint count differs");
    }
    for (int i = 0; i < a.num_vars(); ++i) {
        const Variable& va = a.var(i);
        if (!b.has_var(va.name)) return fail("missing variable " + va.name);
        const Variable& vb = b.var(b.var_index(va.name));
        if (va.kind != vb.kind) return fail("kind differs for " + va.name);
        if (va.lb != vb.lb || va.ub != vb.ub) {
            return fail("bounds differ for " + va.name);
        }
    }
    for (int i = 0; i < a.num_constraints(); ++i) {
        const Constraint& ca = a.con(i);
        const Constraint& cb = b.con(i);
        if (ca.name != cb.name) {
            return fail("constraint order/name differs at " + std::to_string(i));
        }
        if (ca.sense != cb.sense || ca.rhs != cb.rhs) {
            return fail("sense/rhs differs for " + ca.name);
        }
        std::map<std::string, double> ta, tb;
        for (const auto& [v, c] : ca.terms) ta[a.var(v).name] = c;
        for (const auto& [v, c] : cb.terms) tb[b.var(v).name] = c;
        if (ta != tb) return fail("terms differ for " + ca.name);
    }
    std::map<std::string, double> oa, ob;
    for (const auto& [v, c] : a.objective()) oa[a.var(v).name] = c;
    for (const auto& [v, c] : b.objective()) ob[b.var(v).name] = c;
    if (oa != ob) return fail("objective terms differ");
    if (a.objective_constant() != b.objective_constant()) {
        return fail("objective constant differs");
    }
    return true;
}

}  // namespace sparsched
