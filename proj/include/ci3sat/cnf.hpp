#pragma once

// Strict 3SAT formulas: every clause has exactly three literals on three
// distinct variables and is stored with ascending variable indices.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ci3sat {

// One literal. Variables are 1-based. On the same variable the positive
// literal orders before the negation.
struct Literal {
    int var = 0;
    bool positive = true;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend bool operator<(const Literal& a, const Literal& b) {
        if (a.var != b.var) return a.var < b.var;
        return a.positive && !b.positive;
    }
};

inline Literal negated(Literal l) { return {l.var, !l.positive}; }

// Disjunction of three literals on three distinct variables, kept sorted by
// variable index.
class Clause3 {
public:
    Clause3(Literal a, Literal b, Literal c) : lits_{a, b, c} {
        std::sort(lits_.begin(), lits_.end(),
                  [](const Literal& x, const Literal& y) { return x.var < y.var; });
        if (lits_[0].var < 1)
            throw std::invalid_argument("clause variable index must be >= 1");
        if (lits_[0].var == lits_[1].var || lits_[1].var == lits_[2].var)
            throw std::invalid_argument("clause variables must be distinct");
    }

    const std::array<Literal, 3>& literals() const { return lits_; }

    std::array<int, 3> vars() const {
        return {lits_[0].var, lits_[1].var, lits_[2].var};
    }

    // Polarity pattern: bit 2 for the lowest variable, bit 0 for the highest,
    // set when that literal is positive.
    std::uint8_t bits() const {
        return static_cast<std::uint8_t>((lits_[0].positive ? 4 : 0) |
                                         (lits_[1].positive ? 2 : 0) |
                                         (lits_[2].positive ? 1 : 0));
    }

    friend bool operator==(const Clause3&, const Clause3&) = default;

    // Canonical clause order: variable triple ascending, then positive
    // literals before negated ones (descending pattern).
    friend bool operator<(const Clause3& a, const Clause3& b) {
        const auto av = a.vars(), bv = b.vars();
        if (av != bv) return av < bv;
        return a.bits() > b.bits();
    }

private:
    std::array<Literal, 3> lits_;
};

// A 3SAT instance: variable count plus a duplicate-free clause set in
// canonical order.
struct Formula {
    int n = 0;
    std::vector<Clause3> clauses;

    friend bool operator==(const Formula&, const Formula&) = default;
};

// Canonicalizes (sorts, deduplicates) and checks variable ranges. When
// `dropped` is given it receives the number of duplicates removed.
inline Formula make_formula(int n, std::vector<Clause3> clauses,
                            std::size_t* dropped = nullptr) {
    if (n < 0) throw std::invalid_argument("variable count must be >= 0");
    for (const Clause3& c : clauses)
        if (c.vars()[2] > n)
            throw std::invalid_argument("clause variable exceeds variable count");
    std::sort(clauses.begin(), clauses.end());
    const auto last = std::unique(clauses.begin(), clauses.end());
    if (dropped) *dropped = static_cast<std::size_t>(clauses.end() - last);
    clauses.erase(last, clauses.end());
    return Formula{n, std::move(clauses)};
}

// Truth values V1..Vn; values[v-1] holds V_v.
struct Assignment {
    std::vector<std::uint8_t> values;

    Assignment() = default;
    explicit Assignment(int n) : values(static_cast<std::size_t>(n), 0) {}

    int size() const { return static_cast<int>(values.size()); }

    bool value(int var) const { return values[static_cast<std::size_t>(var - 1)] != 0; }
    void set(int var, bool v) { values[static_cast<std::size_t>(var - 1)] = v ? 1 : 0; }

    // Index order: FALSE < TRUE with variable 1 most significant, so the
    // all-FALSE assignment is index 0.
    static Assignment from_index(std::uint64_t idx, int n) {
        Assignment a(n);
        for (int v = 1; v <= n; ++v)
            a.values[static_cast<std::size_t>(v - 1)] =
                static_cast<std::uint8_t>((idx >> (n - v)) & 1u);
        return a;
    }

    std::uint64_t to_index() const {
        std::uint64_t idx = 0;
        for (std::uint8_t b : values) idx = (idx << 1) | b;
        return idx;
    }

    std::string str() const {
        std::string s;
        s.reserve(values.size());
        for (std::uint8_t b : values) s.push_back(b ? 'T' : 'F');
        return s;
    }

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend bool operator<(const Assignment& a, const Assignment& b) {
        return a.values < b.values;
    }
};

inline Assignment assignment_from_string(std::string_view s) {
    Assignment a(static_cast<int>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != 'T' && s[i] != 'F')
            throw std::invalid_argument("assignment string must contain only T/F");
        a.values[i] = s[i] == 'T' ? 1 : 0;
    }
    return a;
}

inline Assignment flipped(const Assignment& a) {
    Assignment r = a;
    for (auto& b : r.values) b = b ? 0 : 1;
    return r;
}

// DIMACS "v" line, negative integers for FALSE.
inline std::string dimacs_model_line(const Assignment& a) {
    std::string s = "v";
    for (int v = 1; v <= a.size(); ++v) {
        s += ' ';
        if (!a.value(v)) s += '-';
        s += std::to_string(v);
    }
    s += " 0";
    return s;
}

inline bool evaluate(const Formula& f, const Assignment& a) {
    if (a.size() != f.n)
        throw std::invalid_argument("assignment length does not match variable count");
    for (const Clause3& c : f.clauses) {
        bool sat = false;
        for (const Literal& l : c.literals())
            if (a.value(l.var) == l.positive) {
                sat = true;
                break;
            }
        if (!sat) return false;
    }
    return true;
}

// Flips the polarity of every literal. Involution; clause count preserved.
inline Formula invert_formula(const Formula& f) {
    std::vector<Clause3> out;
    out.reserve(f.clauses.size());
    for (const Clause3& c : f.clauses) {
        const auto& l = c.literals();
        out.emplace_back(negated(l[0]), negated(l[1]), negated(l[2]));
    }
    return make_formula(f.n, std::move(out));
}

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("line " + std::to_string(l) + ", column " +
                             std::to_string(c) + ": " + msg),
          line(l),
          column(c) {}
};

struct ParsedCnf {
    Formula formula;
    std::size_t duplicates_dropped = 0;
};

namespace detail {

struct Token {
    std::string_view text;
    int line = 0;
    int column = 0;
    bool eof() const { return text.empty(); }
};

class DimacsLexer {
public:
    explicit DimacsLexer(std::string_view text) : text_(text) {}

    // Next whitespace-delimited token. A line whose first non-blank
    // character is 'c' is a comment and is skipped whole.
    Token next() {
        for (;;) {
            skip_ws();
            if (pos_ >= text_.size()) return {std::string_view{}, line_, col_};
            if (text_[pos_] == 'c' && !line_has_token_) {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            const int tl = line_, tc = col_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && !is_space(text_[pos_])) advance();
            line_has_token_ = true;
            return {text_.substr(start, pos_ - start), tl, tc};
        }
    }

private:
    static bool is_space(char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n';
    }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
            line_has_token_ = false;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip_ws() {
        while (pos_ < text_.size() && is_space(text_[pos_])) advance();
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    bool line_has_token_ = false;
};

inline long long parse_int(const Token& t, const char* what) {
    if (t.eof()) throw ParseError(t.line, t.column, std::string("expected ") + what);
    std::string s(t.text);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty() || s == "-")
        throw ParseError(t.line, t.column,
                         std::string("expected ") + what + ", got '" + s + "'");
    return v;
}

}  // namespace detail

// Parses DIMACS CNF. Comments ('c' lines) may appear anywhere before or
// between clauses; clauses may span lines; duplicates are dropped and
// counted. Clauses must have exactly three distinct variables.
inline ParsedCnf parse_dimacs(std::string_view text) {
    detail::DimacsLexer lex(text);

    detail::Token t = lex.next();
    if (t.eof() || t.text != "p")
        throw ParseError(t.line, t.column, "missing 'p cnf <vars> <clauses>' header");
    detail::Token fmt = lex.next();
    if (fmt.eof() || fmt.text != "cnf")
        throw ParseError(fmt.line, fmt.column, "header format must be 'cnf'");
    const long long n = detail::parse_int(lex.next(), "variable count");
    const long long m = detail::parse_int(lex.next(), "clause count");
    if (n < 0 || n > 10000)
        throw ParseError(t.line, t.column, "variable count out of range");
    if (m < 0) throw ParseError(t.line, t.column, "clause count out of range");

    std::vector<Clause3> clauses;
    clauses.reserve(static_cast<std::size_t>(m));
    std::vector<Literal> pending;
    std::size_t clause_index = 1;

    for (;;) {
        detail::Token tok = lex.next();
        if (tok.eof()) {
            if (!pending.empty())
                throw ParseError(tok.line, tok.column,
                                 "unterminated clause " + std::to_string(clause_index));
            break;
        }
        const long long lit = detail::parse_int(tok, "literal");
        if (lit == 0) {
            if (pending.size() != 3)
                throw ParseError(tok.line, tok.column,
                                 "clause " + std::to_string(clause_index) + " has " +
                                     std::to_string(pending.size()) +
                                     " literals; exactly 3 required");
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = a + 1; b < 3; ++b)
                    if (pending[a].var == pending[b].var)
                        throw ParseError(tok.line, tok.column,
                                         "clause " + std::to_string(clause_index) +
                                             " repeats variable " +
                                             std::to_string(pending[a].var));
            clauses.emplace_back(pending[0], pending[1], pending[2]);
            pending.clear();
            ++clause_index;
            continue;
        }
        const long long var = lit < 0 ? -lit : lit;
        if (var > n)
            throw ParseError(tok.line, tok.column,
                             "variable " + std::to_string(var) + " out of range [1, " +
                                 std::to_string(n) + "] in clause " +
                                 std::to_string(clause_index));
        if (pending.size() == 3)
            throw ParseError(tok.line, tok.column,
                             "clause " + std::to_string(clause_index) +
                                 " has more than 3 literals");
        pending.push_back({static_cast<int>(var), lit > 0});
    }

    ParsedCnf out;
    out.formula = make_formula(static_cast<int>(n), std::move(clauses),
                               &out.duplicates_dropped);
    return out;
}

// Canonical-order serialization; parse_dimacs(write_dimacs(f)) == f.
inline std::string write_dimacs(const Formula& f) {
    std::string s = "p cnf " + std::to_string(f.n) + ' ' +
                    std::to_string(f.clauses.size()) + '\n';
    for (const Clause3& c : f.clauses) {
        for (const Literal& l : c.literals()) {
            if (!l.positive) s += '-';
            s += std::to_string(l.var);
            s += ' ';
        }
        s += "0\n";
    }
    return s;
}

}  // namespace ci3sat
