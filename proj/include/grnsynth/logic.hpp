// SPDX-License-Identifier: Apache-2.0
#pragma once

// LTL over gene atoms: AST, text parser, and evaluation on lasso runs (exact)
// and on finite prefixes (three-valued).
//
// Grammar, loosest binding first:
//   f ::= f '->' f            right-associative
//       | f '|' f
//       | f '&' f
//       | f 'U' f             right-associative
//       | '!' f | 'X' f | 'F' f | 'G' f
//       | 'true' | 'false' | gene | '(' f ')'
// `&&`, `||` and `=>` are accepted as spellings of `&`, `|` and `->`.
// The single letters U, F, G, X and the words true/false are reserved.

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grnsynth/error.hpp"
#include "grnsynth/model.hpp"

namespace grnsynth {

enum class LtlOp : std::uint8_t {
    literal_true,
    literal_false,
    atom,
    negation,
    disjunction,
    conjunction,
    implication,
    until,
    eventually,
    globally,
    next,
};

class LtlFormula {
public:
    struct Node {
        LtlOp op;
        std::string atom;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    LtlFormula() = default;

    static LtlFormula truth() { return make(LtlOp::literal_true); }
    static LtlFormula falsity() { return make(LtlOp::literal_false); }
    static LtlFormula atom(std::string gene)
    {
        LtlFormula f = make(LtlOp::atom);
        std::const_pointer_cast<Node>(f.node_)->atom = std::move(gene);
        return f;
    }
    static LtlFormula unary(LtlOp op, LtlFormula f) { return make(op, std::move(f)); }
    static LtlFormula binary(LtlOp op, LtlFormula a, LtlFormula b) { return make(op, std::move(a), std::move(b)); }

    static LtlFormula negation(LtlFormula f) { return unary(LtlOp::negation, std::move(f)); }
    static LtlFormula eventually(LtlFormula f) { return unary(LtlOp::eventually, std::move(f)); }
    static LtlFormula globally(LtlFormula f) { return unary(LtlOp::globally, std::move(f)); }
    static LtlFormula next(LtlFormula f) { return unary(LtlOp::next, std::move(f)); }
    static LtlFormula until(LtlFormula a, LtlFormula b) { return binary(LtlOp::until, std::move(a), std::move(b)); }

    friend LtlFormula operator!(LtlFormula f) { return negation(std::move(f)); }
    friend LtlFormula operator&&(LtlFormula a, LtlFormula b) { return binary(LtlOp::conjunction, std::move(a), std::move(b)); }
    friend LtlFormula operator||(LtlFormula a, LtlFormula b) { return binary(LtlOp::disjunction, std::move(a), std::move(b)); }
    friend LtlFormula implies(LtlFormula a, LtlFormula b) { return binary(LtlOp::implication, std::move(a), std::move(b)); }

    [[nodiscard]] bool empty() const noexcept { return node_ == nullptr; }
    [[nodiscard]] LtlOp op() const { return node_->op; }
    [[nodiscard]] const std::string& atom_name() const { return node_->atom; }
    [[nodiscard]] LtlFormula lhs() const { return LtlFormula{node_->lhs}; }
    [[nodiscard]] LtlFormula rhs() const { return LtlFormula{node_->rhs}; }

    [[nodiscard]] bool uses_next() const
    {
        if (!node_) return false;
        return node_->op == LtlOp::next || lhs().uses_next() || rhs().uses_next();
    }

    /// Fully parenthesized text that parses back to the same tree.
    [[nodiscard]] std::string to_string() const
    {
        switch (node_->op) {
        case LtlOp::literal_true: return "true";
        case LtlOp::literal_false: return "false";
        case LtlOp::atom: return node_->atom;
        case LtlOp::negation: return "!" + wrap(lhs());
        case LtlOp::eventually: return "F " + wrap(lhs());
        case LtlOp::globally: return "G " + wrap(lhs());
        case LtlOp::next: return "X " + wrap(lhs());
        case LtlOp::disjunction: return wrap(lhs()) + " | " + wrap(rhs());
        case LtlOp::conjunction: return wrap(lhs()) + " & " + wrap(rhs());
        case LtlOp::implication: return wrap(lhs()) + " -> " + wrap(rhs());
        case LtlOp::until: return wrap(lhs()) + " U " + wrap(rhs());
        }
        return {};
    }

    friend bool operator==(const LtlFormula& a, const LtlFormula& b)
    {
        if (a.node_ == b.node_) return true;
        if (!a.node_ || !b.node_) return false;
        return a.node_->op == b.node_->op && a.node_->atom == b.node_->atom && a.lhs() == b.lhs()
            && a.rhs() == b.rhs();
    }

private:
    explicit LtlFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static LtlFormula make(LtlOp op, LtlFormula lhs = {}, LtlFormula rhs = {})
    {
        return LtlFormula{std::make_shared<const Node>(Node{op, {}, std::move(lhs.node_), std::move(rhs.node_)})};
    }

    static std::string wrap(const LtlFormula& f)
    {
        switch (f.op()) {
        case LtlOp::literal_true:
        case LtlOp::literal_false:
        case LtlOp::atom: return f.to_string();
        default: return "(" + f.to_string() + ")";
        }
    }

    std::shared_ptr<const Node> node_;
};

struct LtlParseOptions {
    /// The next-step operator X; the core logic omits it but the
    /// feed-forward-loop properties need it.
    bool allow_next = true;
};

namespace detail {

class LtlParser {
public:
    LtlParser(std::string_view text, LtlParseOptions options) : text_(text), options_(options) {}

    LtlFormula parse()
    {
        LtlFormula f = parse_implication();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError("LTL: " + what, pos_); }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok)
    {
        skip_space();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::string_view peek_word()
    {
        skip_space();
        std::size_t end = pos_;
        if (end < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
            while (end < text_.size() && ident_char(text_[end])) ++end;
        return text_.substr(pos_, end - pos_);
    }

    LtlFormula parse_implication()
    {
        LtlFormula lhs = parse_disjunction();
        if (accept("->") || accept("=>")) return implies(std::move(lhs), parse_implication());
        return lhs;
    }

    LtlFormula parse_disjunction()
    {
        LtlFormula f = parse_conjunction();
        while (accept("||") || accept("|")) f = std::move(f) || parse_conjunction();
        return f;
    }

    LtlFormula parse_conjunction()
    {
        LtlFormula f = parse_until();
        while (accept("&&") || accept("&")) f = std::move(f) && parse_until();
        return f;
    }

    LtlFormula parse_until()
    {
        LtlFormula lhs = parse_unary();
        if (peek_word() == "U") {
            pos_ += 1;
            return LtlFormula::until(std::move(lhs), parse_until());
        }
        return lhs;
    }

    LtlFormula parse_unary()
    {
        if (accept("!") || accept("~")) return !parse_unary();
        auto word = peek_word();
        if (word == "F") {
            pos_ += 1;
            return LtlFormula::eventually(parse_unary());
        }
        if (word == "G") {
            pos_ += 1;
            return LtlFormula::globally(parse_unary());
        }
        if (word == "X") {
            if (!options_.allow_next) fail("next operator X is disabled");
            pos_ += 1;
            return LtlFormula::next(parse_unary());
        }
        return parse_primary();
    }

    LtlFormula parse_primary()
    {
        if (accept("(")) {
            LtlFormula f = parse_implication();
            if (!accept(")")) fail("expected ')'");
            return f;
        }
        auto word = peek_word();
        if (word.empty()) {
            if (pos_ >= text_.size()) fail("unexpected end of formula");
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        if (word == "U") fail("'U' without left operand");
        pos_ += word.size();
        if (word == "true") return LtlFormula::truth();
        if (word == "false") return LtlFormula::falsity();
        return LtlFormula::atom(std::string{word});
    }

    std::string_view text_;
    LtlParseOptions options_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline LtlFormula parse_ltl(std::string_view text, LtlParseOptions options = {})
{
    return detail::LtlParser{text, options}.parse();
}

enum class Verdict : std::uint8_t { False = 0, True = 1, Undefined = 2 };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::False: return "false";
    case Verdict::True: return "true";
    case Verdict::Undefined: return "undefined";
    }
    return "?";
}

/// A formula with atoms resolved to gene indices, flattened so every node's
/// children precede it. The root is the last node.
class BoundFormula {
public:
    struct Node {
        LtlOp op;
        std::size_t gene = 0;
        std::size_t lhs = 0;
        std::size_t rhs = 0;
    };

    BoundFormula(const LtlFormula& phi, const GrnSpace& space) : gene_count_(space.gene_count())
    {
        if (phi.empty()) throw BindingError("empty formula");
        flatten(phi, space);
    }

    [[nodiscard]] std::span<const Node> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t gene_count() const noexcept { return gene_count_; }

    /// The formula with one more negation at the root.
    [[nodiscard]] BoundFormula negated() const
    {
        BoundFormula out = *this;
        out.nodes_.push_back({LtlOp::negation, 0, nodes_.size() - 1, 0});
        return out;
    }

private:
    std::size_t flatten(const LtlFormula& f, const GrnSpace& space)
    {
        Node n{f.op()};
        switch (f.op()) {
        case LtlOp::atom: n.gene = space.gene_index(f.atom_name()); break;
        case LtlOp::literal_true:
        case LtlOp::literal_false: break;
        case LtlOp::negation:
        case LtlOp::eventually:
        case LtlOp::globally:
        case LtlOp::next: n.lhs = flatten(f.lhs(), space); break;
        default:
            n.lhs = flatten(f.lhs(), space);
            n.rhs = flatten(f.rhs(), space);
        }
        nodes_.push_back(n);
        return nodes_.size() - 1;
    }

    std::vector<Node> nodes_;
    std::size_t gene_count_;
};

namespace detail {

inline void check_run(const BoundFormula& phi, std::span<const GrnState> states)
{
    for (const auto& s : states)
        if (s.gene_count() != phi.gene_count())
            throw BindingError("run and formula are over different gene sets");
}

/// Kleene connectives over {False, True, Undefined}.
inline Verdict k_not(Verdict a)
{
    return a == Verdict::Undefined ? a : (a == Verdict::True ? Verdict::False : Verdict::True);
}
inline Verdict k_or(Verdict a, Verdict b)
{
    if (a == Verdict::True || b == Verdict::True) return Verdict::True;
    if (a == Verdict::False && b == Verdict::False) return Verdict::False;
    return Verdict::Undefined;
}
inline Verdict k_and(Verdict a, Verdict b) { return k_not(k_or(k_not(a), k_not(b))); }

} // namespace detail

/// Exact truth of the infinite unrolling of `run`, read from position 0.
inline bool eval_lasso(const BoundFormula& phi, const LassoRun& run)
{
    const std::size_t n = run.states.size();
    if (n == 0 || run.loop_start >= n) throw StructuralError("malformed lasso run");
    detail::check_run(phi, run.states);

    auto nodes = phi.nodes();
    std::vector<char> val(nodes.size() * n);
    auto at = [&](std::size_t node, std::size_t i) -> char& { return val[node * n + i]; };

    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& nd = nodes[k];
        switch (nd.op) {
        case LtlOp::literal_true:
        case LtlOp::literal_false:
            for (std::size_t i = 0; i < n; ++i) at(k, i) = nd.op == LtlOp::literal_true;
            break;
        case LtlOp::atom:
            for (std::size_t i = 0; i < n; ++i) at(k, i) = run.states[i].active(nd.gene);
            break;
        case LtlOp::negation:
            for (std::size_t i = 0; i < n; ++i) at(k, i) = !at(nd.lhs, i);
            break;
        case LtlOp::disjunction:
            for (std::size_t i = 0; i < n; ++i) at(k, i) = at(nd.lhs, i) || at(nd.rhs, i);
            break;
        case LtlOp::conjunction:
            for (std::size_t i = 0; i < n; ++i) at(k, i) = at(nd.lhs, i) && at(nd.rhs, i);
            break;
        case LtlOp::implication:
            for (std::size_t i = 0; i < n; ++i) at(k, i) = !at(nd.lhs, i) || at(nd.rhs, i);
            break;
        case LtlOp::next:
            for (std::size_t i = 0; i < n; ++i) at(k, i) = at(nd.lhs, run.successor(i));
            break;
        case LtlOp::until:
        case LtlOp::eventually:
        case LtlOp::globally: {
            // Least fixpoint for until/eventually, greatest for globally;
            // backward sweeps until the loop positions are stable.
            const bool greatest = nd.op == LtlOp::globally;
            for (std::size_t i = 0; i < n; ++i) at(k, i) = greatest;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t i = n; i-- > 0;) {
                    const char later = at(k, run.successor(i));
                    char v;
                    if (nd.op == LtlOp::until)
                        v = at(nd.rhs, i) || (at(nd.lhs, i) && later);
                    else if (nd.op == LtlOp::eventually)
                        v = at(nd.lhs, i) || later;
                    else
                        v = at(nd.lhs, i) && later;
                    if (v != at(k, i)) {
                        at(k, i) = v;
                        changed = true;
                    }
                }
            }
            break;
        }
        }
    }
    return at(nodes.size() - 1, 0);
}

/// Three-valued verdict on a finite prefix: True/False only when forced for
/// every infinite continuation under Kleene evaluation, Undefined otherwise.
inline Verdict eval_prefix(const BoundFormula& phi, std::span<const GrnState> states)
{
    const std::size_t n = states.size();
    if (n == 0) throw StructuralError("empty prefix");
    detail::check_run(phi, states);

    using detail::k_and;
    using detail::k_not;
    using detail::k_or;
    constexpr Verdict unknown = Verdict::Undefined;

    auto nodes = phi.nodes();
    // Position n stands for the unknown continuation.
    std::vector<Verdict> val(nodes.size() * (n + 1));
    auto at = [&](std::size_t node, std::size_t i) -> Verdict& { return val[node * (n + 1) + i]; };

    for (std::size_t i = n + 1; i-- > 0;) {
        const bool beyond = i == n;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const auto& nd = nodes[k];
            Verdict later = beyond ? unknown : at(k, i + 1);
            Verdict v = unknown;
            switch (nd.op) {
            case LtlOp::literal_true: v = Verdict::True; break;
            case LtlOp::literal_false: v = Verdict::False; break;
            case LtlOp::atom:
                v = beyond ? unknown : (states[i].active(nd.gene) ? Verdict::True : Verdict::False);
                break;
            case LtlOp::negation: v = k_not(at(nd.lhs, i)); break;
            case LtlOp::disjunction: v = k_or(at(nd.lhs, i), at(nd.rhs, i)); break;
            case LtlOp::conjunction: v = k_and(at(nd.lhs, i), at(nd.rhs, i)); break;
            case LtlOp::implication: v = k_or(k_not(at(nd.lhs, i)), at(nd.rhs, i)); break;
            case LtlOp::next: v = beyond ? unknown : at(nd.lhs, i + 1); break;
            case LtlOp::until: v = k_or(at(nd.rhs, i), k_and(at(nd.lhs, i), later)); break;
            case LtlOp::eventually: v = k_or(at(nd.lhs, i), later); break;
            case LtlOp::globally: v = k_and(at(nd.lhs, i), later); break;
            }
            at(k, i) = v;
        }
    }
    return at(nodes.size() - 1, 0);
}

inline bool eval_lasso(const LtlFormula& phi, const GrnSpace& space, const LassoRun& run)
{
    return eval_lasso(BoundFormula{phi, space}, run);
}

inline Verdict eval_prefix(const LtlFormula& phi, const GrnSpace& space, std::span<const GrnState> states)
{
    return eval_prefix(BoundFormula{phi, space}, states);
}

} // namespace grnsynth
