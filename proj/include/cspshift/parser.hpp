#ifndef CSPSHIFT_PARSER_HPP
#define CSPSHIFT_PARSER_HPP

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "observations.hpp"
#include "process.hpp"
#include "timed.hpp"

namespace csp {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& what, int line_, int col_)
        : std::runtime_error(what + " at " + std::to_string(line_) + ":" +
                             std::to_string(col_)),
          line(line_), col(col_) {}
};

struct AssertionSrc {
    int line = 0;
    Model model = Model::T;
    TermId spec = -1;
    TermId impl = -1;
};

struct Program {
    Alphabet alphabet;
    Defs defs;
    std::vector<AssertionSrc> asserts;
};

namespace parsedet {

enum class Tok {
    Ident, Int, Arrow, IntChoice, ExtChoice, SlideTo, ParOpen, ParClose,
    Backslash, RenOpen, RenClose, MapsTo, Semi, Interrupt, RefinedBy,
    LBrace, RBrace, LParen, RParen, LBracket, RBracket, Comma, Dot, Equals,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

class Lexer {
public:
    explicit Lexer(std::string src) : src_(std::move(src)) { advance(); }

    const Token& peek() const { return cur_; }
    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
                continue;
            }
            if (std::isspace(uint8_t(c))) {
                ++col_;
                ++pos_;
                continue;
            }
            break;
        }
        int line = line_, col = col_;
        auto make = [&](Tok k, std::string text) {
            cur_ = {k, std::move(text), line, col};
        };
        if (pos_ >= src_.size()) {
            make(Tok::End, "");
            return;
        }
        char c = src_[pos_];
        auto take = [&](size_t n) {
            std::string s = src_.substr(pos_, n);
            pos_ += n;
            col_ += int(n);
            return s;
        };
        auto two = [&](const char* s) {
            return pos_ + 1 < src_.size() && src_[pos_] == s[0] &&
                   src_[pos_ + 1] == s[1];
        };
        if (std::isalpha(uint8_t(c)) || c == '_') {
            size_t n = 0;
            while (pos_ + n < src_.size() &&
                   (std::isalnum(uint8_t(src_[pos_ + n])) || src_[pos_ + n] == '_'))
                ++n;
            make(Tok::Ident, take(n));
            return;
        }
        if (std::isdigit(uint8_t(c))) {
            size_t n = 0;
            while (pos_ + n < src_.size() && std::isdigit(uint8_t(src_[pos_ + n])))
                ++n;
            make(Tok::Int, take(n));
            return;
        }
        if (src_.compare(pos_, 3, "|~|") == 0) { make(Tok::IntChoice, take(3)); return; }
        if (two("->")) { make(Tok::Arrow, take(2)); return; }
        if (two("<-")) { make(Tok::MapsTo, take(2)); return; }
        if (two("[]")) { make(Tok::ExtChoice, take(2)); return; }
        if (two("[>")) { make(Tok::SlideTo, take(2)); return; }
        if (two("[|")) { make(Tok::ParOpen, take(2)); return; }
        if (two("|]")) { make(Tok::ParClose, take(2)); return; }
        if (two("[[")) { make(Tok::RenOpen, take(2)); return; }
        if (two("]]")) { make(Tok::RenClose, take(2)); return; }
        if (two("[=")) { make(Tok::RefinedBy, take(2)); return; }
        if (two("/\\")) { make(Tok::Interrupt, take(2)); return; }
        switch (c) {
        case '\\': make(Tok::Backslash, take(1)); return;
        case ';': make(Tok::Semi, take(1)); return;
        case '{': make(Tok::LBrace, take(1)); return;
        case '}': make(Tok::RBrace, take(1)); return;
        case '(': make(Tok::LParen, take(1)); return;
        case ')': make(Tok::RParen, take(1)); return;
        case '[': make(Tok::LBracket, take(1)); return;
        case ']': make(Tok::RBracket, take(1)); return;
        case ',': make(Tok::Comma, take(1)); return;
        case '.': make(Tok::Dot, take(1)); return;
        case '=': make(Tok::Equals, take(1)); return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }

    std::string src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token cur_{Tok::End, "", 1, 1};
};

} // namespace parsedet

class Parser {
public:
    Parser(Ctx& ctx, std::string src) : ctx_(ctx), lex_(std::move(src)) {}

    Program parse_program() {
        Program prog;
        while (lex_.peek().kind != parsedet::Tok::End) {
            auto t = lex_.peek();
            if (t.kind != parsedet::Tok::Ident)
                fail("expected a declaration", t);
            if (t.text == "alphabet") {
                lex_.next();
                do {
                    auto id = expect_ident();
                    if (is_reserved_event_name(id.text))
                        fail("reserved identifier '" + id.text +
                                 "' may not be declared",
                             id);
                    EventId e = ctx_.ev.plain(id.text);
                    if (!prog.alphabet.contains(e))
                        prog.alphabet.events.push_back(e);
                } while (accept(parsedet::Tok::Comma));
            } else if (t.text == "assert") {
                lex_.next();
                AssertionSrc a;
                a.line = t.line;
                a.spec = parse_proc(prog);
                expect(parsedet::Tok::RefinedBy, "expected [=");
                expect(parsedet::Tok::LBracket, "expected [MODEL]");
                auto mid = expect_ident();
                auto model = model_from_name(mid.text);
                if (!model) fail("unknown model tag '" + mid.text + "'", mid);
                a.model = *model;
                expect(parsedet::Tok::RBracket, "expected ] after model tag");
                a.impl = parse_proc(prog);
                prog.asserts.push_back(a);
            } else {
                auto name = lex_.next();
                expect(parsedet::Tok::Equals, "expected = in definition");
                TermId body = parse_proc(prog);
                int32_t ix = ctx_.name_ix(name.text);
                if (prog.defs.count(ix))
                    fail("duplicate definition of " + name.text, name);
                prog.defs[ix] = body;
                def_names_.insert(name.text);
            }
        }
        check_bound(prog);
        if (prog.alphabet.empty() && !(prog.defs.empty() && prog.asserts.empty()))
            throw ParseError("alphabet must be declared and non-empty", 1, 1);
        return prog;
    }

    /// Entry point for a single process expression (tests / API use).
    TermId parse_expr(Program& prog) {
        TermId t = parse_proc(prog);
        auto tk = lex_.peek();
        if (tk.kind != parsedet::Tok::End) fail("trailing input", tk);
        return t;
    }

private:
    using Tok = parsedet::Tok;
    using Token = parsedet::Token;

    [[noreturn]] void fail(const std::string& what, const Token& t) {
        throw ParseError(what, t.line, t.col);
    }
    bool accept(Tok k) {
        if (lex_.peek().kind == k) {
            lex_.next();
            return true;
        }
        return false;
    }
    Token expect(Tok k, const char* what) {
        auto t = lex_.peek();
        if (t.kind != k) fail(what, t);
        return lex_.next();
    }
    Token expect_ident() {
        auto t = lex_.peek();
        if (t.kind != Tok::Ident) fail("expected an identifier", t);
        return lex_.next();
    }

    EventId event_ref(Program& prog, const Token& id) {
        if (id.text == "tock") return EventTable::tock;
        if (is_reserved_event_name(id.text))
            fail("reserved event '" + id.text + "' cannot be used here", id);
        EventId e = ctx_.ev.plain(id.text);
        if (!prog.alphabet.contains(e))
            fail("event '" + id.text + "' not declared in the alphabet", id);
        return e;
    }

    SetId parse_evset(Program& prog) {
        expect(Tok::LBrace, "expected {");
        std::vector<EventId> evs;
        if (!accept(Tok::RBrace)) {
            do {
                auto id = expect_ident();
                evs.push_back(event_ref(prog, id));
            } while (accept(Tok::Comma));
            expect(Tok::RBrace, "expected }");
        }
        return ctx_.set(evs);
    }

    // precedence: prefix > hide/rename > parallel > interrupt/throw
    //             > sliding > ext > int > seq; binary ops right-associative
    TermId parse_proc(Program& prog) { return parse_seq(prog); }

    TermId parse_seq(Program& prog) {
        TermId lhs = parse_int(prog);
        if (accept(Tok::Semi)) return ctx_.seq(lhs, parse_seq(prog));
        return lhs;
    }
    TermId parse_int(Program& prog) {
        TermId lhs = parse_ext(prog);
        if (accept(Tok::IntChoice)) return ctx_.int_choice(lhs, parse_int(prog));
        return lhs;
    }
    TermId parse_ext(Program& prog) {
        TermId lhs = parse_sliding(prog);
        if (accept(Tok::ExtChoice)) return ctx_.ext_choice(lhs, parse_ext(prog));
        return lhs;
    }
    TermId parse_sliding(Program& prog) {
        TermId lhs = parse_interrupt(prog);
        if (accept(Tok::SlideTo)) return ctx_.sliding(lhs, parse_sliding(prog));
        return lhs;
    }
    TermId parse_interrupt(Program& prog) {
        TermId lhs = parse_parallel(prog);
        if (accept(Tok::Interrupt))
            return ctx_.interrupt(lhs, parse_interrupt(prog));
        auto t = lex_.peek();
        if (t.kind == Tok::Ident && t.text == "THROW") {
            lex_.next();
            expect(Tok::LParen, "expected ( after THROW");
            SetId s = parse_evset(prog);
            expect(Tok::RParen, "expected )");
            return ctx_.throw_op(lhs, s, parse_interrupt(prog));
        }
        return lhs;
    }
    TermId parse_parallel(Program& prog) {
        TermId lhs = parse_postfix(prog);
        if (accept(Tok::ParOpen)) {
            SetId s = parse_evset(prog);
            expect(Tok::ParClose, "expected |]");
            return ctx_.parallel(lhs, s, parse_parallel(prog));
        }
        return lhs;
    }
    TermId parse_postfix(Program& prog) {
        TermId t = parse_prefix(prog);
        while (true) {
            if (accept(Tok::Backslash)) {
                t = ctx_.hide(t, parse_evset(prog));
            } else if (accept(Tok::RenOpen)) {
                RenameRel rel;
                rel.identity_rest = true;
                do {
                    auto from = expect_ident();
                    expect(Tok::MapsTo, "expected <- in renaming");
                    auto to = expect_ident();
                    rel.pairs.push_back(
                        {event_ref(prog, from), event_ref(prog, to)});
                } while (accept(Tok::Comma));
                expect(Tok::RenClose, "expected ]]");
                t = ctx_.rename(t, ctx_.rename_rel(rel));
            } else {
                return t;
            }
        }
    }
    TermId parse_prefix(Program& prog) {
        auto t = lex_.peek();
        if (t.kind == Tok::Ident && !is_keyword(t.text)) {
            // lookahead for `ident -> ...`
            parsedet::Lexer save = lex_;
            auto id = lex_.next();
            if (accept(Tok::Arrow)) {
                EventId e = event_ref(prog, id);
                return ctx_.prefix(e, parse_prefix(prog));
            }
            lex_ = save;
        }
        return parse_atom(prog);
    }

    static bool is_keyword(const std::string& s) {
        return s == "STOP" || s == "DIV" || s == "SKIP" || s == "CHAOS" ||
               s == "RUN" || s == "WAIT" || s == "rec" || s == "THROW" ||
               s == "TCHAOS" || s == "TENABLE" || s == "LABS" ||
               s == "alphabet" || s == "assert";
    }

    TermId parse_atom(Program& prog) {
        auto t = lex_.peek();
        if (accept(Tok::LParen)) {
            TermId inner = parse_proc(prog);
            expect(Tok::RParen, "expected )");
            return inner;
        }
        if (t.kind != Tok::Ident) fail("expected a process", t);
        lex_.next();
        if (t.text == "STOP") return ctx_.stop();
        if (t.text == "DIV") return ctx_.div();
        if (t.text == "SKIP") return ctx_.skip();
        if (t.text == "CHAOS") {
            expect(Tok::LParen, "expected (");
            SetId s = parse_evset(prog);
            expect(Tok::RParen, "expected )");
            return ctx_.chaos(s);
        }
        if (t.text == "RUN") {
            expect(Tok::LParen, "expected (");
            SetId s = parse_evset(prog);
            expect(Tok::RParen, "expected )");
            return ctx_.run(s);
        }
        if (t.text == "WAIT") {
            expect(Tok::LParen, "expected (");
            auto n = expect(Tok::Int, "expected a non-negative integer");
            expect(Tok::RParen, "expected )");
            return ctx_.wait(int32_t(std::stol(n.text)));
        }
        if (t.text == "TCHAOS") {
            expect(Tok::LParen, "expected (");
            SetId s = parse_evset(prog);
            expect(Tok::RParen, "expected )");
            return tchaos(ctx_, ctx_.set_events(s));
        }
        if (t.text == "TENABLE") {
            expect(Tok::LParen, "expected (");
            SetId e = parse_evset(prog);
            expect(Tok::Comma, "expected ,");
            SetId r = parse_evset(prog);
            expect(Tok::Comma, "expected ,");
            auto n = expect(Tok::Int, "expected the deadline");
            expect(Tok::RParen, "expected )");
            return timed_enable(ctx_, ctx_.set_events(e), ctx_.set_events(r),
                                int32_t(std::stol(n.text)));
        }
        if (t.text == "LABS") {
            expect(Tok::LParen, "expected (");
            SetId a = parse_evset(prog);
            expect(Tok::Comma, "expected ,");
            TermId p = parse_proc(prog);
            expect(Tok::RParen, "expected )");
            return lazy_abstract(ctx_, p, ctx_.set_events(a), prog.alphabet);
        }
        if (t.text == "rec") {
            auto name = expect_ident();
            expect(Tok::Dot, "expected . after rec binder");
            std::string bound = name.text;
            if (binders_.count(bound) || def_names_.count(bound)) {
                int k = 0;
                while (binders_.count(bound) || def_names_.count(bound))
                    bound = name.text + "_" + std::to_string(k++);
            }
            binders_.insert(bound);
            alias_.push_back({name.text, bound});
            TermId body = parse_proc(prog);
            alias_.pop_back();
            binders_.erase(bound);
            return ctx_.rec(bound, body);
        }
        // plain identifier: a rec-bound name or a top-level reference
        std::string name = t.text;
        for (auto it = alias_.rbegin(); it != alias_.rend(); ++it)
            if (it->first == name) return ctx_.var(it->second);
        used_vars_.push_back({name, t.line, t.col});
        return ctx_.var(name);
    }

    void check_bound(const Program& prog) {
        // rec-bound names were resolved through the alias stack; everything
        // recorded here must be a top-level definition
        for (const auto& [name, line, col] : used_vars_)
            if (!prog.defs.count(ctx_.name_ix(name)))
                throw ParseError("unbound identifier '" + name + "'", line, col);
    }

    Ctx& ctx_;
    parsedet::Lexer lex_;
    std::set<std::string> binders_;
    std::set<std::string> def_names_;
    std::vector<std::pair<std::string, std::string>> alias_;
    std::vector<std::tuple<std::string, int, int>> used_vars_;
};

inline Program parse_program(Ctx& ctx, const std::string& src) {
    Parser p(ctx, src);
    return p.parse_program();
}

/// Parses one process expression against an existing program environment.
inline TermId parse_expr(Ctx& ctx, Program& prog, const std::string& src) {
    Parser p(ctx, src);
    return p.parse_expr(prog);
}

} // namespace csp

#endif
