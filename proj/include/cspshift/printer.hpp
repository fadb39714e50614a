#ifndef CSPSHIFT_PRINTER_HPP
#define CSPSHIFT_PRINTER_HPP

#include <string>

#include "process.hpp"

namespace csp {

/// Re-parseable rendering of a core-grammar term.  Machine nodes and terms
/// with internal (quote-prefixed) binder names print for debugging only.
inline std::string pretty_print(const Ctx& ctx, TermId t);

namespace printdet {

// binding strength, matching the parser: higher binds tighter
inline int level(Op op) {
    switch (op) {
    case Op::Seq: return 0;
    case Op::IntChoice: return 1;
    case Op::ExtChoice: return 2;
    case Op::Sliding: return 3;
    case Op::Interrupt:
    case Op::Throw: return 4;
    case Op::Parallel: return 5;
    case Op::Hide:
    case Op::Rename: return 6;
    case Op::Prefix: return 7;
    default: return 8;
    }
}

inline std::string set_text(const Ctx& ctx, SetId s) {
    std::string out = "{";
    bool first = true;
    for (EventId e : ctx.set_events(s)) {
        if (!first) out += ", ";
        out += ctx.ev.name(e);
        first = false;
    }
    return out + "}";
}

inline std::string print(const Ctx& ctx, TermId t, int min_level) {
    const Node& n = ctx.node(t);
    std::string body;
    switch (n.op) {
    case Op::Stop: body = "STOP"; break;
    case Op::Skip: body = "SKIP"; break;
    case Op::Div: body = "DIV"; break;
    case Op::Omega: body = "OMEGA"; break;
    case Op::Chaos: body = "CHAOS(" + set_text(ctx, n.aux) + ")"; break;
    case Op::Run: body = "RUN(" + set_text(ctx, n.aux) + ")"; break;
    case Op::Wait: body = "WAIT(" + std::to_string(n.aux) + ")"; break;
    case Op::Var: body = ctx.var_name(n.aux); break;
    case Op::Machine:
        body = "<machine#" + std::to_string(n.aux) + "@" + std::to_string(n.ev) + ">";
        break;
    case Op::Prioritise:
        body = "<prioritise " + print(ctx, n.a, 8) + ">";
        break;
    case Op::Rec:
        body = "rec " + ctx.var_name(n.aux) + ". " + print(ctx, n.a, 0);
        break;
    case Op::Prefix:
        body = ctx.ev.name(n.ev) + " -> " + print(ctx, n.a, 7);
        break;
    case Op::Hide:
        body = print(ctx, n.a, 7) + " \\ " + set_text(ctx, n.aux);
        break;
    case Op::Rename: {
        const RenameRel& rel = ctx.rename_rel(n.aux);
        body = print(ctx, n.a, 7) + " [[";
        bool first = true;
        for (const auto& [from, to] : rel.pairs) {
            if (!first) body += ", ";
            body += ctx.ev.name(from) + " <- " + ctx.ev.name(to);
            first = false;
        }
        body += "]]";
        break;
    }
    case Op::Parallel:
        body = print(ctx, n.a, 6) + " [|" + set_text(ctx, n.aux) + "|] " +
               print(ctx, n.b, 5);
        break;
    case Op::Throw:
        body = print(ctx, n.a, 5) + " THROW(" + set_text(ctx, n.aux) + ") " +
               print(ctx, n.b, 4);
        break;
    case Op::Interrupt:
        body = print(ctx, n.a, 5) + " /\\ " + print(ctx, n.b, 4);
        break;
    case Op::Sliding:
        body = print(ctx, n.a, 4) + " [> " + print(ctx, n.b, 3);
        break;
    case Op::ExtChoice:
        body = print(ctx, n.a, 3) + " [] " + print(ctx, n.b, 2);
        break;
    case Op::IntChoice:
        body = print(ctx, n.a, 2) + " |~| " + print(ctx, n.b, 1);
        break;
    case Op::Seq:
        body = print(ctx, n.a, 1) + " ; " + print(ctx, n.b, 0);
        break;
    }
    // rec extends maximally to the right: parenthesise unless outermost
    int lv = n.op == Op::Rec ? 0 : level(n.op);
    if (lv < min_level) return "(" + body + ")";
    return body;
}

} // namespace printdet

inline std::string pretty_print(const Ctx& ctx, TermId t) {
    return printdet::print(ctx, t, 0);
}

} // namespace csp

#endif
