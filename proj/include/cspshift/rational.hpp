#ifndef CSPSHIFT_RATIONAL_HPP
#define CSPSHIFT_RATIONAL_HPP

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "observations.hpp"
#include "shifting.hpp"

namespace csp {

struct TransducerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Punctuation symbols of the canonical encoding.
struct PhiSyms {
    EventId langle, rangle, comma, bullet;
    static PhiSyms get(Ctx& ctx) {
        return {ctx.ev.sym("<"), ctx.ev.sym(">"), ctx.ev.sym(","), ctx.ev.sym("*")};
    }
};

/// Canonical encoding of a finite linear observation: the angle-bracket
/// rendering with acceptance sets listed as double-primed events in
/// alphabetical (declaration) order.  Injective on observations.
inline std::vector<EventId> encode_phi(Ctx& ctx, const Obs& o,
                                       const ObsAlphabet& sigma) {
    PhiSyms S = PhiSyms::get(ctx);
    std::vector<EventId> w;
    w.push_back(S.langle);
    auto slot = [&](int32_t m) {
        if (m == kBullet) {
            w.push_back(S.bullet);
        } else {
            for (size_t i = 0; i < sigma.size(); ++i)
                if (m & (1 << i)) w.push_back(ctx.ev.dprimed(sigma.events[i]));
        }
    };
    slot(o.slots[0]);
    for (size_t i = 0; i < o.events.size(); ++i) {
        w.push_back(S.comma);
        w.push_back(sigma.events[size_t(o.events[i])]);
        w.push_back(S.comma);
        slot(o.slots[i + 1]);
    }
    if (o.tick) {
        w.push_back(S.comma);
        w.push_back(EventTable::tick);
    }
    w.push_back(S.rangle);
    return w;
}

inline std::optional<Obs> decode_phi(Ctx& ctx, const std::vector<EventId>& w,
                                     const ObsAlphabet& sigma) {
    PhiSyms S = PhiSyms::get(ctx);
    Obs o;
    size_t i = 0;
    auto at_end = [&] { return i >= w.size(); };
    if (at_end() || w[i++] != S.langle) return std::nullopt;
    auto read_slot = [&]() -> std::optional<int32_t> {
        if (!at_end() && w[i] == S.bullet) {
            ++i;
            return kBullet;
        }
        int32_t m = 0;
        int last = -1;
        while (!at_end() && ctx.ev.role(w[i]) == Role::DPrimed) {
            int ix = sigma.index_of(ctx.ev.inner(w[i]));
            if (ix < 0 || ix <= last) return std::nullopt; // order violation
            m |= 1 << ix;
            last = ix;
            ++i;
        }
        return m;
    };
    auto s0 = read_slot();
    if (!s0) return std::nullopt;
    o.slots.push_back(*s0);
    while (!at_end() && w[i] == S.comma) {
        ++i;
        if (at_end()) return std::nullopt;
        if (w[i] == EventTable::tick) {
            ++i;
            o.tick = true;
            break;
        }
        int ix = sigma.index_of(w[i]);
        if (ix < 0) return std::nullopt;
        o.events.push_back(int8_t(ix));
        ++i;
        if (at_end() || w[i++] != S.comma) return std::nullopt;
        auto s = read_slot();
        if (!s) return std::nullopt;
        o.slots.push_back(*s);
    }
    if (at_end() || w[i++] != S.rangle || !at_end()) return std::nullopt;
    return o;
}

// --- NFAs and transducers ---------------------------------------------------

/// Nondeterministic finite automaton over events; tau-labelled edges act as
/// epsilon transitions.
struct Nfa {
    int32_t initial = 0;
    std::vector<int32_t> accepting;
    std::vector<std::vector<std::pair<EventId, int32_t>>> edges;

    size_t states() const { return edges.size(); }
    bool is_accepting(int32_t s) const {
        return std::binary_search(accepting.begin(), accepting.end(), s);
    }
    void sort_accepting() { std::sort(accepting.begin(), accepting.end()); }
};

/// A process whose traces' prefix closure equals pref(L(A)): states that
/// cannot reach acceptance are trimmed so that every path extends to an
/// accepted word; the empty language maps to STOP (pref of nothing is the
/// singleton empty trace, which every process has).
inline TermId nfa_as_process(Ctx& ctx, const Nfa& a) {
    const size_t n = a.states();
    std::vector<uint8_t> co(n, 0);
    for (int32_t s : a.accepting)
        if (size_t(s) < n) co[size_t(s)] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t s = 0; s < n; ++s) {
            if (co[s]) continue;
            for (const auto& [e, t] : a.edges[s])
                if (co[size_t(t)]) {
                    co[s] = 1;
                    changed = true;
                    break;
                }
        }
    }
    if (n == 0 || !co[size_t(a.initial)]) return ctx.stop();
    MachineDef m;
    m.states.resize(n);
    for (size_t s = 0; s < n; ++s) {
        if (!co[s]) continue;
        for (const auto& [e, t] : a.edges[s])
            if (co[size_t(t)]) m.states[s].push_back({e, t});
    }
    return ctx.machine_state(ctx.machine(m), a.initial);
}

/// Transducer recognising a relation between the canonical encoding (left
/// tape, over Sigma, Sigma'' and the punctuation symbols) and a model's
/// output words (right tape).
struct Transducer {
    int32_t initial = 0;
    std::vector<int32_t> accepting; // sorted
    // side: 0 = left, 1 = right
    std::vector<std::vector<std::tuple<uint8_t, EventId, int32_t>>> edges;
    std::vector<EventId> left_symbols;  // declared alphabets, for the file format
    std::vector<EventId> right_symbols;

    size_t states() const { return edges.size(); }
    bool is_accepting(int32_t s) const {
        return std::binary_search(accepting.begin(), accepting.end(), s);
    }
};

/// Decides whether the transducer relates the exact left word to the exact
/// right word (some interleaving accepted), by BFS over (state, i, j).
inline bool transducer_relates(const Transducer& a, const std::vector<EventId>& l,
                               const std::vector<EventId>& r) {
    std::set<std::tuple<int32_t, size_t, size_t>> seen;
    std::vector<std::tuple<int32_t, size_t, size_t>> work{{a.initial, 0, 0}};
    while (!work.empty()) {
        auto [s, i, j] = work.back();
        work.pop_back();
        if (!seen.insert({s, i, j}).second) continue;
        if (i == l.size() && j == r.size() && a.is_accepting(s)) return true;
        for (const auto& [side, e, t] : a.edges[size_t(s)]) {
            if (side == 0 && i < l.size() && l[i] == e)
                work.push_back({t, i + 1, j});
            if (side == 1 && j < r.size() && r[j] == e)
                work.push_back({t, i, j + 1});
        }
    }
    return false;
}

/// All right words of length <= maxlen related to the exact left word.
inline std::set<std::vector<EventId>> transducer_outputs(
    const Transducer& a, const std::vector<EventId>& l, size_t maxlen) {
    std::set<std::vector<EventId>> out;
    // reachable (state, i) sets per right word, BFS over right words
    using Conf = std::set<std::pair<int32_t, size_t>>;
    auto closure_left = [&](Conf c) {
        std::vector<std::pair<int32_t, size_t>> work(c.begin(), c.end());
        while (!work.empty()) {
            auto [s, i] = work.back();
            work.pop_back();
            for (const auto& [side, e, t] : a.edges[size_t(s)])
                if (side == 0 && i < l.size() && l[i] == e)
                    if (c.insert({t, i + 1}).second) work.push_back({t, i + 1});
        }
        return c;
    };
    std::map<std::vector<EventId>, Conf> frontier;
    frontier[{}] = closure_left({{a.initial, 0}});
    for (size_t len = 0; len <= maxlen; ++len) {
        std::map<std::vector<EventId>, Conf> next;
        for (const auto& [w, conf] : frontier) {
            for (const auto& [s, i] : conf)
                if (i == l.size() && a.is_accepting(s)) {
                    out.insert(w);
                    break;
                }
            if (w.size() == maxlen) continue;
            std::map<EventId, Conf> step;
            for (const auto& [s, i] : conf)
                for (const auto& [side, e, t] : a.edges[size_t(s)])
                    if (side == 1) step[e].insert({t, i});
            for (auto& [e, c] : step) {
                std::vector<EventId> w2 = w;
                w2.push_back(e);
                Conf merged = closure_left(std::move(c));
                auto& slot = next[w2];
                slot.insert(merged.begin(), merged.end());
            }
        }
        if (next.empty()) break;
        frontier = std::move(next);
    }
    return out;
}

// --- phi-to-pi conversion ---------------------------------------------------

namespace ratdet {

/// Rewrites a canonical-encoding transducer into an NFA over the trace
/// language actually produced by the FL shifting context (left tape:
/// plain events, double-primed events, done), with the punctuation of the
/// encoding consumed by internal moves.  Right edges pass through.
inline Nfa convert_phi_to_pi(Ctx& ctx, const Transducer& a,
                             const ObsAlphabet& sigma) {
    PhiSyms S = PhiSyms::get(ctx);
    enum Mode : uint8_t { Init, AfterEvent, AfterSlot, InSet, Closed };
    struct Key {
        int32_t q;
        uint8_t mode;
        std::vector<EventId> pending; // left symbols still to consume
        bool operator<(const Key& o) const {
            if (q != o.q) return q < o.q;
            if (mode != o.mode) return mode < o.mode;
            return pending < o.pending;
        }
    };
    Nfa out;
    std::map<Key, int32_t> ix;
    std::vector<Key> todo;
    auto state_of = [&](Key k) {
        auto it = ix.find(k);
        if (it != ix.end()) return it->second;
        int32_t id = int32_t(out.edges.size());
        out.edges.emplace_back();
        ix.emplace(k, id);
        todo.push_back(std::move(k));
        return id;
    };
    out.initial = state_of({a.initial, Init, {}});
    while (!todo.empty()) {
        Key k = todo.back();
        todo.pop_back();
        int32_t self = ix.at(k);
        std::vector<std::pair<EventId, int32_t>> add;
        // right edges always available
        for (const auto& [side, e, t] : a.edges[size_t(k.q)])
            if (side == 1)
                add.push_back({ctx.ev.right(e), state_of({t, k.mode, k.pending})});
        if (!k.pending.empty()) {
            // consume the next pending punctuation/content symbol silently
            EventId want = k.pending.front();
            std::vector<EventId> rest(k.pending.begin() + 1, k.pending.end());
            for (const auto& [side, e, t] : a.edges[size_t(k.q)])
                if (side == 0 && e == want)
                    add.push_back({EventTable::tau, state_of({t, k.mode, rest})});
            out.edges[size_t(self)] = std::move(add);
            continue;
        }
        if (k.mode == Closed) {
            out.edges[size_t(self)] = std::move(add);
            if (a.is_accepting(k.q)) out.accepting.push_back(self);
            continue;
        }
        // real pi-symbols
        for (size_t i = 0; i < sigma.size(); ++i) {
            EventId ev = sigma.events[i];
            std::vector<EventId> frag;
            if (k.mode == Init)
                frag = {S.langle, S.bullet, S.comma, ev};
            else if (k.mode == AfterEvent)
                frag = {S.comma, S.bullet, S.comma, ev};
            else
                frag = {S.comma, ev};
            add.push_back({ctx.ev.left(ev), state_of({k.q, AfterEvent, frag})});
            // acceptance records
            EventId dp = ctx.ev.dprimed(ev);
            std::vector<EventId> dfrag;
            if (k.mode == Init)
                dfrag = {S.langle, dp};
            else if (k.mode == AfterEvent)
                dfrag = {S.comma, dp};
            else if (k.mode == InSet)
                dfrag = {dp};
            else
                continue; // AfterSlot: two adjacent slots never happen
            add.push_back({ctx.ev.left(dp), state_of({k.q, InSet, dfrag})});
        }
        // done closes the current (possibly empty) acceptance listing
        if (k.mode == Init || k.mode == AfterEvent || k.mode == InSet) {
            std::vector<EventId> frag;
            if (k.mode == Init)
                frag = {S.langle};
            else if (k.mode == AfterEvent)
                frag = {S.comma};
            add.push_back({ctx.ev.left(EventTable::done),
                           state_of({k.q, AfterSlot, frag})});
        }
        // nondeterministic end of the observation
        if (k.mode != InSet) {
            std::vector<EventId> frag;
            if (k.mode == Init)
                frag = {S.langle, S.bullet, S.rangle};
            else if (k.mode == AfterEvent)
                frag = {S.comma, S.bullet, S.rangle};
            else
                frag = {S.rangle};
            add.push_back({EventTable::tau, state_of({k.q, Closed, frag})});
        }
        out.edges[size_t(self)] = std::move(add);
    }
    out.sort_accepting();
    return out;
}

} // namespace ratdet

/// Generic model-shifting context of a rational model: the FL context
/// renamed onto the left tape, composed with the transducer process, left
/// tape hidden, right tags stripped.  Trace refinement of the results
/// decides refinement in the supplied model.
inline TermId shift_rational(Ctx& ctx, TermId p, const Transducer& a,
                             const Alphabet& sigma) {
    ObsAlphabet oa(sigma.events);
    TermId fl = shift_FL(ctx, p, sigma);
    RenameRel to_left;
    std::vector<EventId> fl_visible = sigma.events;
    for (EventId e : sigma.events) fl_visible.push_back(ctx.ev.dprimed(e));
    fl_visible.push_back(EventTable::done);
    for (EventId e : fl_visible) to_left.pairs.push_back({e, ctx.ev.left(e)});
    TermId c1 = ctx.rename(fl, ctx.rename_rel(to_left));

    Nfa pi_nfa = ratdet::convert_phi_to_pi(ctx, a, oa);
    TermId pa = nfa_as_process(ctx, pi_nfa);

    std::vector<EventId> left_all;
    for (EventId e : fl_visible) left_all.push_back(ctx.ev.left(e));
    TermId composed = ctx.parallel(c1, ctx.set(left_all), pa);
    TermId hidden = ctx.hide(composed, ctx.set(left_all));

    RenameRel strip;
    strip.identity_rest = false;
    std::set<EventId> rights;
    for (const auto& st : pi_nfa.edges)
        for (const auto& [e, t] : st)
            if (ctx.ev.role(e) == Role::Right) rights.insert(e);
    for (EventId e : rights) strip.pairs.push_back({e, ctx.ev.inner(e)});
    if (rights.empty()) return hidden;
    return ctx.rename(hidden, ctx.rename_rel(strip));
}

// --- builtin transducers ----------------------------------------------------

/// Transducer for the traces model: the right tape is the plain-event
/// subsequence of the canonical encoding.
inline Transducer make_trace_transducer(Ctx& ctx, const ObsAlphabet& sigma) {
    PhiSyms S = PhiSyms::get(ctx);
    Transducer a;
    a.edges.resize(sigma.size() + 1);
    a.initial = 0;
    a.accepting = {0};
    for (EventId punct : {S.langle, S.rangle, S.comma, S.bullet})
        a.edges[0].push_back({0, punct, 0});
    for (EventId e : sigma.events)
        a.edges[0].push_back({0, ctx.ev.dprimed(e), 0});
    for (size_t i = 0; i < sigma.size(); ++i) {
        EventId e = sigma.events[i];
        a.edges[0].push_back({0, e, int32_t(i) + 1});
        a.edges[i + 1].push_back({1, e, 0});
    }
    a.left_symbols = {S.langle, S.rangle, S.comma, S.bullet};
    for (EventId e : sigma.events) {
        a.left_symbols.push_back(e);
        a.left_symbols.push_back(ctx.ev.dprimed(e));
    }
    a.right_symbols = sigma.events;
    return a;
}

/// Transducer for the stable failures model: outputs the trace, then for an
/// observed terminal acceptance an alphabetical listing of refused events as
/// primed symbols closed by '>'; a bullet terminal outputs nothing more.
inline Transducer make_failures_transducer(Ctx& ctx, const ObsAlphabet& sigma) {
    PhiSyms S = PhiSyms::get(ctx);
    const size_t k = sigma.size();
    Transducer a;
    // states:
    //   0                  start (expect '<')
    //   1                  at slot, nonterminal-or-terminal-bullet handling
    //   2                  skipping a nonterminal listing
    //   3                  after slot, expect ',' then event
    //   4..4+k-1           copy event i (emit right)
    //   B = 4+k            saw terminal bullet, expect '>'
    //   W0..Wk             terminal walk, position p = next alphabet index
    //   WR0..WRk           like W but the left listing is exhausted ('>' seen)
    //   ACC                accepting
    const int32_t slot = 1, skip = 2, post = 3, copy0 = 4;
    const int32_t bull = copy0 + int32_t(k);
    const int32_t after_copy = bull + 1;
    const int32_t w0 = after_copy + 1;
    const int32_t wr0 = w0 + int32_t(k) + 1;
    const int32_t acc = wr0 + int32_t(k) + 1;
    a.edges.resize(size_t(acc) + 1);
    a.initial = 0;
    a.accepting = {acc};
    a.edges[0].push_back({0, S.langle, slot});
    // nonterminal slot: bullet or listing, then ',' event ',' and back to slot
    a.edges[slot].push_back({0, S.bullet, skip});
    for (EventId e : sigma.events) {
        a.edges[slot].push_back({0, ctx.ev.dprimed(e), skip});
        a.edges[skip].push_back({0, ctx.ev.dprimed(e), skip});
    }
    a.edges[slot].push_back({0, S.comma, post});    // empty listing
    a.edges[skip].push_back({0, S.comma, post});
    for (size_t i = 0; i < k; ++i) {
        a.edges[post].push_back({0, sigma.events[i], copy0 + int32_t(i)});
        a.edges[size_t(copy0) + i].push_back({1, sigma.events[i], after_copy});
    }
    a.edges[size_t(after_copy)].push_back({0, S.comma, slot});
    // unobserved terminal refusal: just the trace, whatever the slot held
    a.edges[slot].push_back({0, S.bullet, bull});
    a.edges[size_t(bull)].push_back({0, S.rangle, acc});
    a.edges[slot].push_back({0, S.rangle, acc});
    a.edges[skip].push_back({0, S.rangle, acc});
    // terminal listing: walk alphabet positions, interleaving left members
    // (accepted events) with right primes (refused events); '>' on the left
    // closes the listing, '>' on the right closes the refusal word
    a.edges[slot].push_back({0, S.rangle, wr0}); // empty terminal listing
    for (size_t p = 0; p <= k; ++p) {
        int32_t wp = w0 + int32_t(p);
        int32_t wrp = wr0 + int32_t(p);
        // close the left listing at any point
        a.edges[size_t(wp)].push_back({0, S.rangle, wrp});
        // emit '>' on the right tape at the end of the refusal listing
        a.edges[size_t(wrp)].push_back({1, S.rangle, acc});
        for (size_t j = p; j < k; ++j) {
            // left member at position j: accepted, not refusable
            a.edges[size_t(wp)].push_back(
                {0, ctx.ev.dprimed(sigma.events[j]), w0 + int32_t(j) + 1});
            // right prime at position j: refused
            a.edges[size_t(wp)].push_back(
                {1, ctx.ev.primed(sigma.events[j]), w0 + int32_t(j) + 1});
            a.edges[size_t(wrp)].push_back(
                {1, ctx.ev.primed(sigma.events[j]), wr0 + int32_t(j) + 1});
        }
    }
    // entering the terminal walk: first member or first refusal from `slot`
    for (size_t j = 0; j < k; ++j) {
        a.edges[slot].push_back(
            {0, ctx.ev.dprimed(sigma.events[j]), w0 + int32_t(j) + 1});
        a.edges[slot].push_back(
            {1, ctx.ev.primed(sigma.events[j]), w0 + int32_t(j) + 1});
    }
    a.left_symbols = {S.langle, S.rangle, S.comma, S.bullet};
    for (EventId e : sigma.events) {
        a.left_symbols.push_back(e);
        a.left_symbols.push_back(ctx.ev.dprimed(e));
    }
    a.right_symbols = sigma.events;
    for (EventId e : sigma.events) a.right_symbols.push_back(ctx.ev.primed(e));
    a.right_symbols.push_back(S.rangle);
    std::sort(a.accepting.begin(), a.accepting.end());
    return a;
}

/// Identity transducer on the canonical encoding: the model is FL itself.
inline Transducer make_identity_transducer(Ctx& ctx, const ObsAlphabet& sigma) {
    PhiSyms S = PhiSyms::get(ctx);
    Transducer a;
    std::vector<EventId> xs = {S.langle, S.rangle, S.comma, S.bullet};
    for (EventId e : sigma.events) {
        xs.push_back(e);
        xs.push_back(ctx.ev.dprimed(e));
    }
    a.edges.resize(xs.size() + 1);
    a.initial = 0;
    a.accepting = {0};
    for (size_t i = 0; i < xs.size(); ++i) {
        a.edges[0].push_back({0, xs[i], int32_t(i) + 1});
        a.edges[i + 1].push_back({1, xs[i], 0});
    }
    a.left_symbols = xs;
    a.right_symbols = xs;
    return a;
}

// --- transducer text format -------------------------------------------------

inline std::string transducer_symbol_name(const Ctx& ctx, EventId e) {
    switch (ctx.ev.role(e)) {
    case Role::Sym:
        return ctx.ev.name(e);
    default:
        return ctx.ev.name(e);
    }
}

inline EventId parse_transducer_symbol(Ctx& ctx, const std::string& s) {
    if (s == "<" || s == ">" || s == "," || s == "*") return ctx.ev.sym(s);
    if (s == "done") return EventTable::done;
    if (s == "stab") return EventTable::stab;
    if (s == "tock") return EventTable::tock;
    if (s == "term") return EventTable::term;
    if (s == "tick") return EventTable::tick;
    if (s.size() > 2 && s.substr(s.size() - 2) == "''")
        return ctx.ev.dprimed(ctx.ev.plain(s.substr(0, s.size() - 2)));
    if (s.size() > 1 && s.back() == '\'')
        return ctx.ev.primed(ctx.ev.plain(s.substr(0, s.size() - 1)));
    return ctx.ev.plain(s);
}

inline void write_transducer(const Ctx& ctx, const Transducer& a,
                             std::ostream& os) {
    os << "left:";
    for (EventId e : a.left_symbols) os << " " << transducer_symbol_name(ctx, e);
    os << "\nright:";
    for (EventId e : a.right_symbols) os << " " << transducer_symbol_name(ctx, e);
    os << "\ninitial: " << a.initial << "\naccepting:";
    for (int32_t s : a.accepting) os << " " << s;
    os << "\n";
    for (size_t s = 0; s < a.states(); ++s)
        for (const auto& [side, e, t] : a.edges[s])
            os << s << " " << (side == 0 ? "l." : "r.")
               << transducer_symbol_name(ctx, e) << " " << t << "\n";
}

inline Transducer parse_transducer(Ctx& ctx, std::istream& is) {
    Transducer a;
    std::string line;
    int32_t max_state = -1;
    std::vector<std::tuple<int32_t, uint8_t, EventId, int32_t>> edges;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        if (head == "left:" || head == "right:") {
            std::string sym;
            while (ls >> sym) {
                EventId e = parse_transducer_symbol(ctx, sym);
                (head == "left:" ? a.left_symbols : a.right_symbols).push_back(e);
            }
        } else if (head == "initial:") {
            ls >> a.initial;
            max_state = std::max(max_state, a.initial);
        } else if (head == "accepting:") {
            int32_t s;
            while (ls >> s) {
                a.accepting.push_back(s);
                max_state = std::max(max_state, s);
            }
        } else {
            int32_t src = std::stoi(head);
            std::string lbl;
            int32_t dst;
            if (!(ls >> lbl >> dst))
                throw TransducerError("malformed transducer line: " + line);
            if (lbl.size() < 3 || lbl[1] != '.' || (lbl[0] != 'l' && lbl[0] != 'r'))
                throw TransducerError("transducer labels need l./r. prefixes: " +
                                      lbl);
            EventId e = parse_transducer_symbol(ctx, lbl.substr(2));
            edges.push_back({src, lbl[0] == 'l' ? 0 : 1, e, dst});
            max_state = std::max({max_state, src, dst});
        }
    }
    a.edges.resize(size_t(max_state) + 1);
    for (const auto& [src, side, e, dst] : edges)
        a.edges[size_t(src)].push_back({side, e, dst});
    std::sort(a.accepting.begin(), a.accepting.end());
    return a;
}

// --- bounded order-reflection check ----------------------------------------

/// All observations over sigma with at most `depth` events (not tied to any
/// process); used by the bounded order-reflection check.
inline std::vector<Obs> enumerate_observations(const ObsAlphabet& sigma,
                                               size_t depth) {
    std::vector<Obs> out;
    std::function<void(Obs&, size_t)> go = [&](Obs& o, size_t budget) {
        for (int32_t m = kBullet; m <= sigma.full_mask(); ++m) {
            o.slots.push_back(m);
            out.push_back(o);
            if (budget > 0) {
                for (size_t e = 0; e < sigma.size(); ++e) {
                    if (m != kBullet && !(m & (1 << e))) continue;
                    o.events.push_back(int8_t(e));
                    go(o, budget - 1);
                    o.events.pop_back();
                }
            }
            o.slots.pop_back();
        }
    };
    Obs o;
    go(o, depth);
    return out;
}

/// Bounded check that the output encoding is order-reflecting: for every
/// pair of reachable output words with w1 a proper prefix of w2, the induced
/// order must relate them (for all preimages b of w2 there is a preimage a
/// of w1 with a below b in the extension order).  Returns human-readable
/// warnings; an empty result means no violation was found up to the bound.
inline std::vector<std::string> check_order_reflection(Ctx& ctx,
                                                       const Transducer& a,
                                                       const ObsAlphabet& sigma,
                                                       size_t depth) {
    std::vector<Obs> all = enumerate_observations(sigma, depth);
    std::map<std::vector<EventId>, std::vector<Obs>> pre; // word -> preimages
    size_t maxlen = 0;
    for (const Obs& o : all) {
        auto phi = encode_phi(ctx, o, sigma);
        maxlen = std::max(maxlen, phi.size() + 4);
    }
    for (const Obs& o : all) {
        auto phi = encode_phi(ctx, o, sigma);
        for (const auto& w : transducer_outputs(a, phi, maxlen))
            pre[w].push_back(o);
    }
    std::vector<std::string> warnings;
    for (const auto& [w1, pre1] : pre) {
        for (const auto& [w2, pre2] : pre) {
            if (w1.size() >= w2.size()) continue;
            if (!std::equal(w1.begin(), w1.end(), w2.begin())) continue;
            bool ok = true;
            for (const Obs& b : pre2) {
                bool found = false;
                for (const Obs& x : pre1)
                    if (fl_leq(x, b)) {
                        found = true;
                        break;
                    }
                if (!found) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                std::string msg = "order reflection violated: output";
                for (EventId e : w1) msg += " " + ctx.ev.name(e);
                msg += " prefixes";
                for (EventId e : w2) msg += " " + ctx.ev.name(e);
                warnings.push_back(msg);
            }
        }
    }
    return warnings;
}

} // namespace csp

#endif
