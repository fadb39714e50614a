#ifndef CSPSHIFT_SEMANTICS_HPP
#define CSPSHIFT_SEMANTICS_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "process.hpp"

namespace csp {

using Defs = std::map<int32_t, TermId>; // top-level definition environment

struct SemanticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundVar : SemanticsError {
    using SemanticsError::SemanticsError;
};
struct RenameDomainIncomplete : SemanticsError {
    using SemanticsError::SemanticsError;
};
struct StateCapExceeded : SemanticsError {
    using SemanticsError::SemanticsError;
};

using Transition = std::pair<EventId, TermId>;

/// Memo for single-step transitions; configurations are hash-consed DAGs,
/// so sharing makes uncached recursion exponential.
struct TransCache {
    const Defs& defs;
    std::unordered_map<TermId, std::vector<Transition>> memo;
    size_t stored = 0;
    size_t budget;
    explicit TransCache(const Defs& d, size_t budget_ = size_t(8) << 20)
        : defs(d), budget(budget_) {}
};

inline const std::vector<Transition>& transitions(Ctx& ctx, TermId t,
                                                  TransCache& cache);

/// Single-step transitions of a closed configuration, in syntactic order.
inline std::vector<Transition> transitions(Ctx& ctx, TermId t, const Defs& defs) {
    TransCache cache(defs);
    return transitions(ctx, t, cache);
}

namespace detail {

inline void push_unique(std::vector<Transition>& out, Transition tr) {
    for (const auto& x : out)
        if (x == tr) return;
    out.push_back(tr);
}

inline std::vector<Transition> prioritise_list(Ctx& ctx,
                                               const std::vector<Transition>& ts,
                                               const PriorityOrder& ord) {
    bool tau_like = false; // tau or tick available
    for (const auto& [e, _] : ts) {
        Role r = ctx.ev.role(e);
        if (r == Role::Tau || r == Role::Tick) tau_like = true;
    }
    std::vector<Transition> out;
    for (const auto& [e, tgt] : ts) {
        Role r = ctx.ev.role(e);
        bool blocked = false;
        if (r != Role::Tau && r != Role::Tick) {
            if (tau_like && !ord.in_x(e)) blocked = true;
            if (!blocked) {
                for (const auto& [b, _] : ts) {
                    if (b != e && ord.lt(e, b)) {
                        blocked = true;
                        break;
                    }
                }
            }
        }
        if (!blocked) out.push_back({e, tgt});
    }
    return out;
}

} // namespace detail

/// Transitions of `p` filtered by the priority order; targets are wrapped
/// back into Prioritise configurations by the caller (Op::Prioritise case).
inline std::vector<Transition> prioritised_transitions(Ctx& ctx, TermId p,
                                                       const PriorityOrder& ord,
                                                       const Defs& defs) {
    return detail::prioritise_list(ctx, transitions(ctx, p, defs), ord);
}

inline const std::vector<Transition>& transitions(Ctx& ctx, TermId t,
                                                  TransCache& cache) {
    if (auto it = cache.memo.find(t); it != cache.memo.end()) return it->second;
    const Defs& defs = cache.defs;
    const Node n = ctx.node(t);
    std::vector<Transition> out;
    switch (n.op) {
    case Op::Stop:
    case Op::Omega:
        break;
    case Op::Skip:
        out.push_back({EventTable::tick, ctx.omega()});
        break;
    case Op::Div:
        out.push_back({EventTable::tau, t});
        break;
    case Op::Chaos: {
        // STOP |~| (x1 -> CHAOS(A) [] ... [] xk -> CHAOS(A))
        out.push_back({EventTable::tau, ctx.stop()});
        std::vector<TermId> offers;
        for (EventId e : ctx.set_events(n.aux)) offers.push_back(ctx.prefix(e, t));
        if (!offers.empty())
            out.push_back({EventTable::tau, ctx.ext_fold(offers)});
        break;
    }
    case Op::Prefix:
        out.push_back({n.ev, n.a});
        break;
    case Op::IntChoice:
        out.push_back({EventTable::tau, n.a});
        out.push_back({EventTable::tau, n.b});
        break;
    case Op::ExtChoice: {
        for (const auto& [e, p2] : transitions(ctx, n.a, cache)) {
            if (ctx.ev.role(e) == Role::Tau)
                detail::push_unique(out, {e, ctx.ext_choice(p2, n.b)});
            else
                detail::push_unique(out, {e, p2});
        }
        for (const auto& [e, q2] : transitions(ctx, n.b, cache)) {
            if (ctx.ev.role(e) == Role::Tau)
                detail::push_unique(out, {e, ctx.ext_choice(n.a, q2)});
            else
                detail::push_unique(out, {e, q2});
        }
        break;
    }
    case Op::Sliding: {
        for (const auto& [e, p2] : transitions(ctx, n.a, cache)) {
            if (ctx.ev.role(e) == Role::Tau)
                detail::push_unique(out, {e, ctx.sliding(p2, n.b)});
            else
                detail::push_unique(out, {e, p2});
        }
        detail::push_unique(out, {EventTable::tau, n.b});
        break;
    }
    case Op::Parallel: {
        const auto& ta = transitions(ctx, n.a, cache);
        const auto& tb = transitions(ctx, n.b, cache);
        bool a_tick = false, b_tick = false;
        for (const auto& [e, p2] : ta) {
            Role r = ctx.ev.role(e);
            if (r == Role::Tick) {
                a_tick = true;
                continue;
            }
            if (r == Role::Tau || !ctx.set_contains(n.aux, e))
                out.push_back({e, ctx.parallel(p2, n.aux, n.b)});
        }
        for (const auto& [e, q2] : tb) {
            Role r = ctx.ev.role(e);
            if (r == Role::Tick) {
                b_tick = true;
                continue;
            }
            if (r == Role::Tau || !ctx.set_contains(n.aux, e))
                out.push_back({e, ctx.parallel(n.a, n.aux, q2)});
        }
        for (const auto& [e, p2] : ta) {
            if (ctx.ev.role(e) == Role::Tau || !ctx.set_contains(n.aux, e))
                continue;
            for (const auto& [f, q2] : tb)
                if (f == e)
                    out.push_back({e, ctx.parallel(p2, n.aux, q2)});
        }
        if (a_tick && b_tick) // distributed termination
            out.push_back({EventTable::tick, ctx.omega()});
        break;
    }
    case Op::Hide: {
        for (const auto& [e, p2] : transitions(ctx, n.a, cache)) {
            EventId lbl = ctx.set_contains(n.aux, e) ? EventTable::tau : e;
            if (ctx.ev.role(e) == Role::Tick)
                detail::push_unique(out, {e, ctx.omega()});
            else
                detail::push_unique(out, {lbl, ctx.hide(p2, n.aux)});
        }
        break;
    }
    case Op::Rename: {
        const RenameRel& rel = ctx.rename_rel(n.aux);
        for (const auto& [e, p2] : transitions(ctx, n.a, cache)) {
            Role r = ctx.ev.role(e);
            if (r == Role::Tau) {
                detail::push_unique(out, {e, ctx.rename(p2, n.aux)});
                continue;
            }
            if (r == Role::Tick) {
                detail::push_unique(out, {e, ctx.omega()});
                continue;
            }
            bool in_dom = false;
            for (const auto& [from, to] : rel.pairs) {
                if (from == e) {
                    in_dom = true;
                    detail::push_unique(out, {to, ctx.rename(p2, n.aux)});
                }
            }
            if (!in_dom) {
                if (rel.identity_rest)
                    detail::push_unique(out, {e, ctx.rename(p2, n.aux)});
                else
                    throw RenameDomainIncomplete("renaming domain misses event " +
                                                 ctx.ev.name(e));
            }
        }
        break;
    }
    case Op::Seq: {
        for (const auto& [e, p2] : transitions(ctx, n.a, cache)) {
            if (ctx.ev.role(e) == Role::Tick)
                detail::push_unique(out, {EventTable::tau, n.b});
            else
                detail::push_unique(out, {e, ctx.seq(p2, n.b)});
        }
        break;
    }
    case Op::Throw: {
        for (const auto& [e, p2] : transitions(ctx, n.a, cache)) {
            if (ctx.ev.role(e) == Role::Tick)
                detail::push_unique(out, {e, ctx.omega()});
            else if (ctx.set_contains(n.aux, e))
                detail::push_unique(out, {e, n.b});
            else
                detail::push_unique(out, {e, ctx.throw_op(p2, n.aux, n.b)});
        }
        break;
    }
    case Op::Interrupt: {
        for (const auto& [e, p2] : transitions(ctx, n.a, cache)) {
            if (ctx.ev.role(e) == Role::Tick)
                detail::push_unique(out, {e, ctx.omega()});
            else
                detail::push_unique(out, {e, ctx.interrupt(p2, n.b)});
        }
        for (const auto& [e, q2] : transitions(ctx, n.b, cache)) {
            Role r = ctx.ev.role(e);
            if (r == Role::Tau)
                detail::push_unique(out, {e, ctx.interrupt(n.a, q2)});
            else if (r == Role::Tick)
                detail::push_unique(out, {e, ctx.omega()});
            else
                detail::push_unique(out, {e, q2});
        }
        break;
    }
    case Op::Run:
        for (EventId e : ctx.set_events(n.aux)) out.push_back({e, t});
        break;
    case Op::Wait:
        if (n.aux == 0)
            out.push_back({EventTable::tick, ctx.omega()});
        else
            out.push_back({EventTable::tock, ctx.wait(n.aux - 1)});
        break;
    case Op::Var: {
        auto it = defs.find(n.aux);
        if (it == defs.end())
            throw UnboundVar("unbound process identifier " + ctx.var_name(n.aux));
        out.push_back({EventTable::tau, it->second});
        break;
    }
    case Op::Rec:
        out.push_back({EventTable::tau, ctx.subst(n.a, n.aux, t)});
        break;
    case Op::Prioritise: {
        const PriorityOrder ord = ctx.prio(n.aux);
        for (const auto& [e, p2] :
             detail::prioritise_list(ctx, transitions(ctx, n.a, cache), ord)) {
            if (ctx.ev.role(e) == Role::Tick)
                out.push_back({e, ctx.omega()});
            else
                out.push_back({e, ctx.prioritise(p2, n.aux)});
        }
        break;
    }
    case Op::Machine: {
        const MachineDef& m = ctx.machine(n.aux);
        for (const auto& [e, s2] : m.states[size_t(n.ev)])
            out.push_back({e, ctx.machine_state(n.aux, s2)});
        break;
    }
    }
    cache.stored += out.size();
    if (cache.stored > cache.budget)
        throw StateCapExceeded(
            "transition budget exceeded; the process looks unbounded");
    return cache.memo.emplace(t, std::move(out)).first->second;
}

// ---------------------------------------------------------------------------

struct Lts {
    uint32_t root = 0;
    std::vector<uint32_t> first;                       // CSR offsets, size N+1
    std::vector<std::pair<EventId, uint32_t>> edges;   // label, target
    std::vector<uint8_t> stable;                       // no tau and no tick
    std::vector<TermId> config;                        // state -> configuration

    size_t num_states() const { return first.size() - 1; }
    size_t num_transitions() const { return edges.size(); }

    std::pair<const std::pair<EventId, uint32_t>*, const std::pair<EventId, uint32_t>*>
    out(uint32_t s) const {
        return {edges.data() + first[s], edges.data() + first[s + 1]};
    }
};

constexpr size_t kDefaultStateCap = 1000000;

/// Materialises the reachable state graph of a closed term by BFS with
/// hash-consed configurations; state numbering is the BFS discovery order.
inline Lts explore(Ctx& ctx, TermId root, const Defs& defs,
                   size_t cap = kDefaultStateCap) {
    Lts lts;
    TransCache cache(defs, std::max<size_t>(size_t(16) << 20, cap * 8));
    std::unordered_map<TermId, uint32_t> index;
    std::vector<TermId> order;
    std::vector<std::vector<Transition>> trans;
    std::deque<TermId> queue;
    index.emplace(root, 0);
    order.push_back(root);
    queue.push_back(root);
    while (!queue.empty()) {
        TermId s = queue.front();
        queue.pop_front();
        auto ts = transitions(ctx, s, cache);
        for (const auto& [e, tgt] : ts) {
            if (index.emplace(tgt, uint32_t(order.size())).second) {
                if (order.size() >= cap)
                    throw StateCapExceeded("state cap " + std::to_string(cap) +
                                           " exceeded during exploration");
                order.push_back(tgt);
                queue.push_back(tgt);
            }
        }
        trans.push_back(ts);
    }
    lts.root = 0;
    lts.config = order;
    lts.first.reserve(order.size() + 1);
    lts.first.push_back(0);
    lts.stable.resize(order.size(), 1);
    for (size_t i = 0; i < order.size(); ++i) {
        for (const auto& [e, tgt] : trans[i]) {
            Role r = ctx.ev.role(e);
            if (r == Role::Tau || r == Role::Tick) lts.stable[i] = 0;
            lts.edges.push_back({e, index.at(tgt)});
        }
        lts.first.push_back(uint32_t(lts.edges.size()));
    }
    return lts;
}

/// Re-embeds an explored graph as a machine-backed process; configurations
/// of further contexts built on top stay small.
inline TermId lts_as_machine(Ctx& ctx, const Lts& lts) {
    MachineDef m;
    m.states.resize(lts.num_states());
    for (uint32_t s = 0; s < lts.num_states(); ++s) {
        auto [b, e] = lts.out(s);
        for (auto i = b; i != e; ++i)
            m.states[s].push_back({i->first, int32_t(i->second)});
    }
    return ctx.machine_state(ctx.machine(std::move(m)), int32_t(lts.root));
}

inline std::vector<EventId> visible_initials(const Ctx& ctx, const Lts& lts,
                                             uint32_t s) {
    std::vector<EventId> out;
    auto [b, e] = lts.out(s);
    for (auto it = b; it != e; ++it)
        if (ctx.ev.role(it->first) != Role::Tau) {
            bool seen = false;
            for (EventId x : out) seen |= (x == it->first);
            if (!seen) out.push_back(it->first);
        }
    return out;
}

/// Dump format: header `root <id>`, a `stable:` line, then one transition
/// per line `src<TAB>label<TAB>dst`.
inline void dump_lts(const Ctx& ctx, const Lts& lts, std::ostream& os) {
    os << "root " << lts.root << "\n";
    os << "stable:";
    for (size_t i = 0; i < lts.num_states(); ++i)
        if (lts.stable[i]) os << " " << i;
    os << "\n";
    for (size_t s = 0; s < lts.num_states(); ++s) {
        auto [b, e] = lts.out(uint32_t(s));
        for (auto it = b; it != e; ++it)
            os << s << "\t" << ctx.ev.name(it->first) << "\t" << it->second << "\n";
    }
}

/// All visible-label words of length <= depth (tau followed silently); the
/// independent trace enumerator used by tests and the trace oracle.
inline std::set<std::vector<EventId>> bounded_traces(const Ctx& ctx, const Lts& lts,
                                                     size_t depth) {
    std::set<std::vector<EventId>> out;
    // memo: per (state, budget) set of suffix words
    std::map<std::pair<uint32_t, size_t>, std::set<std::vector<EventId>>> memo;
    std::function<const std::set<std::vector<EventId>>&(uint32_t, size_t)> go =
        [&](uint32_t s, size_t budget) -> const std::set<std::vector<EventId>>& {
        auto key = std::make_pair(s, budget);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        // tau closure via iterative worklist to survive tau cycles
        std::set<uint32_t> closure;
        std::vector<uint32_t> work{s};
        while (!work.empty()) {
            uint32_t x = work.back();
            work.pop_back();
            if (!closure.insert(x).second) continue;
            auto [b, e] = lts.out(x);
            for (auto i = b; i != e; ++i)
                if (ctx.ev.role(i->first) == Role::Tau) work.push_back(i->second);
        }
        std::set<std::vector<EventId>> res;
        res.insert(std::vector<EventId>{});
        if (budget > 0) {
            for (uint32_t x : closure) {
                auto [b, e] = lts.out(x);
                for (auto i = b; i != e; ++i) {
                    if (ctx.ev.role(i->first) == Role::Tau) continue;
                    for (const auto& w : go(i->second, budget - 1)) {
                        std::vector<EventId> ext{i->first};
                        ext.insert(ext.end(), w.begin(), w.end());
                        res.insert(std::move(ext));
                    }
                }
            }
        }
        return memo.emplace(key, std::move(res)).first->second;
    };
    out = go(lts.root, depth);
    return out;
}

} // namespace csp

#endif
