#ifndef CSPSHIFT_TIMED_HPP
#define CSPSHIFT_TIMED_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shifting.hpp"

namespace csp {

struct TockDisciplineError : std::runtime_error {
    std::vector<EventId> path;
    TockDisciplineError(const std::string& what, std::vector<EventId> p)
        : std::runtime_error(what), path(std::move(p)) {}
};

/// Maximal progress: tau and tick take precedence over tock.  Expressed as
/// an empty order with X = Sigma, so that tock (the only non-member) sits
/// below tau.
inline TermId maximal_progress(Ctx& ctx, TermId p, const Alphabet& sigma) {
    PriorityOrder ord;
    ord.x_set = sigma.events;
    validate_priority(ord, sigma.events);
    return ctx.prioritise(p, ctx.prio(ord));
}

namespace timeddet {

/// Shortest path of visible labels from the root to `target` (taus kept).
inline std::vector<EventId> path_to(const Ctx& ctx, const Lts& lts, uint32_t target) {
    std::vector<int64_t> pred(lts.num_states(), -1);
    std::vector<EventId> via(lts.num_states(), -1);
    std::deque<uint32_t> q{lts.root};
    std::vector<uint8_t> seen(lts.num_states(), 0);
    seen[lts.root] = 1;
    while (!q.empty()) {
        uint32_t s = q.front();
        q.pop_front();
        if (s == target) break;
        auto [b, e] = lts.out(s);
        for (auto i = b; i != e; ++i)
            if (!seen[i->second]) {
                seen[i->second] = 1;
                pred[i->second] = s;
                via[i->second] = i->first;
                q.push_back(i->second);
            }
    }
    std::vector<EventId> path;
    for (uint32_t s = target; pred[s] >= 0; s = uint32_t(pred[s]))
        path.push_back(via[s]);
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace timeddet

/// Checks the tock discipline on the explored graph: every stable state has
/// a tock transition and no unstable state has one.
inline void check_tock_discipline(const Ctx& ctx, const Lts& lts) {
    for (uint32_t s = 0; s < lts.num_states(); ++s) {
        bool has_tock = false;
        auto [b, e] = lts.out(s);
        for (auto i = b; i != e; ++i)
            if (i->first == EventTable::tock) has_tock = true;
        if (lts.stable[s] && !has_tock)
            throw TockDisciplineError("StableStateWithoutTock",
                                      timeddet::path_to(ctx, lts, s));
        if (!lts.stable[s] && has_tock)
            throw TockDisciplineError("TockInUnstableState",
                                      timeddet::path_to(ctx, lts, s));
    }
}

/// CS_TF: refusal ciphers under a' < a with maximal progress conventions,
/// regulated so that a plain event never follows a refusal flag; tock closes
/// each refusal burst.
inline TermId shift_TF(Ctx& ctx, TermId p, const Alphabet& sigma) {
    shiftdet::require_plain(ctx, sigma);
    if (sigma.contains(EventTable::tock))
        throw ShiftError("sigma must not contain tock; it is implicit");
    TermId c = shiftdet::refusal_layer(ctx, p, sigma, false);
    MachineDef reg;
    reg.states.resize(2);
    reg.states[0].push_back({EventTable::tock, 0});
    for (EventId e : sigma.events) reg.states[0].push_back({e, 0});
    for (EventId e : shiftdet::primes(ctx, sigma)) {
        reg.states[0].push_back({e, 1});
        reg.states[1].push_back({e, 1});
    }
    reg.states[1].push_back({EventTable::tock, 0});
    TermId regp = ctx.machine_state(ctx.machine(reg), 0);
    std::vector<EventId> sync = shiftdet::cat(
        shiftdet::cat(sigma.events, shiftdet::primes(ctx, sigma)),
        {EventTable::tock});
    return ctx.parallel(c, ctx.set(sync), regp);
}

/// REGP of the refusal-testing reduction: a three-state regulator; in its
/// unstable first state it lets Sigma events pass, in the stable second
/// state any Sigma event leads to divergence and tock carries on.
inline TermId regp_process(Ctx& ctx, const Alphabet& sigma) {
    MachineDef m;
    m.states.resize(3);
    for (EventId e : sigma.events) m.states[0].push_back({e, 0});
    m.states[0].push_back({EventTable::tau, 1});
    m.states[1].push_back({EventTable::tock, 0});
    for (EventId e : sigma.events) m.states[1].push_back({e, 2});
    m.states[2].push_back({EventTable::tau, 2}); // DIV
    return ctx.machine_state(ctx.machine(m), 0);
}

/// Pi_TF: P || REGP, synchronised on the whole of Sigma and tock.  Its
/// refusal-testing semantics keeps exactly the refusals before tocks and at
/// the end, i.e. the timed failures of P.
inline TermId project_TF_to_RT(Ctx& ctx, TermId p, const Alphabet& sigma) {
    std::vector<EventId> sync = sigma.events;
    sync.push_back(EventTable::tock);
    return ctx.parallel(p, ctx.set(sync), regp_process(ctx, sigma));
}

/// TCHAOS(A) = let onestep = ([] x:A @ x -> onestep) [> WAIT(1)
///             within onestep; TCHAOS(A)
inline TermId tchaos(Ctx& ctx, const std::vector<EventId>& a) {
    std::string os = "'tchaos_step";
    std::vector<TermId> offers;
    for (EventId e : a) offers.push_back(ctx.prefix(e, ctx.var(os)));
    TermId onestep = ctx.rec(os, ctx.sliding(ctx.ext_fold(offers), ctx.wait(1)));
    std::string tc = "'tchaos";
    return ctx.rec(tc, ctx.seq(onestep, ctx.var(tc)));
}

/// LAbs(A)(P) = (P [|A|] TCHAOS(A)) \ A with tock implicitly synchronised
/// and maximal progress re-applied after hiding.
inline TermId lazy_abstract(Ctx& ctx, TermId p, const std::vector<EventId>& a,
                            const Alphabet& sigma) {
    std::vector<EventId> sync = a;
    sync.push_back(EventTable::tock);
    TermId composed = ctx.parallel(p, ctx.set(sync), tchaos(ctx, a));
    TermId hidden = ctx.hide(composed, ctx.set(a));
    Alphabet rest;
    for (EventId e : sigma.events)
        if (std::find(a.begin(), a.end(), e) == a.end()) rest.events.push_back(e);
    return maximal_progress(ctx, hidden, rest);
}

/// TEnable(E,R,m) = let Rest = diff(R,E)
///                      En = [] x:R @ x -> Dis(m)
///                      Dis(k) = if k==0 then En
///                               else ([] x:Rest @ x -> Dis(m)) [] WAIT(1);Dis(k-1)
///                  within Dis(m)
/// rendered in tock-CSP: prefix choices wait, so every state idles on tock,
/// the WAIT branch becomes the tock step down the counter, and an R event
/// resets the clock to Dis(m).
inline TermId timed_enable(Ctx& ctx, const std::vector<EventId>& enable,
                           const std::vector<EventId>& reset, int32_t m) {
    for (EventId e : enable)
        if (std::find(reset.begin(), reset.end(), e) == reset.end())
            throw ShiftError("TENABLE requires E to be a subset of R");
    static int instance = 0;
    std::string top = "'tenable" + std::to_string(instance++);
    std::string en_name = top + "_en";
    std::vector<EventId> rest;
    for (EventId e : reset)
        if (std::find(enable.begin(), enable.end(), e) == enable.end())
            rest.push_back(e);
    std::vector<TermId> en_offers;
    for (EventId e : reset) en_offers.push_back(ctx.prefix(e, ctx.var(top)));
    en_offers.push_back(ctx.prefix(EventTable::tock, ctx.var(en_name)));
    TermId dis = ctx.rec(en_name, ctx.ext_fold(en_offers)); // Dis(0) = En
    for (int32_t k = 1; k <= m; ++k) {
        std::vector<TermId> offers;
        for (EventId e : rest) offers.push_back(ctx.prefix(e, ctx.var(top)));
        offers.push_back(ctx.prefix(EventTable::tock, dis));
        dis = ctx.ext_fold(offers);
    }
    return ctx.rec(top, dis);
}

/// A stable timed offer: the given choices plus an idling tock self-loop.
/// Building block for hand-written tock-CSP specifications.
inline TermId timed_offer(Ctx& ctx,
                          const std::vector<std::pair<EventId, TermId>>& choices,
                          const std::string& self) {
    std::vector<TermId> offers;
    for (const auto& [e, cont] : choices) offers.push_back(ctx.prefix(e, cont));
    offers.push_back(ctx.prefix(EventTable::tock, ctx.var(self)));
    return ctx.rec(self, ctx.ext_fold(offers));
}

/// Bounded check of "no instantaneous withdrawal": along every path of at
/// most `depth` steps, an event accepted by every stable state between two
/// consecutive tocks must still be possible immediately after the second
/// tock.  Violations come back as warnings; user-supplied tock-CSP may
/// legitimately trip this.
inline std::vector<std::string> check_no_instantaneous_withdrawal(
    const Ctx& ctx, const Lts& lts, const Alphabet& sigma, size_t depth) {
    std::vector<std::string> warnings;
    auto closure_initials = [&](uint32_t s) {
        std::set<uint32_t> seen;
        std::vector<uint32_t> work{s};
        int32_t mask = 0;
        while (!work.empty()) {
            uint32_t x = work.back();
            work.pop_back();
            if (!seen.insert(x).second) continue;
            auto [b, e] = lts.out(x);
            for (auto i = b; i != e; ++i) {
                if (ctx.ev.role(i->first) == Role::Tau) {
                    work.push_back(i->second);
                } else {
                    int ix = sigma.index_of(i->first);
                    if (ix >= 0) mask |= 1 << ix;
                }
            }
        }
        return mask;
    };
    // held = intersection of stable-state acceptances in the current
    // inter-tock segment (full mask until a stable state is seen)
    const int32_t full = (int32_t(1) << sigma.size()) - 1;
    std::set<std::tuple<uint32_t, int32_t, size_t>> seen;
    std::vector<std::tuple<uint32_t, int32_t, size_t>> work{{lts.root, full, depth}};
    while (!work.empty()) {
        auto [s, held, budget] = work.back();
        work.pop_back();
        if (!seen.insert({s, held, budget}).second) continue;
        int32_t here = held;
        if (lts.stable[s]) {
            int32_t acc = 0;
            auto [b, e] = lts.out(s);
            for (auto i = b; i != e; ++i) {
                int ix = sigma.index_of(i->first);
                if (ix >= 0) acc |= 1 << ix;
            }
            here &= acc;
        }
        if (budget == 0) continue;
        auto [b, e] = lts.out(s);
        for (auto i = b; i != e; ++i) {
            if (i->first == EventTable::tock) {
                int32_t after = closure_initials(i->second);
                int32_t missing = here & ~after;
                if (missing) {
                    for (size_t k = 0; k < sigma.size(); ++k)
                        if (missing & (1 << k))
                            warnings.push_back(
                                "instantaneous withdrawal of " +
                                ctx.ev.name(sigma.events[k]) + " at state " +
                                std::to_string(i->second));
                    return warnings; // one witness is enough
                }
                work.push_back({i->second, full, budget - 1});
            } else {
                work.push_back({i->second, here, budget - 1});
            }
        }
    }
    return warnings;
}

} // namespace csp

#endif
