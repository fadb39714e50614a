#ifndef CSPSHIFT_SHIFTING_HPP
#define CSPSHIFT_SHIFTING_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "observations.hpp"
#include "process.hpp"

namespace csp {

struct ShiftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace shiftdet {

inline std::vector<EventId> primes(Ctx& ctx, const Alphabet& sigma) {
    std::vector<EventId> out;
    for (EventId e : sigma.events) out.push_back(ctx.ev.primed(e));
    return out;
}
inline std::vector<EventId> dprimes(Ctx& ctx, const Alphabet& sigma) {
    std::vector<EventId> out;
    for (EventId e : sigma.events) out.push_back(ctx.ev.dprimed(e));
    return out;
}
inline std::vector<EventId> cat(std::vector<EventId> a,
                                const std::vector<EventId>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

/// prioritise(p ||| RUN(Sigma' [+ stab]), x' < x, Sigma): the refusal-cipher
/// layer; x' fires exactly in stable states where x is refused, stab (when
/// present) exactly in stable states.
inline TermId refusal_layer(Ctx& ctx, TermId p, const Alphabet& sigma,
                            bool with_stab) {
    std::vector<EventId> extra = primes(ctx, sigma);
    if (with_stab) extra.push_back(EventTable::stab);
    PriorityOrder ord;
    for (EventId e : sigma.events) ord.less.push_back({ctx.ev.primed(e), e});
    ord.x_set = sigma.events;
    validate_priority(ord, sigma.events);
    return ctx.prioritise(ctx.interleave(p, ctx.run(ctx.set(extra))),
                          ctx.prio(ord));
}

/// prioritise(c1 ||| RUN(Sigma''), x'' < x', Sigma): the acceptance-cipher
/// layer; x'' fires exactly in stable states where x is accepted.
inline TermId acceptance_layer(Ctx& ctx, TermId c1, const Alphabet& sigma) {
    PriorityOrder ord;
    for (EventId e : sigma.events)
        ord.less.push_back({ctx.ev.dprimed(e), ctx.ev.primed(e)});
    ord.x_set = sigma.events;
    validate_priority(ord, sigma.events);
    return ctx.prioritise(
        ctx.interleave(c1, ctx.run(ctx.set(dprimes(ctx, sigma)))), ctx.prio(ord));
}

/// omega3 of the FL construction: x'' < y'' whenever y is alphabetically
/// before x, and done below every x''.
inline PriorityOrder omega3(Ctx& ctx, const Alphabet& sigma) {
    PriorityOrder ord;
    for (size_t i = 0; i < sigma.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            ord.less.push_back(
                {ctx.ev.dprimed(sigma.events[i]), ctx.ev.dprimed(sigma.events[j])});
    for (EventId e : sigma.events)
        ord.less.push_back({EventTable::done, ctx.ev.dprimed(e)});
    ord.x_set = sigma.events;
    return ord;
}

/// Acceptance walker: loops on plain events until a record for the first
/// alphabet member starts a burst, then demands one record (primed or
/// double-primed) per member in order, closes with done.  `repeat` selects
/// whether the walker survives the burst (one plain step, then again) or
/// dead-ends, giving the FL and the end-of-trace acceptances variant.
inline TermId acceptance_walker(Ctx& ctx, const Alphabet& sigma, bool repeat) {
    const size_t k = sigma.size();
    MachineDef m;
    // state 0: unstable; 1..k: position after recording i members;
    // k+1: after done; dead variant stops at k+1
    m.states.resize(k + 3);
    const int32_t unstable = 0, after = int32_t(k) + 1, dead = int32_t(k) + 2;
    for (EventId e : sigma.events) m.states[unstable].push_back({e, unstable});
    m.states[unstable].push_back({ctx.ev.primed(sigma.events[0]), 1});
    m.states[unstable].push_back({ctx.ev.dprimed(sigma.events[0]), 1});
    for (size_t i = 1; i < k; ++i) {
        m.states[i].push_back({ctx.ev.primed(sigma.events[i]), int32_t(i) + 1});
        m.states[i].push_back({ctx.ev.dprimed(sigma.events[i]), int32_t(i) + 1});
    }
    m.states[k].push_back({EventTable::done, repeat ? after : dead});
    if (repeat)
        for (EventId e : sigma.events) m.states[after].push_back({e, unstable});
    return ctx.machine_state(ctx.machine(m), unstable);
}

/// Prevents double-primed runs not concluded by done; a bare done (the
/// empty acceptance set) passes.
inline TermId dreg(Ctx& ctx, const Alphabet& sigma) {
    MachineDef m;
    m.states.resize(2);
    for (EventId e : sigma.events) {
        m.states[0].push_back({e, 0});
        m.states[0].push_back({ctx.ev.dprimed(e), 1});
        m.states[1].push_back({ctx.ev.dprimed(e), 1});
    }
    m.states[0].push_back({EventTable::done, 0});
    m.states[1].push_back({EventTable::done, 0});
    return ctx.machine_state(ctx.machine(m), 0);
}

inline void require_plain(Ctx& ctx, const Alphabet& sigma) {
    if (sigma.empty()) throw ShiftError("empty alphabet");
    for (EventId e : sigma.events) {
        Role r = ctx.ev.role(e);
        if (r != Role::Plain && r != Role::Tock && r != Role::Term)
            throw ShiftError("alphabet mismatch: " + ctx.ev.name(e) +
                             " is not usable as a plain event");
    }
}

} // namespace shiftdet

/// Stable-failures context: refusal ciphers plus the two-state regulator
/// that stops unprimed events once a refusal (or stab) has been recorded.
inline TermId shift_F(Ctx& ctx, TermId p, const Alphabet& sigma) {
    shiftdet::require_plain(ctx, sigma);
    TermId c1 = shiftdet::refusal_layer(ctx, p, sigma, true);
    MachineDef reg;
    reg.states.resize(2);
    for (EventId e : sigma.events) reg.states[0].push_back({e, 0});
    for (EventId e : shiftdet::primes(ctx, sigma)) {
        reg.states[0].push_back({e, 1});
        reg.states[1].push_back({e, 1});
    }
    reg.states[0].push_back({EventTable::stab, 1});
    reg.states[1].push_back({EventTable::stab, 1});
    TermId regp = ctx.machine_state(ctx.machine(reg), 0);
    std::vector<EventId> sync = shiftdet::cat(
        shiftdet::cat(sigma.events, shiftdet::primes(ctx, sigma)),
        {EventTable::stab});
    return ctx.parallel(c1, ctx.set(sync), regp);
}

/// Refusal-testing context: refusal bursts, each closed by stab, may precede
/// every event; after a closed burst exactly one plain event resets the
/// regulator.
inline TermId shift_RT(Ctx& ctx, TermId p, const Alphabet& sigma) {
    shiftdet::require_plain(ctx, sigma);
    TermId c1 = shiftdet::refusal_layer(ctx, p, sigma, true);
    MachineDef reg;
    reg.states.resize(3); // 0 free, 1 in burst, 2 after stab
    for (EventId e : sigma.events) {
        reg.states[0].push_back({e, 0});
        reg.states[2].push_back({e, 0});
    }
    for (EventId e : shiftdet::primes(ctx, sigma)) {
        reg.states[0].push_back({e, 1});
        reg.states[1].push_back({e, 1});
    }
    reg.states[0].push_back({EventTable::stab, 2});
    reg.states[1].push_back({EventTable::stab, 2});
    TermId regp = ctx.machine_state(ctx.machine(reg), 0);
    std::vector<EventId> sync = shiftdet::cat(
        shiftdet::cat(sigma.events, shiftdet::primes(ctx, sigma)),
        {EventTable::stab});
    return ctx.parallel(c1, ctx.set(sync), regp);
}

/// Revivals context: one stab-closed refusal burst, then at most one further
/// plain event.
inline TermId shift_R(Ctx& ctx, TermId p, const Alphabet& sigma) {
    shiftdet::require_plain(ctx, sigma);
    TermId c1 = shiftdet::refusal_layer(ctx, p, sigma, true);
    MachineDef reg;
    reg.states.resize(4); // 0 free, 1 in burst, 2 after stab, 3 done
    for (EventId e : sigma.events) {
        reg.states[0].push_back({e, 0});
        reg.states[2].push_back({e, 3});
    }
    for (EventId e : shiftdet::primes(ctx, sigma)) {
        reg.states[0].push_back({e, 1});
        reg.states[1].push_back({e, 1});
    }
    reg.states[0].push_back({EventTable::stab, 2});
    reg.states[1].push_back({EventTable::stab, 2});
    TermId regp = ctx.machine_state(ctx.machine(reg), 0);
    std::vector<EventId> sync = shiftdet::cat(
        shiftdet::cat(sigma.events, shiftdet::primes(ctx, sigma)),
        {EventTable::stab});
    return ctx.parallel(c1, ctx.set(sync), regp);
}

namespace shiftdet {

/// Shared body of the FL and acceptances contexts: cipher layers, walker,
/// omega3 prioritisation, optional DREG, and hiding of the refusal events.
inline TermId walker_context(Ctx& ctx, TermId p, const Alphabet& sigma,
                             bool repeat_bursts, bool with_dreg) {
    require_plain(ctx, sigma);
    TermId c1 = refusal_layer(ctx, p, sigma, false);
    TermId c2 = acceptance_layer(ctx, c1, sigma);
    TermId walker = acceptance_walker(ctx, sigma, repeat_bursts);
    std::vector<EventId> sync =
        cat(cat(sigma.events, primes(ctx, sigma)), dprimes(ctx, sigma));
    TermId prod = ctx.parallel(c2, ctx.set(sync), walker);
    TermId c3 = ctx.prioritise(prod, ctx.prio(omega3(ctx, sigma)));
    TermId res = c3;
    if (with_dreg) {
        std::vector<EventId> dsync =
            cat(cat(sigma.events, dprimes(ctx, sigma)), {EventTable::done});
        res = ctx.parallel(c3, ctx.set(dsync), dreg(ctx, sigma));
    }
    return ctx.hide(res, ctx.set(primes(ctx, sigma)));
}

} // namespace shiftdet

/// Finest-model context: traces of the result are exactly the prefixes of
/// the canonical linearisation of the finite linear observations (events in
/// place, acceptance sets as alphabetical double-primed bursts closed by
/// done, bullets dropped).
inline TermId shift_FL(Ctx& ctx, TermId p, const Alphabet& sigma) {
    return shiftdet::walker_context(ctx, p, sigma, true, true);
}

/// Acceptances context: at most one complete acceptance burst, at the end of
/// the trace.
inline TermId shift_A(Ctx& ctx, TermId p, const Alphabet& sigma) {
    return shiftdet::walker_context(ctx, p, sigma, false, false);
}

/// Termination wrapper: turns every tick of p into the fresh plain event
/// term, so that termination and its refusal become part of the decorated
/// trace language (term' is the cipher for refusing tick).  The wrapped
/// process never terminates; term stays visible as the tick marker.
inline TermId shift_tick_wrap(Ctx& ctx, TermId p, const Alphabet& sigma) {
    if (sigma.contains(EventTable::term))
        throw ShiftError("term already in alphabet");
    return ctx.seq(p, ctx.prefix(EventTable::term, ctx.stop()));
}

/// Extends the alphabet with term (at the end of the declaration order).
inline Alphabet with_term(const Alphabet& sigma) {
    Alphabet out = sigma;
    out.events.push_back(EventTable::term);
    return out;
}

/// Applies the model's shifting context; `may_terminate` selects whether the
/// tick wrapper is composed first (with term joining the alphabet).
inline TermId shift_model(Ctx& ctx, Model model, TermId p, const Alphabet& sigma,
                          bool may_terminate) {
    TermId q = p;
    Alphabet sig = sigma;
    if (may_terminate) {
        q = shift_tick_wrap(ctx, p, sigma);
        sig = with_term(sigma);
    }
    switch (model) {
    case Model::T:
        return q; // traces are already traces
    case Model::F:
        return shift_F(ctx, q, sig);
    case Model::R:
        return shift_R(ctx, q, sig);
    case Model::A:
        return shift_A(ctx, q, sig);
    case Model::RT:
        return shift_RT(ctx, q, sig);
    case Model::FL:
        return shift_FL(ctx, q, sig);
    case Model::TF:
        throw ShiftError("timed failures shifting lives in the timed module");
    }
    return q;
}

/// Syntactic check for possible termination: Skip and Wait introduce ticks.
inline bool may_terminate(const Ctx& ctx, TermId p) {
    return ctx.mentions_op(p, {Op::Skip, Op::Wait});
}

} // namespace csp

#endif
