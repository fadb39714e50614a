// Reduced timed sliding window protocol: window 1, sequence numbers mod 2,
// two data values, a one-slot lossy/duplicating message medium driven by the
// controlled error model, a lossless one-slot ack medium, and an external
// regulator spacing errors at least K time units apart.
#ifndef CSPSHIFT_TESTS_SLIDING_WINDOW_HPP
#define CSPSHIFT_TESTS_SLIDING_WINDOW_HPP

#include <string>
#include <vector>

#include <cspshift/cspshift.hpp>

namespace sliding_window {

using namespace csp;

struct Protocol {
    std::vector<EventId> left, right; // indexed by data value
    EventId loss, dup;
    std::vector<EventId> errors;
    Alphabet external;  // left, right
    Alphabet with_errors; // left, right, loss, dup
    TermId system = -1; // errors still visible
};

inline TermId tockloop(Ctx& ctx, std::vector<TermId> offers, const std::string& n) {
    offers.push_back(ctx.prefix(EventTable::tock, ctx.var(n)));
    return ctx.rec(n, ctx.ext_fold(offers));
}

inline Protocol build(Ctx& ctx, Defs& defs, int K) {
    const int values = 2, tags = 2;
    Protocol pr;
    for (int d = 0; d < values; ++d) {
        pr.left.push_back(ctx.ev.plain("left" + std::to_string(d)));
        pr.right.push_back(ctx.ev.plain("right" + std::to_string(d)));
    }
    pr.loss = ctx.ev.plain("loss");
    pr.dup = ctx.ev.plain("dup");
    pr.errors = {pr.loss, pr.dup};
    pr.external.events = pr.left;
    for (EventId e : pr.right) pr.external.events.push_back(e);
    pr.with_errors = pr.external;
    pr.with_errors.events.push_back(pr.loss);
    pr.with_errors.events.push_back(pr.dup);

    std::vector<std::vector<EventId>> mt(tags), mr(tags);
    std::vector<EventId> at(tags), ar(tags);
    for (int t = 0; t < tags; ++t) {
        for (int d = 0; d < values; ++d) {
            mt[t].push_back(
                ctx.ev.plain("mt" + std::to_string(t) + std::to_string(d)));
            mr[t].push_back(
                ctx.ev.plain("mr" + std::to_string(t) + std::to_string(d)));
        }
        at[t] = ctx.ev.plain("at" + std::to_string(t));
        ar[t] = ctx.ev.plain("ar" + std::to_string(t));
    }

    auto N = [&](const std::string& s) { return ctx.name_ix(s); };

    // sender: window 1, round-robin resend of the unacknowledged item
    for (int t = 0; t < tags; ++t) {
        std::vector<TermId> idle;
        for (int d = 0; d < values; ++d)
            idle.push_back(ctx.prefix(
                pr.left[size_t(d)],
                ctx.var("Snd" + std::to_string(t) + std::to_string(d))));
        for (int s = 0; s < tags; ++s)
            idle.push_back(ctx.prefix(ar[size_t(s)],
                                      ctx.var("Idle" + std::to_string(t))));
        defs[N("Idle" + std::to_string(t))] =
            tockloop(ctx, idle, "'idle" + std::to_string(t));
        for (int d = 0; d < values; ++d) {
            std::string me = "Snd" + std::to_string(t) + std::to_string(d);
            std::string sent = "Sent" + std::to_string(t) + std::to_string(d);
            std::vector<TermId> send{
                ctx.prefix(mt[size_t(t)][size_t(d)], ctx.var(sent)),
                ctx.prefix(ar[size_t(t)], ctx.var("Idle" + std::to_string(1 - t))),
                ctx.prefix(ar[size_t(1 - t)], ctx.var(me))};
            defs[N(me)] = tockloop(ctx, send, "'" + me);
            // after transmitting, wait one unit before retransmitting
            std::vector<TermId> sw{
                ctx.prefix(ar[size_t(t)], ctx.var("Idle" + std::to_string(1 - t))),
                ctx.prefix(ar[size_t(1 - t)], ctx.var(sent)),
                ctx.prefix(EventTable::tock, ctx.var(me))};
            defs[N(sent)] = ctx.rec("'" + sent, ctx.ext_fold(sw));
        }
    }

    // message medium: one slot, one unit of transit time; loss drops the
    // content, dup doubles it, both only while in transit or held
    {
        std::vector<TermId> empty;
        for (int t = 0; t < tags; ++t)
            for (int d = 0; d < values; ++d)
                empty.push_back(ctx.prefix(
                    mt[size_t(t)][size_t(d)],
                    ctx.var("MedT" + std::to_string(t) + std::to_string(d))));
        defs[N("Med0")] = tockloop(ctx, empty, "'med0");
        for (int t = 0; t < tags; ++t)
            for (int d = 0; d < values; ++d) {
                std::string transit = "MedT" + std::to_string(t) + std::to_string(d);
                std::string one = "Med1" + std::to_string(t) + std::to_string(d);
                std::string two = "Med2" + std::to_string(t) + std::to_string(d);
                // in transit: arrives after the tock, may be lost or doubled
                std::vector<TermId> moving{
                    ctx.prefix(pr.loss, ctx.var("Med0")),
                    ctx.prefix(pr.dup, ctx.var(two)),
                    ctx.prefix(EventTable::tock, ctx.var(one))};
                defs[N(transit)] = ctx.rec("'" + transit, ctx.ext_fold(moving));
                std::vector<TermId> hold{
                    ctx.prefix(mr[size_t(t)][size_t(d)], ctx.var("Med0")),
                    ctx.prefix(pr.loss, ctx.var("Med0")),
                    ctx.prefix(pr.dup, ctx.var(two))};
                defs[N(one)] = tockloop(ctx, hold, "'" + one);
                std::vector<TermId> held2{
                    ctx.prefix(mr[size_t(t)][size_t(d)], ctx.var(one)),
                    ctx.prefix(pr.loss, ctx.var(one))};
                defs[N(two)] = tockloop(ctx, held2, "'" + two);
            }
    }

    // ack medium: one slot, one unit of transit time, reliable
    {
        std::vector<TermId> empty;
        for (int t = 0; t < tags; ++t)
            empty.push_back(
                ctx.prefix(at[size_t(t)], ctx.var("AckT" + std::to_string(t))));
        defs[N("Ack_")] = tockloop(ctx, empty, "'ack_");
        for (int t = 0; t < tags; ++t) {
            defs[N("AckT" + std::to_string(t))] =
                ctx.rec("'ackt" + std::to_string(t),
                        ctx.prefix(EventTable::tock,
                                   ctx.var("Ack" + std::to_string(t))));
            defs[N("Ack" + std::to_string(t))] = tockloop(
                ctx, {ctx.prefix(ar[size_t(t)], ctx.var("Ack_"))},
                "'ack" + std::to_string(t));
        }
    }

    // receiver: deliver the expected tag, acknowledge, absorb stale copies
    for (int t = 0; t < tags; ++t) {
        std::string exp = "Rcv" + std::to_string(t);
        std::vector<TermId> recv;
        for (int d = 0; d < values; ++d) {
            recv.push_back(ctx.prefix(
                mr[size_t(t)][size_t(d)],
                ctx.var("Out" + std::to_string(t) + std::to_string(d))));
            recv.push_back(ctx.prefix(mr[size_t(1 - t)][size_t(d)], ctx.var(exp)));
        }
        defs[N(exp)] = tockloop(ctx, recv, "'" + exp);
        for (int d = 0; d < values; ++d) {
            std::string out = "Out" + std::to_string(t) + std::to_string(d);
            std::string ack = "AckSnd" + std::to_string(t) + std::to_string(d);
            defs[N(out)] = tockloop(
                ctx, {ctx.prefix(pr.right[size_t(d)], ctx.var(ack))}, "'" + out);
            defs[N(ack)] = tockloop(
                ctx,
                {ctx.prefix(at[size_t(t)], ctx.var("Rcv" + std::to_string(1 - t)))},
                "'" + ack);
        }
    }

    // error regulator: at least K tocks between consecutive errors
    {
        TermId next = ctx.var("Reg");
        for (int k = 0; k < K; ++k) {
            std::string n = "'gap" + std::to_string(k);
            next = ctx.rec(n, ctx.prefix(EventTable::tock, next));
        }
        std::vector<TermId> reg{ctx.prefix(pr.loss, next),
                                ctx.prefix(pr.dup, next)};
        defs[N("Reg")] = tockloop(ctx, reg, "'reg");
    }

    // assemble: sender || msg medium || receiver || ack medium, internal
    // channels hidden, errors regulated
    std::vector<EventId> msg_chan, ack_chan;
    for (int t = 0; t < tags; ++t) {
        for (int d = 0; d < values; ++d) {
            msg_chan.push_back(mt[size_t(t)][size_t(d)]);
            msg_chan.push_back(mr[size_t(t)][size_t(d)]);
        }
        ack_chan.push_back(at[size_t(t)]);
        ack_chan.push_back(ar[size_t(t)]);
    }
    auto sync_with_tock = [&](std::vector<EventId> evs) {
        evs.push_back(EventTable::tock);
        return ctx.set(evs);
    };
    std::vector<EventId> mt_all, mr_all;
    for (int t = 0; t < tags; ++t)
        for (int d = 0; d < values; ++d) {
            mt_all.push_back(mt[size_t(t)][size_t(d)]);
            mr_all.push_back(mr[size_t(t)][size_t(d)]);
        }
    std::vector<EventId> ar_all{ar[0], ar[1]}, at_all{at[0], at[1]};

    TermId chain = ctx.parallel(ctx.var("Idle0"), sync_with_tock(mt_all),
                                ctx.var("Med0"));
    std::vector<EventId> recv_sync = mr_all;
    TermId chain2 = ctx.parallel(chain, sync_with_tock(recv_sync), ctx.var("Rcv0"));
    std::vector<EventId> ack_sync = at_all;
    for (EventId e : ar_all) ack_sync.push_back(e);
    TermId chain3 = ctx.parallel(chain2, sync_with_tock(ack_sync), ctx.var("Ack_"));
    TermId regulated =
        ctx.parallel(chain3, sync_with_tock({pr.loss, pr.dup}), ctx.var("Reg"));
    std::vector<EventId> internal = msg_chan;
    for (EventId e : ack_chan) internal.push_back(e);
    TermId hidden = ctx.hide(regulated, ctx.set(internal));
    pr.system = maximal_progress(ctx, hidden, pr.with_errors);
    return pr;
}

/// The abstracted system: errors constrained by the regulator, then lazily
/// abstracted away.
inline TermId abstracted(Ctx& ctx, const Protocol& pr) {
    return lazy_abstract(ctx, pr.system, pr.errors, pr.with_errors);
}

} // namespace sliding_window

#endif
