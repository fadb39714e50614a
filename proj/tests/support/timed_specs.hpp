// Desk-scale renderings of the timed buffer specifications: the hand-coded
// tock-CSP deadline buffer and its three-part Timed CSP counterpart built
// from TFB, TEnable and TCHAOS.
#ifndef CSPSHIFT_TESTS_TIMED_SPECS_HPP
#define CSPSHIFT_TESTS_TIMED_SPECS_HPP

#include <string>
#include <vector>

#include <cspshift/cspshift.hpp>

namespace timed_specs {

using namespace csp;

struct BufferEvents {
    std::vector<EventId> left, right, leftnd, rightnd;

    static BufferEvents make(Ctx& ctx, int values) {
        BufferEvents ev;
        for (int d = 0; d < values; ++d) {
            std::string sfx = std::to_string(d);
            ev.left.push_back(ctx.ev.plain("left" + sfx));
            ev.right.push_back(ctx.ev.plain("right" + sfx));
            ev.leftnd.push_back(ctx.ev.plain("leftnd" + sfx));
            ev.rightnd.push_back(ctx.ev.plain("rightnd" + sfx));
        }
        return ev;
    }
    std::vector<EventId> deterministic() const {
        std::vector<EventId> out = left;
        out.insert(out.end(), right.begin(), right.end());
        return out;
    }
    std::vector<EventId> nondeterministic() const {
        std::vector<EventId> out = leftnd;
        out.insert(out.end(), rightnd.begin(), rightnd.end());
        return out;
    }
    std::vector<EventId> all() const {
        auto out = deterministic();
        auto nd = nondeterministic();
        out.insert(out.end(), nd.begin(), nd.end());
        return out;
    }
};

inline std::string seq_name(const std::vector<int>& s) {
    std::string out = "q";
    for (int d : s) out += std::to_string(d);
    return out;
}

/// Hand-coded tock-CSP deadline buffer:
///   TFB(s,k) for k < n:
///     ((#s>0 & right!head -> TFB(tail,0)) [] (#s<B & left?x -> TFB(s^x,0)))
///     [> tock -> TFB(s,k+1)
///   TFB(s,n):
///     (#s>0 & right!head -> TFB(tail,0))
///     [] (#s==0 & left?x -> TFB(<x>,0))
///     [] ((0<#s<B) & (left?x -> TFB(s^x,0) [> STOP))
///     [] tock -> TFB(s,n)
inline TermId make_tfbuff(Ctx& ctx, Defs& defs, const BufferEvents& ev, int B,
                          int deadline, const std::string& tag) {
    const int values = int(ev.left.size());
    std::vector<std::vector<int>> queues{{}};
    for (int len = 1; len <= B; ++len) {
        std::vector<std::vector<int>> next;
        for (const auto& q : queues)
            if (int(q.size()) == len - 1)
                for (int d = 0; d < values; ++d) {
                    auto q2 = q;
                    q2.push_back(d);
                    next.push_back(q2);
                }
        queues.insert(queues.end(), next.begin(), next.end());
    }
    auto name = [&](const std::vector<int>& s, int k) {
        return tag + "_" + seq_name(s) + "_" + std::to_string(k);
    };
    for (const auto& s : queues) {
        for (int k = 0; k <= deadline; ++k) {
            std::vector<TermId> firm;
            if (!s.empty()) {
                std::vector<int> tail(s.begin() + 1, s.end());
                firm.push_back(
                    ctx.prefix(ev.right[size_t(s[0])], ctx.var(name(tail, 0))));
            }
            std::vector<TermId> inputs;
            if (int(s.size()) < B) {
                for (int d = 0; d < values; ++d) {
                    auto s2 = s;
                    s2.push_back(d);
                    inputs.push_back(
                        ctx.prefix(ev.left[size_t(d)], ctx.var(name(s2, 0))));
                }
            }
            TermId body;
            if (k < deadline) {
                std::vector<TermId> offers = firm;
                offers.insert(offers.end(), inputs.begin(), inputs.end());
                body = ctx.sliding(
                    ctx.ext_fold(offers),
                    ctx.prefix(EventTable::tock, ctx.var(name(s, k + 1))));
            } else {
                std::vector<TermId> offers = firm;
                if (s.empty()) {
                    offers.insert(offers.end(), inputs.begin(), inputs.end());
                } else if (int(s.size()) < B) {
                    // mid-buffer inputs stay retractable past the deadline
                    offers.push_back(
                        ctx.sliding(ctx.ext_fold(inputs), ctx.stop()));
                }
                offers.push_back(
                    ctx.prefix(EventTable::tock, ctx.var(name(s, deadline))));
                body = ctx.ext_fold(offers);
            }
            defs[ctx.name_ix(name(s, k))] = body;
        }
    }
    return ctx.var(name({}, 0));
}

/// The Timed CSP buffer core: nondeterministic variants always allowed,
/// deterministic ones exactly when the buffer must offer them.
inline TermId make_tfb_core(Ctx& ctx, Defs& defs, const BufferEvents& ev, int B,
                            const std::string& tag) {
    const int values = int(ev.left.size());
    std::vector<std::vector<int>> queues{{}};
    for (int len = 1; len <= B; ++len) {
        std::vector<std::vector<int>> next;
        for (const auto& q : queues)
            if (int(q.size()) == len - 1)
                for (int d = 0; d < values; ++d) {
                    auto q2 = q;
                    q2.push_back(d);
                    next.push_back(q2);
                }
        queues.insert(queues.end(), next.begin(), next.end());
    }
    auto name = [&](const std::vector<int>& s) { return tag + "_" + seq_name(s); };
    for (const auto& s : queues) {
        std::vector<TermId> offers;
        if (!s.empty()) {
            std::vector<int> tail(s.begin() + 1, s.end());
            offers.push_back(
                ctx.prefix(ev.right[size_t(s[0])], ctx.var(name(tail))));
            offers.push_back(
                ctx.prefix(ev.rightnd[size_t(s[0])], ctx.var(name(tail))));
        }
        for (int d = 0; d < values; ++d) {
            auto s2 = s;
            s2.push_back(d);
            if (s.empty())
                offers.push_back(ctx.prefix(ev.left[size_t(d)], ctx.var(name(s2))));
            if (int(s.size()) < B)
                offers.push_back(
                    ctx.prefix(ev.leftnd[size_t(d)], ctx.var(name(s2))));
        }
        offers.push_back(ctx.prefix(EventTable::tock, ctx.var(name(s))));
        defs[ctx.name_ix(name(s))] = ctx.ext_fold(offers);
    }
    return ctx.var(name({}));
}

/// The composed specification: TFB core, TEnable over the full channel set,
/// TCHAOS on the nondeterministic variants, with those renamed back onto the
/// real channels.
inline TermId make_composed_spec(Ctx& ctx, Defs& defs, const BufferEvents& ev,
                                 int B, int deadline, const std::string& tag) {
    TermId core = make_tfb_core(ctx, defs, ev, B, tag);
    TermId ten = timed_enable(ctx, ev.deterministic(), ev.all(), deadline);
    TermId tch = tchaos(ctx, ev.nondeterministic());

    std::vector<EventId> sync_ten = ev.all();
    sync_ten.push_back(EventTable::tock);
    TermId s1 = ctx.parallel(core, ctx.set(sync_ten), ten);

    std::vector<EventId> sync_tch = ev.nondeterministic();
    sync_tch.push_back(EventTable::tock);
    TermId s2 = ctx.parallel(s1, ctx.set(sync_tch), tch);

    RenameRel rel;
    rel.identity_rest = true;
    for (size_t d = 0; d < ev.left.size(); ++d) {
        rel.pairs.push_back({ev.leftnd[d], ev.left[d]});
        rel.pairs.push_back({ev.rightnd[d], ev.right[d]});
    }
    return ctx.rename(s2, ctx.rename_rel(rel));
}

} // namespace timed_specs

#endif
