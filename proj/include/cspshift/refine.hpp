#ifndef CSPSHIFT_REFINE_HPP
#define CSPSHIFT_REFINE_HPP

#include <chrono>
#include <deque>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "timed.hpp"

namespace csp {

struct RefineOptions {
    size_t cap = kDefaultStateCap;
    int workers = 1;
    std::optional<size_t> obs_budget; // bound on observation events, if any
};

struct Verdict {
    bool holds = true;
    std::vector<EventId> counterexample; // trace of impl rejected by spec
    std::optional<ModelObs> decoded;
    ObsAlphabet obs_sigma;
    size_t states = 0;
    size_t transitions = 0;
    double millis = 0;
};

/// Lazy determinization of a specification LTS: tau-closed state sets,
/// created on demand and memoised.
class NormalizedSpec {
public:
    NormalizedSpec(const Ctx& ctx, const Lts& spec) : ctx_(ctx), spec_(spec) {
        initial_ = intern(closure({spec.root}));
    }

    int32_t initial() const { return initial_; }

    /// Successor subset under a visible label; -1 when the label is refused.
    int32_t move(int32_t subset, EventId e) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = memo_.find({subset, e});
            if (it != memo_.end()) return it->second;
        }
        std::vector<uint32_t> next;
        for (uint32_t s : subsets_at(subset)) {
            auto [b, en] = spec_.out(s);
            for (auto i = b; i != en; ++i)
                if (i->first == e) next.push_back(i->second);
        }
        int32_t res = -1;
        if (!next.empty()) res = intern(closure(next));
        std::lock_guard<std::mutex> lk(mu_);
        memo_.emplace(std::make_pair(subset, e), res);
        return res;
    }

private:
    std::vector<uint32_t> closure(std::vector<uint32_t> work) const {
        std::set<uint32_t> seen;
        while (!work.empty()) {
            uint32_t s = work.back();
            work.pop_back();
            if (!seen.insert(s).second) continue;
            auto [b, e] = spec_.out(s);
            for (auto i = b; i != e; ++i)
                if (ctx_.ev.role(i->first) == Role::Tau) work.push_back(i->second);
        }
        return std::vector<uint32_t>(seen.begin(), seen.end());
    }

    int32_t intern(std::vector<uint32_t> subset) {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = subset_ix_.find(subset);
        if (it != subset_ix_.end()) return it->second;
        subsets_.push_back(subset);
        int32_t id = int32_t(subsets_.size() - 1);
        subset_ix_.emplace(std::move(subset), id);
        return id;
    }

    std::vector<uint32_t> subsets_at(int32_t id) {
        std::lock_guard<std::mutex> lk(mu_);
        return subsets_[size_t(id)];
    }

    const Ctx& ctx_;
    const Lts& spec_;
    int32_t initial_;
    std::vector<std::vector<uint32_t>> subsets_;
    std::map<std::vector<uint32_t>, int32_t> subset_ix_;
    std::map<std::pair<int32_t, EventId>, int32_t> memo_;
    std::mutex mu_;
};

/// Language inclusion of visible traces (ticks and ciphers included) by BFS
/// over the product of impl states and normalized spec subsets.  With an
/// observation budget only impl traces of at most that many observation
/// events are considered.
inline Verdict trace_refines(Ctx& ctx, const Lts& spec, const Lts& impl,
                             const RefineOptions& opts = {}) {
    auto t0 = std::chrono::steady_clock::now();
    NormalizedSpec norm(ctx, spec);
    const size_t budget = opts.obs_budget.value_or(size_t(-1));
    const bool bounded = opts.obs_budget.has_value();

    struct NodeKey {
        uint32_t impl;
        int32_t subset;
        uint32_t used;
        bool operator<(const NodeKey& o) const {
            if (impl != o.impl) return impl < o.impl;
            if (subset != o.subset) return subset < o.subset;
            return used < o.used;
        }
    };
    struct NodeInfo {
        int64_t parent;
        EventId via;
    };
    std::map<NodeKey, size_t> index;
    std::vector<NodeKey> nodes;
    std::vector<NodeInfo> info;
    std::deque<size_t> queue;

    Verdict v;
    size_t product_edges = 0;
    auto t_end = [&](bool holds) {
        v.holds = holds;
        v.states = nodes.size();
        v.transitions = product_edges;
        v.millis = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
        return v;
    };

    NodeKey root{impl.root, norm.initial(), 0};
    index.emplace(root, 0);
    nodes.push_back(root);
    info.push_back({-1, -1});
    queue.push_back(0);

    auto fail_at = [&](size_t node, EventId e) {
        std::vector<EventId> trace{e};
        for (int64_t n = int64_t(node); info[size_t(n)].parent >= 0;
             n = info[size_t(n)].parent)
            if (ctx.ev.role(info[size_t(n)].via) != Role::Tau)
                trace.push_back(info[size_t(n)].via);
        std::reverse(trace.begin(), trace.end());
        v.counterexample = std::move(trace);
        return t_end(false);
    };

    while (!queue.empty()) {
        // one BFS layer at a time, expanded deterministically
        std::vector<size_t> layer(queue.begin(), queue.end());
        queue.clear();
        struct Expansion {
            std::vector<std::pair<EventId, NodeKey>> next;
            std::optional<EventId> violation;
        };
        auto expand = [&](size_t ni) {
            Expansion ex;
            const NodeKey k = nodes[ni];
            auto [b, e] = impl.out(k.impl);
            for (auto i = b; i != e; ++i) {
                Role r = ctx.ev.role(i->first);
                if (r == Role::Tau) {
                    ex.next.push_back({i->first, {i->second, k.subset, k.used}});
                    continue;
                }
                uint32_t used2 =
                    bounded ? k.used + (ctx.ev.counts_as_obs_event(i->first) ? 1 : 0)
                            : 0;
                if (bounded && used2 > budget) continue;
                int32_t s2 = norm.move(k.subset, i->first);
                if (s2 < 0) {
                    if (!ex.violation) ex.violation = i->first;
                    continue;
                }
                ex.next.push_back({i->first, {i->second, s2, used2}});
            }
            return ex;
        };

        std::vector<Expansion> results(layer.size());
        if (opts.workers > 1 && layer.size() > 1) {
            size_t chunk = (layer.size() + size_t(opts.workers) - 1) /
                           size_t(opts.workers);
            std::vector<std::future<void>> futs;
            for (size_t c = 0; c < layer.size(); c += chunk) {
                size_t hi = std::min(layer.size(), c + chunk);
                futs.push_back(std::async(std::launch::async, [&, c, hi] {
                    for (size_t i = c; i < hi; ++i) results[i] = expand(layer[i]);
                }));
            }
            for (auto& f : futs) f.get();
        } else {
            for (size_t i = 0; i < layer.size(); ++i) results[i] = expand(layer[i]);
        }

        for (size_t i = 0; i < layer.size(); ++i) {
            if (results[i].violation)
                return fail_at(layer[i], *results[i].violation);
            product_edges += results[i].next.size();
            for (const auto& [e, k2] : results[i].next) {
                auto [it, fresh] = index.emplace(k2, nodes.size());
                if (fresh) {
                    if (nodes.size() >= opts.cap)
                        throw StateCapExceeded("product state cap exceeded");
                    nodes.push_back(k2);
                    info.push_back({int64_t(layer[i]), e});
                    queue.push_back(it->second);
                }
            }
        }
    }
    return t_end(true);
}

// --- decoding shifted counterexamples --------------------------------------

/// Decodes a counterexample trace over a shifted alphabet back into a model
/// observation over the observation alphabet (best effort for trailing
/// partial bursts).
inline ModelObs decode_counterexample(const Ctx& ctx, Model model,
                                      const std::vector<EventId>& trace,
                                      const ObsAlphabet& sigma) {
    ModelObs m;
    auto ev_ix = [&](EventId e) { return int8_t(sigma.index_of(e)); };
    auto base_ix = [&](EventId e) { return sigma.index_of(ctx.ev.inner(e)); };
    switch (model) {
    case Model::T: {
        for (EventId e : trace) {
            if (ctx.ev.role(e) == Role::Tick)
                m.tick = true;
            else
                m.events.push_back(ev_ix(e));
        }
        break;
    }
    case Model::F:
    case Model::R: {
        size_t i = 0;
        for (; i < trace.size(); ++i) {
            Role r = ctx.ev.role(trace[i]);
            if (r == Role::Primed || r == Role::Stab) break;
            m.events.push_back(ev_ix(trace[i]));
        }
        int32_t refusal = kBullet;
        bool closed = false;
        for (; i < trace.size(); ++i) {
            Role r = ctx.ev.role(trace[i]);
            if (r == Role::Primed) {
                if (refusal == kBullet) refusal = 0;
                refusal |= 1 << base_ix(trace[i]);
            } else if (r == Role::Stab) {
                if (refusal == kBullet) refusal = 0;
                closed = true;
            } else {
                break; // revival event after the burst
            }
        }
        (void)closed;
        if (model == Model::F) {
            m.slots = {refusal};
        } else {
            int32_t revival = kBullet;
            if (i < trace.size()) revival = ev_ix(trace[i]);
            m.slots = {refusal, revival};
        }
        break;
    }
    case Model::RT:
    case Model::TF: {
        // alternating plain events and prime bursts (stab/tock delimited)
        std::vector<int32_t> slots{kBullet};
        for (EventId e : trace) {
            Role r = ctx.ev.role(e);
            if (r == Role::Primed) {
                if (slots.back() == kBullet) slots.back() = 0;
                slots.back() |= 1 << base_ix(e);
            } else if (r == Role::Stab) {
                if (slots.back() == kBullet) slots.back() = 0;
            } else {
                m.events.push_back(ev_ix(e));
                slots.push_back(kBullet);
            }
        }
        m.slots = std::move(slots);
        if (model == Model::TF) {
            // delete slots that precede non-tock events
            for (size_t i = 0; i + 1 < m.slots.size(); ++i) {
                bool pre_tock =
                    sigma.events[size_t(m.events[i])] == EventTable::tock;
                if (pre_tock) {
                    if (m.slots[i] == kBullet) m.slots[i] = 0;
                } else if (m.slots[i] == kBullet) {
                    m.slots[i] = kNoSlot;
                }
            }
        }
        break;
    }
    case Model::A:
    case Model::FL: {
        std::vector<int32_t> slots{kBullet};
        for (EventId e : trace) {
            Role r = ctx.ev.role(e);
            if (r == Role::DPrimed) {
                if (slots.back() == kBullet) slots.back() = 0;
                slots.back() |= 1 << base_ix(e);
            } else if (r == Role::Done) {
                if (slots.back() == kBullet) slots.back() = 0;
            } else {
                m.events.push_back(ev_ix(e));
                slots.push_back(kBullet);
            }
        }
        if (model == Model::A)
            m.slots = {slots.back()};
        else
            m.slots = std::move(slots);
        break;
    }
    }
    return m;
}

// --- model-level refinement -------------------------------------------------

inline bool may_terminate(const Ctx& ctx, TermId p, const Defs& defs) {
    std::set<TermId> seen;
    std::function<bool(TermId)> go = [&](TermId t) -> bool {
        if (!seen.insert(t).second) return false;
        const Node& n = ctx.node(t);
        if (n.op == Op::Skip || n.op == Op::Wait) return true;
        if (n.op == Op::Var) {
            auto it = defs.find(n.aux);
            return it != defs.end() && go(it->second);
        }
        if (n.a >= 0 && go(n.a)) return true;
        if (n.b >= 0 && go(n.b)) return true;
        return false;
    };
    return go(p);
}

/// Decides refinement in the given model by shifting both sides into the
/// traces world.  The tick wrapper is composed first when either side may
/// terminate; the TF pipeline applies maximal progress and validates the
/// tock discipline.
inline Verdict refines(Ctx& ctx, Model model, TermId spec, TermId impl,
                       const Alphabet& sigma, const Defs& defs = {},
                       const RefineOptions& opts = {}) {
    Verdict v;
    if (model == Model::TF) {
        TermId ps = maximal_progress(ctx, spec, sigma);
        TermId pi = maximal_progress(ctx, impl, sigma);
        Lts lspec_raw = explore(ctx, ps, defs, opts.cap);
        Lts limpl_raw = explore(ctx, pi, defs, opts.cap);
        check_tock_discipline(ctx, lspec_raw);
        check_tock_discipline(ctx, limpl_raw);
        Lts lspec = explore(ctx, shift_TF(ctx, ps, sigma), defs, opts.cap);
        Lts limpl = explore(ctx, shift_TF(ctx, pi, sigma), defs, opts.cap);
        v = trace_refines(ctx, lspec, limpl, opts);
        std::vector<EventId> obs_events = sigma.events;
        obs_events.push_back(EventTable::tock);
        v.obs_sigma = ObsAlphabet(obs_events);
        if (!v.holds)
            v.decoded = decode_counterexample(ctx, model, v.counterexample,
                                              v.obs_sigma);
        return v;
    }
    bool wrap = model != Model::T &&
                (may_terminate(ctx, spec, defs) || may_terminate(ctx, impl, defs));
    Alphabet sig = wrap ? with_term(sigma) : sigma;
    TermId s2 = shift_model(ctx, model, spec, sigma, wrap);
    TermId i2 = shift_model(ctx, model, impl, sigma, wrap);
    Lts lspec = explore(ctx, s2, defs, opts.cap);
    Lts limpl = explore(ctx, i2, defs, opts.cap);
    v = trace_refines(ctx, lspec, limpl, opts);
    v.obs_sigma = ObsAlphabet(sig.events);
    if (!v.holds)
        v.decoded =
            decode_counterexample(ctx, model, v.counterexample, v.obs_sigma);
    return v;
}

/// Oracle-backed variant of refines() used for cross-checks: enumerates
/// observations of both sides to the given depth and compares projections.
/// Pipelines (tick wrapper, maximal progress) match refines().
inline OracleVerdict oracle_check(Ctx& ctx, Model model, TermId spec, TermId impl,
                                  const Alphabet& sigma, const Defs& defs,
                                  size_t depth, size_t cap = kDefaultStateCap) {
    if (model == Model::TF) {
        TermId ps = maximal_progress(ctx, spec, sigma);
        TermId pi = maximal_progress(ctx, impl, sigma);
        std::vector<EventId> obs_events = sigma.events;
        obs_events.push_back(EventTable::tock);
        ObsAlphabet oa(obs_events);
        Lts ls = explore(ctx, ps, defs, cap);
        Lts li = explore(ctx, pi, defs, cap);
        return oracle_refines(ctx, model, ls, li, oa, depth);
    }
    bool wrap = model != Model::T &&
                (may_terminate(ctx, spec, defs) || may_terminate(ctx, impl, defs));
    TermId ps = spec, pi = impl;
    Alphabet sig = sigma;
    if (wrap) {
        ps = shift_tick_wrap(ctx, spec, sigma);
        pi = shift_tick_wrap(ctx, impl, sigma);
        sig = with_term(sigma);
    }
    ObsAlphabet oa(sig.events);
    Lts ls = explore(ctx, ps, defs, cap);
    Lts li = explore(ctx, pi, defs, cap);
    return oracle_refines(ctx, model, ls, li, oa, depth);
}

// --- conflict detection (revivals application) ------------------------------

/// Builds the most nondeterministic process over `alphabet` whose stable
/// states never refuse all of `shared` while accepting `probe`, switching to
/// CHAOS once probe has occurred.  Specification side of the conflict check.
inline TermId no_conflict_spec(Ctx& ctx, const std::vector<EventId>& alphabet,
                               const std::vector<EventId>& shared, EventId probe) {
    std::string self = "'noconf";
    TermId chaos_all = ctx.chaos(ctx.set(alphabet));
    std::vector<TermId> branches;
    size_t k = alphabet.size();
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
        bool has_probe = false, has_shared = false;
        for (size_t i = 0; i < k; ++i) {
            if (!(mask & (1u << i))) continue;
            if (alphabet[i] == probe) has_probe = true;
            for (EventId s : shared)
                if (alphabet[i] == s) has_shared = true;
        }
        if (has_probe && !has_shared) continue; // the conflict pattern
        std::vector<TermId> offers;
        for (size_t i = 0; i < k; ++i) {
            if (!(mask & (1u << i))) continue;
            TermId cont = alphabet[i] == probe ? chaos_all : ctx.var(self);
            offers.push_back(ctx.prefix(alphabet[i], cont));
        }
        branches.push_back(ctx.ext_fold(offers));
    }
    return ctx.rec(self, ctx.int_fold(branches));
}

/// Conflict freedom of Q [X||Y] R per the revivals-model construction: a
/// fresh probe event stands for "some shared event both sides accept", and
/// a conflict is a revival (s, X cap Y, probe) with s probe-free.  Returns
/// holds = true when conflict-free.
inline Verdict check_conflict_freedom(Ctx& ctx, TermId q, TermId r,
                                      const std::vector<EventId>& ifaceQ,
                                      const std::vector<EventId>& ifaceR,
                                      const Alphabet& sigma, const Defs& defs = {},
                                      const RefineOptions& opts = {}) {
    EventId probe = ctx.ev.plain("'conflict");
    for (EventId e : sigma.events)
        if (e == probe) throw ShiftError("fresh-event collision");

    auto renamed = [&](TermId p, const std::vector<EventId>& iface) {
        RenameRel rel;
        rel.identity_rest = true;
        for (EventId x : iface) {
            rel.pairs.push_back({x, x});
            rel.pairs.push_back({x, probe});
        }
        return ctx.rename(p, ctx.rename_rel(rel));
    };
    std::vector<EventId> xp = ifaceQ, yp = ifaceR;
    xp.push_back(probe);
    yp.push_back(probe);

    // [X'||Y'] as interface parallel: restrict each side to its interface,
    // synchronise on the intersection
    auto restrict_to = [&](TermId p, const std::vector<EventId>& iface) {
        std::vector<EventId> blocked;
        for (EventId e : sigma.events)
            if (std::find(iface.begin(), iface.end(), e) == iface.end())
                blocked.push_back(e);
        if (blocked.empty()) return p;
        return ctx.parallel(p, ctx.set(blocked), ctx.stop());
    };
    std::vector<EventId> sync;
    for (EventId e : xp)
        if (std::find(yp.begin(), yp.end(), e) != yp.end()) sync.push_back(e);
    TermId composed = ctx.parallel(restrict_to(renamed(q, ifaceQ), xp),
                                   ctx.set(sync), restrict_to(renamed(r, ifaceR), yp));

    std::vector<EventId> shared;
    for (EventId e : ifaceQ)
        if (std::find(ifaceR.begin(), ifaceR.end(), e) != ifaceR.end())
            shared.push_back(e);
    std::vector<EventId> alph;
    for (EventId e : xp) alph.push_back(e);
    for (EventId e : yp)
        if (std::find(alph.begin(), alph.end(), e) == alph.end())
            alph.push_back(e);

    Alphabet check_sigma;
    check_sigma.events = alph;
    TermId spec = no_conflict_spec(ctx, alph, shared, probe);
    return refines(ctx, Model::R, spec, composed, check_sigma, defs, opts);
}

} // namespace csp

#endif
