// Seedable random process generators used by the property and acceptance
// suites, plus small helpers shared between test binaries.
#ifndef CSPSHIFT_TESTS_CORPUS_HPP
#define CSPSHIFT_TESTS_CORPUS_HPP

#include <random>
#include <string>
#include <vector>

#include <cspshift/cspshift.hpp>

namespace corpus {

using namespace csp;

struct Gen {
    Ctx& ctx;
    Alphabet sigma;
    std::mt19937_64 rng;
    int rec_counter = 0;
    bool with_skip = true;
    bool with_rec = true;

    Gen(Ctx& c, Alphabet s, uint64_t seed) : ctx(c), sigma(std::move(s)), rng(seed) {}

    size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }
    EventId event() { return sigma.events[pick(sigma.size())]; }

    std::vector<EventId> subset() {
        std::vector<EventId> out;
        for (EventId e : sigma.events)
            if (pick(2)) out.push_back(e);
        return out;
    }
    std::vector<EventId> nonempty_subset() {
        auto s = subset();
        if (s.empty()) s.push_back(event());
        return s;
    }

    /// Random closed term of the core grammar with the given depth bound.
    TermId term(int depth, std::vector<std::string> binders = {}) {
        if (depth <= 0) return leaf(binders);
        switch (pick(13)) {
        case 0: return leaf(binders);
        case 1: return ctx.prefix(event(), term(depth - 1, binders));
        case 2: return ctx.int_choice(term(depth - 1, binders), term(depth - 1, binders));
        case 3: return ctx.ext_choice(term(depth - 1, binders), term(depth - 1, binders));
        case 4: return ctx.sliding(term(depth - 1, binders), term(depth - 1, binders));
        case 5:
            return ctx.parallel(term(depth - 1, binders), ctx.set(subset()),
                                term(depth - 1, binders));
        case 6: return ctx.hide(term(depth - 1, binders), ctx.set(nonempty_subset()));
        case 7: {
            RenameRel rel;
            rel.identity_rest = true;
            rel.pairs.push_back({event(), event()});
            return ctx.rename(term(depth - 1, binders), ctx.rename_rel(rel));
        }
        case 8: return ctx.seq(term(depth - 1, binders), term(depth - 1, binders));
        case 9:
            return ctx.throw_op(term(depth - 1, binders), ctx.set(nonempty_subset()),
                                term(depth - 1, binders));
        case 10:
            return ctx.interrupt(term(depth - 1, binders), term(depth - 1, binders));
        case 11:
            if (with_rec) {
                std::string name = "X" + std::to_string(rec_counter++);
                binders.push_back(name);
                return ctx.rec(name, term(depth - 1, binders));
            }
            return leaf(binders);
        default: return ctx.prefix(event(), term(depth - 1, binders));
        }
    }

    TermId leaf(const std::vector<std::string>& binders) {
        size_t n = 4 + (with_skip ? 1 : 0) + (binders.empty() ? 0 : 1);
        switch (pick(n)) {
        case 0: return ctx.stop();
        case 1: return ctx.div();
        case 2: return ctx.prefix(event(), ctx.stop());
        case 3: return ctx.chaos(ctx.set(subset()));
        case 4:
            if (with_skip) return ctx.skip();
            [[fallthrough]];
        default:
            if (!binders.empty()) return ctx.var(binders[pick(binders.size())]);
            return ctx.stop();
        }
    }
};

/// Random tock-CSP terms built from timed combinators; intended to satisfy
/// the tock discipline after maximal progress (callers filter).
struct TimedGen {
    Ctx& ctx;
    Alphabet sigma;
    std::mt19937_64 rng;

    TimedGen(Ctx& c, Alphabet s, uint64_t seed)
        : ctx(c), sigma(std::move(s)), rng(seed) {}

    size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }
    EventId event() { return sigma.events[pick(sigma.size())]; }

    /// An idle process: loops on tock forever.
    TermId idle() {
        static int k = 0;
        std::string n = "'idle" + std::to_string(k++);
        return ctx.rec(n, ctx.prefix(EventTable::tock, ctx.var(n)));
    }

    /// Timed event prefix: offers e until taken, letting time pass.
    TermId tprefix(EventId e, TermId cont) {
        static int k = 0;
        std::string n = "'tp" + std::to_string(k++);
        return ctx.rec(n, ctx.ext_choice(ctx.prefix(e, cont),
                                         ctx.prefix(EventTable::tock, ctx.var(n))));
    }

    TermId term(int depth) {
        if (depth <= 0) return leaf();
        switch (pick(7)) {
        case 0: return leaf();
        case 1: return tprefix(event(), term(depth - 1));
        case 2: return ctx.int_choice(term(depth - 1), term(depth - 1));
        case 3: return ctx.ext_choice(tprefix(event(), term(depth - 1)),
                                      tprefix(event(), term(depth - 1)));
        case 4: return ctx.seq(ctx.wait(int32_t(1 + pick(2))), term(depth - 1));
        case 5: {
            std::vector<EventId> sync{EventTable::tock};
            if (pick(2)) sync.push_back(event());
            return ctx.parallel(term(depth - 1), ctx.set(sync), term(depth - 1));
        }
        default: {
            std::vector<EventId> a{event()};
            return ctx.sliding(ctx.ext_fold({ctx.prefix(a[0], term(depth - 1))}),
                               ctx.seq(ctx.wait(1), term(depth - 1)));
        }
        }
    }

    TermId leaf() {
        switch (pick(3)) {
        case 0: return idle();
        case 1: return tchaos(ctx, {event()});
        default: return tprefix(event(), idle());
        }
    }
};

/// Random NFA over an explicit alphabet.
inline Nfa random_nfa(std::mt19937_64& rng, const std::vector<EventId>& alphabet,
                      size_t max_states) {
    auto pick = [&](size_t n) {
        return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
    };
    Nfa a;
    size_t n = 1 + pick(max_states);
    a.edges.resize(n);
    a.initial = 0;
    size_t edges = pick(2 * n * alphabet.size() + 1);
    for (size_t i = 0; i < edges; ++i)
        a.edges[pick(n)].push_back(
            {alphabet[pick(alphabet.size())], int32_t(pick(n))});
    for (size_t s = 0; s < n; ++s)
        if (pick(3) == 0) a.accepting.push_back(int32_t(s));
    a.sort_accepting();
    return a;
}

/// Language of an NFA up to the given word length, by subset BFS.
inline std::set<std::vector<EventId>> nfa_language(const Nfa& a, size_t depth) {
    std::set<std::vector<EventId>> out;
    std::set<int32_t> init{a.initial};
    std::function<void(std::set<int32_t>, std::vector<EventId>&, size_t)> go =
        [&](std::set<int32_t> conf, std::vector<EventId>& w, size_t budget) {
            for (int32_t s : conf)
                if (a.is_accepting(s)) {
                    out.insert(w);
                    break;
                }
            if (budget == 0) return;
            std::map<EventId, std::set<int32_t>> step;
            for (int32_t s : conf)
                for (const auto& [e, t] : a.edges[size_t(s)]) step[e].insert(t);
            for (auto& [e, next] : step) {
                w.push_back(e);
                go(next, w, budget - 1);
                w.pop_back();
            }
        };
    std::vector<EventId> w;
    go(init, w, depth);
    return out;
}

inline std::set<std::vector<EventId>> prefix_closure(
    const std::set<std::vector<EventId>>& words) {
    std::set<std::vector<EventId>> out;
    for (const auto& w : words)
        for (size_t i = 0; i <= w.size(); ++i)
            out.insert(std::vector<EventId>(w.begin(), w.begin() + i));
    return out;
}

} // namespace corpus

#endif
