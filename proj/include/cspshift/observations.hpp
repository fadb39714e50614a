#ifndef CSPSHIFT_OBSERVATIONS_HPP
#define CSPSHIFT_OBSERVATIONS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "semantics.hpp"

namespace csp {

/// Semantic model tags.  D is the discrete timed failures model; the DSL
/// calls it TF in assertion lines.
enum class Model { T, F, R, A, RT, FL, TF };

inline const char* model_name(Model m) {
    switch (m) {
    case Model::T: return "T";
    case Model::F: return "F";
    case Model::R: return "R";
    case Model::A: return "A";
    case Model::RT: return "RT";
    case Model::FL: return "FL";
    case Model::TF: return "TF";
    }
    return "?";
}

inline std::optional<Model> model_from_name(const std::string& s) {
    if (s == "T") return Model::T;
    if (s == "F") return Model::F;
    if (s == "R") return Model::R;
    if (s == "A") return Model::A;
    if (s == "RT") return Model::RT;
    if (s == "FL") return Model::FL;
    if (s == "TF") return Model::TF;
    return std::nullopt;
}

constexpr int32_t kBullet = -1; // unobserved stability
constexpr int32_t kNoSlot = -2; // slot deleted / not part of the observation

/// Finite linear observation: alternating acceptance-or-bullet slots and
/// events; slots are bitmasks over the observation alphabet.  slots.size()
/// is always events.size()+1; a terminal tick may follow.
struct Obs {
    std::vector<int8_t> events;
    std::vector<int32_t> slots;
    bool tick = false;

    bool operator<(const Obs& o) const {
        if (events != o.events) return events < o.events;
        if (slots != o.slots) return slots < o.slots;
        return tick < o.tick;
    }
    bool operator==(const Obs& o) const {
        return events == o.events && slots == o.slots && tick == o.tick;
    }
};

/// Projected observation in one of the concrete models; the slot layout is
/// model specific (see project()).  Ordered shortest-first so that minimal
/// counterexamples come out of set differences.
struct ModelObs {
    std::vector<int8_t> events;
    std::vector<int32_t> slots;
    bool tick = false;

    bool operator<(const ModelObs& o) const {
        if (events.size() != o.events.size()) return events.size() < o.events.size();
        if (events != o.events) return events < o.events;
        if (slots != o.slots) return slots < o.slots;
        return tick < o.tick;
    }
    bool operator==(const ModelObs& o) const {
        return events == o.events && slots == o.slots && tick == o.tick;
    }
};

/// The alphabet an oracle run observes over; order fixes bit positions.
struct ObsAlphabet {
    std::vector<EventId> events;

    ObsAlphabet() = default;
    explicit ObsAlphabet(std::vector<EventId> evs) : events(std::move(evs)) {
        if (events.size() > 12)
            throw std::invalid_argument("oracle alphabet limited to 12 events");
    }
    int index_of(EventId e) const {
        for (size_t i = 0; i < events.size(); ++i)
            if (events[i] == e) return int(i);
        return -1;
    }
    size_t size() const { return events.size(); }
    int32_t full_mask() const { return (int32_t(1) << events.size()) - 1; }
};

inline std::string render_mask(const Ctx& ctx, const ObsAlphabet& sigma, int32_t m) {
    if (m == kBullet) return "*";
    if (m == kNoSlot) return "_";
    std::string out = "{";
    bool first = true;
    for (size_t i = 0; i < sigma.size(); ++i)
        if (m & (1 << i)) {
            if (!first) out += ",";
            out += ctx.ev.name(sigma.events[i]);
            first = false;
        }
    return out + "}";
}

inline std::string render_obs(const Ctx& ctx, const ObsAlphabet& sigma, const Obs& o) {
    std::string out = "<";
    for (size_t i = 0; i < o.slots.size(); ++i) {
        if (i) out += ", ";
        out += render_mask(ctx, sigma, o.slots[i]);
        if (i < o.events.size())
            out += ", " + ctx.ev.name(sigma.events[size_t(o.events[i])]);
    }
    if (o.tick) out += ", tick";
    return out + ">";
}

/// All finite linear observations of the LTS with at most `max_events`
/// events (a terminal tick counts as one).  Acceptance slots record the
/// exact visible initials of stable states; a bullet is always possible.
/// The result is downward closed under the extension order.
inline std::set<Obs> fl_observations(const Ctx& ctx, const Lts& lts,
                                     const ObsAlphabet& sigma, size_t max_events) {
    // tau closures, cached per state
    std::vector<std::vector<uint32_t>> closure(lts.num_states());
    std::function<const std::vector<uint32_t>&(uint32_t)> close = [&](uint32_t s)
        -> const std::vector<uint32_t>& {
        if (!closure[s].empty()) return closure[s];
        std::set<uint32_t> seen;
        std::vector<uint32_t> work{s};
        while (!work.empty()) {
            uint32_t x = work.back();
            work.pop_back();
            if (!seen.insert(x).second) continue;
            auto [b, e] = lts.out(x);
            for (auto i = b; i != e; ++i)
                if (ctx.ev.role(i->first) == Role::Tau) work.push_back(i->second);
        }
        closure[s].assign(seen.begin(), seen.end());
        return closure[s];
    };

    std::map<std::pair<uint32_t, size_t>, std::set<Obs>> memo;
    std::function<const std::set<Obs>&(uint32_t, size_t)> go =
        [&](uint32_t s, size_t budget) -> const std::set<Obs>& {
        auto key = std::make_pair(s, budget);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::set<Obs> res;
        for (uint32_t x : close(s)) {
            // slot options at x
            std::vector<int32_t> slot_opts{kBullet};
            bool has_tick = false;
            if (lts.stable[x]) {
                int32_t acc = 0;
                auto [b, e] = lts.out(x);
                for (auto i = b; i != e; ++i) {
                    int ix = sigma.index_of(i->first);
                    if (ix < 0)
                        throw std::invalid_argument(
                            "visible event outside the oracle alphabet: " +
                            ctx.ev.name(i->first));
                    acc |= (1 << ix);
                }
                slot_opts.push_back(acc);
            }
            auto [b, e] = lts.out(x);
            for (auto i = b; i != e; ++i)
                if (ctx.ev.role(i->first) == Role::Tick) has_tick = true;
            for (int32_t slot : slot_opts) {
                Obs bare;
                bare.slots = {slot};
                res.insert(bare);
            }
            if (has_tick && budget > 0) {
                Obs o;
                o.slots = {kBullet};
                o.tick = true;
                res.insert(o);
            }
            if (budget > 0) {
                for (auto i = b; i != e; ++i) {
                    Role r = ctx.ev.role(i->first);
                    if (r == Role::Tau || r == Role::Tick) continue;
                    int ix = sigma.index_of(i->first);
                    for (int32_t slot : slot_opts) {
                        // an observed acceptance constrains the next event
                        if (slot != kBullet && !(slot & (1 << ix))) continue;
                        for (const Obs& suffix : go(i->second, budget - 1)) {
                            Obs o;
                            o.events.push_back(int8_t(ix));
                            o.events.insert(o.events.end(), suffix.events.begin(),
                                            suffix.events.end());
                            o.slots.push_back(slot);
                            o.slots.insert(o.slots.end(), suffix.slots.begin(),
                                           suffix.slots.end());
                            o.tick = suffix.tick;
                            res.insert(std::move(o));
                        }
                    }
                }
            }
        }
        return memo.emplace(key, std::move(res)).first->second;
    };
    return go(lts.root, max_events);
}

namespace detail {

/// Calls fn for every submask of `mask` (including 0 and mask itself).
template <class F> void for_submasks(int32_t mask, F fn) {
    int32_t sub = mask;
    while (true) {
        fn(sub);
        if (sub == 0) break;
        sub = (sub - 1) & mask;
    }
}

} // namespace detail

struct ModelRequiresTock : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Image of a set of FL observations under a concrete model's defining
/// relation.  Slot layout of the result:
///   T  – no slots, events only (+ tick flag)
///   F  – one slot: refusal set or bullet
///   R  – two slots: refusal-or-bullet, then revival event index or bullet
///   A  – one slot: acceptance set or bullet
///   RT – events.size()+1 slots: refusal-or-bullet each
///   TF – events.size()+1 slots: refusal before each tock and at the end,
///        kNoSlot where the model deletes the refusal
inline std::set<ModelObs> project(const Ctx& ctx, Model model,
                                  const std::set<Obs>& obs,
                                  const ObsAlphabet& sigma) {
    std::set<ModelObs> out;
    const int32_t full = sigma.full_mask();
    int tock_ix = sigma.index_of(EventTable::tock);
    if (model == Model::TF && tock_ix < 0)
        throw ModelRequiresTock("timed projection needs tock in the alphabet");
    int32_t tock_bit = tock_ix >= 0 ? (1 << tock_ix) : 0;

    for (const Obs& o : obs) {
        const size_t n = o.events.size();
        switch (model) {
        case Model::T: {
            ModelObs m;
            m.events = o.events;
            m.tick = o.tick;
            out.insert(std::move(m));
            break;
        }
        case Model::F: {
            ModelObs base;
            base.events = o.events;
            base.tick = o.tick;
            int32_t last = o.slots.back();
            ModelObs b = base;
            b.slots = {kBullet};
            out.insert(b);
            if (last != kBullet && !o.tick) {
                detail::for_submasks(full & ~last, [&](int32_t x) {
                    ModelObs m = base;
                    m.slots = {x};
                    out.insert(std::move(m));
                });
            }
            break;
        }
        case Model::R: {
            // clause (ii): terminal refusal, no revival event
            int32_t last = o.slots.back();
            if (!o.tick) {
                if (last == kBullet) {
                    ModelObs m;
                    m.events = o.events;
                    m.slots = {kBullet, kBullet};
                    out.insert(std::move(m));
                } else {
                    detail::for_submasks(full & ~last, [&](int32_t x) {
                        ModelObs m;
                        m.events = o.events;
                        m.slots = {x, kBullet};
                        out.insert(std::move(m));
                    });
                }
            }
            // clause (i): refusal before the last event, which is accepted;
            // the trace component excludes the revival event
            if (n > 0 && !o.tick) {
                int32_t before = o.slots[n - 1];
                ModelObs base;
                base.events.assign(o.events.begin(), o.events.end() - 1);
                if (before == kBullet) {
                    ModelObs m = base;
                    m.slots = {kBullet, int32_t(o.events[n - 1])};
                    out.insert(std::move(m));
                } else {
                    detail::for_submasks(full & ~before, [&](int32_t x) {
                        ModelObs m = base;
                        m.slots = {x, int32_t(o.events[n - 1])};
                        out.insert(std::move(m));
                    });
                }
            }
            break;
        }
        case Model::A: {
            ModelObs m;
            m.events = o.events;
            m.tick = o.tick;
            m.slots = {o.tick ? kBullet : o.slots.back()};
            out.insert(std::move(m));
            break;
        }
        case Model::RT: {
            std::vector<std::vector<int32_t>> choices(o.slots.size());
            for (size_t i = 0; i < o.slots.size(); ++i) {
                if (o.slots[i] == kBullet)
                    choices[i] = {kBullet};
                else
                    detail::for_submasks(full & ~o.slots[i], [&](int32_t x) {
                        choices[i].push_back(x);
                    });
            }
            std::vector<int32_t> cur(o.slots.size());
            std::function<void(size_t)> emit = [&](size_t i) {
                if (i == choices.size()) {
                    ModelObs m;
                    m.events = o.events;
                    m.slots = cur;
                    m.tick = o.tick;
                    out.insert(std::move(m));
                    return;
                }
                for (int32_t x : choices[i]) {
                    cur[i] = x;
                    emit(i + 1);
                }
            };
            emit(0);
            break;
        }
        case Model::TF: {
            const int32_t sigma_only = full & ~tock_bit;
            std::vector<std::vector<int32_t>> choices(o.slots.size());
            bool ok = true;
            for (size_t i = 0; i < o.slots.size() && ok; ++i) {
                bool before_tock = i < n && o.events[i] == int8_t(tock_ix);
                bool terminal = i == n;
                if (before_tock) {
                    // tock only happens from stable states; an unobserved
                    // slot before tock is reported as the empty refusal
                    if (o.slots[i] == kBullet)
                        choices[i] = {0};
                    else
                        detail::for_submasks(sigma_only & ~o.slots[i],
                                             [&](int32_t x) {
                                                 choices[i].push_back(x);
                                             });
                } else if (terminal) {
                    if (o.slots[i] == kBullet)
                        choices[i] = {kBullet};
                    else
                        detail::for_submasks(sigma_only & ~o.slots[i],
                                             [&](int32_t x) {
                                                 choices[i].push_back(x);
                                             });
                } else {
                    choices[i] = {kNoSlot}; // deleted before non-tock events
                }
            }
            if (!ok) break;
            std::vector<int32_t> cur(o.slots.size());
            std::function<void(size_t)> emit = [&](size_t i) {
                if (i == choices.size()) {
                    ModelObs m;
                    m.events = o.events;
                    m.slots = cur;
                    m.tick = o.tick;
                    out.insert(std::move(m));
                    return;
                }
                for (int32_t x : choices[i]) {
                    cur[i] = x;
                    emit(i + 1);
                }
            };
            emit(0);
            break;
        }
        case Model::FL: {
            ModelObs m;
            m.events = o.events;
            m.slots = o.slots;
            m.tick = o.tick;
            out.insert(std::move(m));
            break;
        }
        }
    }
    return out;
}

struct OracleVerdict {
    bool holds = true;
    std::optional<ModelObs> witness;
};

/// Brute-force refinement oracle: impl M-refines spec iff the projected
/// observation set of impl is included in that of spec, both enumerated to
/// the given event bound.  Returns a minimal violating observation.
inline OracleVerdict oracle_refines(const Ctx& ctx, Model model, const Lts& spec,
                                    const Lts& impl, const ObsAlphabet& sigma,
                                    size_t max_events) {
    auto so = project(ctx, model, fl_observations(ctx, spec, sigma, max_events), sigma);
    auto io = project(ctx, model, fl_observations(ctx, impl, sigma, max_events), sigma);
    for (const ModelObs& m : io)
        if (!so.count(m)) return {false, m};
    return {true, std::nullopt};
}

// --- the partial order a model induces on its observations -----------------

/// FL extension order: x <= y iff x's event word is a prefix of y's, every
/// slot of x is bullet or equal to y's slot at the same position, and a
/// terminal tick of x is matched in y at the same position.
inline bool fl_leq(const Obs& x, const Obs& y) {
    if (x.events.size() > y.events.size()) return false;
    for (size_t i = 0; i < x.events.size(); ++i)
        if (x.events[i] != y.events[i]) return false;
    for (size_t i = 0; i < x.slots.size(); ++i)
        if (x.slots[i] != kBullet && x.slots[i] != y.slots[i]) return false;
    if (x.tick) return y.tick && x.events.size() == y.events.size();
    if (x.events.size() == y.events.size() && y.tick) {
        // y has a terminal tick beyond x: fine, x simply stopped earlier,
        // provided x's terminal slot was bullet-or-equal (checked above)
        return true;
    }
    return true;
}

/// Enumerates the preimage of a model observation: all FL observations over
/// sigma with the matching event word that the model relates to it.
inline std::vector<Obs> preimage(const Ctx& ctx, Model model, const ModelObs& y,
                                 const ObsAlphabet& sigma) {
    std::vector<int8_t> events = y.events;
    if (model == Model::R && y.slots.size() == 2 && y.slots[1] != kBullet)
        events.push_back(int8_t(y.slots[1])); // revival event extends the trace
    const size_t n = events.size();
    std::vector<Obs> cands;
    std::vector<int32_t> cur(n + 1);
    std::function<void(size_t)> build = [&](size_t i) {
        if (i == n + 1) {
            Obs o;
            o.events = events;
            o.slots = cur;
            o.tick = y.tick;
            cands.push_back(o);
            return;
        }
        cur[i] = kBullet;
        build(i + 1);
        for (int32_t m = 0; m <= sigma.full_mask(); ++m) {
            // an observed acceptance must admit the following event
            if (i < n && !(m & (1 << events[i]))) continue;
            if (y.tick && i == n) continue; // slot before tick is bullet
            cur[i] = m;
            build(i + 1);
        }
    };
    build(0);
    std::vector<Obs> out;
    for (const Obs& o : cands) {
        std::set<Obs> single{o};
        auto img = project(ctx, model, single, sigma);
        if (img.count(ModelObs{y.events, y.slots, y.tick})) out.push_back(o);
    }
    return out;
}

/// Decides x <= y in the order induced by the model: for every preimage b
/// of y there is a preimage a of x with a <= b in the FL extension order.
inline bool induced_leq(const Ctx& ctx, Model model, const ModelObs& x,
                        const ModelObs& y, const ObsAlphabet& sigma) {
    auto px = preimage(ctx, model, x, sigma);
    auto py = preimage(ctx, model, y, sigma);
    for (const Obs& b : py) {
        bool found = false;
        for (const Obs& a : px)
            if (fl_leq(a, b)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

} // namespace csp

#endif
