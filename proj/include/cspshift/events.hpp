#ifndef CSPSHIFT_EVENTS_HPP
#define CSPSHIFT_EVENTS_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace csp {

using EventId = int32_t;

/// Classification of an event within the extended universe.  Plain events
/// come from user alphabets; Primed/DPrimed are the refusal and acceptance
/// ciphers; Left/Right are the transducer-side tags; Sym covers the four
/// punctuation symbols of the canonical observation encoding.
enum class Role : uint8_t {
    Plain,
    Primed,
    DPrimed,
    Tau,
    Tick,
    Tock,
    Stab,
    Done,
    Term,
    Left,
    Right,
    Sym,
};

struct EventInfo {
    Role role;
    int32_t arg; // Plain/Sym: name index; Primed/DPrimed/Left/Right: inner event
};

class EventTable {
public:
    static constexpr EventId tau = 0;
    static constexpr EventId tick = 1;
    static constexpr EventId tock = 2;
    static constexpr EventId stab = 3;
    static constexpr EventId done = 4;
    static constexpr EventId term = 5;

    EventTable() {
        infos_ = {{Role::Tau, -1},  {Role::Tick, -1}, {Role::Tock, -1},
                  {Role::Stab, -1}, {Role::Done, -1}, {Role::Term, -1}};
    }

    EventId plain(std::string_view name) {
        auto it = plain_by_name_.find(std::string(name));
        if (it != plain_by_name_.end()) return it->second;
        names_.push_back(std::string(name));
        infos_.push_back({Role::Plain, int32_t(names_.size() - 1)});
        EventId id = EventId(infos_.size() - 1);
        plain_by_name_.emplace(std::string(name), id);
        return id;
    }

    /// Punctuation symbol of the canonical encoding ("<", ">", ",", "*").
    EventId sym(std::string_view name) {
        std::string key = "__sym_" + std::string(name);
        auto it = plain_by_name_.find(key);
        if (it != plain_by_name_.end()) return it->second;
        names_.push_back(std::string(name));
        infos_.push_back({Role::Sym, int32_t(names_.size() - 1)});
        EventId id = EventId(infos_.size() - 1);
        plain_by_name_.emplace(key, id);
        return id;
    }

    EventId primed(EventId e) { return derived(Role::Primed, e); }
    EventId dprimed(EventId e) { return derived(Role::DPrimed, e); }
    EventId left(EventId e) { return derived(Role::Left, e); }
    EventId right(EventId e) { return derived(Role::Right, e); }

    Role role(EventId e) const { return infos_[size_t(e)].role; }
    EventId inner(EventId e) const { return infos_[size_t(e)].arg; }

    bool is_visible(EventId e) const { return role(e) != Role::Tau; }

    /// Events that count towards an observation budget: the symbols that
    /// appear as events of abstract observations, as opposed to ciphers.
    bool counts_as_obs_event(EventId e) const {
        switch (role(e)) {
        case Role::Plain:
        case Role::Tock:
        case Role::Term:
        case Role::Tick:
            return true;
        default:
            return false;
        }
    }

    std::string name(EventId e) const {
        const EventInfo& i = infos_[size_t(e)];
        switch (i.role) {
        case Role::Plain:
        case Role::Sym:
            return names_[size_t(i.arg)];
        case Role::Primed:
            return name(i.arg) + "'";
        case Role::DPrimed:
            return name(i.arg) + "''";
        case Role::Tau:
            return "tau";
        case Role::Tick:
            return "tick";
        case Role::Tock:
            return "tock";
        case Role::Stab:
            return "stab";
        case Role::Done:
            return "done";
        case Role::Term:
            return "term";
        case Role::Left:
            return "left." + name(i.arg);
        case Role::Right:
            return "right." + name(i.arg);
        }
        return "?";
    }

    size_t size() const { return infos_.size(); }

private:
    EventId derived(Role r, EventId e) {
        Role er = role(e);
        if (r == Role::Primed || r == Role::DPrimed) {
            if (er != Role::Plain && er != Role::Tock && er != Role::Term)
                throw std::invalid_argument("cipher must wrap a plain-like event");
        } else {
            if (er == Role::Left || er == Role::Right)
                throw std::invalid_argument("tagged events nest one level only");
        }
        auto key = std::make_pair(r, e);
        auto it = derived_.find(key);
        if (it != derived_.end()) return it->second;
        infos_.push_back({r, e});
        EventId id = EventId(infos_.size() - 1);
        derived_.emplace(key, id);
        return id;
    }

    std::vector<EventInfo> infos_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, EventId> plain_by_name_;
    std::map<std::pair<Role, EventId>, EventId> derived_;
};

/// Ordered user alphabet; declaration order doubles as the "alphabetical"
/// linear order referenced by the shifting constructions.
struct Alphabet {
    std::vector<EventId> events;

    bool contains(EventId e) const {
        for (EventId x : events)
            if (x == e) return true;
        return false;
    }
    int index_of(EventId e) const {
        for (size_t i = 0; i < events.size(); ++i)
            if (events[i] == e) return int(i);
        return -1;
    }
    size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
};

inline bool is_reserved_event_name(std::string_view s) {
    return s == "tau" || s == "tick" || s == "tock" || s == "stab" ||
           s == "done" || s == "term";
}

} // namespace csp

#endif
