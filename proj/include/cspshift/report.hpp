#ifndef CSPSHIFT_REPORT_HPP
#define CSPSHIFT_REPORT_HPP

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parser.hpp"
#include "rational.hpp"
#include "refine.hpp"

namespace csp {

struct RunOptions {
    std::optional<Model> model_override;
    size_t cap = kDefaultStateCap;
    int workers = 1;
    bool oracle = false;
    size_t oracle_depth = 4;
    std::string dump_lts_path;
    std::string transducer_path;
    bool machine_format = false;
};

struct AssertionResult {
    std::string name;
    std::string model;
    bool holds = false;
    std::vector<std::string> counterexample;
    std::string decoded;
    size_t states = 0;
    size_t transitions = 0;
    double millis = 0;
    bool oracle_agrees = true;
    std::string error;
};

/// exit codes: 0 all hold, 1 refinement failure, 2 parse error, 3 resource
struct RunReport {
    std::vector<AssertionResult> results;
    int exit_code = 0;
};

/// Revival observations carry an event in the second slot; render it as the
/// event name rather than a set.
inline std::string render_decoded(const Ctx& ctx, Model model,
                                  const ObsAlphabet& sigma, const ModelObs& m) {
    std::ostringstream os;
    os << "(<";
    for (size_t i = 0; i < m.events.size(); ++i) {
        if (i) os << " ";
        os << ctx.ev.name(sigma.events[size_t(m.events[i])]);
    }
    if (m.tick) os << (m.events.empty() ? "tick" : " tick");
    os << ">";
    for (size_t i = 0; i < m.slots.size(); ++i) {
        os << ", ";
        if (model == Model::R && i == 1) {
            if (m.slots[i] == kBullet)
                os << "*";
            else
                os << ctx.ev.name(sigma.events[size_t(m.slots[i])]);
        } else {
            os << render_mask(ctx, sigma, m.slots[i]);
        }
    }
    os << ")";
    return os.str();
}

inline AssertionResult run_assertion(Ctx& ctx, const Program& prog,
                                     const AssertionSrc& a, const std::string& name,
                                     const RunOptions& opts,
                                     const std::optional<Transducer>& transducer) {
    AssertionResult res;
    res.name = name;
    Model model = opts.model_override.value_or(a.model);
    res.model = transducer ? ("transducer:" + opts.transducer_path)
                           : model_name(model);
    RefineOptions ropts;
    ropts.cap = opts.cap;
    ropts.workers = opts.workers;
    Verdict v;
    if (transducer) {
        TermId s2 = shift_rational(ctx, a.spec, *transducer, prog.alphabet);
        TermId i2 = shift_rational(ctx, a.impl, *transducer, prog.alphabet);
        Lts ls = explore(ctx, s2, prog.defs, opts.cap);
        Lts li = explore(ctx, i2, prog.defs, opts.cap);
        v = trace_refines(ctx, ls, li, ropts);
        v.obs_sigma = ObsAlphabet(prog.alphabet.events);
        res.states = ls.num_states() + li.num_states();
        res.transitions = ls.num_transitions() + li.num_transitions();
    } else {
        v = refines(ctx, model, a.spec, a.impl, prog.alphabet, prog.defs, ropts);
        res.states = v.states;
        res.transitions = v.transitions;
    }
    res.holds = v.holds;
    res.millis = v.millis;
    for (EventId e : v.counterexample) res.counterexample.push_back(ctx.ev.name(e));
    if (v.decoded)
        res.decoded = render_decoded(ctx, model, v.obs_sigma, *v.decoded);
    if (opts.oracle && !transducer) {
        auto ov = oracle_check(ctx, model, a.spec, a.impl, prog.alphabet,
                               prog.defs, opts.oracle_depth, opts.cap);
        // bounded comparison on the shifted side
        RefineOptions bounded = ropts;
        bounded.obs_budget = opts.oracle_depth;
        Verdict bv = refines(ctx, model, a.spec, a.impl, prog.alphabet, prog.defs,
                             bounded);
        res.oracle_agrees = (ov.holds == bv.holds);
    }
    return res;
}

inline RunReport run_files(Ctx& ctx, const std::vector<std::string>& files,
                           const RunOptions& opts, std::ostream& out,
                           std::ostream& err) {
    RunReport report;
    std::optional<Transducer> transducer;
    if (!opts.transducer_path.empty()) {
        std::ifstream tf(opts.transducer_path);
        if (!tf) {
            err << "cannot open transducer file " << opts.transducer_path << "\n";
            report.exit_code = 2;
            return report;
        }
        transducer = parse_transducer(ctx, tf);
    }
    bool any_fail = false;
    for (const std::string& file : files) {
        std::ifstream in(file);
        if (!in) {
            err << "cannot open " << file << "\n";
            report.exit_code = 2;
            return report;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        Program prog;
        try {
            prog = parse_program(ctx, buf.str());
        } catch (const ParseError& e) {
            err << file << ": " << e.what() << "\n";
            report.exit_code = 2;
            return report;
        }
        if (transducer && opts.oracle) {
            ObsAlphabet oa(prog.alphabet.events);
            for (const std::string& w :
                 check_order_reflection(ctx, *transducer, oa,
                                        std::min<size_t>(opts.oracle_depth, 2)))
                err << "warning: " << w << "\n";
        }
        if (!opts.dump_lts_path.empty()) {
            std::ofstream dump(opts.dump_lts_path);
            for (const auto& [ix, body] : prog.defs) {
                dump << "process " << ctx.var_name(ix) << "\n";
                try {
                    Lts l = explore(ctx, body, prog.defs, opts.cap);
                    dump_lts(ctx, l, dump);
                } catch (const std::exception& e) {
                    dump << "error " << e.what() << "\n";
                }
            }
        }
        int k = 0;
        for (const AssertionSrc& a : prog.asserts) {
            std::string name = file + ":" + std::to_string(a.line) + "#" +
                               std::to_string(k++);
            AssertionResult res;
            try {
                res = run_assertion(ctx, prog, a, name, opts, transducer);
            } catch (const StateCapExceeded& e) {
                err << name << ": " << e.what() << "\n";
                report.exit_code = 3;
                return report;
            } catch (const std::exception& e) {
                res.name = name;
                res.error = e.what();
                res.holds = false;
            }
            if (!res.holds) any_fail = true;
            report.results.push_back(res);

            if (opts.machine_format) {
                nlohmann::ordered_json j;
                j["name"] = res.name;
                j["model"] = res.model;
                j["holds"] = res.holds;
                j["counterexample"] = res.counterexample;
                j["decoded_observation"] = res.decoded;
                j["states"] = res.states;
                j["transitions"] = res.transitions;
                j["millis"] = res.millis;
                if (!res.error.empty()) j["error"] = res.error;
                out << j.dump() << "\n";
            } else {
                out << (res.holds ? "passed" : "FAILED") << "  " << res.name
                    << "  [" << res.model << "]";
                if (!res.error.empty()) out << "  error: " << res.error;
                if (!res.holds && !res.counterexample.empty()) {
                    out << "\n  counterexample:";
                    for (const auto& e : res.counterexample) out << " " << e;
                    if (!res.decoded.empty()) out << "\n  observation: " << res.decoded;
                }
                if (opts.oracle && !res.oracle_agrees)
                    out << "\n  WARNING: oracle disagrees with the shifted verdict";
                out << "\n";
            }
        }
    }
    if (any_fail && report.exit_code == 0) report.exit_code = 1;
    return report;
}

} // namespace csp

#endif
