// Batch driver: load assertion files, run the checks, report verdicts.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cspshift/cspshift.hpp>

int main(int argc, char** argv) {
    CLI::App app{"cspshift - CSP refinement checking by model shifting"};

    std::vector<std::string> files;
    std::string model_override, format = "human";
    csp::RunOptions opts;

    app.add_option("files", files, "assertion files (.csp)")->required(false);
    app.add_option("--model-override", model_override,
                   "check every assertion in this model instead");
    app.add_option("--cap", opts.cap, "state cap for exploration");
    app.add_option("--workers", opts.workers, "worker threads for the product search");
    app.add_flag("--oracle", opts.oracle,
                 "cross-check verdicts against the bounded enumeration oracle");
    app.add_option("--oracle-depth", opts.oracle_depth, "oracle event bound");
    app.add_option("--dump-lts", opts.dump_lts_path,
                   "dump the LTS of every definition to this file");
    app.add_option("--transducer", opts.transducer_path,
                   "decide assertions in the rational model given by this file");
    app.add_option("--format", format, "report format: human or machine");

    CLI11_PARSE(app, argc, argv);

    if (!model_override.empty()) {
        auto m = csp::model_from_name(model_override);
        if (!m) {
            std::cerr << "unknown model tag '" << model_override << "'\n";
            return 2;
        }
        opts.model_override = m;
    }
    opts.machine_format = (format == "machine");
    if (format != "machine" && format != "human") {
        std::cerr << "unknown format '" << format << "'\n";
        return 2;
    }

    csp::Ctx ctx;
    csp::RunReport report = csp::run_files(ctx, files, opts, std::cout, std::cerr);
    return report.exit_code;
}
