#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "qpcalc/checks.hpp"

namespace qpcalc {

// Exit codes: 0 = all checks pass, 1 = some check fails, 2 = usage or
// parse/model error.
inline int run_cli(int argc, char** argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"graded-chart calculus and bracket checks"};
    app.require_subcommand(0, 1);

    std::string model_path;
    std::string json_path;
    RunOptions options;
    bool list_checks = false;

    CLI::App* check = app.add_subcommand("check", "parse a model file and run its checks");
    check->add_option("model", model_path, "model file");
    check->add_option("--json", json_path, "write the structured report to this path");
    check->add_option("--seed", options.seed, "global seed for randomized checks");
    check->add_option("--trials", options.trials, "override the per-check default trial count");
    check->add_flag("--parallel", options.parallel, "run independent checks concurrently");
    check->add_flag("--list-checks", list_checks, "list check names with their anchors and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (!check->parsed()) {
        err << app.help();
        return 2;
    }

    if (list_checks) {
        for (const auto& [name, anchor] : check_catalog())
            out << name << " - " << anchor << "\n";
        return 0;
    }

    if (model_path.empty()) {
        err << "error: a model file is required\n";
        return 2;
    }

    std::ifstream in(model_path);
    if (!in) {
        err << "error: cannot open " << model_path << "\n";
        return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    try {
        ModelFile model = parse_model(text);
        Report report = run_checks(model, text, options);
        out << emit_text(report);
        if (!json_path.empty()) {
            std::ofstream jf(json_path, std::ios::binary);
            if (!jf) {
                err << "error: cannot write " << json_path << "\n";
                return 2;
            }
            jf << emit_json(report);
        }
        return report.all_pass() ? 0 : 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace qpcalc
