#include "metchange/commands.hpp"
#include "metchange/error.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"metchange: entropy-based detection of metaphoric semantic change"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    using Runner = std::function<void(const metchange::Config&, std::ostream&)>;
    const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
        {"build", "build co-occurrence matrices for every slice", metchange::run_build},
        {"score", "score and rank targets under each measure", metchange::run_score},
        {"eval", "correlate change rankings with the gold standard", metchange::run_eval},
        {"annotate", "sample context pairs for annotation", metchange::run_annotate},
        {"agreement", "tally annotator judgments into a gold table", metchange::run_agreement},
    };

    Runner selected;
    for (const auto& [name, help, run] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file (key = value lines)")->check(CLI::ExistingFile);
        sub->add_option("--set", overrides, "override one config key, as key=value")->allow_extra_args(false);
        sub->callback([&selected, run = run] { selected = run; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        metchange::Config config;
        if (!config_path.empty()) config = metchange::Config::load_file(config_path);
        for (const auto& kv : overrides) config.apply_override(kv);
        selected(config, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
