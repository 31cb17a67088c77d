#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "fkdet/config.hpp"
#include "fkdet/jobs.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Entropy of principal algebraic actions via finite quotients"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_path;
    std::string format;
    unsigned threads = 1;
    std::uint64_t seed = 0;

    const char* help[] = {
        "certify, then per-level entropy by the configured methods",
        "exact fixed-point counts |Fix| on the configured moduli",
        "two-track invertibility certificate",
        "Mahler measure by torus quadrature (Z^d only)",
        "glue two points on separated windows",
        "shell decay of the fundamental homoclinic point",
    };
    int i = 0;
    for (auto s : {fkdet::Subcommand::Entropy, fkdet::Subcommand::Fixcount, fkdet::Subcommand::Invert,
                   fkdet::Subcommand::Mahler, fkdet::Subcommand::Specdemo, fkdet::Subcommand::Decay}) {
        auto* sub = app.add_subcommand(std::string(fkdet::to_string(s)), help[i++]);
        sub->add_option("--config", config_path, "job config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output path; overrides output.path");
        sub->add_option("--format", format, "json or csv; overrides output.format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "seed for randomized helpers; never changes reported values");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto name = app.get_subcommands().front()->get_name();
        const auto command = *fkdet::parse_subcommand(name);
        auto cfg = fkdet::load_config(config_path);
        if (!format.empty()) cfg.format = format == "csv" ? fkdet::OutputFormat::Csv : fkdet::OutputFormat::Json;
        if (!out_path.empty()) cfg.out_path = out_path;
        if (cfg.format == fkdet::OutputFormat::Csv && !cfg.out_path) {
            throw fkdet::Error(fkdet::ErrorCode::Parameter, "csv output needs --out");
        }

        const auto result = fkdet::run_job(command, cfg, {threads, seed});
        if (cfg.out_path) {
            fkdet::write_outputs(result, cfg.format, *cfg.out_path);
            std::cout << result.summary << '\n';
        } else {
            std::cerr << result.summary << '\n';
            std::cout << result.report;
        }
        return result.exit_status;
    } catch (const std::exception& e) {
        std::cerr << "fkdet_cli: " << e.what() << '\n';
        return fkdet::kExitError;
    }
}
