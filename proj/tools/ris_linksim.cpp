#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rislink/error.hpp"
#include "rislink/presets.hpp"
#include "rislink/result_table.hpp"
#include "rislink/scenario.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kScenario = 2, kNumeric = 3 };

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void print_diagnostics(const std::string& file, const std::vector<rislink::Diagnostic>& diags) {
    for (const auto& d : diags) {
        std::cerr << file << ": " << d.format() << "\n";
    }
}

int cmd_run(const std::string& file, std::uint64_t seed, const std::filesystem::path& out, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto scenario = rislink::parse_scenario(read_file(file));
    const auto stem = std::filesystem::path(file).stem().string();
    const auto tables = rislink::run_scenario(scenario, stem, seed, workers);

    std::filesystem::create_directories(out);
    rislink::Manifest m;
    m.preset = "";
    m.seed = seed;
    m.scenario_hash = rislink::scenario_hash(scenario);
    m.parameters["scenario_file"] = std::filesystem::path(file).filename().string();
    for (const auto& t : tables) {
        rislink::write_csv(t, out / (t.name() + ".csv"));
        m.files.push_back(t.name() + ".csv");
    }
    m.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rislink::write_manifest(m, out / (stem + "_manifest.json"));
    for (const auto& f : m.files) {
        std::cout << (out / f).string() << "\n";
    }
    return kOk;
}

int cmd_validate(const std::string& file) {
    rislink::ScenarioFile s;
    const auto diags = rislink::check_scenario(read_file(file), &s);
    if (!diags.empty()) {
        print_diagnostics(file, diags);
        return kScenario;
    }
    std::cout << "ok " << rislink::scenario_hash(s) << "\n";
    return kOk;
}

int cmd_preset(const std::string& name, std::uint64_t seed, const std::filesystem::path& out, int workers) {
    if (!rislink::is_preset(name)) {
        std::cerr << "unknown preset '" << name << "'; see list-presets\n";
        return kUsage;
    }
    const auto m = rislink::run_preset(name, seed, out, workers);
    for (const auto& f : m.files) {
        std::cout << (out / f).string() << "\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS link-level simulator"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out = ".";
    int workers = 0;
    std::string format = "csv";
    app.add_option("--seed", seed, "random seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--workers", workers, "worker threads (default: RIS_LINKSIM_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));

    std::string file;
    std::string preset;
    auto* run = app.add_subcommand("run", "run the experiment of a scenario file")->fallthrough();
    run->add_option("scenario", file, "scenario file")->required();
    auto* validate = app.add_subcommand("validate", "check a scenario file")->fallthrough();
    validate->add_option("scenario", file, "scenario file")->required();
    auto* pre = app.add_subcommand("preset", "reproduce a figure or table")->fallthrough();
    pre->add_option("name", preset, "preset name")->required();
    auto* list = app.add_subcommand("list-presets", "print the preset names")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (workers == 0) {
        try {
            workers = rislink::default_workers();
        } catch (const rislink::DomainError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
    }

    try {
        if (*list) {
            for (const auto& p : rislink::preset_catalog()) {
                std::cout << p.name << "\t" << p.description << "\n";
            }
            return kOk;
        }
        if (*validate) {
            return cmd_validate(file);
        }
        if (*run) {
            return cmd_run(file, seed, out, workers);
        }
        return cmd_preset(preset, seed, out, workers);
    } catch (const rislink::ScenarioError& e) {
        print_diagnostics(file, e.diagnostics());
        return kScenario;
    } catch (const rislink::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const rislink::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kScenario;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
