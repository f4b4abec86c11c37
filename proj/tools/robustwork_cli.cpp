// Command-line front end: analyze, simulate, compare and sweep scenarios.

#include <robustwork/robustwork.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

namespace rw = robustwork;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunOverrides {
    std::optional<std::int64_t> slots;
    std::optional<std::int64_t> sample_every;
    std::optional<std::uint64_t> seed;
    std::string profile;
};

void apply(rw::Scenario& sc, const RunOverrides& o) {
    if (o.profile == "full") {
        sc.total_slots = 4000000;
        sc.sample_every = 200000;
    } else if (!o.profile.empty() && o.profile != "desk") {
        throw rw::ConfigError("unknown profile '" + o.profile + "' (desk or full)");
    }
    if (o.slots)
        sc.total_slots = *o.slots;
    if (o.sample_every)
        sc.sample_every = *o.sample_every;
    if (o.seed)
        sc.seed = *o.seed;
    sc.validate();
}

std::filesystem::path output_path(const std::string& requested, const std::string& fallback_name) {
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("ROBUSTWORK_OUT_DIR"); env && *env)
        dir = env;
    if (requested.empty())
        return dir / fallback_name;
    std::filesystem::path p(requested);
    return p.is_absolute() ? p : dir / p;
}

std::filesystem::path with_seed(const std::filesystem::path& p, std::uint64_t seed) {
    auto out = p;
    out.replace_filename(p.stem().string() + "_seed" + std::to_string(seed) + p.extension().string());
    return out;
}

void print_summary(std::ostream& out, const rw::Scenario& sc, const rw::RunResult& r) {
    out << sc.name << " seed " << sc.seed << ": " << r.summary.slots << " slots, verdict " << rw::verdict_label(r.verdict)
        << " (margin " << rw::describe_margin(r.verdict) << ")\n";
    out << "  completions " << r.summary.completions << ", detections " << r.summary.detections << ", unscanned malicious completed "
        << r.summary.malicious_completed << ", final queued work " << r.summary.final_queue_work << "\n";
    if (!r.summary.estimated_genuine.empty()) {
        out << "  estimated per-server rates (genuine / malicious) vs configured:\n";
        for (std::size_t j = 0; j < sc.type_count(); ++j)
            out << "    " << sc.vm_types[j].name << ": " << rw::format_double(r.summary.estimated_genuine[j]) << " / "
                << rw::format_double(r.summary.estimated_malicious[j]) << " vs "
                << rw::format_double(rw::to_double(sc.arrivals.per_server_genuine(j))) << " / "
                << rw::format_double(rw::to_double(sc.arrivals.per_server_malicious(j))) << "\n";
    }
    for (const auto& w : r.summary.warnings)
        std::cerr << "warning: " << w << "\n";
}

int cmd_analyze(const std::string& file) {
    const auto sc = rw::load_scenario(file);
    rw::print_analysis(std::cout, sc, rw::analyze(sc));
    return 0;
}

int cmd_simulate(const std::string& file, const std::string& out, int runs, const RunOverrides& o) {
    auto sc = rw::load_scenario(file);
    apply(sc, o);
    if (runs < 1)
        throw rw::ConfigError("--runs must be at least 1");
    const auto path = output_path(out, sc.name + ".csv");
    std::vector<rw::Scenario> scenarios;
    for (int k = 0; k < runs; ++k) {
        auto s = sc;
        s.seed = sc.seed + static_cast<std::uint64_t>(k);
        scenarios.push_back(std::move(s));
    }
    std::vector<std::future<rw::RunResult>> futures;
    for (const auto& s : scenarios)
        futures.push_back(std::async(std::launch::async, [&s] { return rw::run(s); }));
    for (std::size_t k = 0; k < futures.size(); ++k) {
        auto result = futures[k].get();
        const auto target = runs == 1 ? path : with_seed(path, scenarios[k].seed);
        rw::export_csv(result.samples, sc.type_count(), target.string());
        print_summary(std::cout, scenarios[k], result);
        std::cout << "  wrote " << target.string() << "\n";
    }
    return 0;
}

int cmd_compare(const std::string& file_a, const std::string& file_b, const std::string& out, const RunOverrides& o) {
    auto a = rw::load_scenario(file_a);
    auto b = rw::load_scenario(file_b);
    apply(a, o);
    apply(b, o);
    auto fa = std::async(std::launch::async, [&] { return rw::run(a); });
    auto rb = rw::run(b);
    auto ra = fa.get();
    print_summary(std::cout, a, ra);
    print_summary(std::cout, b, rb);
    const auto rows = rw::compare_series(ra.samples, rb.samples);
    if (out.empty() && !std::getenv("ROBUSTWORK_OUT_DIR")) {
        rw::write_comparison_csv(std::cout, rows);
        return 0;
    }
    const auto path = output_path(out, a.name + "_vs_" + b.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    rw::write_comparison_csv(f, rows);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_sweep(const std::string& file, const std::vector<std::string>& scales_text, bool simulate, const std::string& out,
              const RunOverrides& o) {
    auto sc = rw::load_scenario(file);
    apply(sc, o);
    std::vector<rw::Rational> scales;
    for (const auto& s : scales_text)
        scales.push_back(rw::parse_rational(s));
    const auto rows = rw::sweep(sc, scales, simulate);
    if (out.empty()) {
        rw::write_sweep_csv(std::cout, rows);
        return 0;
    }
    const auto path = output_path(out, sc.name + "_sweep.csv");
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    rw::write_sweep_csv(f, rows);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust workload scheduling simulator"};
    app.require_subcommand(1);

    RunOverrides overrides;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--slots", overrides.slots, "Override run.slots");
        sub->add_option("--sample-every", overrides.sample_every, "Override run.sample_every");
        sub->add_option("--seed", overrides.seed, "Override run.seed");
        sub->add_option("--profile", overrides.profile, "desk (scenario values) or full (4,000,000 slots sampled every 200,000)");
    };

    std::string file, file_b, out;
    int runs = 1;
    bool simulate = false;
    std::vector<std::string> scales;

    auto* analyze = app.add_subcommand("analyze", "Capacity-region analysis without simulation");
    analyze->add_option("file", file, "Scenario file")->required();

    auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario and write its metric series as CSV");
    simulate_cmd->add_option("file", file, "Scenario file")->required();
    simulate_cmd->add_option("--out", out, "CSV path (default $ROBUSTWORK_OUT_DIR/<name>.csv)");
    simulate_cmd->add_option("--runs", runs, "Number of seeds run concurrently (seed, seed+1, ...)");
    add_overrides(simulate_cmd);

    auto* compare = app.add_subcommand("compare", "Ratio and difference series of two scenarios (A over B)");
    compare->add_option("file_a", file, "Scenario A")->required();
    compare->add_option("file_b", file_b, "Scenario B")->required();
    compare->add_option("--out", out, "CSV path (default stdout)");
    add_overrides(compare);

    auto* sweep = app.add_subcommand("sweep", "Stability verdicts while scaling the malicious rates");
    sweep->add_option("file", file, "Scenario file")->required();
    sweep->add_option("--kappa-scale", scales, "Malicious-rate multipliers")->required()->delimiter(',');
    sweep->add_flag("--simulate", simulate, "Also simulate each scaled scenario");
    sweep->add_option("--out", out, "CSV path (default stdout)");
    add_overrides(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*analyze)
            return cmd_analyze(file);
        if (*simulate_cmd)
            return cmd_simulate(file, out, runs, overrides);
        if (*compare)
            return cmd_compare(file, file_b, out, overrides);
        if (*sweep)
            return cmd_sweep(file, scales, simulate, out, overrides);
    } catch (const rw::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
