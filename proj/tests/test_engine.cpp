#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace fixtures;

namespace {

rw::Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return rw::parse_scenario(in);
}

const std::string kBase = R"(
[scenario]
name = tiny

[servers]
count = 4
capacity = 30, 30, 4000

[vm_types]
standard = 15, 8, 1690
high_memory = 17.1, 6.5, 420
high_cpu = 7, 20, 1690

[arrivals]
genuine = 0.99, 0.33, 0.66
malicious = 0.7, 0.01, 0.01

[lengths]
bands = 0.7:1-50, 0.15:251-300, 0.15:451-500
)";

rw::Scenario tiny(const std::string& extra = "[run]\nslots = 20000\nsample_every = 1000\n") { return parse(kBase + extra); }

std::string csv(const rw::RunResult& r, std::size_t types) {
    std::ostringstream out;
    rw::write_csv(out, r.samples, types);
    return out.str();
}

double ols_slope(const std::vector<rw::MetricsSample>& s) {
    double n = static_cast<double>(s.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : s) {
        const double x = static_cast<double>(p.slot), y = static_cast<double>(p.total_queue_work());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool bounded_tail(const std::vector<rw::MetricsSample>& s) {
    std::vector<std::int64_t> tail;
    for (std::size_t i = s.size() / 2; i < s.size(); ++i)
        tail.push_back(s[i].total_queue_work());
    std::sort(tail.begin(), tail.end());
    const std::size_t n = tail.size();
    const double median = n % 2 ? static_cast<double>(tail[n / 2]) : 0.5 * static_cast<double>(tail[n / 2 - 1] + tail[n / 2]);
    return static_cast<double>(tail.back()) <= 3.0 * median;
}

} // namespace

TEST(Scenario, Ec2FileParsesExactly) {
    const auto sc = rw::load_scenario(scenario_path("ec2_paper.scn"));
    EXPECT_EQ(sc.name, "ScanOPT");
    EXPECT_EQ(sc.arrivals.n_servers, 100);
    EXPECT_EQ(sc.capacity.amounts, ec2_capacity().amounts);
    ASSERT_EQ(sc.vm_types.size(), 3u);
    EXPECT_EQ(sc.vm_types[1].name, "high_memory");
    EXPECT_EQ(sc.vm_types[1].demand.amounts, ec2_types()[1].demand.amounts);
    const auto spec = ec2_spec(100);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(sc.arrivals.types[j].genuine_rate, spec.types[j].genuine_rate);
        EXPECT_EQ(sc.arrivals.types[j].malicious_rate, spec.types[j].malicious_rate);
        EXPECT_EQ(sc.arrivals.types[j].lengths.mean_length(), Rational(261, 2));
    }
    EXPECT_EQ(sc.strategy, rw::ScanStrategy::Opt);
    EXPECT_EQ(sc.mode, rw::SchedulerMode::Centralized);
    EXPECT_EQ(sc.total_slots, 500000);
    EXPECT_EQ(sc.sample_every, 10000);
    EXPECT_EQ(sc.seed, 42u);
}

TEST(Scenario, EveryShippedFileLoads) {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(ROBUSTWORK_SCENARIO_DIR)) {
        if (entry.path().extension() != ".scn")
            continue;
        EXPECT_NO_THROW(rw::load_scenario(entry.path().string())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 10);
}

TEST(Scenario, SystemScopeAndOverrides) {
    auto text = kBase;
    text.replace(text.find("[arrivals]"), 10, "[arrivals]\nscope = system");
    text += "high_cpu = 1:10-10\n";
    const auto sc = parse(text);
    EXPECT_EQ(sc.arrivals.types[0].genuine_rate, Rational(99, 100));
    EXPECT_EQ(sc.arrivals.types[2].lengths.mean_length(), 10);
}

TEST(Scenario, CustomAlphaTable) {
    const auto sc = tiny("[scan]\nstrategy = custom\n[alpha]\nstandard = 1-50:0, 251-500:1\nhigh_memory = 1-500:1/2\nhigh_cpu = 1-500:0\n");
    EXPECT_EQ(sc.strategy, rw::ScanStrategy::Custom);
    EXPECT_EQ(sc.custom_alpha.alpha(0, 50), 0);
    EXPECT_EQ(sc.custom_alpha.alpha(0, 251), 1);
    EXPECT_EQ(sc.custom_alpha.alpha(1, 7), Rational(1, 2));
    const auto report = rw::analyze(sc);
    EXPECT_EQ(report.strategies.back().name, "custom");
}

TEST(Scenario, ConfigErrors) {
    EXPECT_THROW(parse("[servers]\ncount = 1\n"), rw::ConfigError);
    EXPECT_THROW(tiny("[scan]\nstrategy = sometimes\n"), rw::ConfigError);
    EXPECT_THROW(tiny("[run]\nslots = 1000\nsample_every = 300\n"), rw::ConfigError);
    EXPECT_THROW(tiny("[run]\nscheduler = federated\n"), rw::ConfigError);
    EXPECT_THROW(tiny("[run]\nrouting = random\n"), rw::ConfigError);
    EXPECT_THROW(tiny("[scan]\nstrategy = adaptive\nwarmup_slots = 0\n"), rw::ConfigError);
    EXPECT_THROW(tiny("[scan]\nstrategy = custom\n[alpha]\nstandard = 1-50:0\n"), rw::ConfigError);
    EXPECT_THROW(tiny("[scan]\nz_weight = fancy\n"), rw::ConfigError);
    auto bad_rates = kBase;
    bad_rates.replace(bad_rates.find("0.99, 0.33, 0.66"), 16, "0.99, 0.33");
    EXPECT_THROW(parse(bad_rates), rw::ConfigError);
    EXPECT_THROW(parse(kBase + "mystery = 1:1-1\n"), rw::ConfigError);
    auto bad_band = kBase;
    bad_band.replace(bad_band.find("0.7:1-50"), 8, "0.6:1-50");
    EXPECT_THROW(parse(bad_band), rw::ConfigError);
    EXPECT_THROW(rw::load_scenario("/nonexistent.scn"), rw::ConfigError);
}

TEST(Run, DeterministicPerSeed) {
    auto sc = tiny();
    const auto a = csv(rw::run(sc), 3);
    const auto b = csv(rw::run(sc), 3);
    EXPECT_EQ(a, b);
    sc.seed = 43;
    EXPECT_NE(a, csv(rw::run(sc), 3));
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 21);
}

TEST(Run, DecentralizedDeterministicPerSeed) {
    const auto sc = tiny("[run]\nscheduler = decentralized\nrouting = p2w\nslots = 20000\nsample_every = 1000\n");
    EXPECT_EQ(csv(rw::run(sc), 3), csv(rw::run(sc), 3));
}

TEST(Run, LambdaFlowInsideAndScanNoneOutside) {
    auto flow = tiny("[scan]\nstrategy = none\n[run]\nslots = 100000\nsample_every = 10000\n");
    for (auto& t : flow.arrivals.types)
        t.malicious_rate = 0;
    const auto rf = rw::run(flow);
    EXPECT_TRUE(rf.verdict.strictly_inside());
    EXPECT_EQ(*rf.verdict.margin, Rational(1, 99));
    EXPECT_EQ(rf.summary.detections, 0);

    const auto none = tiny("[scan]\nstrategy = none\n[run]\nslots = 100000\nsample_every = 10000\n");
    const auto rn = rw::run(none);
    EXPECT_FALSE(rn.verdict.inside);
    // Linear growth doubles the queue between the midpoint and the end.
    EXPECT_GT(rn.samples.back().total_queue_work(), 3 * rn.samples[4].total_queue_work() / 2);
    EXPECT_GT(rn.summary.malicious_completed, 0);
}

TEST(Run, ObserverSeesEverySlot) {
    const auto sc = tiny();
    std::int64_t seen = 0;
    rw::run(sc, [&](const rw::SlotReport& r) { EXPECT_EQ(r.slot, seen++); });
    EXPECT_EQ(seen, 20000);
}

TEST(Analyze, Ec2ThresholdsAndVerdicts) {
    const auto sc = rw::load_scenario(scenario_path("ec2_paper.scn"));
    const auto r = rw::analyze(sc);
    ASSERT_EQ(r.thresholds.size(), 3u);
    EXPECT_EQ(*r.thresholds[0], 2);
    EXPECT_EQ(*r.thresholds[1], 34);
    EXPECT_EQ(*r.thresholds[2], 67);
    ASSERT_EQ(r.strategies.size(), 3u);
    EXPECT_FALSE(r.strategies[0].verdict.inside);
    EXPECT_TRUE(r.strategies[2].verdict.strictly_inside());
    std::ostringstream out;
    rw::print_analysis(out, sc, r);
    EXPECT_NE(out.str().find("(0,1,1) (1,0,1) (2,0,0)"), std::string::npos);
}

TEST(Analyze, NoMaliciousTrafficHasOneVerdict) {
    const auto sc = rw::load_scenario(scenario_path("lambda_flow.scn"));
    const auto r = rw::analyze(sc);
    EXPECT_TRUE(r.no_malicious);
    ASSERT_EQ(r.strategies.size(), 1u);
    EXPECT_EQ(*r.strategies[0].verdict.margin, Rational(1, 99));
    EXPECT_FALSE(r.thresholds[0].has_value());
}

TEST(Adaptive, OneSlotWarmupFallsBackWithWarnings) {
    const auto sc = tiny("[scan]\nstrategy = adaptive\nwarmup_slots = 1\n[run]\nslots = 2000\nsample_every = 1000\n");
    const auto r = rw::run(sc);
    EXPECT_FALSE(r.summary.warnings.empty());
    for (std::size_t j = 0; j < 3; ++j)
        for (const auto& [length, a] : r.final_alpha.row(j))
            EXPECT_EQ(a, length > 1 ? 1 : 0) << "type " << j << " length " << length;
}

TEST(Adaptive, NoMaliciousTrafficLearnsNeverToScan) {
    auto sc = tiny("[scan]\nstrategy = adaptive\nwarmup_slots = 20000\n[run]\nslots = 30000\nsample_every = 10000\n");
    for (auto& t : sc.arrivals.types)
        t.malicious_rate = 0;
    const auto r = rw::run(sc);
    EXPECT_TRUE(r.summary.warnings.empty());
    EXPECT_EQ(r.final_alpha, rw::scan_none(sc.arrivals));
    for (double m : r.summary.estimated_malicious)
        EXPECT_EQ(m, 0.0);
}

TEST(Adaptive, ShortWarmupEstimatesAreClose) {
    auto sc = tiny("[scan]\nstrategy = adaptive\nwarmup_slots = 200000\n[run]\nslots = 210000\nsample_every = 10000\n");
    const auto r = rw::run(sc);
    ASSERT_EQ(r.summary.estimated_genuine.size(), 3u);
    // Type 1 carries most of the traffic; its estimate is tight even here.
    EXPECT_NEAR(r.summary.estimated_genuine[0], 0.99, 0.99 * 0.1);
    EXPECT_NEAR(r.summary.estimated_malicious[0], 0.7, 0.7 * 0.1);
    EXPECT_EQ(r.final_alpha.row(0), rw::optimal_alpha(sc.arrivals).row(0));
}

TEST(Compare, RatioAndDifference) {
    rw::MetricsSample a, b;
    a.slot = b.slot = 10;
    a.avg_latency = 6;
    b.avg_latency = 3;
    a.avg_queue_work = 10;
    b.avg_queue_work = 4;
    a.max_queue_work = 5;
    b.max_queue_work = 0;
    const auto rows = rw::compare_series({a}, {b});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(*rows[0].ratio_avg_latency, 2.0);
    EXPECT_EQ(*rows[0].diff_avg_latency, 3.0);
    EXPECT_EQ(rows[0].ratio_avg_queue_work, 2.5);
    EXPECT_TRUE(std::isinf(rows[0].ratio_max_queue_work));
    EXPECT_FALSE(rows[0].ratio_max_latency);
    b.slot = 11;
    EXPECT_THROW(rw::compare_series({a}, {b}), rw::ConfigError);
}

TEST(Sweep, VerdictsAcrossKappaScales) {
    const auto sc = rw::load_scenario(scenario_path("ec2_paper.scn"));
    const auto rows = rw::sweep(sc, {0, 1, 2}, false);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].none.strictly_inside());
    EXPECT_EQ(*rows[0].opt.margin, Rational(1, 99));
    EXPECT_FALSE(rows[1].none.inside);
    EXPECT_TRUE(rows[1].opt.strictly_inside());
    EXPECT_FALSE(rows[2].opt.inside);
    EXPECT_THROW(rw::sweep(sc, {-1}, false), rw::ConfigError);
    std::ostringstream out;
    rw::write_sweep_csv(out, rows);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

std::vector<std::string> shipped_scenarios() {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(ROBUSTWORK_SCENARIO_DIR))
        if (entry.path().extension() == ".scn")
            out.push_back(entry.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

class ShippedScenario : public ::testing::TestWithParam<std::string> {};

TEST_P(ShippedScenario, VerdictAgreesWithSimulatedTrend) {
    const auto sc = rw::load_scenario(scenario_path(GetParam() + ".scn"));
    const auto r = rw::run(sc);
    if (r.verdict.strictly_inside())
        EXPECT_TRUE(bounded_tail(r.samples));
    else
        EXPECT_GT(ols_slope(r.samples), 0.0);
}

INSTANTIATE_TEST_SUITE_P(All, ShippedScenario, ::testing::ValuesIn(shipped_scenarios()),
                         [](const auto& info) { return info.param; });
