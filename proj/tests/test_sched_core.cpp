#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace fixtures;

namespace {

rw::SchedulingModel model_with_alpha(const rw::ArrivalSpec& spec, double a) {
    rw::ScanVector v(spec.type_count());
    for (std::size_t j = 0; j < spec.type_count(); ++j)
        for (auto l : spec.types[j].lengths.support())
            v.set(j, l, Rational(static_cast<std::int64_t>(a * 4), 4));
    return rw::SchedulingModel(spec, v);
}

rw::WeightParams params(double rho, double mean_recip = 0.1) {
    rw::WeightParams p;
    p.genuine_fraction = rho;
    p.mean_reciprocal = mean_recip;
    return p;
}

} // namespace

TEST(Admission, AlphaZeroAndOne) {
    const auto spec = ec2_spec(1);
    rw::RandomStream coin(1);
    const auto never = model_with_alpha(spec, 0.0);
    const auto always = model_with_alpha(spec, 1.0);
    rw::TypeQueue q;
    for (int i = 0; i < 100; ++i)
        rw::detail::admit_job(q, job(i, 0, 10), never, coin);
    EXPECT_EQ(q.x(), 1000);
    EXPECT_EQ(q.y(), 0);
    for (int i = 0; i < 100; ++i)
        rw::detail::admit_job(q, job(100 + i, 0, 10), always, coin);
    EXPECT_EQ(q.y(), 1000);
    EXPECT_EQ(q.pending_jobs(), 100);
}

TEST(Admission, HalfScannedFraction) {
    const auto spec = ec2_spec(1);
    const auto half = model_with_alpha(spec, 0.5);
    rw::RandomStream coin(2);
    rw::TypeQueue q;
    for (int i = 0; i < 100000; ++i)
        rw::detail::admit_job(q, job(i, 0, 1), half, coin);
    EXPECT_NEAR(q.pending_jobs() / 100000.0, 0.5, 0.01);
}

TEST(ComputeZ, WithoutPendingWorkZIsX) {
    rw::TypeQueue q;
    q.admit(job(1, 0, 7), false);
    EXPECT_EQ(q.z(params(0.3), rw::ZWeight::PerJob), 7.0);
    EXPECT_EQ(q.z(params(0.3), rw::ZWeight::DistributionMean), 7.0);
}

TEST(ComputeZ, DistributionMeanSubstitution) {
    EXPECT_EQ(rw::z_weight<Rational>(10, 10, 1, Rational(1, 2), Rational(1, 10), rw::ZWeight::DistributionMean), 16);
    rw::TypeQueue q;
    q.admit(job(1, 0, 10), false);
    q.admit(job(2, 0, 10), true);
    EXPECT_EQ(q.z<Rational>(Rational(1, 2), Rational(1, 10), rw::ZWeight::DistributionMean), 16);
    // Per-job scan cost: one slot for the single pending job.
    EXPECT_EQ(q.z<Rational>(Rational(1, 2), Rational(1, 10), rw::ZWeight::PerJob), 16);
    q.admit(job(3, 0, 20), true);
    EXPECT_EQ(q.z<Rational>(Rational(1, 2), Rational(1, 10), rw::ZWeight::PerJob), 27);
    EXPECT_EQ(q.z<Rational>(Rational(1, 2), Rational(1, 10), rw::ZWeight::DistributionMean), 28);
}

TEST(ComputeZ, PendingWorkOnDeadTypeIsAContractViolation) {
    rw::TypeQueue q;
    q.admit(job(1, 0, 3), true);
    auto p = params(1.0);
    p.has_traffic = false;
    EXPECT_THROW(q.z(p, rw::ZWeight::PerJob), rw::ContractViolation);
}

TEST(ArgmaxConfig, WorkedExamples) {
    const auto fs = ec2_fs();
    auto pick = [&](std::vector<double> z) { return fs.maximal_configs[rw::argmax_config<double>(z, fs)].counts; };
    EXPECT_EQ(pick({1, 0, 0}), (std::vector<int>{2, 0, 0}));
    EXPECT_EQ(pick({0, 1, 1}), (std::vector<int>{0, 1, 1}));
    EXPECT_EQ(pick({1, 1, 1}), (std::vector<int>{0, 1, 1}));
    EXPECT_EQ(pick({0, 0, 1}), (std::vector<int>{0, 1, 1}));
    EXPECT_EQ(pick({3, 0, 2}), (std::vector<int>{2, 0, 0}));
    EXPECT_EQ(pick({2, 0, 3}), (std::vector<int>{1, 0, 1}));
    std::vector<Rational> exact = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    EXPECT_EQ(rw::argmax_config<Rational>(exact, fs), 0u);
}

TEST(ProcessJob, OnlyNonEmptyPoolIsServed) {
    rw::RandomStream rng(4);
    for (int i = 0; i < 100; ++i) {
        rw::TypeQueue xq;
        xq.admit(job(1, 0, 5), false);
        xq.begin_slot();
        EXPECT_EQ(xq.process_job(rng, params(0.5), rw::ZWeight::PerJob).kind, rw::ServiceKind::Process);
        rw::TypeQueue yq;
        yq.admit(job(2, 0, 5), true);
        yq.begin_slot();
        EXPECT_EQ(yq.process_job(rng, params(0.5), rw::ZWeight::PerJob).kind, rw::ServiceKind::Scan);
    }
}

TEST(ProcessJob, EqualResidualsSplitEvenly) {
    rw::RandomStream rng(5);
    int x_calls = 0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) {
        rw::TypeQueue q;
        q.admit(job(1, 0, 100), false);
        q.admit(job(2, 0, 100), true);
        q.begin_slot();
        x_calls += q.process_job(rng, params(0.5), rw::ZWeight::PerJob).kind == rw::ServiceKind::Process;
    }
    EXPECT_NEAR(x_calls / double(n), 0.5, 0.01);
}

TEST(ProcessJob, EachJobAtMostOncePerSlot) {
    rw::RandomStream rng(6);
    rw::TypeQueue q;
    q.admit(job(1, 0, 5), false);
    q.begin_slot();
    EXPECT_EQ(q.process_job(rng, params(1.0), rw::ZWeight::PerJob).kind, rw::ServiceKind::Process);
    EXPECT_EQ(q.process_job(rng, params(1.0), rw::ZWeight::PerJob).kind, rw::ServiceKind::Idle);
    q.end_slot();
    EXPECT_EQ(q.x(), 4);
    EXPECT_TRUE(q.totals_consistent());
}

TEST(ProcessX, UnitJobCompletesImmediately) {
    rw::TypeQueue q;
    q.admit(job(1, 0, 1), false);
    q.begin_slot();
    auto ev = q.process_x();
    ASSERT_TRUE(ev.finished);
    EXPECT_EQ(ev.finished->id, 1);
    q.end_slot();
    EXPECT_TRUE(q.empty());
    EXPECT_THROW(q.process_x(), rw::ContractViolation);
}

TEST(ProcessX, FiveUnitJobNeedsFiveSlots) {
    rw::TypeQueue q;
    q.admit(job(1, 0, 5), false);
    for (int s = 0; s < 5; ++s) {
        q.begin_slot();
        auto ev = q.process_x();
        EXPECT_EQ(ev.finished.has_value(), s == 4);
        q.end_slot();
        EXPECT_EQ(q.x(), 4 - s);
    }
}

TEST(ProcessX, OldestJobFirstAndXDropsByCalls) {
    rw::TypeQueue q;
    q.admit(job(1, 0, 4, true, 0), false);
    q.admit(job(2, 0, 4, true, 1), true);
    q.admit(job(3, 0, 4, true, 2), false);
    q.begin_slot();
    q.process_y(params(1.0), rw::ZWeight::PerJob);
    q.end_slot();
    q.admit(job(4, 0, 4, true, 3), false);
    q.begin_slot();
    // Scanned job 2 now sits between jobs 1 and 3 by arrival.
    EXPECT_EQ(q.process_x().job_id, 1);
    EXPECT_EQ(q.process_x().job_id, 2);
    EXPECT_EQ(q.process_x().job_id, 3);
    q.end_slot();
    EXPECT_EQ(q.x(), 13);
    EXPECT_TRUE(q.totals_consistent());
}

TEST(ProcessY, MaliciousJobLeavesInOneSlot) {
    rw::TypeQueue q;
    q.admit(job(1, 0, 300, false), true);
    q.begin_slot();
    auto ev = q.process_y(params(0.5), rw::ZWeight::PerJob);
    q.end_slot();
    EXPECT_EQ(ev.kind, rw::ServiceKind::Scan);
    ASSERT_TRUE(ev.finished);
    EXPECT_FALSE(ev.scanned_genuine);
    EXPECT_EQ(q.q(), 0);
    EXPECT_TRUE(q.empty());
}

TEST(ProcessY, GenuineJobMovesToX) {
    rw::TypeQueue q;
    q.admit(job(1, 0, 300, true), true);
    q.begin_slot();
    auto ev = q.process_y(params(0.5), rw::ZWeight::PerJob);
    EXPECT_TRUE(ev.scanned_genuine);
    EXPECT_FALSE(ev.finished);
    EXPECT_EQ(q.x(), 300);
    EXPECT_EQ(q.y(), 0);
    EXPECT_EQ(q.q(), 300);
    // Scanning took this slot's turn for the job.
    EXPECT_FALSE(q.has_unscheduled_x());
    q.end_slot();
    q.begin_slot();
    EXPECT_TRUE(q.has_unscheduled_x());
    EXPECT_EQ(q.process_x().job_id, 1);
    q.end_slot();
    EXPECT_EQ(q.x(), 299);
}

TEST(ProcessY, MeanZDrainIsOnePerEvent) {
    // Pool whose genuine share equals the rho used in Z.
    constexpr double rho = 0.7;
    rw::RandomStream arrivals(10), coins(11);
    rw::TypeQueue q;
    const auto p = params(rho);
    double drain = 0.0;
    std::int64_t events = 0;
    std::int64_t id = 0;
    while (events < 100000) {
        for (int k = 0; k < 2; ++k) {
            const bool genuine = arrivals.uniform01() < rho;
            q.admit(job(id++, 0, arrivals.uniform_int(1, 12), genuine), arrivals.uniform01() < 0.5);
        }
        const double before = q.z(p, rw::ZWeight::PerJob);
        q.begin_slot();
        std::int64_t served = 0;
        for (int c = 0; c < 3; ++c)
            served += q.process_job(coins, p, rw::ZWeight::PerJob).kind != rw::ServiceKind::Idle;
        q.end_slot();
        drain += before - q.z(p, rw::ZWeight::PerJob);
        events += served;
    }
    EXPECT_NEAR(drain / static_cast<double>(events), 1.0, 0.05);
}

TEST(CentralStep, EmptySystemIdles) {
    const auto spec = ec2_spec(2);
    rw::CentralScheduler s(spec, rw::optimal_alpha(spec), ec2_fs(), 1);
    const auto& r = s.step({});
    EXPECT_EQ(r.config.counts, (std::vector<int>{0, 2, 2}));
    EXPECT_EQ(r.idle_calls, (std::vector<std::int64_t>{0, 2, 2}));
    EXPECT_EQ(r.total_work(), 0);
    EXPECT_EQ(r.lyapunov, 0.0);
}

TEST(CentralStep, UnitJobCompletesInItsArrivalSlot) {
    const auto spec = ec2_spec(1);
    rw::CentralScheduler s(spec, rw::scan_none(spec), ec2_fs(), 1);
    const auto& r = s.step({job(0, 0, 1, true, 0)});
    ASSERT_EQ(r.completed.size(), 1u);
    rw::MetricsCollector m(3);
    m.observe(r);
    EXPECT_EQ(*m.snapshot().avg_latency, 1.0);
}

TEST(CentralStep, ConservationAndUnitAccounting) {
    const auto spec = ec2_spec(5);
    const auto fs = ec2_fs();
    rw::WorkloadGenerator gen(spec, 3);
    rw::CentralScheduler s(spec, rw::optimal_alpha(spec), fs, 3);
    std::vector<std::int64_t> prev(3, 0);
    for (std::int64_t t = 0; t < 20000; ++t) {
        auto arrivals = gen.slot_arrivals(t);
        std::vector<std::int64_t> in(3, 0), detected(3, 0);
        for (const auto& j : arrivals)
            in[j.type] += j.length;
        const auto& r = s.step(std::move(arrivals));
        for (const auto& j : r.detected) {
            detected[j.type] += j.length;
            ASSERT_EQ(rw::TruthInspector::truth(j), rw::Truth::Malicious);
        }
        for (const auto& j : r.completed) {
            // Unit service: at least L slots, plus one if scanned.
            const auto latency = t - j.arrival_slot + 1;
            ASSERT_GE(latency, j.length + (j.scan_status == rw::ScanStatus::ScannedGenuine ? 1 : 0));
            ASSERT_EQ(j.remaining, 0);
        }
        for (std::size_t j = 0; j < 3; ++j) {
            ASSERT_TRUE(s.queue(j).totals_consistent());
            ASSERT_EQ(r.x[j] + r.y[j], prev[j] + in[j] - r.process_units[j] - detected[j]) << "slot " << t;
            ASSERT_EQ(r.process_units[j] + r.scans[j] + r.idle_calls[j], r.config[j]);
            prev[j] = r.x[j] + r.y[j];
        }
        std::int64_t served_jobs = 0;
        for (std::size_t j = 0; j < 3; ++j)
            served_jobs += r.process_units[j] + r.scans[j];
        ASSERT_LE(served_jobs, 5 * 2);
    }
}

TEST(CentralStep, DecisionsIgnoreLabelsOfUnscannedJobs) {
    const auto spec = ec2_spec(3);
    const auto fs = ec2_fs();
    rw::WorkloadGenerator gen(spec, 8);
    rw::CentralScheduler a(spec, rw::scan_none(spec), fs, 8), b(spec, rw::scan_none(spec), fs, 8);
    for (std::int64_t t = 0; t < 5000; ++t) {
        auto arrivals = gen.slot_arrivals(t);
        std::vector<rw::Job> flipped;
        for (const auto& j : arrivals)
            flipped.push_back(rw::Job(j.id, j.type, j.length,
                                      rw::TruthInspector::truth(j) == rw::Truth::Genuine ? rw::Truth::Malicious : rw::Truth::Genuine, j.arrival_slot));
        const auto& ra = a.step(std::move(arrivals));
        const auto& rb = b.step(std::move(flipped));
        ASSERT_EQ(ra.config, rb.config);
        ASSERT_EQ(ra.x, rb.x);
        ASSERT_EQ(ra.completed.size(), rb.completed.size());
    }
}

TEST(SchedulingModel, MissingAlphaIsAContractViolation) {
    const auto spec = ec2_spec(1);
    const rw::SchedulingModel m(spec, rw::optimal_alpha(spec));
    EXPECT_EQ(m.alpha(0, 3), 1.0);
    EXPECT_THROW(m.alpha(0, 100), rw::ContractViolation);
    EXPECT_THROW(m.alpha(0, 501), rw::ContractViolation);
    EXPECT_NEAR(m.params(1).genuine_fraction, 33.0 / 34.0, 1e-15);
}
