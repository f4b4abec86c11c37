#pragma once

#include "domain.hpp"
#include "sched_core.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace robustwork {

/// One row of the monitored series. Averages are cumulative from slot 1.
struct MetricsSample {
    std::int64_t slot = 0; ///< slots elapsed
    double avg_queue_work = 0.0;
    std::int64_t max_queue_work = 0;
    std::optional<double> avg_latency;
    std::optional<std::int64_t> max_latency;
    std::optional<double> avg_latency_detected;
    double lyapunov_v = 0.0;
    std::vector<std::int64_t> q;
    std::int64_t jobs_in_system = 0;

    std::int64_t total_queue_work() const {
        std::int64_t t = 0;
        for (auto v : q)
            t += v;
        return t;
    }

    bool operator==(const MetricsSample&) const = default;
};

/// Accumulates queue and latency statistics from slot reports.
class MetricsCollector {
public:
    explicit MetricsCollector(std::size_t types = 0) : types_(types) {}

    /// Latency counts the arrival slot itself: same-slot service is 1.
    void record_completion(const Job& job, std::int64_t completion_slot) {
        if (completion_slot < job.arrival_slot)
            throw ContractViolation("completion before arrival");
        const std::int64_t latency = completion_slot - job.arrival_slot + 1;
        latency_sum_ += latency;
        ++completions_;
        max_latency_ = std::max(max_latency_, latency);
        if (job.truth(TruthKey{}) == Truth::Malicious)
            ++malicious_completed_;
        else
            genuine_work_done_ += job.length;
    }

    /// Detected malicious jobs: detection time is their latency.
    void record_detection(const Job& job, std::int64_t detection_slot) {
        if (detection_slot < job.arrival_slot)
            throw ContractViolation("detection before arrival");
        detected_latency_sum_ += detection_slot - job.arrival_slot + 1;
        ++detections_;
    }

    void observe(const SlotReport& report) {
        ++slots_;
        const std::int64_t total = report.total_work();
        queue_work_sum_ += total;
        max_queue_work_ = std::max(max_queue_work_, total);
        for (const auto& job : report.completed)
            record_completion(job, report.slot);
        for (const auto& job : report.detected)
            record_detection(job, report.slot);
        last_q_.resize(report.x.size());
        jobs_in_system_ = 0;
        for (std::size_t j = 0; j < report.x.size(); ++j) {
            last_q_[j] = report.x[j] + report.y[j];
            jobs_in_system_ += report.jobs[j];
        }
        last_v_ = report.lyapunov;
    }

    bool due(std::int64_t every_k) const { return every_k > 0 && slots_ > 0 && slots_ % every_k == 0; }

    MetricsSample snapshot() const {
        MetricsSample s;
        s.slot = slots_;
        s.avg_queue_work = slots_ > 0 ? static_cast<double>(queue_work_sum_) / static_cast<double>(slots_) : 0.0;
        s.max_queue_work = max_queue_work_;
        if (completions_ > 0) {
            s.avg_latency = static_cast<double>(latency_sum_) / static_cast<double>(completions_);
            s.max_latency = max_latency_;
        }
        if (detections_ > 0)
            s.avg_latency_detected = static_cast<double>(detected_latency_sum_) / static_cast<double>(detections_);
        s.lyapunov_v = last_v_;
        s.q = last_q_;
        if (s.q.empty())
            s.q.assign(types_, 0);
        s.jobs_in_system = jobs_in_system_;
        return s;
    }

    std::int64_t slots() const { return slots_; }
    /// Exact sum over observed slots of total queued work.
    std::int64_t queue_work_sum() const { return queue_work_sum_; }
    std::int64_t completions() const { return completions_; }
    std::int64_t detections() const { return detections_; }
    std::int64_t malicious_completed() const { return malicious_completed_; }
    std::int64_t genuine_work_done() const { return genuine_work_done_; }

private:
    std::size_t types_;
    std::int64_t slots_ = 0;
    std::int64_t queue_work_sum_ = 0;
    std::int64_t max_queue_work_ = 0;
    std::int64_t latency_sum_ = 0;
    std::int64_t completions_ = 0;
    std::int64_t max_latency_ = 0;
    std::int64_t detected_latency_sum_ = 0;
    std::int64_t detections_ = 0;
    std::int64_t malicious_completed_ = 0;
    std::int64_t genuine_work_done_ = 0;
    std::vector<std::int64_t> last_q_;
    std::int64_t jobs_in_system_ = 0;
    double last_v_ = 0.0;
};

inline std::string csv_header(std::size_t types) {
    std::string h = "slot,avg_queue_work,max_queue_work,avg_latency,max_latency,avg_latency_detected,lyapunov_v";
    for (std::size_t j = 1; j <= types; ++j)
        h += ",q" + std::to_string(j);
    h += ",jobs_in_system";
    return h;
}

inline void write_csv(std::ostream& out, const std::vector<MetricsSample>& samples, std::size_t types) {
    out << csv_header(types) << '\n';
    for (const auto& s : samples) {
        if (s.q.size() != types)
            throw ContractViolation("sample has the wrong number of queue columns");
        out << s.slot << ',' << format_double(s.avg_queue_work) << ',' << s.max_queue_work << ',';
        if (s.avg_latency)
            out << format_double(*s.avg_latency);
        out << ',';
        if (s.max_latency)
            out << *s.max_latency;
        out << ',';
        if (s.avg_latency_detected)
            out << format_double(*s.avg_latency_detected);
        out << ',' << format_double(s.lyapunov_v);
        for (auto v : s.q)
            out << ',' << v;
        out << ',' << s.jobs_in_system << '\n';
    }
}

inline void export_csv(const std::vector<MetricsSample>& samples, std::size_t types, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, samples, types);
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

/// Reads back a series written by write_csv.
inline std::vector<MetricsSample> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("metrics csv: missing header");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            header.push_back(cell);
    }
    if (header.size() < 8)
        throw ConfigError("metrics csv: header too short");
    const std::size_t types = header.size() - 8;
    if (line != csv_header(types))
        throw ConfigError("metrics csv: unexpected header '" + line + "'");

    std::vector<MetricsSample> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (cells.size() != header.size())
            throw ConfigError("metrics csv: row has " + std::to_string(cells.size()) + " fields");
        MetricsSample s;
        s.slot = parse_int(cells[0]);
        s.avg_queue_work = parse_double(cells[1]);
        s.max_queue_work = parse_int(cells[2]);
        if (!cells[3].empty())
            s.avg_latency = parse_double(cells[3]);
        if (!cells[4].empty())
            s.max_latency = parse_int(cells[4]);
        if (!cells[5].empty())
            s.avg_latency_detected = parse_double(cells[5]);
        s.lyapunov_v = parse_double(cells[6]);
        for (std::size_t j = 0; j < types; ++j)
            s.q.push_back(parse_int(cells[7 + j]));
        s.jobs_in_system = parse_int(cells[7 + types]);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace robustwork
