#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pnp/trace.hpp"

namespace pnp::metrics {

struct RunReport {
    std::optional<double> coverage_time;     // first instant coverage >= threshold
    std::optional<double> termination_time;  // start of the quiescence window
    long messages_total = 0;
    std::map<std::string, long> messages_by_variant;
    double snap_conflicts_per_position = 0.0;
    double push_conflicts_per_slave = 0.0;
    double final_coverage = 0.0;
    int final_portion_count = 0;
    int snap_positions_taken = 0;
    double total_distance = 0.0;
    double energy_spent = 0.0;
    bool quiesced = false;
    double end_time = 0.0;
};

/// Earliest t such that (t, t+window] contains no message send and no motion.
std::optional<double> detect_termination(const trace::Trace& t, double window);

/// Distinct contenders beyond the first, per snap position, averaged over the
/// number of distinct snap positions ever taken.
double count_snap_conflicts(const trace::Trace& t);

/// Offers never answered by an AckOffer, per sensor that was ever a slave.
double count_push_conflicts(const trace::Trace& t);

RunReport analyze(const trace::Trace& t);

/// One human-readable report document.
std::string report_text(const RunReport& r);

/// Aggregate CSV: stable column order, one row per report.
std::string csv_header();
std::string csv_row(const std::string& label, std::uint64_t seed, const RunReport& r);

}  // namespace pnp::metrics
