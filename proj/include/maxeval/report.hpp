#pragma once

#include <string>

#include "maxeval/analysis.hpp"
#include "maxeval/judge.hpp"

namespace maxeval {

struct CampaignMeta {
    std::string backend_name;
    int k = 0;
    std::uint64_t seed = 0;
    std::string corpus_hash;
    std::string gold_policy;
    int min_valid = 3;
};

struct ReportBundle {
    ViolationPattern pattern;
    AccuracyMatrix accuracy;
    CampaignMeta meta;
};

struct ReportIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes pattern.csv and accuracy.csv into out_dir.
void emit_csv(const ReportBundle& bundle, const std::string& out_dir);

/// Writes violation_map.svg: side-by-side pattern/accuracy grids, darker =
/// higher value, split columns labeled 0-11, null cells hatched. Deterministic
/// byte-for-byte for identical bundles; campaign metadata is embedded as an
/// SVG comment.
void emit_heatmap(const ReportBundle& bundle, const std::string& out_dir);

/// Writes summary.md: per-submaxim violation rates, parse-failure and
/// undetermined rates, and for each split the 3 lowest-accuracy cells with one
/// verbatim judge explanation each.
void emit_summary(const ReportBundle& bundle, const RunLog& run_log,
                  const std::string& out_dir);

}  // namespace maxeval
