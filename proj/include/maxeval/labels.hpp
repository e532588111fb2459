#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxeval/judge.hpp"
#include "maxeval/submaxim.hpp"

namespace maxeval {

enum class Verdict { satisfied, violated, undetermined };

std::string to_string(Verdict v);

/// Majority label over the k judge runs of one (slice, submaxim) pair.
struct AggregateLabel {
    std::string slice_id;
    SubmaximId submaxim;
    int valid_runs = 0;
    int violated_votes = 0;
    Verdict verdict = Verdict::undetermined;
    double confidence = 0.0;  // max(violated, satisfied) / valid_runs
};

struct GoldLabel {
    std::string slice_id;
    SubmaximId submaxim;
    Score verdict;
    std::string annotator;
};

struct EmptyRunSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownAnnotator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Majority vote over runs sharing one (slice, submaxim). Only parsed runs
/// count; verdict is undetermined below min_valid or on an exact tie.
AggregateLabel aggregate_votes(const std::vector<JudgeRun>& runs, int min_valid);

/// Groups a run log by (slice, submaxim) and aggregates each group.
std::vector<AggregateLabel> aggregate_run_log(const RunLog& log, int min_valid = 3);

void save_aggregates_jsonl(const std::vector<AggregateLabel>& labels, const std::string& path);
std::vector<AggregateLabel> load_aggregates_jsonl(const std::string& path);

// --- gold labels ---

void save_gold_jsonl(const std::vector<GoldLabel>& records, const std::string& path);
/// Loads gold records; a later record for the same (slice, submaxim, annotator)
/// overwrites an earlier one.
std::vector<GoldLabel> load_gold_jsonl(const std::string& path);

enum class GoldPolicy { strict_agreement, annotator_priority };

/// Resolves multi-annotator gold records to binary verdicts. strict_agreement
/// drops disagreeing pairs; annotator_priority takes the named annotator's
/// verdict (UnknownAnnotator if absent from the records).
std::map<std::pair<std::string, SubmaximId>, Score> resolve_gold(
    const std::vector<GoldLabel>& records, GoldPolicy policy,
    const std::string& priority_annotator = "");

/// Terminal IO seam for the annotation flow, replaceable in tests.
struct AnnotatorIo {
    std::function<void(const std::string&)> show;
    // Returns "y", "n", "s" (skip) or "q" (quit session).
    std::function<std::string(const std::string& prompt)> ask;
};

/// Sequential annotation: for each slice, shows the rendered transcript and
/// prompts y/n/skip for each of the 12 submaxims. Appends to the gold file
/// after each slice so an interrupt loses at most the current slice.
std::vector<GoldLabel> annotate_session(const std::vector<Slice>& slices,
                                        const std::vector<SubmaximRubric>& rubrics,
                                        const std::string& annotator,
                                        const AnnotatorIo& io,
                                        const std::string& gold_path);

}  // namespace maxeval
