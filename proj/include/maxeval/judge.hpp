#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxeval/corpus.hpp"
#include "maxeval/promptkit.hpp"
#include "maxeval/rubrics.hpp"

namespace maxeval {

struct BackendSpec {
    std::string name;      // model identifier
    std::string endpoint;  // base URL through the API prefix, e.g. https://host/v1
    double temperature = 0.0;
    int max_retries = 3;
    std::chrono::seconds timeout{120};
};

struct BackendUnreachable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// What a backend is being asked about; network backends ignore it, the mock
/// backend keys its deterministic verdict off it.
struct CallContext {
    const SubmaximId& submaxim;
    const Slice& slice;
};

/// Pluggable chat backend: takes the prompt, returns the raw completion text.
/// Throws BackendUnreachable when the transport retry budget is exhausted.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string complete(const MessageSequence& messages, const CallContext& ctx) = 0;
};

/// OpenAI-compatible chat-completions client with exponential backoff.
/// Reads the API key from the MAXIM_EVAL_API_KEY environment variable.
std::unique_ptr<ChatBackend> make_http_backend(const BackendSpec& spec);

/// Deterministic in-process judge for tests and offline runs: replies with
/// the standard fenced JSON, score "no" iff `violated_rule` returns true.
using MockRule = std::function<bool(const SubmaximId&, const Slice&)>;
std::unique_ptr<ChatBackend> make_mock_backend(MockRule violated_rule,
                                               std::string name = "mock");

/// Rule used by the `--mock-marker` CLI path: violated iff the response text
/// contains the marker token.
MockRule marker_rule(std::string marker);

struct JudgeRun {
    std::string slice_id;
    SubmaximId submaxim;
    int run_index = 0;
    std::vector<std::string> example_ids;  // the 4 in-context example ids used
    std::string raw_output;
    JudgeParseResult outcome;
    std::string backend;
    std::string timestamp;
};

struct CampaignConfig {
    int k = 5;  // judge runs per (slice, submaxim); must be odd and >= 1
    std::uint64_t seed = 0;
    int parse_retry_limit = 2;
    std::string backend_name;
    std::string rubric_hash;
    int workers = 1;
    // Test hook: stop after this many newly executed runs (0 = no limit),
    // persisting what completed. Simulates an interrupted campaign.
    std::size_t max_new_runs = 0;
};

struct RunLogHeader {
    std::uint64_t seed = 0;
    std::string backend;
    std::string rubric_hash;
    int k = 0;
};

struct RunLog {
    RunLogHeader header;
    std::vector<JudgeRun> runs;
};

/// Seed for the rng stream of one (slice, submaxim, run, attempt); derived so
/// that pairs are independent and resume/parallel order cannot change draws.
std::uint64_t derive_run_seed(std::uint64_t campaign_seed, const std::string& slice_id,
                              const SubmaximId& submaxim, int run_index, int attempt);

/// One judge call with retries: samples 4 examples, builds the prompt, calls
/// the backend, parses. On a parse failure, re-asks with freshly sampled
/// examples up to `parse_retry_limit` times before recording a failed run.
JudgeRun run_single(const Slice& slice, const SubmaximRubric& rubric,
                    const ExamplePool& pool, ChatBackend& backend,
                    const CampaignConfig& config, int run_index);

/// k runs for one (slice, submaxim) pair, run_index 0..k-1.
std::vector<JudgeRun> judge_pair(const Slice& slice, const SubmaximRubric& rubric,
                                 const ExamplePool& pool, ChatBackend& backend,
                                 const CampaignConfig& config);

/// Executes (or resumes) a full campaign over |slices| x 12 x k runs, with the
/// run log as the single append-only serialization point. Already-logged runs
/// are skipped; a resume against a log with a different seed/backend/rubric
/// hash/k throws ConfigMismatch.
RunLog run_campaign(const std::vector<Slice>& slices,
                    const std::vector<SubmaximRubric>& rubrics,
                    const std::map<SubmaximId, ExamplePool>& pools,
                    ChatBackend& backend, const CampaignConfig& config,
                    const std::string& log_path,
                    std::ostream* progress = nullptr);

RunLog load_run_log(const std::string& path);

std::string run_to_json(const JudgeRun& run);
JudgeRun run_from_json(const std::string& line);

}  // namespace maxeval
