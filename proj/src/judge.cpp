#include "maxeval/judge.hpp"

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace maxeval {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& data, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::uint64_t derive_run_seed(std::uint64_t campaign_seed, const std::string& slice_id,
                              const SubmaximId& submaxim, int run_index, int attempt) {
    std::uint64_t h = fnv1a64(std::to_string(campaign_seed));
    h = fnv1a64("|" + slice_id + "|" + submaxim.name(), h);
    h = fnv1a64("|" + std::to_string(run_index) + "|" + std::to_string(attempt), h);
    return h;
}

// --- HTTP backend ---

namespace {

class HttpBackend final : public ChatBackend {
public:
    explicit HttpBackend(BackendSpec spec) : spec_(std::move(spec)) {
        const std::size_t scheme = spec_.endpoint.find("://");
        if (scheme == std::string::npos) {
            throw ConfigMismatch("endpoint is not a URL: " + spec_.endpoint);
        }
        const std::size_t path = spec_.endpoint.find('/', scheme + 3);
        if (path == std::string::npos) {
            base_ = spec_.endpoint;
        } else {
            base_ = spec_.endpoint.substr(0, path);
            prefix_ = spec_.endpoint.substr(path);
        }
        if (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }

    std::string name() const override { return spec_.name; }

    std::string complete(const MessageSequence& messages, const CallContext&) override {
        json payload;
        payload["model"] = spec_.name;
        payload["temperature"] = spec_.temperature;
        payload["messages"] = json::array();
        for (const auto& m : messages.messages) {
            payload["messages"].push_back(
                {{"role", m.role == MessageRole::system ? "system" : "user"},
                 {"content", m.content}});
        }

        httplib::Client client(base_);
        client.set_connection_timeout(spec_.timeout.count(), 0);
        client.set_read_timeout(spec_.timeout.count(), 0);
        httplib::Headers headers;
        if (const char* key = std::getenv("MAXIM_EVAL_API_KEY")) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        std::string last_error;
        for (int attempt = 0; attempt < spec_.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(500) * (1 << attempt));
            }
            auto res = client.Post(prefix_ + "/chat/completions", headers, payload.dump(),
                                   "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw BackendUnreachable("HTTP " + std::to_string(res->status) + ": " +
                                         res->body);
            }
            try {
                const json reply = json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const std::exception& e) {
                throw BackendUnreachable("malformed completion response: " +
                                         std::string(e.what()));
            }
        }
        throw BackendUnreachable("retry budget exhausted against " + base_ + ": " + last_error);
    }

private:
    BackendSpec spec_;
    std::string base_;
    std::string prefix_;
};

class MockBackend final : public ChatBackend {
public:
    MockBackend(MockRule rule, std::string name)
        : rule_(std::move(rule)), name_(std::move(name)) {}

    std::string name() const override { return name_; }

    std::string complete(const MessageSequence&, const CallContext& ctx) override {
        const bool violated = rule_(ctx.submaxim, ctx.slice);
        return serialize_label({violated ? Score::violated : Score::satisfied,
                                violated ? "mock verdict: requirement violated"
                                         : "mock verdict: requirement satisfied"});
    }

private:
    MockRule rule_;
    std::string name_;
};

}  // namespace

std::unique_ptr<ChatBackend> make_http_backend(const BackendSpec& spec) {
    return std::make_unique<HttpBackend>(spec);
}

std::unique_ptr<ChatBackend> make_mock_backend(MockRule violated_rule, std::string name) {
    return std::make_unique<MockBackend>(std::move(violated_rule), std::move(name));
}

MockRule marker_rule(std::string marker) {
    return [marker = std::move(marker)](const SubmaximId&, const Slice& slice) {
        return slice.response.text.find(marker) != std::string::npos;
    };
}

// --- single run / pair ---

JudgeRun run_single(const Slice& slice, const SubmaximRubric& rubric,
                    const ExamplePool& pool, ChatBackend& backend,
                    const CampaignConfig& config, int run_index) {
    JudgeRun run;
    run.slice_id = slice.id;
    run.submaxim = rubric.id;
    run.run_index = run_index;
    run.backend = backend.name();

    for (int attempt = 0; attempt <= config.parse_retry_limit; ++attempt) {
        std::mt19937_64 rng(
            derive_run_seed(config.seed, slice.id, rubric.id, run_index, attempt));
        const auto examples = sample_examples(pool, slice.final_speaker(), rng);
        run.example_ids.clear();
        for (const auto& ex : examples) run.example_ids.push_back(ex.id);

        const auto messages = build_messages(rubric, slice, examples);
        run.raw_output = backend.complete(messages, CallContext{rubric.id, slice});
        run.outcome = parse_judge_output(run.raw_output);
        if (run.outcome.ok) break;
    }
    run.timestamp = utc_timestamp();
    return run;
}

std::vector<JudgeRun> judge_pair(const Slice& slice, const SubmaximRubric& rubric,
                                 const ExamplePool& pool, ChatBackend& backend,
                                 const CampaignConfig& config) {
    if (config.k < 1 || config.k % 2 == 0) {
        throw ConfigMismatch("k must be odd and >= 1, got " + std::to_string(config.k));
    }
    std::vector<JudgeRun> runs;
    runs.reserve(config.k);
    for (int i = 0; i < config.k; ++i) {
        runs.push_back(run_single(slice, rubric, pool, backend, config, i));
    }
    return runs;
}

// --- campaign ---

namespace {

json header_to_json(const RunLogHeader& h) {
    return json{{"type", "header"},
                {"seed", h.seed},
                {"backend", h.backend},
                {"rubric_hash", h.rubric_hash},
                {"k", h.k}};
}

RunLogHeader header_from_json(const json& j) {
    RunLogHeader h;
    h.seed = j.at("seed").get<std::uint64_t>();
    h.backend = j.at("backend").get<std::string>();
    h.rubric_hash = j.at("rubric_hash").get<std::string>();
    h.k = j.at("k").get<int>();
    return h;
}

}  // namespace

std::string run_to_json(const JudgeRun& run) {
    json j;
    j["type"] = "run";
    j["slice_id"] = run.slice_id;
    j["submaxim"] = run.submaxim.name();
    j["run_index"] = run.run_index;
    j["example_ids"] = run.example_ids;
    j["raw_output"] = run.raw_output;
    if (run.outcome.ok) {
        j["outcome"] = {{"status", "ok"},
                        {"score", to_string(run.outcome.label.score)},
                        {"explanation", run.outcome.label.explanation}};
    } else {
        j["outcome"] = {{"status", "parse_failure"},
                        {"kind", to_string(run.outcome.error)}};
    }
    j["backend"] = run.backend;
    j["timestamp"] = run.timestamp;
    return j.dump();
}

JudgeRun run_from_json(const std::string& line) {
    const json j = json::parse(line);
    JudgeRun run;
    run.slice_id = j.at("slice_id").get<std::string>();
    auto id = parse_submaxim(j.at("submaxim").get<std::string>());
    if (!id) throw ConfigMismatch("run log has unknown submaxim: " + line);
    run.submaxim = *id;
    run.run_index = j.at("run_index").get<int>();
    run.example_ids = j.at("example_ids").get<std::vector<std::string>>();
    run.raw_output = j.at("raw_output").get<std::string>();
    const json& outcome = j.at("outcome");
    if (outcome.at("status") == "ok") {
        const std::string score = outcome.at("score").get<std::string>();
        run.outcome = JudgeParseResult::success(
            {score == "violated" ? Score::violated : Score::satisfied,
             outcome.at("explanation").get<std::string>()},
            run.raw_output);
    } else {
        const std::string kind = outcome.at("kind").get<std::string>();
        JudgeParseError err = JudgeParseError::no_json;
        if (kind == "missing_key") err = JudgeParseError::missing_key;
        if (kind == "invalid_score") err = JudgeParseError::invalid_score;
        run.outcome = JudgeParseResult::failure(err, run.raw_output);
    }
    run.backend = j.at("backend").get<std::string>();
    run.timestamp = j.at("timestamp").get<std::string>();
    return run;
}

RunLog load_run_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigMismatch("cannot open run log: " + path);
    RunLog log;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = json::parse(line);
        if (j.value("type", "") == "header") {
            log.header = header_from_json(j);
            have_header = true;
        } else {
            log.runs.push_back(run_from_json(line));
        }
    }
    if (!have_header) throw ConfigMismatch("run log has no header record: " + path);
    return log;
}

RunLog run_campaign(const std::vector<Slice>& slices,
                    const std::vector<SubmaximRubric>& rubrics,
                    const std::map<SubmaximId, ExamplePool>& pools,
                    ChatBackend& backend, const CampaignConfig& config,
                    const std::string& log_path, std::ostream* progress) {
    if (config.k < 1 || config.k % 2 == 0) {
        throw ConfigMismatch("k must be odd and >= 1, got " + std::to_string(config.k));
    }

    RunLog log;
    log.header = {config.seed, backend.name(), config.rubric_hash, config.k};

    std::set<std::tuple<std::string, SubmaximId, int>> done;
    bool had_header = false;
    {
        std::ifstream probe(log_path);
        if (probe && probe.peek() != std::ifstream::traits_type::eof()) {
            RunLog existing = load_run_log(log_path);
            had_header = true;
            if (existing.header.seed != config.seed ||
                existing.header.backend != backend.name() ||
                existing.header.rubric_hash != config.rubric_hash ||
                existing.header.k != config.k) {
                throw ConfigMismatch("run log " + log_path +
                                     " was written by a different campaign configuration");
            }
            for (const auto& r : existing.runs) {
                done.emplace(r.slice_id, r.submaxim, r.run_index);
            }
            log.runs = std::move(existing.runs);
        }
    }

    std::ofstream out(log_path, std::ios::app);
    if (!out) throw ConfigMismatch("cannot write run log: " + log_path);
    if (!had_header) {
        out << header_to_json(log.header).dump() << "\n";
        out.flush();
    }

    // Work items are independent (slice, submaxim, run) triples; the log
    // writer is the only serialization point.
    struct Item {
        const Slice* slice;
        const SubmaximRubric* rubric;
        const ExamplePool* pool;
        int run_index;
    };
    std::vector<Item> items;
    std::array<std::size_t, 12> per_submaxim_total{};
    for (const auto& id : canonical_submaxims()) {
        const auto& rubric = find_rubric(rubrics, id);
        const auto& pool = pools.at(id);
        for (const auto& slice : slices) {
            for (int r = 0; r < config.k; ++r) {
                if (done.count({slice.id, id, r})) continue;
                items.push_back({&slice, &rubric, &pool, r});
                ++per_submaxim_total[canonical_index(id)];
            }
        }
    }

    std::array<std::atomic<std::size_t>, 12> per_submaxim_done{};
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> executed{0};
    std::atomic<bool> stop{false};
    std::mutex writer_mutex;
    std::exception_ptr failure;

    auto worker = [&] {
        while (!stop.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            if (config.max_new_runs > 0 &&
                executed.fetch_add(1) >= config.max_new_runs) {
                stop.store(true);
                return;
            }
            const Item& item = items[i];
            try {
                JudgeRun run = run_single(*item.slice, *item.rubric, *item.pool, backend,
                                          config, item.run_index);
                std::lock_guard<std::mutex> lock(writer_mutex);
                out << run_to_json(run) << "\n";
                out.flush();
                log.runs.push_back(std::move(run));
                const int idx = canonical_index(item.rubric->id);
                if (++per_submaxim_done[idx] == per_submaxim_total[idx] && progress) {
                    *progress << item.rubric->id.name() << ": "
                              << per_submaxim_total[idx] << " runs done\n";
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(writer_mutex);
                if (!failure) failure = std::current_exception();
                stop.store(true);
                return;
            }
        }
    };

    const int workers = std::max(1, config.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return log;
}

}  // namespace maxeval
