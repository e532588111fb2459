#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "maxeval/judge.hpp"
#include "maxeval/labels.hpp"
#include "test_util.hpp"

using namespace maxeval;

static const std::string kConfigDir = MAXEVAL_CONFIG_DIR;

namespace {

struct Fixture {
    std::vector<SubmaximRubric> rubrics = load_rubrics(kConfigDir + "/rubrics.json");
    std::map<SubmaximId, ExamplePool> pools = load_pools(kConfigDir + "/pools");
    Slice slice = testutil::make_slice("c#2", "hello there");

    CampaignConfig config(std::uint64_t seed = 1) const {
        CampaignConfig c;
        c.seed = seed;
        c.rubric_hash = rubric_set_hash(rubrics);
        return c;
    }
};

/// Replays a fixed list of raw replies, then repeats the last one.
class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> replies)
        : replies_(std::move(replies)) {}

    std::string name() const override { return "scripted"; }

    std::string complete(const MessageSequence&, const CallContext&) override {
        const std::string& reply = replies_[std::min(calls_, replies_.size() - 1)];
        ++calls_;
        return reply;
    }

    std::size_t calls() const { return calls_; }

private:
    std::vector<std::string> replies_;
    std::size_t calls_ = 0;
};

std::string remove_log(const std::string& name) {
    const std::string path = testutil::temp_path(name);
    std::filesystem::remove(path);
    return path;
}

}  // namespace

TEST_CASE("run_single records a parsed verdict from a well-behaved backend") {
    Fixture fx;
    auto backend = make_mock_backend([](const SubmaximId&, const Slice&) { return false; });
    const auto& rubric = find_rubric(fx.rubrics, {Maxim::quantity, 1});
    const auto run =
        run_single(fx.slice, rubric, fx.pools.at(rubric.id), *backend, fx.config(), 0);
    REQUIRE(run.outcome.ok);
    CHECK(run.outcome.label.score == Score::satisfied);
    CHECK(run.example_ids.size() == 4);
    CHECK(run.slice_id == "c#2");
}

TEST_CASE("run_single retries parse failures with fresh examples") {
    Fixture fx;
    const auto& rubric = find_rubric(fx.rubrics, {Maxim::quantity, 1});
    const std::string good = "```json\n{\"score\": \"no\", \"explanation\": \"e\"}\n```";

    SUBCASE("succeeds on the third attempt with retry limit 2") {
        ScriptedBackend backend({"garbage", "more garbage", good});
        const auto run =
            run_single(fx.slice, rubric, fx.pools.at(rubric.id), backend, fx.config(), 0);
        CHECK(backend.calls() == 3);
        REQUIRE(run.outcome.ok);
        CHECK(run.outcome.label.score == Score::violated);
    }
    SUBCASE("records the failure after exhausting retries") {
        ScriptedBackend backend({"garbage"});
        const auto run =
            run_single(fx.slice, rubric, fx.pools.at(rubric.id), backend, fx.config(), 0);
        CHECK(backend.calls() == 3);  // 1 + parse_retry_limit
        REQUIRE(!run.outcome.ok);
        CHECK(run.outcome.error == JudgeParseError::no_json);
        CHECK(run.raw_output == "garbage");
    }
}

TEST_CASE("judge_pair produces k runs with distinct indices") {
    Fixture fx;
    auto backend = make_mock_backend([](const SubmaximId&, const Slice&) { return true; });
    const auto& rubric = find_rubric(fx.rubrics, {Maxim::relevance, 2});

    auto config = fx.config();
    config.k = 5;
    const auto runs = judge_pair(fx.slice, rubric, fx.pools.at(rubric.id), *backend, config);
    REQUIRE(runs.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(runs[i].run_index == i);

    config.k = 1;
    CHECK(judge_pair(fx.slice, rubric, fx.pools.at(rubric.id), *backend, config).size() == 1);

    config.k = 4;
    CHECK_THROWS_AS(judge_pair(fx.slice, rubric, fx.pools.at(rubric.id), *backend, config),
                    ConfigMismatch);
}

TEST_CASE("rerunning a pair replays the same example id sequence") {
    Fixture fx;
    auto backend = make_mock_backend([](const SubmaximId&, const Slice&) { return false; });
    const auto& rubric = find_rubric(fx.rubrics, {Maxim::transparency, 3});
    const auto config = fx.config(77);

    const auto first = judge_pair(fx.slice, rubric, fx.pools.at(rubric.id), *backend, config);
    const auto second = judge_pair(fx.slice, rubric, fx.pools.at(rubric.id), *backend, config);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].example_ids == second[i].example_ids);
    }
}

TEST_CASE("run_campaign executes |slices| x 12 x k runs and resumes cleanly") {
    Fixture fx;
    std::vector<Slice> slices;
    for (int i = 0; i < 3; ++i) {
        slices.push_back(testutil::make_slice("s" + std::to_string(i) + "#2", "text"));
    }
    auto backend = make_mock_backend(marker_rule("BAD"));
    auto config = fx.config(5);
    config.k = 5;

    const std::string log_path = remove_log("campaign.jsonl");
    const auto log = run_campaign(slices, fx.rubrics, fx.pools, *backend, config, log_path);
    CHECK(log.runs.size() == 3 * 12 * 5);

    // resuming a complete campaign executes nothing new
    const auto resumed =
        run_campaign(slices, fx.rubrics, fx.pools, *backend, config, log_path);
    CHECK(resumed.runs.size() == log.runs.size());

    // resuming with a different seed is rejected
    auto other = config;
    other.seed = 6;
    CHECK_THROWS_AS(run_campaign(slices, fx.rubrics, fx.pools, *backend, other, log_path),
                    ConfigMismatch);
}

TEST_CASE("interrupted campaign resumes to exactly the remaining runs") {
    Fixture fx;
    std::vector<Slice> slices = {testutil::make_slice("a#2", "x"),
                                 testutil::make_slice("b#2", "y")};
    auto backend = make_mock_backend([](const SubmaximId&, const Slice&) { return false; });
    auto config = fx.config(9);
    config.k = 5;

    const std::string log_path = remove_log("partial.jsonl");
    config.max_new_runs = 37;
    run_campaign(slices, fx.rubrics, fx.pools, *backend, config, log_path);
    CHECK(load_run_log(log_path).runs.size() == 37);

    config.max_new_runs = 0;
    const auto log = run_campaign(slices, fx.rubrics, fx.pools, *backend, config, log_path);
    CHECK(log.runs.size() == 2 * 12 * 5);
}

TEST_CASE("run log round-trips through JSONL") {
    Fixture fx;
    auto backend = make_mock_backend([](const SubmaximId&, const Slice&) { return true; });
    const auto& rubric = find_rubric(fx.rubrics, {Maxim::benevolence, 2});
    auto run = run_single(fx.slice, rubric, fx.pools.at(rubric.id), *backend, fx.config(), 3);

    const auto round = run_from_json(run_to_json(run));
    CHECK(round.slice_id == run.slice_id);
    CHECK(round.submaxim == run.submaxim);
    CHECK(round.run_index == run.run_index);
    CHECK(round.example_ids == run.example_ids);
    CHECK(round.raw_output == run.raw_output);
    CHECK(round.outcome.ok == run.outcome.ok);
    CHECK(round.outcome.label.score == run.outcome.label.score);
}

TEST_CASE("marker rule mock labels exactly by the marker") {
    auto backend = make_mock_backend(marker_rule("XMARK"));
    Fixture fx;
    const auto& rubric = find_rubric(fx.rubrics, {Maxim::quality, 1});

    const auto clean = testutil::make_slice("clean#2", "a harmless reply");
    const auto marked = testutil::make_slice("marked#2", "reply with XMARK inside");
    const auto r1 =
        run_single(clean, rubric, fx.pools.at(rubric.id), *backend, fx.config(), 0);
    const auto r2 =
        run_single(marked, rubric, fx.pools.at(rubric.id), *backend, fx.config(), 0);
    CHECK(r1.outcome.label.score == Score::satisfied);
    CHECK(r2.outcome.label.score == Score::violated);
}
