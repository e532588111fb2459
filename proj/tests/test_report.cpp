#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "maxeval/report.hpp"
#include "test_util.hpp"

using namespace maxeval;

static const std::string kConfigDir = MAXEVAL_CONFIG_DIR;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

ReportBundle mock_bundle(const RunLog& log) {
    ReportBundle bundle;
    const auto aggregates = aggregate_run_log(log, 3);
    bundle.pattern = violation_pattern(aggregates);
    GoldMap gold;
    for (const auto& a : aggregates) {
        if (a.verdict == Verdict::undetermined) continue;
        gold[{a.slice_id, a.submaxim}] =
            a.verdict == Verdict::violated ? Score::violated : Score::satisfied;
    }
    bundle.accuracy = split_accuracy(aggregates, gold);
    bundle.meta = {"mock", log.header.k, log.header.seed, "testhash", "strict_agreement", 3};
    return bundle;
}

RunLog mock_campaign(const std::string& log_name) {
    const auto rubrics = load_rubrics(kConfigDir + "/rubrics.json");
    const auto pools = load_pools(kConfigDir + "/pools");
    std::vector<Slice> slices;
    for (int i = 0; i < 6; ++i) {
        slices.push_back(testutil::make_slice(
            "s" + std::to_string(i) + "#2", i % 2 ? "clean reply" : "reply with FLAG"));
    }
    auto backend = make_mock_backend(marker_rule("FLAG"));
    CampaignConfig config;
    config.k = 5;
    config.seed = 21;
    config.rubric_hash = rubric_set_hash(rubrics);
    const std::string path = testutil::temp_path(log_name);
    std::filesystem::remove(path);
    return run_campaign(slices, rubrics, pools, *backend, config, path);
}

}  // namespace

TEST_CASE("emit_csv writes lossless pattern and accuracy grids") {
    const auto log = mock_campaign("report_campaign.jsonl");
    const auto bundle = mock_bundle(log);
    const std::string dir = testutil::temp_path("report_csv");
    emit_csv(bundle, dir);

    const auto pattern_round = matrix_from_csv(read_file(dir + "/pattern.csv"));
    const auto accuracy_round = matrix_from_csv(read_file(dir + "/accuracy.csv"));
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            CHECK(pattern_round[i][j].value == bundle.pattern.matrix[i][j].value);
            CHECK(accuracy_round[i][j].support == bundle.accuracy.matrix[i][j].support);
        }
    }
}

TEST_CASE("emit_heatmap is deterministic and encodes nulls as hatching") {
    // Violate only quantity_1 so the other 11 splits stay empty and their
    // columns render as null (hatched) cells.
    const auto rubrics = load_rubrics(kConfigDir + "/rubrics.json");
    const auto pools = load_pools(kConfigDir + "/pools");
    std::vector<Slice> slices;
    for (int i = 0; i < 6; ++i) {
        slices.push_back(testutil::make_slice(
            "s" + std::to_string(i) + "#2", i % 2 ? "clean reply" : "reply with FLAG"));
    }
    auto backend = make_mock_backend([](const SubmaximId& id, const Slice& slice) {
        return id == SubmaximId{Maxim::quantity, 1} &&
               slice.response.text.find("FLAG") != std::string::npos;
    });
    CampaignConfig config;
    config.k = 5;
    config.seed = 21;
    config.rubric_hash = rubric_set_hash(rubrics);
    const std::string path = testutil::temp_path("heatmap_campaign.jsonl");
    std::filesystem::remove(path);
    const auto log = run_campaign(slices, rubrics, pools, *backend, config, path);
    const auto bundle = mock_bundle(log);
    const std::string dir1 = testutil::temp_path("heatmap1");
    const std::string dir2 = testutil::temp_path("heatmap2");
    emit_heatmap(bundle, dir1);
    emit_heatmap(bundle, dir2);

    const auto svg = read_file(dir1 + "/violation_map.svg");
    CHECK(svg == read_file(dir2 + "/violation_map.svg"));  // byte-identical
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("url(#hatch)") != std::string::npos);  // null cells present
    CHECK(svg.find("rgb(0,0,0)") != std::string::npos);   // value 1.0 -> darkest
    CHECK(svg.find("backend=mock") != std::string::npos); // metadata block
    for (const auto& id : canonical_submaxims()) {
        CHECK(svg.find(id.name()) != std::string::npos);
    }
}

TEST_CASE("emit_summary counts match the run log") {
    const auto log = mock_campaign("summary_campaign.jsonl");
    const auto bundle = mock_bundle(log);
    const std::string dir = testutil::temp_path("summary_out");
    emit_summary(bundle, log, dir);

    const auto md = read_file(dir + "/summary.md");
    CHECK(md.find("runs: " + std::to_string(log.runs.size())) != std::string::npos);
    CHECK(md.find("parse-failure rate: 0.000 (0 runs)") != std::string::npos);
    CHECK(md.find("undetermined rate: 0.000 (0 labels)") != std::string::npos);
    // 3 of 6 slices carry the marker: every submaxim shows 3 violated of 6
    CHECK(md.find("| quantity_1 | 3 | 6 | 0.500 |") != std::string::npos);

    // sampled explanations appear verbatim from the log
    CHECK(md.find("mock verdict: requirement violated") != std::string::npos);
}

TEST_CASE("emit_summary handles an empty run log") {
    RunLog empty;
    empty.header = {0, "mock", "h", 5};
    ReportBundle bundle;
    bundle.meta = {"mock", 5, 0, "h", "none", 3};
    const std::string dir = testutil::temp_path("summary_empty");
    emit_summary(bundle, empty, dir);
    const auto md = read_file(dir + "/summary.md");
    CHECK(md.find("runs: 0") != std::string::npos);
    CHECK(md.find("parse-failure rate: n/a") != std::string::npos);
    CHECK(md.find("mock verdict") == std::string::npos);
}
