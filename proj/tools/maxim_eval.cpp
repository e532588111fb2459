#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "maxeval/analysis.hpp"
#include "maxeval/corpus.hpp"
#include "maxeval/judge.hpp"
#include "maxeval/labels.hpp"
#include "maxeval/report.hpp"
#include "maxeval/rubrics.hpp"

using namespace maxeval;

namespace {

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    std::ostringstream oss;
    oss << std::hex << h;
    return oss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational-maxim judge pipeline"};
    app.require_subcommand(1);

    // slice
    std::string corpus_path, slices_out;
    auto* cmd_slice = app.add_subcommand("slice", "Ingest a corpus and emit all slices");
    cmd_slice->add_option("--corpus", corpus_path, "JSONL corpus file")->required();
    cmd_slice->add_option("--out", slices_out, "output slices JSONL")->required();

    // sample
    std::string sample_in, sample_out;
    std::size_t sample_n = 1000;
    std::uint64_t sample_seed = 0;
    auto* cmd_sample = app.add_subcommand("sample", "Stratified sample of slices");
    cmd_sample->add_option("--slices", sample_in, "slices JSONL")->required();
    cmd_sample->add_option("--n", sample_n, "sample size (even)");
    cmd_sample->add_option("--seed", sample_seed, "rng seed");
    cmd_sample->add_option("--out", sample_out, "output slices JSONL")->required();

    // judge
    std::string judge_slices, rubrics_path = "config/rubrics.json",
                pools_dir = "config/pools", endpoint, model, log_path, mock_marker;
    int k = 5, workers = 1;
    std::uint64_t judge_seed = 0;
    bool resume = false;
    double temperature = 0.0;
    auto* cmd_judge = app.add_subcommand("judge", "Run a labeling campaign");
    cmd_judge->add_option("--corpus", judge_slices, "slices JSONL to label")->required();
    cmd_judge->add_option("--rubrics", rubrics_path, "rubric registry file");
    cmd_judge->add_option("--pools", pools_dir, "example pool directory");
    cmd_judge->add_option("--backend-endpoint", endpoint,
                          "OpenAI-compatible base URL (e.g. https://host/v1)");
    cmd_judge->add_option("--model", model, "model identifier");
    cmd_judge->add_option("--k", k, "runs per (slice, submaxim); odd");
    cmd_judge->add_option("--seed", judge_seed, "campaign seed");
    cmd_judge->add_option("--workers", workers, "worker pool width");
    cmd_judge->add_option("--temperature", temperature, "sampling temperature");
    cmd_judge->add_flag("--resume", resume, "resume into an existing run log");
    cmd_judge->add_option("--log", log_path, "run log JSONL path")->required();
    cmd_judge->add_option("--mock-marker", mock_marker,
                          "use the offline mock judge: violated iff the response "
                          "contains this token");

    // aggregate
    std::string agg_log, agg_out;
    int min_valid = 3;
    auto* cmd_agg = app.add_subcommand("aggregate", "Majority labels from a run log");
    cmd_agg->add_option("--log", agg_log, "run log JSONL")->required();
    cmd_agg->add_option("--min-valid", min_valid, "minimum parsed runs per pair");
    cmd_agg->add_option("--out", agg_out, "aggregates JSONL")->required();

    // annotate
    std::string ann_slices, ann_annotator, ann_rubrics = "config/rubrics.json", ann_gold;
    auto* cmd_ann = app.add_subcommand("annotate", "Interactive gold labeling session");
    cmd_ann->add_option("--slices", ann_slices, "slices JSONL")->required();
    cmd_ann->add_option("--annotator", ann_annotator, "annotator id")->required();
    cmd_ann->add_option("--rubrics", ann_rubrics, "rubric registry file");
    cmd_ann->add_option("--gold", ann_gold, "gold JSONL (appended to)")->required();

    // report
    std::string rep_labels, rep_gold, rep_log, rep_out, rep_formats = "csv,svg,md",
                rep_policy = "strict_agreement", rep_priority;
    auto* cmd_rep = app.add_subcommand("report", "Emit matrices, heatmap, and summary");
    cmd_rep->add_option("--labels", rep_labels, "aggregates JSONL")->required();
    cmd_rep->add_option("--gold", rep_gold, "gold JSONL");
    cmd_rep->add_option("--run-log", rep_log, "run log JSONL (for the summary)");
    cmd_rep->add_option("--out", rep_out, "output directory")->required();
    cmd_rep->add_option("--formats", rep_formats, "comma list of csv,svg,md");
    cmd_rep->add_option("--gold-policy", rep_policy,
                        "strict_agreement or annotator_priority");
    cmd_rep->add_option("--priority-annotator", rep_priority,
                        "annotator id for annotator_priority");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_slice) {
            const auto conversations = load_corpus_jsonl(corpus_path, std::cerr);
            std::vector<Slice> slices;
            for (const auto& conv : conversations) {
                auto s = slice_conversation(conv);
                slices.insert(slices.end(), s.begin(), s.end());
            }
            save_slices_jsonl(slices, slices_out);
            std::cerr << conversations.size() << " conversations -> " << slices.size()
                      << " slices\n";
        } else if (*cmd_sample) {
            const auto slices = load_slices_jsonl(sample_in);
            save_slices_jsonl(stratified_sample(slices, sample_n, sample_seed), sample_out);
        } else if (*cmd_judge) {
            const auto slices = load_slices_jsonl(judge_slices);
            const auto rubrics = load_rubrics(rubrics_path);
            const auto pools = load_pools(pools_dir);

            std::unique_ptr<ChatBackend> backend;
            if (!mock_marker.empty()) {
                backend = make_mock_backend(marker_rule(mock_marker));
            } else {
                if (endpoint.empty() || model.empty()) {
                    std::cerr << "judge: need --backend-endpoint and --model "
                                 "(or --mock-marker)\n";
                    return 1;
                }
                BackendSpec spec;
                spec.name = model;
                spec.endpoint = endpoint;
                spec.temperature = temperature;
                backend = make_http_backend(spec);
            }

            if (!resume && std::ifstream(log_path).good()) {
                std::cerr << "judge: " << log_path
                          << " already exists; pass --resume to continue it\n";
                return 1;
            }

            CampaignConfig config;
            config.k = k;
            config.seed = judge_seed;
            config.backend_name = backend->name();
            config.rubric_hash = rubric_set_hash(rubrics);
            config.workers = workers;
            const RunLog log =
                run_campaign(slices, rubrics, pools, *backend, config, log_path, &std::cerr);
            std::cerr << "campaign complete: " << log.runs.size() << " runs in " << log_path
                      << "\n";
        } else if (*cmd_agg) {
            const RunLog log = load_run_log(agg_log);
            save_aggregates_jsonl(aggregate_run_log(log, min_valid), agg_out);
        } else if (*cmd_ann) {
            const auto slices = load_slices_jsonl(ann_slices);
            const auto rubrics = load_rubrics(ann_rubrics);
            AnnotatorIo io{
                [](const std::string& s) { std::cout << s; },
                [](const std::string& prompt) {
                    std::cout << prompt << std::flush;
                    std::string line;
                    if (!std::getline(std::cin, line)) return std::string("q");
                    return line;
                }};
            const auto records =
                annotate_session(slices, rubrics, ann_annotator, io, ann_gold);
            std::cout << records.size() << " gold records appended to " << ann_gold << "\n";
        } else if (*cmd_rep) {
            const auto aggregates = load_aggregates_jsonl(rep_labels);
            GoldMap gold;
            if (!rep_gold.empty()) {
                const auto records = load_gold_jsonl(rep_gold);
                const GoldPolicy policy = rep_policy == "annotator_priority"
                                              ? GoldPolicy::annotator_priority
                                              : GoldPolicy::strict_agreement;
                gold = resolve_gold(records, policy, rep_priority);
            }

            ReportBundle bundle;
            bundle.pattern = violation_pattern(aggregates);
            bundle.accuracy = split_accuracy(aggregates, gold);
            bundle.meta.gold_policy = rep_gold.empty() ? "none" : rep_policy;
            bundle.meta.corpus_hash = file_hash(rep_labels);

            RunLog log;
            if (!rep_log.empty()) {
                log = load_run_log(rep_log);
                bundle.meta.backend_name = log.header.backend;
                bundle.meta.k = log.header.k;
                bundle.meta.seed = log.header.seed;
            }

            if (rep_formats.find("csv") != std::string::npos) emit_csv(bundle, rep_out);
            if (rep_formats.find("svg") != std::string::npos) emit_heatmap(bundle, rep_out);
            if (rep_formats.find("md") != std::string::npos) {
                if (rep_log.empty()) {
                    std::cerr << "report: --run-log is required for the md summary\n";
                    return 1;
                }
                emit_summary(bundle, log, rep_out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
