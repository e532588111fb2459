#include "maxeval/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace maxeval {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ReportIoError("cannot write " + path);
    out << content;
    if (!out) throw ReportIoError("write failed: " + path);
}

std::string meta_block(const CampaignMeta& meta) {
    std::ostringstream oss;
    oss << "backend=" << meta.backend_name << " k=" << meta.k << " seed=" << meta.seed
        << " corpus_hash=" << meta.corpus_hash << " gold_policy=" << meta.gold_policy
        << " min_valid=" << meta.min_valid;
    return oss.str();
}

std::string format_rate(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

void emit_csv(const ReportBundle& bundle, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/pattern.csv", matrix_to_csv(bundle.pattern.matrix));
    write_file(out_dir + "/accuracy.csv", matrix_to_csv(bundle.accuracy.matrix));
}

namespace {

constexpr int kCell = 28;
constexpr int kLeftMargin = 130;
constexpr int kTopMargin = 60;
constexpr int kGridGap = 70;
constexpr int kBottomMargin = 20;

void draw_grid(std::ostringstream& svg, const CellMatrix& matrix, int x0,
               const std::string& title, bool row_labels) {
    svg << "  <text x=\"" << x0 + 6 * kCell << "\" y=\"" << kTopMargin - 34
        << "\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    for (int j = 0; j < 12; ++j) {
        svg << "  <text x=\"" << x0 + j * kCell + kCell / 2 << "\" y=\"" << kTopMargin - 8
            << "\" text-anchor=\"middle\" font-size=\"11\">" << j << "</text>\n";
    }
    for (int i = 0; i < 12; ++i) {
        if (row_labels) {
            svg << "  <text x=\"" << x0 - 6 << "\" y=\""
                << kTopMargin + i * kCell + kCell / 2 + 4
                << "\" text-anchor=\"end\" font-size=\"11\">"
                << canonical_submaxims()[i].name() << "</text>\n";
        }
        for (int j = 0; j < 12; ++j) {
            const MatrixCell& cell = matrix[i][j];
            const int x = x0 + j * kCell;
            const int y = kTopMargin + i * kCell;
            std::string fill;
            if (cell.value.has_value()) {
                // Monotone: darker shade = higher value.
                const int shade = 255 - static_cast<int>(std::lround(*cell.value * 255.0));
                std::ostringstream f;
                f << "rgb(" << shade << "," << shade << "," << shade << ")";
                fill = f.str();
            } else {
                fill = "url(#hatch)";
            }
            svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
                << "\" height=\"" << kCell << "\" fill=\"" << fill
                << "\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";
        }
    }
}

}  // namespace

void emit_heatmap(const ReportBundle& bundle, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    const int grid_w = 12 * kCell;
    const int width = kLeftMargin + grid_w + kGridGap + grid_w + 20;
    const int height = kTopMargin + 12 * kCell + kBottomMargin;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<!-- " << meta_block(bundle.meta) << " -->\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"monospace\">\n"
        << "  <defs>\n"
        << "    <pattern id=\"hatch\" width=\"6\" height=\"6\" "
           "patternTransform=\"rotate(45)\" patternUnits=\"userSpaceOnUse\">\n"
        << "      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#bbb\" "
           "stroke-width=\"2\"/>\n"
        << "    </pattern>\n"
        << "  </defs>\n";
    draw_grid(svg, bundle.pattern.matrix, kLeftMargin, "violation pattern", true);
    draw_grid(svg, bundle.accuracy.matrix, kLeftMargin + grid_w + kGridGap, "split accuracy",
              false);
    svg << "</svg>\n";

    write_file(out_dir + "/violation_map.svg", svg.str());
}

void emit_summary(const ReportBundle& bundle, const RunLog& run_log,
                  const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    const auto aggregates = aggregate_run_log(run_log, bundle.meta.min_valid);
    const auto splits = build_splits(aggregates);

    std::size_t failed_runs = 0;
    for (const auto& run : run_log.runs) {
        if (!run.outcome.ok) ++failed_runs;
    }
    std::size_t undetermined = 0;
    std::array<int, 12> violated_counts{};
    std::array<int, 12> labeled_counts{};
    for (const auto& a : aggregates) {
        const int idx = canonical_index(a.submaxim);
        if (a.verdict == Verdict::undetermined) {
            ++undetermined;
            continue;
        }
        ++labeled_counts[idx];
        if (a.verdict == Verdict::violated) ++violated_counts[idx];
    }

    std::ostringstream md;
    md << "# Campaign summary\n\n"
       << "- " << meta_block(bundle.meta) << "\n"
       << "- runs: " << run_log.runs.size() << "\n"
       << "- parse-failure rate: "
       << (run_log.runs.empty()
               ? std::string("n/a")
               : format_rate(static_cast<double>(failed_runs) / run_log.runs.size()))
       << " (" << failed_runs << " runs)\n"
       << "- undetermined rate: "
       << (aggregates.empty()
               ? std::string("n/a")
               : format_rate(static_cast<double>(undetermined) / aggregates.size()))
       << " (" << undetermined << " labels)\n\n";

    md << "## Violation rate per submaxim\n\n"
       << "| submaxim | violated | labeled | rate |\n"
       << "|---|---|---|---|\n";
    for (int i = 0; i < 12; ++i) {
        md << "| " << canonical_submaxims()[i].name() << " | " << violated_counts[i] << " | "
           << labeled_counts[i] << " | "
           << (labeled_counts[i] ? format_rate(static_cast<double>(violated_counts[i]) /
                                               labeled_counts[i])
                                 : std::string(""))
           << " |\n";
    }

    md << "\n## Lowest-accuracy cells per split\n";
    for (int j = 0; j < 12; ++j) {
        md << "\n### split " << j << " (" << canonical_submaxims()[j].name()
           << " violated, " << bundle.pattern.split_support[j] << " members)\n\n";
        std::vector<std::pair<double, int>> cells;
        for (int i = 0; i < 12; ++i) {
            const MatrixCell& cell = bundle.accuracy.matrix[i][j];
            if (cell.value.has_value()) cells.emplace_back(*cell.value, i);
        }
        std::stable_sort(cells.begin(), cells.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        if (cells.empty()) {
            md << "no gold-covered cells\n";
            continue;
        }
        for (std::size_t c = 0; c < std::min<std::size_t>(3, cells.size()); ++c) {
            const int i = cells[c].second;
            const SubmaximId row = canonical_submaxims()[i];
            md << "- " << row.name() << ": accuracy " << format_rate(cells[c].first)
               << " (support " << bundle.accuracy.matrix[i][j].support << ")\n";
            // One verbatim judge explanation from a run in this split.
            const JudgeRun* pick = nullptr;
            for (const auto& run : run_log.runs) {
                if (run.submaxim != row || !run.outcome.ok) continue;
                if (!splits[j].member_slice_ids.count(run.slice_id)) continue;
                if (!pick || run.slice_id < pick->slice_id ||
                    (run.slice_id == pick->slice_id && run.run_index < pick->run_index)) {
                    pick = &run;
                }
            }
            if (pick) {
                md << "  - " << pick->backend << " on " << pick->slice_id << ": \""
                   << pick->outcome.label.explanation << "\"\n";
            }
        }
    }

    write_file(out_dir + "/summary.md", md.str());
}

}  // namespace maxeval
