#include "maxeval/labels.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maxeval/promptkit.hpp"

namespace maxeval {

using nlohmann::json;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::satisfied: return "satisfied";
        case Verdict::violated: return "violated";
        case Verdict::undetermined: return "undetermined";
    }
    throw std::logic_error("unknown verdict");
}

AggregateLabel aggregate_votes(const std::vector<JudgeRun>& runs, int min_valid) {
    if (runs.empty()) throw EmptyRunSet("no runs to aggregate");

    AggregateLabel label;
    label.slice_id = runs.front().slice_id;
    label.submaxim = runs.front().submaxim;
    for (const auto& run : runs) {
        if (run.slice_id != label.slice_id || run.submaxim != label.submaxim) {
            throw EmptyRunSet("runs mix (slice, submaxim) pairs: " + run.slice_id);
        }
        if (!run.outcome.ok) continue;
        ++label.valid_runs;
        if (run.outcome.label.score == Score::violated) ++label.violated_votes;
    }

    const int satisfied_votes = label.valid_runs - label.violated_votes;
    if (label.valid_runs < min_valid || label.violated_votes == satisfied_votes) {
        label.verdict = Verdict::undetermined;
    } else {
        label.verdict = label.violated_votes > satisfied_votes ? Verdict::violated
                                                               : Verdict::satisfied;
    }
    label.confidence = label.valid_runs == 0
                           ? 0.0
                           : static_cast<double>(std::max(label.violated_votes,
                                                          satisfied_votes)) /
                                 label.valid_runs;
    return label;
}

std::vector<AggregateLabel> aggregate_run_log(const RunLog& log, int min_valid) {
    std::map<std::pair<std::string, SubmaximId>, std::vector<JudgeRun>> groups;
    for (const auto& run : log.runs) {
        groups[{run.slice_id, run.submaxim}].push_back(run);
    }
    std::vector<AggregateLabel> out;
    out.reserve(groups.size());
    for (const auto& [key, runs] : groups) out.push_back(aggregate_votes(runs, min_valid));
    return out;
}

void save_aggregates_jsonl(const std::vector<AggregateLabel>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write aggregates file: " + path);
    for (const auto& l : labels) {
        json j{{"slice_id", l.slice_id},
               {"submaxim", l.submaxim.name()},
               {"valid_runs", l.valid_runs},
               {"violated_votes", l.violated_votes},
               {"verdict", to_string(l.verdict)},
               {"confidence", l.confidence}};
        out << j.dump() << "\n";
    }
}

std::vector<AggregateLabel> load_aggregates_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open aggregates file: " + path);
    std::vector<AggregateLabel> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = json::parse(line);
        AggregateLabel l;
        l.slice_id = j.at("slice_id").get<std::string>();
        auto id = parse_submaxim(j.at("submaxim").get<std::string>());
        if (!id) throw std::runtime_error("unknown submaxim in aggregates: " + line);
        l.submaxim = *id;
        l.valid_runs = j.at("valid_runs").get<int>();
        l.violated_votes = j.at("violated_votes").get<int>();
        const std::string verdict = j.at("verdict").get<std::string>();
        l.verdict = verdict == "violated"
                        ? Verdict::violated
                        : verdict == "satisfied" ? Verdict::satisfied : Verdict::undetermined;
        l.confidence = j.at("confidence").get<double>();
        out.push_back(std::move(l));
    }
    return out;
}

// --- gold labels ---

void save_gold_jsonl(const std::vector<GoldLabel>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write gold file: " + path);
    for (const auto& g : records) {
        json j{{"slice_id", g.slice_id},
               {"submaxim", g.submaxim.name()},
               {"verdict", g.verdict == Score::violated ? "violated" : "satisfied"},
               {"annotator", g.annotator}};
        out << j.dump() << "\n";
    }
}

std::vector<GoldLabel> load_gold_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gold file: " + path);

    // Last record wins per (slice, submaxim, annotator): the annotation flow
    // appends corrections rather than rewriting the file.
    std::map<std::tuple<std::string, SubmaximId, std::string>, GoldLabel> latest;
    std::vector<std::tuple<std::string, SubmaximId, std::string>> order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = json::parse(line);
        GoldLabel g;
        g.slice_id = j.at("slice_id").get<std::string>();
        auto id = parse_submaxim(j.at("submaxim").get<std::string>());
        if (!id) throw std::runtime_error("unknown submaxim in gold file: " + line);
        g.submaxim = *id;
        g.verdict = j.at("verdict").get<std::string>() == "violated" ? Score::violated
                                                                     : Score::satisfied;
        g.annotator = j.at("annotator").get<std::string>();
        const auto key = std::make_tuple(g.slice_id, g.submaxim, g.annotator);
        if (!latest.count(key)) order.push_back(key);
        latest[key] = std::move(g);
    }
    std::vector<GoldLabel> out;
    out.reserve(order.size());
    for (const auto& key : order) out.push_back(latest.at(key));
    return out;
}

std::map<std::pair<std::string, SubmaximId>, Score> resolve_gold(
    const std::vector<GoldLabel>& records, GoldPolicy policy,
    const std::string& priority_annotator) {
    std::map<std::pair<std::string, SubmaximId>, Score> out;

    if (policy == GoldPolicy::annotator_priority) {
        bool seen = false;
        for (const auto& g : records) {
            if (g.annotator != priority_annotator) continue;
            seen = true;
            out[{g.slice_id, g.submaxim}] = g.verdict;
        }
        if (!seen) {
            throw UnknownAnnotator("no records from annotator " + priority_annotator);
        }
        return out;
    }

    // strict_agreement: keep pairs labeled identically by every annotator that
    // labeled them.
    std::map<std::pair<std::string, SubmaximId>, std::pair<Score, bool>> seen;
    for (const auto& g : records) {
        auto key = std::make_pair(g.slice_id, g.submaxim);
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen[key] = {g.verdict, true};
        } else if (it->second.first != g.verdict) {
            it->second.second = false;
        }
    }
    for (const auto& [key, val] : seen) {
        if (val.second) out[key] = val.first;
    }
    return out;
}

std::vector<GoldLabel> annotate_session(const std::vector<Slice>& slices,
                                        const std::vector<SubmaximRubric>& rubrics,
                                        const std::string& annotator,
                                        const AnnotatorIo& io,
                                        const std::string& gold_path) {
    std::vector<GoldLabel> session;
    std::ofstream out(gold_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to gold file: " + gold_path);

    for (const auto& slice : slices) {
        io.show("=== " + slice.id + " ===\n" + render_transcript(slice) + "\n");
        std::vector<GoldLabel> slice_records;
        bool quit = false;
        for (const auto& id : canonical_submaxims()) {
            const auto& rubric = find_rubric(rubrics, id);
            std::string answer;
            for (;;) {
                answer = io.ask(id.name() + " — " + rubric.requirement +
                                "\nviolated? [y/n/s(kip)/q(uit)] ");
                if (answer == "y" || answer == "n" || answer == "s" || answer == "q") break;
                io.show("please answer y, n, s, or q\n");
            }
            if (answer == "q") {
                quit = true;
                break;
            }
            if (answer == "s") continue;
            slice_records.push_back(
                {slice.id, id, answer == "y" ? Score::violated : Score::satisfied,
                 annotator});
        }
        // Persist per slice so an interrupt loses at most the slice in flight.
        for (const auto& g : slice_records) {
            json j{{"slice_id", g.slice_id},
                   {"submaxim", g.submaxim.name()},
                   {"verdict", g.verdict == Score::violated ? "violated" : "satisfied"},
                   {"annotator", g.annotator}};
            out << j.dump() << "\n";
        }
        out.flush();
        session.insert(session.end(), slice_records.begin(), slice_records.end());
        if (quit) break;
    }
    return session;
}

}  // namespace maxeval
