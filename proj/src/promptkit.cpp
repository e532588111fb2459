#include "maxeval/promptkit.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace maxeval {

using nlohmann::json;

std::string to_string(Score s) {
    return s == Score::satisfied ? "satisfied" : "violated";
}

std::string to_string(JudgeParseError e) {
    switch (e) {
        case JudgeParseError::no_json: return "no_json";
        case JudgeParseError::missing_key: return "missing_key";
        case JudgeParseError::invalid_score: return "invalid_score";
    }
    throw std::logic_error("unknown parse error");
}

JudgeParseResult JudgeParseResult::success(ParsedLabel l, std::string raw_text) {
    return JudgeParseResult{true, std::move(l), JudgeParseError::no_json, std::move(raw_text)};
}

JudgeParseResult JudgeParseResult::failure(JudgeParseError e, std::string raw_text) {
    return JudgeParseResult{false, {}, e, std::move(raw_text)};
}

std::size_t MessageSequence::total_length() const {
    std::size_t n = 0;
    for (const auto& m : messages) n += m.content.size();
    return n;
}

const char* const kOutputSchema =
    "```json\n"
    "{\n"
    "\t\"score\": string  // score for the rubric\n"
    "\t\"explanation\": string  // explanation for the score\n"
    "}\n"
    "```";

std::string render_transcript(const std::vector<Turn>& context, const Turn& response) {
    std::string out = "Context:\n";
    for (const auto& turn : context) {
        out += to_string(turn.role) + ": " + turn.text + "\n";
    }
    out += "\nResponse:\n" + to_string(response.role) + ": " + response.text;
    return out;
}

std::string render_transcript(const Slice& slice) {
    return render_transcript(slice.context, slice.response);
}

MessageSequence build_messages(const SubmaximRubric& rubric, const Slice& slice,
                               const std::vector<LabeledExample>& examples) {
    if (examples.size() != 4) {
        throw BadExampleSet("need exactly 4 examples, got " + std::to_string(examples.size()));
    }
    for (int i = 0; i < 4; ++i) {
        const bool want_positive = i < 2;
        if ((examples[i].klass == ExampleClass::positive) != want_positive) {
            throw BadExampleSet("examples must be 2 positive then 2 negative");
        }
        if (examples[i].applicable_role() != slice.final_speaker()) {
            throw BadExampleSet("example " + examples[i].id +
                                " does not match the slice's final speaker");
        }
    }

    auto example_block = [&](const char* criterion, int first) {
        std::string block = "EXAMPLES FOR CRITERION: " + std::string(criterion) + "\n";
        for (int i = 0; i < 2; ++i) {
            const auto& ex = examples[first + i];
            block += "\nExample #" + std::to_string(i) + " for score: " + criterion + "\n";
            block += render_transcript(ex.context, ex.response) + "\n";
        }
        return block;
    };

    std::string system =
        "You will be asked to evaluate some text according to the requirement: " +
        rubric.requirement +
        "\n\n"
        "Please use the following criteria when assigning your score:\n"
        "yes: " + rubric.yes_criterion + "\n"
        "no: " + rubric.no_criterion +
        "\n\n"
        "To assist in the scoring exercise, some examples are provided below:\n\n" +
        example_block("yes", 0) + "\n" + example_block("no", 2);

    const std::string speaker = to_string(slice.final_speaker());
    std::string user =
        "Please use the criteria to evaluate the following " + speaker +
        "'s response subject to the context:\n" + render_transcript(slice) +
        "\n\n"
        "The output should be a markdown code snippet formatted in the following "
        "schema, including the leading and trailing \"```json\" and \"```\":\n\n" +
        kOutputSchema;

    return MessageSequence{{{MessageRole::system, std::move(system)},
                            {MessageRole::user, std::move(user)}}};
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

JudgeParseResult parse_judge_output(const std::string& raw) {
    std::string candidate;
    const std::size_t fence = raw.find("```json");
    if (fence != std::string::npos) {
        const std::size_t start = fence + 7;
        const std::size_t end = raw.find("```", start);
        candidate = raw.substr(start, end == std::string::npos ? end : end - start);
    } else {
        candidate = raw;
    }

    json doc = json::parse(trim(candidate), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        return JudgeParseResult::failure(JudgeParseError::no_json, raw);
    }
    if (!doc.contains("score") || !doc.contains("explanation") ||
        !doc["score"].is_string() || !doc["explanation"].is_string()) {
        return JudgeParseResult::failure(JudgeParseError::missing_key, raw);
    }
    const std::string score = lower(trim(doc["score"].get<std::string>()));
    if (score != "yes" && score != "no") {
        return JudgeParseResult::failure(JudgeParseError::invalid_score, raw);
    }
    ParsedLabel label{score == "yes" ? Score::satisfied : Score::violated,
                      doc["explanation"].get<std::string>()};
    return JudgeParseResult::success(std::move(label), raw);
}

std::string serialize_label(const ParsedLabel& label) {
    json body;
    body["score"] = label.score == Score::satisfied ? "yes" : "no";
    body["explanation"] = label.explanation;
    return "```json\n" + body.dump(1, '\t') + "\n```";
}

}  // namespace maxeval
