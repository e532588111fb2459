#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "maxeval/corpus.hpp"
#include "maxeval/rubrics.hpp"

namespace maxeval {

enum class MessageRole { system, user };

struct Message {
    MessageRole role;
    std::string content;
};

/// Exactly one system message followed by one user message.
struct MessageSequence {
    std::vector<Message> messages;

    std::size_t total_length() const;
};

enum class Score { satisfied, violated };

std::string to_string(Score s);

struct ParsedLabel {
    Score score;
    std::string explanation;
};

enum class JudgeParseError { no_json, missing_key, invalid_score };

std::string to_string(JudgeParseError e);

/// Outcome of parsing one judge reply. On failure, `raw` carries the reply
/// verbatim for the run log.
struct JudgeParseResult {
    bool ok;
    ParsedLabel label;        // valid iff ok
    JudgeParseError error;    // valid iff !ok
    std::string raw;

    static JudgeParseResult success(ParsedLabel l, std::string raw_text);
    static JudgeParseResult failure(JudgeParseError e, std::string raw_text);
};

struct BadExampleSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The fixed fenced-JSON schema block appended to every judge prompt.
extern const char* const kOutputSchema;

/// "Context:" header, one "role: text" line per context turn, blank line,
/// "Response:" header, the response as "role: text".
std::string render_transcript(const std::vector<Turn>& context, const Turn& response);
std::string render_transcript(const Slice& slice);

/// Builds the two-message judge prompt: system = requirement + criteria +
/// yes/no example blocks, user = rendered slice + output schema. Requires
/// exactly 2 positive then 2 negative examples matching the slice's final
/// speaker; throws BadExampleSet otherwise.
MessageSequence build_messages(const SubmaximRubric& rubric, const Slice& slice,
                               const std::vector<LabeledExample>& examples);

/// Extracts the first ```json fenced block (or tries the whole string),
/// requires keys "score" and "explanation", and maps yes/no (case-insensitive,
/// trimmed) to satisfied/violated.
JudgeParseResult parse_judge_output(const std::string& raw);

/// Serializes a label into the same fenced schema the judge is asked to emit.
std::string serialize_label(const ParsedLabel& label);

}  // namespace maxeval
