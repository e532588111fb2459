#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxeval {

enum class Role { user, assistant };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

struct Turn {
    Role role;
    std::string text;

    bool operator==(const Turn&) const = default;
};

/// A validated dialogue: >=2 turns, strictly alternating, user first.
struct Conversation {
    std::string id;
    std::vector<Turn> turns;
    std::string source;
};

/// A conversation prefix: all turns but the last form the context, the last
/// turn is the response under evaluation.
struct Slice {
    std::string id;  // "<conversation_id>#<prefix_length>"
    std::vector<Turn> context;
    Turn response;

    Role final_speaker() const { return response.role; }
};

struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientStratum : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OddSampleSize : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses an hh-rlhf style transcript ("\n\nHuman: ...\n\nAssistant: ...")
/// into a Conversation. Throws ParseFailure on empty input, an unknown
/// speaker tag, an assistant-first transcript, or broken alternation.
Conversation parse_transcript(const std::string& raw, const std::string& id,
                              const std::string& source = "");

/// Renders a conversation back to the hh-rlhf transcript convention.
std::string render_hh_transcript(const Conversation& conv);

/// Throws ParseFailure unless turns are nonempty after trimming, alternate
/// strictly, start with the user, and number at least two.
void validate_conversation(const Conversation& conv);

/// One slice per prefix of length 2..T, ordered by increasing prefix length.
std::vector<Slice> slice_conversation(const Conversation& conv);

/// Draws n/2 user-final and n/2 assistant-final slices uniformly without
/// replacement within each stratum. Deterministic for a fixed seed.
std::vector<Slice> stratified_sample(const std::vector<Slice>& slices, std::size_t n,
                                     std::uint64_t seed);

// --- JSONL interfaces ---

/// Reads a corpus file: one JSON record per line, either hh-rlhf records
/// (field "chosen" or "transcript") or pre-structured {id, turns:[{role,text}]}.
/// Malformed or invariant-violating rows are skipped with a warning on `warnings`.
std::vector<Conversation> load_corpus_jsonl(const std::string& path, std::ostream& warnings);

void save_slices_jsonl(const std::vector<Slice>& slices, const std::string& path);
std::vector<Slice> load_slices_jsonl(const std::string& path);

std::string slice_to_json(const Slice& s);
Slice slice_from_json(const std::string& line);

}  // namespace maxeval
