#include "maxeval/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace maxeval {

using nlohmann::json;

std::string to_string(Role r) {
    return r == Role::user ? "user" : "assistant";
}

Role role_from_string(const std::string& s) {
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    throw ParseFailure("unknown role: " + s);
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void validate_conversation(const Conversation& conv) {
    if (conv.turns.size() < 2) {
        throw ParseFailure("conversation " + conv.id + ": fewer than 2 turns");
    }
    if (conv.turns.front().role != Role::user) {
        throw ParseFailure("conversation " + conv.id + ": first turn is not the user");
    }
    for (std::size_t i = 0; i < conv.turns.size(); ++i) {
        if (trim(conv.turns[i].text).empty()) {
            throw ParseFailure("conversation " + conv.id + ": empty turn " + std::to_string(i));
        }
        if (i > 0 && conv.turns[i].role == conv.turns[i - 1].role) {
            throw ParseFailure("conversation " + conv.id + ": consecutive turns by " +
                               to_string(conv.turns[i].role));
        }
    }
}

Conversation parse_transcript(const std::string& raw, const std::string& id,
                              const std::string& source) {
    const std::string trimmed = trim(raw);
    if (trimmed.empty()) throw ParseFailure("conversation " + id + ": empty transcript");

    struct Tag {
        const char* text;
        Role role;
    };
    static const Tag tags[] = {{"Human:", Role::user}, {"Assistant:", Role::assistant}};

    Conversation conv{id, {}, source};

    // Leading tag, then "\n\nHuman:" / "\n\nAssistant:" as turn delimiters.
    std::size_t pos = 0;
    const Tag* current = nullptr;
    for (const auto& t : tags) {
        if (trimmed.rfind(t.text, 0) == 0) {
            current = &t;
            pos = std::string(t.text).size();
        }
    }
    if (!current) throw ParseFailure("conversation " + id + ": unknown speaker tag");

    while (true) {
        std::size_t next = std::string::npos;
        const Tag* next_tag = nullptr;
        for (const auto& t : tags) {
            std::size_t p = trimmed.find(std::string("\n\n") + t.text, pos);
            if (p < next) {
                next = p;
                next_tag = &t;
            }
        }
        const std::string text =
            trim(trimmed.substr(pos, next == std::string::npos ? next : next - pos));
        if (text.empty()) throw ParseFailure("conversation " + id + ": empty turn");
        conv.turns.push_back({current->role, text});
        if (next == std::string::npos) break;
        current = next_tag;
        pos = next + 2 + std::string(next_tag->text).size();
    }

    validate_conversation(conv);
    return conv;
}

std::string render_hh_transcript(const Conversation& conv) {
    std::string out;
    for (const auto& turn : conv.turns) {
        out += turn.role == Role::user ? "\n\nHuman: " : "\n\nAssistant: ";
        out += turn.text;
    }
    return out;
}

std::vector<Slice> slice_conversation(const Conversation& conv) {
    std::vector<Slice> slices;
    slices.reserve(conv.turns.size() - 1);
    for (std::size_t len = 2; len <= conv.turns.size(); ++len) {
        Slice s;
        s.id = conv.id + "#" + std::to_string(len);
        s.context.assign(conv.turns.begin(), conv.turns.begin() + (len - 1));
        s.response = conv.turns[len - 1];
        slices.push_back(std::move(s));
    }
    return slices;
}

std::vector<Slice> stratified_sample(const std::vector<Slice>& slices, std::size_t n,
                                     std::uint64_t seed) {
    if (n % 2 != 0) throw OddSampleSize("sample size must be even, got " + std::to_string(n));
    const std::size_t per_stratum = n / 2;

    std::vector<std::size_t> user_final, assistant_final;
    for (std::size_t i = 0; i < slices.size(); ++i) {
        (slices[i].final_speaker() == Role::user ? user_final : assistant_final).push_back(i);
    }
    for (const auto* stratum : {&user_final, &assistant_final}) {
        if (stratum->size() < per_stratum) {
            throw InsufficientStratum("stratum has " + std::to_string(stratum->size()) +
                                      " slices, need " + std::to_string(per_stratum));
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<Slice> out;
    out.reserve(n);
    for (auto* stratum : {&user_final, &assistant_final}) {
        // Partial Fisher-Yates: the first per_stratum entries are a uniform
        // draw without replacement.
        auto& idx = *stratum;
        for (std::size_t i = 0; i < per_stratum; ++i) {
            std::uniform_int_distribution<std::size_t> dist(i, idx.size() - 1);
            std::swap(idx[i], idx[dist(rng)]);
            out.push_back(slices[idx[i]]);
        }
    }
    return out;
}

// --- JSONL ---

namespace {

json turn_to_json_obj(const Turn& t) {
    return json{{"role", to_string(t.role)}, {"text", t.text}};
}

Turn turn_from_json_obj(const json& j) {
    return Turn{role_from_string(j.at("role").get<std::string>()),
                j.at("text").get<std::string>()};
}

Conversation conversation_from_record(const json& rec, const std::string& fallback_id,
                                      const std::string& source) {
    if (rec.contains("turns")) {
        Conversation conv;
        conv.id = rec.value("id", fallback_id);
        conv.source = rec.value("source", source);
        for (const auto& t : rec.at("turns")) conv.turns.push_back(turn_from_json_obj(t));
        validate_conversation(conv);
        return conv;
    }
    // hh-rlhf convention: a record holds "chosen"/"rejected" transcripts; only
    // the chosen one is ingested.
    for (const char* field : {"chosen", "transcript"}) {
        if (rec.contains(field)) {
            return parse_transcript(rec.at(field).get<std::string>(),
                                    rec.value("id", fallback_id), source);
        }
    }
    throw ParseFailure("record has neither turns nor a transcript field");
}

}  // namespace

std::vector<Conversation> load_corpus_jsonl(const std::string& path, std::ostream& warnings) {
    std::ifstream in(path);
    if (!in) throw ParseFailure("cannot open corpus file: " + path);

    std::vector<Conversation> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string fallback_id = path.substr(path.find_last_of('/') + 1) + "-" +
                                        std::to_string(lineno);
        try {
            out.push_back(conversation_from_record(json::parse(line), fallback_id, path));
        } catch (const std::exception& e) {
            warnings << "warning: skipping line " << lineno << ": " << e.what() << "\n";
        }
    }
    return out;
}

std::string slice_to_json(const Slice& s) {
    json j;
    j["id"] = s.id;
    j["context"] = json::array();
    for (const auto& t : s.context) j["context"].push_back(turn_to_json_obj(t));
    j["response"] = turn_to_json_obj(s.response);
    j["final_speaker"] = to_string(s.final_speaker());
    return j.dump();
}

Slice slice_from_json(const std::string& line) {
    const json j = json::parse(line);
    Slice s;
    s.id = j.at("id").get<std::string>();
    for (const auto& t : j.at("context")) s.context.push_back(turn_from_json_obj(t));
    s.response = turn_from_json_obj(j.at("response"));
    if (j.contains("final_speaker") &&
        role_from_string(j.at("final_speaker").get<std::string>()) != s.final_speaker()) {
        throw ParseFailure("slice " + s.id + ": final_speaker does not match response role");
    }
    return s;
}

void save_slices_jsonl(const std::vector<Slice>& slices, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseFailure("cannot write slices file: " + path);
    for (const auto& s : slices) out << slice_to_json(s) << "\n";
}

std::vector<Slice> load_slices_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseFailure("cannot open slices file: " + path);
    std::vector<Slice> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(slice_from_json(line));
    }
    return out;
}

}  // namespace maxeval
