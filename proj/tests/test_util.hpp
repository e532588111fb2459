#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "maxeval/corpus.hpp"

namespace testutil {

inline maxeval::Conversation make_conversation(const std::string& id, int turn_count) {
    maxeval::Conversation conv{id, {}, "synthetic"};
    for (int i = 0; i < turn_count; ++i) {
        const bool user = i % 2 == 0;
        conv.turns.push_back({user ? maxeval::Role::user : maxeval::Role::assistant,
                              (user ? "u" : "a") + std::to_string(i / 2) + " of " + id});
    }
    return conv;
}

/// Synthetic corpus with random turn counts in [min_turns, max_turns].
inline std::vector<maxeval::Conversation> synthetic_corpus(int count, unsigned seed,
                                                           int min_turns = 2,
                                                           int max_turns = 12) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> turns(min_turns, max_turns);
    std::vector<maxeval::Conversation> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(make_conversation("conv" + std::to_string(i), turns(rng)));
    }
    return out;
}

inline maxeval::Slice make_slice(const std::string& id, const std::string& response_text,
                                 maxeval::Role final_speaker = maxeval::Role::assistant) {
    maxeval::Slice s;
    s.id = id;
    if (final_speaker == maxeval::Role::assistant) {
        s.context = {{maxeval::Role::user, "question for " + id}};
    } else {
        s.context = {{maxeval::Role::user, "opening of " + id},
                     {maxeval::Role::assistant, "assistant turn of " + id}};
    }
    s.response = {final_speaker, response_text};
    return s;
}

inline std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "maxeval_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace testutil
