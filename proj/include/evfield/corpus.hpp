#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace evfield {

inline constexpr int kNoHead = -1;  // head index of the dependency root

struct Token {
    int index = 0;           // 0-based position in the sentence
    std::string surface;
    int head = kNoHead;      // 0-based head index, kNoHead for the root
    std::string deprel;
};

enum class SpanKind { Trigger, Argument };

const char* to_string(SpanKind kind);
SpanKind span_kind_from_string(std::string_view s);

struct CandidateSpan {
    int position = 0;    // token index of the candidate
    int gold_label = 0;  // 0 is the null label
    SpanKind kind = SpanKind::Trigger;
};

struct ParsedSentence {
    std::string id;
    std::vector<Token> tokens;
    std::vector<CandidateSpan> candidates;

    int size() const { return static_cast<int>(tokens.size()); }
};

// Candidates of one sentence that share a matching key (case-insensitive
// surface form + span kind). Singletons are groups of size 1.
struct OccurrenceGroup {
    std::string sentence_id;
    std::vector<int> positions;          // token indices, strictly increasing
    std::vector<int> candidate_indices;  // into sentence.candidates, aligned with positions

    int size() const { return static_cast<int>(positions.size()); }
};

// Throws StructureError unless the head relation forms a tree (single root,
// acyclic, heads in range) and all candidates are in range with distinct
// (position, kind) pairs.
void validate_sentence(const ParsedSentence& s);

// CoNLL-U text -> sentences. Requires 10 tab-separated columns per token
// line; multiword-token (`1-2`) and empty-node (`1.1`) lines are skipped.
// HEAD is converted from 1-based to 0-based with 0 -> kNoHead. Sentence ids
// come from `# sent_id = ...` comments, else "s<ordinal>".
std::vector<ParsedSentence> parse_conllu(std::string_view text);

// Inverse of parse_conllu on the supported column subset (ID, FORM, HEAD,
// DEPREL; other columns written as `_`).
std::string serialize_conllu(const std::vector<ParsedSentence>& sentences);

// Candidate sidecar: one JSON record per line with fields
// {sentence_id, position, kind, label}.
std::string serialize_candidates(const std::vector<ParsedSentence>& sentences);
void attach_candidates(std::vector<ParsedSentence>& sentences, std::string_view jsonl);

// Loads the two-file corpus format and validates every sentence.
std::vector<ParsedSentence> load_corpus_files(const std::string& conllu_path,
                                              const std::string& candidates_path);
void write_corpus_files(const std::vector<ParsedSentence>& sentences,
                        const std::string& conllu_path,
                        const std::string& candidates_path);

// Partition of the sentence's candidates by matching key. Groups appear in
// order of first occurrence; member positions are strictly increasing.
std::vector<OccurrenceGroup> group_occurrences(const ParsedSentence& s);

// 1-hop dependency neighbors of a token: its head (if any) plus children,
// in index order of discovery. Throws std::out_of_range.
std::vector<int> dependency_neighbors(const ParsedSentence& s, int position);

// Drops tokens at index >= max_len, re-rooting edges that pointed past the
// cut, and drops candidates beyond it. Returns true if anything was cut.
bool truncate_sentence(ParsedSentence& s, int max_len);

enum class CuePattern {
    FieldCue,  // label recoverable only from the candidate's 1-hop dependency field
    Surface,   // label encoded in the candidate surface itself; fields carry no signal
};

struct SyntheticConfig {
    int sentences = 2000;
    int filler_words = 40;      // filler vocabulary size
    int trigger_surfaces = 6;   // distinct trigger surface forms
    int label_count = 8;        // including the null label 0
    int min_len = 8;
    int max_len = 16;
    double repeat_prob = 0.3;   // fraction of sentences with a duplicated trigger
    double null_prob = 0.5;     // fraction of sentences with an extra null candidate
    int distractors = 2;        // cue tokens planted outside every candidate field
    int max_field_size = 5;     // candidates are placed where the 1-hop span is at most this
    CuePattern pattern = CuePattern::FieldCue;
};

// Deterministic synthetic corpus: random projective trees, one labelled
// trigger per sentence (optionally duplicated, optionally with an extra
// null candidate), the label planted as a cue word inside the candidate's
// 1-hop dependency field, distractor cues planted outside it.
std::vector<ParsedSentence> generate_synthetic(const SyntheticConfig& config,
                                               std::uint64_t seed);

}  // namespace evfield
