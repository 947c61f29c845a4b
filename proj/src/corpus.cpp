#include "evfield/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "evfield/errors.hpp"
#include "evfield/rng.hpp"
#include "json.hpp"

namespace evfield {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    int value = 0;
    size_t i = 0;
    bool neg = false;
    if (s[0] == '-') {
        neg = true;
        i = 1;
        if (s.size() == 1) return false;
    }
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        value = value * 10 + (s[i] - '0');
    }
    out = neg ? -value : value;
    return true;
}

}  // namespace

const char* to_string(SpanKind kind) {
    return kind == SpanKind::Trigger ? "trigger" : "argument";
}

SpanKind span_kind_from_string(std::string_view s) {
    if (s == "trigger") return SpanKind::Trigger;
    if (s == "argument") return SpanKind::Argument;
    throw ParseError("unknown span kind '" + std::string(s) + "'");
}

void validate_sentence(const ParsedSentence& s) {
    const int n = s.size();
    if (n < 1) throw StructureError("sentence '" + s.id + "': empty");
    int roots = 0;
    for (const Token& t : s.tokens) {
        if (t.head == kNoHead) {
            ++roots;
            continue;
        }
        if (t.head < 0 || t.head >= n)
            throw StructureError("sentence '" + s.id + "': head index " +
                                 std::to_string(t.head) + " out of range");
        if (t.head == t.index)
            throw StructureError("sentence '" + s.id + "': token " +
                                 std::to_string(t.index) + " is its own head");
    }
    if (roots != 1)
        throw StructureError("sentence '" + s.id + "': expected exactly one root, found " +
                             std::to_string(roots));
    // With one root and one head per token, a cycle is the only way the
    // graph can fail to be a tree.
    for (int i = 0; i < n; ++i) {
        int node = i;
        int steps = 0;
        while (node != kNoHead) {
            node = s.tokens[node].head;
            if (++steps > n)
                throw StructureError("sentence '" + s.id + "': dependency cycle through token " +
                                     std::to_string(i));
        }
    }
    std::vector<std::pair<int, int>> seen;
    for (const CandidateSpan& c : s.candidates) {
        if (c.position < 0 || c.position >= n)
            throw StructureError("sentence '" + s.id + "': candidate position " +
                                 std::to_string(c.position) + " out of range");
        if (c.gold_label < 0)
            throw StructureError("sentence '" + s.id + "': negative gold label");
        std::pair<int, int> key{c.position, static_cast<int>(c.kind)};
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw StructureError("sentence '" + s.id + "': duplicate candidate at position " +
                                 std::to_string(c.position));
        seen.push_back(key);
    }
}

std::vector<ParsedSentence> parse_conllu(std::string_view text) {
    std::vector<ParsedSentence> sentences;
    std::vector<Token> tokens;
    std::string sent_id;

    auto finalize = [&]() {
        if (tokens.empty()) return;
        ParsedSentence s;
        s.id = sent_id.empty() ? "s" + std::to_string(sentences.size()) : sent_id;
        s.tokens = std::move(tokens);
        validate_sentence(s);
        sentences.push_back(std::move(s));
        tokens.clear();
        sent_id.clear();
    };

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (line.empty()) {
            finalize();
            continue;
        }
        if (line[0] == '#') {
            static constexpr std::string_view kSentId = "# sent_id =";
            if (line.substr(0, kSentId.size()) == kSentId) {
                std::string_view v = line.substr(kSentId.size());
                while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
                sent_id = std::string(v);
            }
            continue;
        }

        auto fields = split_tabs(line);
        if (fields.size() != 10)
            throw ParseError("line " + std::to_string(line_no) + ": expected 10 tab-separated columns, found " +
                             std::to_string(fields.size()));
        // Multiword-token ranges ("1-2") and empty nodes ("1.1") carry no tree structure.
        if (fields[0].find('-') != std::string_view::npos ||
            fields[0].find('.') != std::string_view::npos)
            continue;

        int id = 0;
        if (!parse_int(fields[0], id) || id != static_cast<int>(tokens.size()) + 1)
            throw ParseError("line " + std::to_string(line_no) + ": token id '" +
                             std::string(fields[0]) + "' is not sequential");
        int head = 0;
        if (!parse_int(fields[6], head) || head < 0)
            throw ParseError("line " + std::to_string(line_no) + ": HEAD '" +
                             std::string(fields[6]) + "' is not a non-negative integer");

        Token t;
        t.index = id - 1;
        t.surface = std::string(fields[1]);
        t.head = head == 0 ? kNoHead : head - 1;
        t.deprel = std::string(fields[7]);
        tokens.push_back(std::move(t));
    }
    finalize();
    return sentences;
}

std::string serialize_conllu(const std::vector<ParsedSentence>& sentences) {
    std::string out;
    for (const ParsedSentence& s : sentences) {
        out += "# sent_id = " + s.id + "\n";
        for (const Token& t : s.tokens) {
            out += std::to_string(t.index + 1);
            out += '\t';
            out += t.surface;
            out += "\t_\t_\t_\t_\t";
            out += std::to_string(t.head == kNoHead ? 0 : t.head + 1);
            out += '\t';
            out += t.deprel;
            out += "\t_\t_\n";
        }
        out += '\n';
    }
    return out;
}

std::string serialize_candidates(const std::vector<ParsedSentence>& sentences) {
    std::string out;
    for (const ParsedSentence& s : sentences) {
        for (const CandidateSpan& c : s.candidates) {
            nlohmann::json rec{{"sentence_id", s.id},
                               {"position", c.position},
                               {"kind", to_string(c.kind)},
                               {"label", c.gold_label}};
            out += rec.dump();
            out += '\n';
        }
    }
    return out;
}

void attach_candidates(std::vector<ParsedSentence>& sentences, std::string_view jsonl) {
    std::map<std::string, ParsedSentence*> by_id;
    for (ParsedSentence& s : sentences) by_id[s.id] = &s;

    int line_no = 0;
    size_t pos = 0;
    while (pos < jsonl.size()) {
        size_t eol = jsonl.find('\n', pos);
        std::string_view line =
            jsonl.substr(pos, eol == std::string_view::npos ? jsonl.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? jsonl.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("candidates line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!rec.contains("sentence_id") || !rec.contains("position") ||
            !rec.contains("kind") || !rec.contains("label"))
            throw ParseError("candidates line " + std::to_string(line_no) +
                             ": record needs sentence_id, position, kind, label");

        const std::string sid = rec["sentence_id"].get<std::string>();
        auto it = by_id.find(sid);
        if (it == by_id.end())
            throw ParseError("candidates line " + std::to_string(line_no) +
                             ": unknown sentence id '" + sid + "'");
        CandidateSpan c;
        c.position = rec["position"].get<int>();
        c.gold_label = rec["label"].get<int>();
        c.kind = span_kind_from_string(rec["kind"].get<std::string>());
        it->second->candidates.push_back(c);
    }
    for (ParsedSentence& s : sentences) validate_sentence(s);
}

std::vector<ParsedSentence> load_corpus_files(const std::string& conllu_path,
                                              const std::string& candidates_path) {
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto sentences = parse_conllu(slurp(conllu_path));
    attach_candidates(sentences, slurp(candidates_path));
    return sentences;
}

void write_corpus_files(const std::vector<ParsedSentence>& sentences,
                        const std::string& conllu_path,
                        const std::string& candidates_path) {
    std::ofstream c(conllu_path, std::ios::binary);
    if (!c) throw ParseError("cannot write '" + conllu_path + "'");
    c << serialize_conllu(sentences);
    std::ofstream j(candidates_path, std::ios::binary);
    if (!j) throw ParseError("cannot write '" + candidates_path + "'");
    j << serialize_candidates(sentences);
}

std::vector<OccurrenceGroup> group_occurrences(const ParsedSentence& s) {
    std::vector<OccurrenceGroup> groups;
    std::vector<std::string> keys;
    for (size_t ci = 0; ci < s.candidates.size(); ++ci) {
        const CandidateSpan& c = s.candidates[ci];
        std::string key = ascii_lower(s.tokens[c.position].surface);
        key += '\x1f';
        key += to_string(c.kind);
        auto it = std::find(keys.begin(), keys.end(), key);
        size_t gi;
        if (it == keys.end()) {
            keys.push_back(key);
            groups.push_back(OccurrenceGroup{s.id, {}, {}});
            gi = groups.size() - 1;
        } else {
            gi = static_cast<size_t>(it - keys.begin());
        }
        groups[gi].positions.push_back(c.position);
        groups[gi].candidate_indices.push_back(static_cast<int>(ci));
    }
    for (OccurrenceGroup& g : groups) {
        std::vector<size_t> order(g.positions.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return g.positions[a] < g.positions[b]; });
        OccurrenceGroup sorted{g.sentence_id, {}, {}};
        for (size_t i : order) {
            sorted.positions.push_back(g.positions[i]);
            sorted.candidate_indices.push_back(g.candidate_indices[i]);
        }
        g = std::move(sorted);
    }
    return groups;
}

bool truncate_sentence(ParsedSentence& s, int max_len) {
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    if (s.size() <= max_len) return false;

    s.tokens.resize(static_cast<size_t>(max_len));
    int root = -1;
    for (const Token& t : s.tokens)
        if (t.head == kNoHead) root = t.index;
    for (Token& t : s.tokens) {
        if (t.head == kNoHead || t.head < max_len) continue;
        if (root == -1) {
            t.head = kNoHead;
            t.deprel = "root";
            root = t.index;
        } else {
            t.head = root;
        }
    }
    std::erase_if(s.candidates,
                  [max_len](const CandidateSpan& c) { return c.position >= max_len; });
    return true;
}

std::vector<int> dependency_neighbors(const ParsedSentence& s, int position) {
    if (position < 0 || position >= s.size())
        throw std::out_of_range("token position " + std::to_string(position) +
                                " out of range for sentence of length " +
                                std::to_string(s.size()));
    std::vector<int> out;
    if (s.tokens[position].head != kNoHead) out.push_back(s.tokens[position].head);
    for (const Token& t : s.tokens)
        if (t.head == position) out.push_back(t.index);
    return out;
}

namespace {

// Random projective tree over [lo, hi): pick a head, tile each side with
// contiguous segments whose internal roots attach to it.
int build_projective(int lo, int hi, Rng& rng, std::vector<int>& heads) {
    int h = rng.uniform_int(lo, hi - 1);
    int cur = lo;
    while (cur < h) {
        int end = rng.uniform_int(cur + 1, h);
        heads[build_projective(cur, end, rng, heads)] = h;
        cur = end;
    }
    cur = h + 1;
    while (cur < hi) {
        int end = rng.uniform_int(cur + 1, hi);
        heads[build_projective(cur, end, rng, heads)] = h;
        cur = end;
    }
    return h;
}

int max_neighbor_offset(const std::vector<std::vector<int>>& nbrs, int p) {
    int d = 0;
    for (int q : nbrs[p]) d = std::max(d, std::abs(q - p));
    return d == 0 ? 1 : d;
}

void validate_synthetic_config(const SyntheticConfig& c) {
    if (c.sentences < 0) throw ConfigError("sentences must be >= 0");
    if (c.filler_words < 1) throw ConfigError("filler_words must be >= 1");
    if (c.trigger_surfaces < 2) throw ConfigError("trigger_surfaces must be >= 2");
    if (c.label_count < 2) throw ConfigError("label_count must be >= 2");
    if (c.min_len < 2 || c.min_len > c.max_len)
        throw ConfigError("need 2 <= min_len <= max_len");
    if (c.repeat_prob < 0.0 || c.repeat_prob > 1.0)
        throw ConfigError("repeat_prob must be in [0, 1]");
    if (c.null_prob < 0.0 || c.null_prob > 1.0) throw ConfigError("null_prob must be in [0, 1]");
    if (c.distractors < 0) throw ConfigError("distractors must be >= 0");
    if (c.max_field_size < 1) throw ConfigError("max_field_size must be >= 1");
    if (c.pattern == CuePattern::Surface && c.trigger_surfaces < c.label_count - 1)
        throw ConfigError("surface pattern needs trigger_surfaces >= label_count - 1");
}

// The gold label of a candidate under the planted rule: the label of the
// cue word found among its 1-hop dependency neighbors, 0 if there is none.
int planted_label(const ParsedSentence& s, int position) {
    for (int q : dependency_neighbors(s, position)) {
        const std::string& w = s.tokens[q].surface;
        if (w.rfind("cue", 0) == 0) return std::stoi(w.substr(3));
    }
    return 0;
}

}  // namespace

std::vector<ParsedSentence> generate_synthetic(const SyntheticConfig& config,
                                               std::uint64_t seed) {
    validate_synthetic_config(config);
    Rng rng(seed);
    std::vector<ParsedSentence> corpus;
    corpus.reserve(static_cast<size_t>(config.sentences));

    const int event_labels = config.label_count - 1;

    for (int si = 0; si < config.sentences; ++si) {
        const bool want_repeat = rng.bernoulli(config.repeat_prob);
        const bool want_null = rng.bernoulli(config.null_prob);
        const int label = 1 + rng.uniform_int(0, event_labels - 1);

        ParsedSentence s;
        bool ok = false;
        for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
            const int n = rng.uniform_int(config.min_len, config.max_len);
            std::vector<int> heads(static_cast<size_t>(n), kNoHead);
            build_projective(0, n, rng, heads);

            s = ParsedSentence{};
            s.id = "syn" + std::to_string(si);
            s.tokens.resize(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                s.tokens[i].index = i;
                s.tokens[i].head = heads[i];
                s.tokens[i].deprel = heads[i] == kNoHead ? "root" : "dep";
                s.tokens[i].surface = "w" + std::to_string(rng.uniform_int(0, config.filler_words - 1));
            }
            std::vector<std::vector<int>> nbrs(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) nbrs[i] = dependency_neighbors(s, i);

            const bool field_cue = config.pattern == CuePattern::FieldCue;
            const int trig_index =
                field_cue ? rng.uniform_int(0, config.trigger_surfaces - 1) : label - 1;
            const std::string trig = "t" + std::to_string(trig_index);
            const std::string cue = "cue" + std::to_string(label);

            std::vector<int> reserved;
            auto is_reserved = [&](int p) {
                return std::find(reserved.begin(), reserved.end(), p) != reserved.end();
            };

            // Primary trigger and, in field mode, its in-field cue.
            int p1 = -1, q1 = -1;
            for (int tries = 0; tries < 50 && p1 < 0; ++tries) {
                int p = rng.uniform_int(0, n - 1);
                if (max_neighbor_offset(nbrs, p) > config.max_field_size) continue;
                p1 = p;
            }
            if (p1 < 0) continue;
            reserved.push_back(p1);
            if (field_cue) {
                q1 = nbrs[p1][rng.uniform_int(0, static_cast<int>(nbrs[p1].size()) - 1)];
                reserved.push_back(q1);
            }

            // Optional second occurrence of the same trigger surface.
            int p2 = -1, q2 = -1;
            if (want_repeat) {
                for (int tries = 0; tries < 80 && p2 < 0; ++tries) {
                    int p = rng.uniform_int(0, n - 1);
                    if (is_reserved(p)) continue;
                    if (max_neighbor_offset(nbrs, p) > config.max_field_size) continue;
                    if (field_cue) {
                        std::vector<int> free_nbrs;
                        for (int q : nbrs[p])
                            if (!is_reserved(q) && q != p) free_nbrs.push_back(q);
                        if (free_nbrs.empty()) continue;
                        q2 = free_nbrs[rng.uniform_int(0, static_cast<int>(free_nbrs.size()) - 1)];
                        reserved.push_back(q2);
                    }
                    p2 = p;
                    reserved.push_back(p2);
                }
                if (p2 < 0) continue;  // retry whole sentence
            }

            // Optional null candidate: a trigger-like token with a cue-free field.
            int p0 = -1;
            if (want_null) {
                for (int tries = 0; tries < 80 && p0 < 0; ++tries) {
                    int p = rng.uniform_int(0, n - 1);
                    if (is_reserved(p)) continue;
                    const int d = max_neighbor_offset(nbrs, p);
                    if (d > config.max_field_size) continue;
                    bool clean = true;
                    for (int q : {q1, q2}) {
                        if (q < 0) continue;
                        if (std::abs(q - p) < d + 2) clean = false;
                        if (std::find(nbrs[p].begin(), nbrs[p].end(), q) != nbrs[p].end())
                            clean = false;
                    }
                    if (!clean) continue;
                    p0 = p;
                    reserved.push_back(p0);
                }
                // A cramped sentence just goes without the extra candidate.
            }

            std::vector<int> cand_positions{p1};
            if (p2 >= 0) cand_positions.push_back(p2);
            if (p0 >= 0) cand_positions.push_back(p0);

            // Distractor cues go outside every candidate's field, both in the
            // tree and in the linear window the field size spans.
            int placed = 0;
            for (int k = 0; k < config.distractors; ++k) {
                for (int tries = 0; tries < 30; ++tries) {
                    int r = rng.uniform_int(0, n - 1);
                    if (is_reserved(r)) continue;
                    bool far = true;
                    if (config.pattern == CuePattern::FieldCue) {
                        for (int c : cand_positions) {
                            const int d = max_neighbor_offset(nbrs, c);
                            if (std::abs(r - c) < d + 2) far = false;
                            if (std::find(nbrs[c].begin(), nbrs[c].end(), r) != nbrs[c].end())
                                far = false;
                        }
                    }
                    if (!far) continue;
                    int other;
                    if (event_labels > 1) {
                        other = 1 + (label - 1 + 1 + rng.uniform_int(0, event_labels - 2)) % event_labels;
                    } else {
                        other = 1;
                    }
                    s.tokens[r].surface = "cue" + std::to_string(other);
                    reserved.push_back(r);
                    ++placed;
                    break;
                }
            }
            (void)placed;

            s.tokens[p1].surface = trig;
            if (q1 >= 0) s.tokens[q1].surface = cue;
            if (p2 >= 0) {
                s.tokens[p2].surface = trig;
                if (q2 >= 0) s.tokens[q2].surface = cue;
            }
            if (p0 >= 0) {
                // A different surface keeps the null candidate out of the
                // repeated-trigger group.
                std::string null_surf;
                if (field_cue) {
                    int alt = rng.uniform_int(0, config.trigger_surfaces - 2);
                    if (alt >= trig_index) ++alt;
                    null_surf = "t" + std::to_string(alt);
                } else {
                    null_surf = "n" + std::to_string(rng.uniform_int(0, config.trigger_surfaces - 1));
                }
                s.tokens[p0].surface = null_surf;
            }

            std::sort(cand_positions.begin(), cand_positions.end());
            for (int p : cand_positions) {
                CandidateSpan c;
                c.position = p;
                c.gold_label = (p == p0) ? 0 : label;
                c.kind = SpanKind::Trigger;
                s.candidates.push_back(c);
            }

            if (field_cue) {
                // The construction above must leave every label recoverable
                // from the candidate's own field.
                bool recoverable = true;
                for (const CandidateSpan& c : s.candidates)
                    if (planted_label(s, c.position) != c.gold_label) recoverable = false;
                if (!recoverable) continue;
            }
            ok = true;
        }
        if (!ok)
            throw ConfigError("synthetic generation could not satisfy constraints for sentence " +
                              std::to_string(si) + "; lengthen sentences or relax the config");
        validate_sentence(s);
        corpus.push_back(std::move(s));
    }
    return corpus;
}

}  // namespace evfield
