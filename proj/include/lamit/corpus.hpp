#pragma once
// Phonemic transcriptions of the LaMIT sentences: parsing, syntactic doubling,
// and phoneme frequency statistics.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamit/lexicon.hpp"

namespace lamit {

struct TranscribedWord {
    std::string text;  // source form, stress marks included
    std::vector<PhonemeToken> phonemes;
    std::optional<size_t> stress_position;
    bool operator==(const TranscribedWord&) const = default;
};

struct DoublingEvent {
    size_t trigger_word = 0;
    size_t target_word = 0;
    PhonemeId phoneme = 0;  // the geminate as transcribed
    bool operator==(const DoublingEvent&) const = default;
};

struct TranscribedSentence {
    int id = 0;
    std::vector<TranscribedWord> words;
    std::vector<DoublingEvent> doubling_events;  // every word-initial geminate after the first word

    std::vector<PhonemeToken> phoneme_string() const {
        std::vector<PhonemeToken> out;
        for (auto& w : words) out.insert(out.end(), w.phonemes.begin(), w.phonemes.end());
        return out;
    }
};

namespace detail {

struct Symbol {
    std::vector<uint32_t> cps;
    PhonemeId id;
};

inline std::vector<uint32_t> codepoints(std::string_view s) {
    std::vector<uint32_t> out;
    size_t i = 0;
    while (i < s.size()) out.push_back(util::next_cp(s, i));
    return out;
}

// IPA symbols of the inventory, longest first. Geminate affricates are also
// accepted with only the first letter doubled (ttʃ for tʃtʃ).
inline std::vector<Symbol> symbol_table(const FeatureInventory& inv) {
    std::vector<Symbol> out;
    for (PhonemeId p = 0; p < inv.size(); ++p) {
        const auto& ph = inv.phoneme(p);
        out.push_back({codepoints(ph.ipa), p});
        if (ph.geminate) {
            auto base = codepoints(inv.phoneme(*ph.singleton_base).ipa);
            if (base.size() > 1) {
                std::vector<uint32_t> alt{base[0]};
                alt.insert(alt.end(), base.begin(), base.end());
                out.push_back({alt, p});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.cps.size() > b.cps.size(); });
    return out;
}

inline bool is_stress_mark(uint32_t c) { return c == '\'' || c == 0x2C8 || c == 0x2019; }

}  // namespace detail

// One sentence: words separated by spaces, an apostrophe before the stressed syllable.
inline TranscribedSentence parse_transcription(std::string_view line, const FeatureInventory& inv) {
    auto table = detail::symbol_table(inv);
    auto cps = detail::codepoints(line);
    TranscribedSentence s;
    size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && (cps[i] == ' ' || cps[i] == '\t')) ++i;
        if (i >= cps.size()) break;
        size_t j = i;
        while (j < cps.size() && cps[j] != ' ' && cps[j] != '\t') ++j;
        TranscribedWord w;
        std::vector<uint32_t> letters;
        std::vector<size_t> offsets;  // code point offset in the line of each letter
        std::vector<size_t> marks;    // letter index following each stress mark
        for (size_t k = i; k < j; ++k) {
            util::append_utf8(w.text, cps[k]);
            if (detail::is_stress_mark(cps[k])) {
                marks.push_back(letters.size());
                continue;
            }
            letters.push_back(cps[k]);
            offsets.push_back(k);
        }
        std::vector<size_t> starts;
        size_t a = 0;
        while (a < letters.size()) {
            const detail::Symbol* hit = nullptr;
            for (auto& sym : table) {
                if (a + sym.cps.size() <= letters.size() &&
                    std::equal(sym.cps.begin(), sym.cps.end(), letters.begin() + static_cast<long>(a))) {
                    hit = &sym;
                    break;
                }
            }
            if (!hit) {
                std::string ch;
                util::append_utf8(ch, letters[a]);
                throw parse_error("unknown symbol '" + ch + "' at character offset " + std::to_string(offsets[a]));
            }
            starts.push_back(a);
            w.phonemes.push_back({hit->id, false});
            a += hit->cps.size();
        }
        if (w.phonemes.empty())
            throw parse_error("word without phonemes at character offset " + std::to_string(i));
        if (marks.size() > 1)
            throw parse_error("more than one stress mark in word '" + w.text + "' at character offset " +
                              std::to_string(i));
        if (!marks.empty()) {
            for (size_t t = 0; t < w.phonemes.size(); ++t) {
                if (starts[t] >= marks[0] && inv.phoneme(w.phonemes[t].phoneme).major == MajorClass::Vowel) {
                    w.phonemes[t].stressed = true;
                    w.stress_position = t;
                    break;
                }
            }
            if (!w.stress_position)
                throw parse_error("stress mark without a following vowel in '" + w.text + "' at character offset " +
                                  std::to_string(i));
        }
        s.words.push_back(std::move(w));
        i = j;
    }
    for (size_t k = 1; k < s.words.size(); ++k) {
        PhonemeId first = s.words[k].phonemes.front().phoneme;
        if (inv.phoneme(first).geminate) s.doubling_events.push_back({k - 1, k, first});
    }
    return s;
}

// "<id>.<TAB><transcription>" per line; "#" comments.
inline std::vector<TranscribedSentence> parse_corpus(std::string_view document, const FeatureInventory& inv) {
    std::vector<TranscribedSentence> out;
    auto ls = util::lines(util::strip_bom(std::string(document)));
    for (size_t ln = 0; ln < ls.size(); ++ln) {
        auto t = util::trim(ls[ln]);
        if (t.empty() || t[0] == '#') continue;
        auto dot = t.find('.');
        if (dot == std::string_view::npos || dot == 0)
            throw parse_error("line " + std::to_string(ln + 1) + ": expected '<id>.<TAB><transcription>'");
        int id = 0;
        try {
            id = static_cast<int>(util::parse_long(t.substr(0, dot), "sentence id"));
        } catch (const Error&) {
            throw parse_error("line " + std::to_string(ln + 1) + ": bad sentence id");
        }
        try {
            auto s = parse_transcription(t.substr(dot + 1), inv);
            s.id = id;
            out.push_back(std::move(s));
        } catch (const Error& e) {
            throw parse_error("line " + std::to_string(ln + 1) + ": " + e.what());
        }
    }
    return out;
}

// Word lists per sentence: "<id>.<TAB>WORD WORD ...".
inline std::vector<std::pair<int, std::vector<std::string>>> parse_sentence_words(std::string_view document) {
    std::vector<std::pair<int, std::vector<std::string>>> out;
    auto ls = util::lines(util::strip_bom(std::string(document)));
    for (size_t ln = 0; ln < ls.size(); ++ln) {
        auto t = util::trim(ls[ln]);
        if (t.empty() || t[0] == '#') continue;
        auto dot = t.find('.');
        if (dot == std::string_view::npos) throw parse_error("line " + std::to_string(ln + 1) + ": missing id");
        int id = static_cast<int>(util::parse_long(t.substr(0, dot), "sentence id"));
        std::vector<std::string> ws;
        for (auto& w : util::split_ws(t.substr(dot + 1))) ws.push_back(util::to_upper(w));
        out.emplace_back(id, std::move(ws));
    }
    return out;
}

// Without a lexicon every word-initial geminate after the first word counts.
// With the sentence's orthographic words, only those whose citation form
// starts with the corresponding singleton are kept.
inline std::vector<DoublingEvent> detect_syntactic_doubling(const TranscribedSentence& s) { return s.doubling_events; }

inline std::vector<DoublingEvent> detect_syntactic_doubling(const TranscribedSentence& s, const Lexicon& lex,
                                                            const std::vector<std::string>& words) {
    if (words.size() != s.words.size())
        throw validation_error("sentence " + std::to_string(s.id) + ": " + std::to_string(words.size()) +
                               " orthographic words for " + std::to_string(s.words.size()) + " transcribed words");
    std::vector<DoublingEvent> out;
    const auto& inv = lex.inventory();
    for (auto& e : s.doubling_events) {
        const auto* entry = lex.find(words[e.target_word]);
        if (!entry) continue;
        if (entry->phonemes.front().phoneme == singleton_of(inv, e.phoneme)) out.push_back(e);
    }
    return out;
}

struct FrequencyTable {
    std::vector<long> counts;        // indexed by PhonemeId
    long total = 0;
    std::vector<double> percentages;  // percent, unrounded
};

struct FrequencyOptions {
    // Count a word-initial doubling as the geminate it is transcribed with. Off by
    // default: the published LaMIT column counts citation forms.
    bool doubling_as_geminate = false;
};

inline FrequencyTable phoneme_frequencies(const std::vector<TranscribedSentence>& sentences, const FeatureInventory& inv,
                                          const FrequencyOptions& opt = {}) {
    if (sentences.empty()) throw validation_error("empty corpus");
    FrequencyTable ft;
    ft.counts.assign(inv.size(), 0);
    for (auto& s : sentences) {
        for (size_t w = 0; w < s.words.size(); ++w) {
            const auto& ph = s.words[w].phonemes;
            for (size_t k = 0; k < ph.size(); ++k) {
                PhonemeId p = ph[k].phoneme;
                if (k == 0 && !opt.doubling_as_geminate) {
                    bool doubled = std::any_of(s.doubling_events.begin(), s.doubling_events.end(),
                                               [&](const DoublingEvent& e) { return e.target_word == w; });
                    if (doubled) p = singleton_of(inv, p);
                }
                ++ft.counts[p];
                ++ft.total;
            }
        }
    }
    if (ft.total == 0) throw validation_error("empty corpus");
    ft.percentages.resize(inv.size());
    for (size_t p = 0; p < inv.size(); ++p) ft.percentages[p] = 100.0 * ft.counts[p] / ft.total;
    return ft;
}

// Rows by descending count, ties in inventory order.
inline std::vector<PhonemeId> frequency_order(const FrequencyTable& ft) {
    std::vector<PhonemeId> order(ft.counts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](PhonemeId a, PhonemeId b) { return ft.counts[a] > ft.counts[b]; });
    return order;
}

inline std::string frequency_csv(const FrequencyTable& ft, const FeatureInventory& inv) {
    std::string out = "phoneme,arpabet,count,percent\n";
    for (PhonemeId p : frequency_order(ft)) {
        const auto& ph = inv.phoneme(p);
        out += ph.ipa + "," + ph.arpabet + "," + std::to_string(ft.counts[p]) + "," + util::fixed(ft.percentages[p], 2) +
               "\n";
    }
    return out;
}

// Occurrences of each orthographic word across the sentence lists.
inline std::map<std::string, long> word_frequencies(const std::vector<std::pair<int, std::vector<std::string>>>& sents) {
    std::map<std::string, long> out;
    for (auto& [id, ws] : sents)
        for (auto& w : ws) ++out[util::to_upper(w)];
    return out;
}

}  // namespace lamit
