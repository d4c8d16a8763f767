#pragma once
// LaMIT lexicon: orthography -> stressed ARPAbet phoneme sequence.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lamit/feature_core.hpp"

namespace lamit {

struct PhonemeToken {
    PhonemeId phoneme = 0;
    bool stressed = false;
    bool operator==(const PhonemeToken&) const = default;
};

struct LexEntry {
    std::string orthography;
    std::vector<PhonemeToken> phonemes;
    bool operator==(const LexEntry&) const = default;
};

using InventoryPtr = std::shared_ptr<const FeatureInventory>;

class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(InventoryPtr inv) : inv_(std::move(inv)) {}

    const FeatureInventory& inventory() const { return *inv_; }
    const InventoryPtr& inventory_ptr() const { return inv_; }
    const std::map<std::string, LexEntry>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }
    const std::vector<std::string>& warnings() const { return warnings_; }

    const LexEntry* find(const std::string& orthography) const {
        auto it = entries_.find(util::to_upper(orthography));
        return it == entries_.end() ? nullptr : &it->second;
    }
    const LexEntry& at(const std::string& orthography) const {
        if (auto* e = find(orthography)) return *e;
        throw lookup_error("unknown word '" + orthography + "'");
    }

    // Inserts or replaces; replacing records a warning.
    void insert(LexEntry e) {
        e.orthography = util::to_upper(e.orthography);
        auto [it, fresh] = entries_.emplace(e.orthography, e);
        if (!fresh) {
            warnings_.push_back("duplicate orthography " + e.orthography + " (last entry wins)");
            it->second = std::move(e);
        }
    }
    void erase(const std::string& orthography) { entries_.erase(util::to_upper(orthography)); }

    bool operator==(const Lexicon& o) const { return entries_ == o.entries_ && *inv_ == *o.inv_; }

private:
    InventoryPtr inv_;
    std::map<std::string, LexEntry> entries_;
    std::vector<std::string> warnings_;
};

// "M AA1 MM AA" -> tokens; the "1" suffix marks primary stress and is allowed on vowels only.
inline std::vector<PhonemeToken> parse_arpabet(const FeatureInventory& inv, std::string_view tokens) {
    std::vector<PhonemeToken> out;
    auto parts = util::split_ws(tokens);
    for (size_t k = 0; k < parts.size(); ++k) {
        std::string lab = parts[k];
        bool stressed = false;
        if (lab.size() > 1 && lab.back() == '1') {
            stressed = true;
            lab.pop_back();
        }
        auto id = inv.find_arpabet(lab);
        if (!id) throw parse_error("unknown label " + parts[k] + " at position " + std::to_string(k + 1));
        if (stressed && inv.phoneme(*id).major != MajorClass::Vowel)
            throw parse_error("stress mark on non-vowel " + parts[k] + " at position " + std::to_string(k + 1));
        out.push_back({*id, stressed});
    }
    return out;
}

inline std::string token_label(const FeatureInventory& inv, const PhonemeToken& t) {
    return inv.phoneme(t.phoneme).arpabet + (t.stressed ? "1" : "");
}

inline std::string format_arpabet(const FeatureInventory& inv, const std::vector<PhonemeToken>& ts) {
    std::string out;
    for (auto& t : ts) {
        if (!out.empty()) out += ' ';
        out += token_label(inv, t);
    }
    return out;
}

// One entry per line: ORTHOGRAPHY, whitespace, ARPAbet tokens. "#" starts a comment line.
inline Lexicon load_lexicon(std::string_view document, InventoryPtr inv) {
    Lexicon lex(inv);
    auto ls = util::lines(util::strip_bom(std::string(document)));
    for (size_t ln = 0; ln < ls.size(); ++ln) {
        auto t = util::trim(ls[ln]);
        if (t.empty() || t[0] == '#') continue;
        auto cut = t.find_first_of(" \t");
        if (cut == std::string_view::npos)
            throw parse_error("line " + std::to_string(ln + 1) + ": entry '" + std::string(t) + "' has no phonemes");
        LexEntry e;
        e.orthography = std::string(t.substr(0, cut));
        try {
            e.phonemes = parse_arpabet(*inv, t.substr(cut));
        } catch (const Error& err) {
            std::string m = err.what();
            auto pos = m.find(" at position");
            if (util::starts_with(m, "unknown label") && pos != std::string::npos) m = m.substr(0, pos);
            throw parse_error(m + ", line " + std::to_string(ln + 1));
        }
        if (e.phonemes.empty())
            throw parse_error("line " + std::to_string(ln + 1) + ": entry " + e.orthography + " has no phonemes");
        int stresses = 0;
        for (auto& p : e.phonemes) stresses += p.stressed;
        if (stresses > 1)
            throw parse_error("line " + std::to_string(ln + 1) + ": entry " + e.orthography + " has " +
                              std::to_string(stresses) + " primary stresses");
        lex.insert(std::move(e));
    }
    return lex;
}

inline Lexicon load_lexicon_file(const std::string& path, InventoryPtr inv) {
    return load_lexicon(util::read_file(path), std::move(inv));
}

inline std::string serialize_lexicon(const Lexicon& lex) {
    std::string out;
    for (auto& [k, e] : lex.entries()) out += k + "\t" + format_arpabet(lex.inventory(), e.phonemes) + "\n";
    return out;
}

inline std::vector<FeatureBundle> expand_phonemes(const FeatureInventory& inv, const std::vector<PhonemeToken>& ts) {
    std::vector<FeatureBundle> out;
    out.reserve(ts.size());
    for (auto& t : ts) out.push_back(inv.features_of(t.phoneme));
    return out;
}

inline std::vector<FeatureBundle> expand_word(const Lexicon& lex, const std::string& orthography) {
    return expand_phonemes(lex.inventory(), lex.at(orthography).phonemes);
}

inline std::optional<PhonemeId> geminate_of(const FeatureInventory& inv, PhonemeId p) {
    const auto& ph = inv.phoneme(p);
    if (ph.geminate) return std::nullopt;
    for (PhonemeId g : inv.geminates())
        if (inv.phoneme(g).singleton_base == p) return g;
    return std::nullopt;
}

inline PhonemeId singleton_of(const FeatureInventory& inv, PhonemeId p) {
    const auto& ph = inv.phoneme(p);
    return ph.geminate ? *ph.singleton_base : p;
}

}  // namespace lamit
