#pragma once
// Annotation tiers (Word, LEXI, Landmark, ...) with Praat long-format TextGrid I/O
// and the automatic LEXI generator.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lamit/corpus.hpp"
#include "lamit/lexicon.hpp"

namespace lamit {

namespace tiers {
inline constexpr const char* Word = "Word";
inline constexpr const char* Lexi = "LEXI";
inline constexpr const char* LexiMod = "LEXI-mod";
inline constexpr const char* Landmark = "Landmark";
inline constexpr const char* LandmarkMod = "Landmark-mod";
inline constexpr const char* Glottal = "Glottal";
inline constexpr const char* Nasal = "Nasal";
inline constexpr const char* Cplace = "Cplace";
inline constexpr const char* Vplace = "Vplace";
}  // namespace tiers

struct Interval {
    double t_start = 0, t_end = 0;
    std::string label;
    bool operator==(const Interval&) const = default;
};

struct Point {
    double time = 0;
    std::string label;
    bool operator==(const Point&) const = default;
};

enum class TierKind { Interval, Point };

struct Tier {
    std::string name;
    TierKind kind = TierKind::Interval;
    double xmin = 0, xmax = 0;
    std::vector<Interval> intervals;
    std::vector<Point> points;
    bool operator==(const Tier&) const = default;

    size_t item_count() const { return kind == TierKind::Interval ? intervals.size() : points.size(); }
};

struct AnnotationDocument {
    double xmin = 0, xmax = 0;
    std::vector<Tier> tiers;
    bool operator==(const AnnotationDocument&) const = default;

    const Tier* find(const std::string& name) const {
        for (auto& t : tiers)
            if (t.name == name) return &t;
        return nullptr;
    }
    Tier* find(const std::string& name) {
        for (auto& t : tiers)
            if (t.name == name) return &t;
        return nullptr;
    }
    // Replaces a tier of the same name or appends.
    void put(Tier t) {
        if (auto* old = find(t.name)) *old = std::move(t);
        else tiers.push_back(std::move(t));
    }
};

inline void validate_tier(const Tier& t, double xmin, double xmax) {
    auto where = [&](size_t i) { return "tier '" + t.name + "' item " + std::to_string(i + 1); };
    const double eps = 1e-9;
    if (t.kind == TierKind::Interval) {
        for (size_t i = 0; i < t.intervals.size(); ++i) {
            const auto& iv = t.intervals[i];
            if (!std::isfinite(iv.t_start) || !std::isfinite(iv.t_end) || iv.t_start < 0)
                throw validation_error(where(i) + ": non-finite or negative time");
            if (!(iv.t_start < iv.t_end)) throw validation_error(where(i) + ": start must precede end");
            if (i > 0 && iv.t_start < t.intervals[i - 1].t_end - eps)
                throw validation_error(where(i) + ": overlaps the previous interval");
            if (iv.t_start < xmin - eps || iv.t_end > xmax + eps)
                throw validation_error(where(i) + ": outside [" + util::compact(xmin) + ", " + util::compact(xmax) + "]");
        }
    } else {
        for (size_t i = 0; i < t.points.size(); ++i) {
            const auto& p = t.points[i];
            if (!std::isfinite(p.time) || p.time < 0) throw validation_error(where(i) + ": non-finite or negative time");
            if (i > 0 && !(p.time > t.points[i - 1].time))
                throw validation_error(where(i) + ": points must be strictly increasing");
            if (p.time < xmin - eps || p.time > xmax + eps)
                throw validation_error(where(i) + ": outside [" + util::compact(xmin) + ", " + util::compact(xmax) + "]");
        }
    }
}

inline void validate_document(const AnnotationDocument& d) {
    if (!(d.xmin < d.xmax) && !(d.xmin == d.xmax && d.tiers.empty()))
        throw validation_error("document xmin must precede xmax");
    for (auto& t : d.tiers) {
        if (t.xmin < d.xmin - 1e-9 || t.xmax > d.xmax + 1e-9)
            throw validation_error("tier '" + t.name + "' extends beyond the document");
        validate_tier(t, t.xmin, t.xmax);
    }
}

// ---------------------------------------------------------------- TextGrid

namespace textgrid_detail {

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

// Lines of "key = value"; structural lines ("item [1]:") carry no '='.
struct Reader {
    std::vector<std::string> ls;
    size_t pos = 0;

    bool next_kv(std::string& key, std::string& value) {
        while (pos < ls.size()) {
            const std::string& l = ls[pos++];
            auto t = util::trim(l);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string_view::npos) {
                if (t == "tiers? <exists>" || util::starts_with(t, "tiers?")) {
                    key = "tiers?";
                    value = std::string(util::trim(t.substr(6)));
                    return true;
                }
                continue;
            }
            key = std::string(util::trim(t.substr(0, eq)));
            value = std::string(util::trim(t.substr(eq + 1)));
            // a quoted value may span lines
            if (!value.empty() && value[0] == '"') {
                while (!closed(value) && pos < ls.size()) value += "\n" + ls[pos++];
            }
            return true;
        }
        return false;
    }

    static bool closed(const std::string& v) {
        // count quotes after the opening one; doubled quotes are escapes
        size_t i = 1;
        while (i < v.size()) {
            if (v[i] == '"') {
                if (i + 1 < v.size() && v[i + 1] == '"') {
                    i += 2;
                    continue;
                }
                return true;
            }
            ++i;
        }
        return false;
    }

    std::string expect(const std::string& want) {
        std::string k, v;
        if (!next_kv(k, v)) throw parse_error("TextGrid: unexpected end of file, expected '" + want + "'");
        if (k != want) throw parse_error("TextGrid: expected '" + want + "', found '" + k + "' near line " + std::to_string(pos));
        return v;
    }
    double number(const std::string& want) {
        auto v = expect(want);
        try {
            return util::parse_double(v, want);
        } catch (const Error&) {
            throw parse_error("TextGrid: bad number for '" + want + "' near line " + std::to_string(pos));
        }
    }
    std::string string(const std::string& want) {
        auto v = expect(want);
        if (v.size() < 2 || v.front() != '"' || !closed(v))
            throw parse_error("TextGrid: expected quoted string for '" + want + "' near line " + std::to_string(pos));
        auto end = v.rfind('"');
        std::string inner = v.substr(1, end - 1), out;
        for (size_t i = 0; i < inner.size(); ++i) {
            out += inner[i];
            if (inner[i] == '"' && i + 1 < inner.size() && inner[i + 1] == '"') ++i;
        }
        return out;
    }
};

}  // namespace textgrid_detail

inline std::string decode_text(std::string_view bytes) {
    if (bytes.size() >= 2) {
        auto b0 = static_cast<unsigned char>(bytes[0]), b1 = static_cast<unsigned char>(bytes[1]);
        if (b0 == 0xFF && b1 == 0xFE) return util::utf16_to_utf8(bytes.substr(2), true);
        if (b0 == 0xFE && b1 == 0xFF) return util::utf16_to_utf8(bytes.substr(2), false);
    }
    return util::strip_bom(std::string(bytes));
}

inline AnnotationDocument parse_textgrid(std::string_view document) {
    textgrid_detail::Reader r;
    r.ls = util::lines(decode_text(document));
    AnnotationDocument d;
    if (r.expect("File type") != "\"ooTextFile\"") throw parse_error("TextGrid: not an ooTextFile");
    if (r.expect("Object class") != "\"TextGrid\"") throw parse_error("TextGrid: object class is not TextGrid");
    d.xmin = r.number("xmin");
    d.xmax = r.number("xmax");
    std::string exists = r.expect("tiers?");
    if (exists != "<exists>") return d;
    long n = static_cast<long>(r.number("size"));
    if (n < 0) throw parse_error("TextGrid: negative tier count");
    for (long k = 0; k < n; ++k) {
        Tier t;
        std::string cls = r.string("class");
        t.name = r.string("name");
        t.xmin = r.number("xmin");
        t.xmax = r.number("xmax");
        if (cls == "IntervalTier") {
            t.kind = TierKind::Interval;
            long m = static_cast<long>(r.number("intervals: size"));
            for (long i = 0; i < m; ++i) {
                Interval iv;
                iv.t_start = r.number("xmin");
                iv.t_end = r.number("xmax");
                iv.label = r.string("text");
                t.intervals.push_back(std::move(iv));
            }
        } else if (cls == "TextTier") {
            t.kind = TierKind::Point;
            long m = static_cast<long>(r.number("points: size"));
            for (long i = 0; i < m; ++i) {
                Point p;
                p.time = r.number("number");
                p.label = r.string("mark");
                t.points.push_back(std::move(p));
            }
        } else {
            throw parse_error("TextGrid: unknown tier class '" + cls + "'");
        }
        d.tiers.push_back(std::move(t));
    }
    validate_document(d);
    return d;
}

inline std::string serialize_textgrid(const AnnotationDocument& d) {
    using textgrid_detail::quote;
    auto num = [](double v) { return util::compact(v, 9); };
    std::string o;
    o += "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n";
    o += "xmin = " + num(d.xmin) + " \nxmax = " + num(d.xmax) + " \n";
    if (d.tiers.empty()) return o + "tiers? <absent> \n";
    o += "tiers? <exists> \nsize = " + std::to_string(d.tiers.size()) + " \nitem []: \n";
    for (size_t k = 0; k < d.tiers.size(); ++k) {
        const auto& t = d.tiers[k];
        o += "    item [" + std::to_string(k + 1) + "]:\n";
        o += std::string("        class = ") + (t.kind == TierKind::Interval ? "\"IntervalTier\"" : "\"TextTier\"") + " \n";
        o += "        name = " + quote(t.name) + " \n";
        o += "        xmin = " + num(t.xmin) + " \n        xmax = " + num(t.xmax) + " \n";
        if (t.kind == TierKind::Interval) {
            o += "        intervals: size = " + std::to_string(t.intervals.size()) + " \n";
            for (size_t i = 0; i < t.intervals.size(); ++i) {
                const auto& iv = t.intervals[i];
                o += "        intervals [" + std::to_string(i + 1) + "]:\n";
                o += "            xmin = " + num(iv.t_start) + " \n            xmax = " + num(iv.t_end) + " \n";
                o += "            text = " + quote(iv.label) + " \n";
            }
        } else {
            o += "        points: size = " + std::to_string(t.points.size()) + " \n";
            for (size_t i = 0; i < t.points.size(); ++i) {
                o += "        points [" + std::to_string(i + 1) + "]:\n";
                o += "            number = " + num(t.points[i].time) + " \n";
                o += "            mark = " + quote(t.points[i].label) + " \n";
            }
        }
    }
    return o;
}

// ---------------------------------------------------------------- LEXI generation

inline bool is_pause_label(const std::string& l) {
    auto t = util::trim(l);
    return t.empty() || t == "#" || t == "sil" || t == "SIL" || t == "<sil>" || t == "sp";
}

// Splits each word interval into one sub-interval per phoneme; geminates get two units.
// When a transcription is given, a word-initial syntactic doubling replaces the
// citation singleton by its geminate.
inline Tier generate_lexi_tier(const Tier& word_tier, const Lexicon& lex,
                               const TranscribedSentence* transcription = nullptr) {
    if (word_tier.kind != TierKind::Interval) throw validation_error("word tier must be an interval tier");
    const auto& inv = lex.inventory();
    Tier out;
    out.name = tiers::Lexi;
    out.kind = TierKind::Interval;
    out.xmin = word_tier.xmin;
    out.xmax = word_tier.xmax;

    size_t n_words = 0;
    for (auto& iv : word_tier.intervals) n_words += !is_pause_label(iv.label);
    if (transcription && transcription->words.size() != n_words)
        throw validation_error("transcription has " + std::to_string(transcription->words.size()) +
                               " words, word tier has " + std::to_string(n_words));

    size_t w = 0;
    for (size_t i = 0; i < word_tier.intervals.size(); ++i) {
        const auto& iv = word_tier.intervals[i];
        if (is_pause_label(iv.label)) {
            out.intervals.push_back({iv.t_start, iv.t_end, ""});
            continue;
        }
        if (!(iv.t_end > iv.t_start))
            throw validation_error("word interval " + std::to_string(i + 1) + " ('" + iv.label + "') has zero length");
        const auto* entry = lex.find(std::string(util::trim(iv.label)));
        if (!entry)
            throw lookup_error("unknown word '" + iv.label + "' in interval " + std::to_string(i + 1));
        auto tokens = entry->phonemes;
        if (transcription) {
            for (auto& e : transcription->doubling_events) {
                if (e.target_word != w) continue;
                auto g = geminate_of(inv, tokens.front().phoneme);
                if (g && inv.phoneme(e.phoneme).singleton_base == tokens.front().phoneme) tokens.front().phoneme = *g;
            }
        }
        double units = 0;
        for (auto& t : tokens) units += inv.phoneme(t.phoneme).geminate ? 2.0 : 1.0;
        double acc = 0, span = iv.t_end - iv.t_start;
        for (size_t k = 0; k < tokens.size(); ++k) {
            double a = iv.t_start + span * (acc / units);
            acc += inv.phoneme(tokens[k].phoneme).geminate ? 2.0 : 1.0;
            double b = (k + 1 == tokens.size()) ? iv.t_end : iv.t_start + span * (acc / units);
            out.intervals.push_back({a, b, token_label(inv, tokens[k])});
        }
        ++w;
    }
    return out;
}

struct RelabelEdit {
    size_t index;
    std::string label;
};
struct BoundaryEdit {
    size_t index;
    double t_start, t_end;
};
using TierEdit = std::variant<RelabelEdit, BoundaryEdit>;

// Returns an edited copy. Boundary edits drag the shared boundary of adjacent
// intervals along so that the tier stays tiled.
inline Tier apply_modifications(const Tier& lexi, const std::vector<TierEdit>& edits, const FeatureInventory& inv) {
    Tier t = lexi;
    t.name = tiers::LexiMod;
    for (size_t e = 0; e < edits.size(); ++e) {
        if (auto* r = std::get_if<RelabelEdit>(&edits[e])) {
            if (r->index >= t.intervals.size()) throw validation_error("edit " + std::to_string(e) + ": index out of range");
            std::string lab = r->label;
            if (!lab.empty()) parse_arpabet(inv, lab);  // rejects labels outside the inventory
            if (util::split_ws(lab).size() > 1) throw validation_error("edit " + std::to_string(e) + ": one label expected");
            t.intervals[r->index].label = lab;
        } else {
            auto& b = std::get<BoundaryEdit>(edits[e]);
            size_t k = b.index;
            if (k >= t.intervals.size()) throw validation_error("edit " + std::to_string(e) + ": index out of range");
            auto& iv = t.intervals[k];
            if (!(b.t_start < b.t_end))
                throw validation_error("boundary edit at index " + std::to_string(k) + ": start must precede end");
            if (k > 0 && t.intervals[k - 1].t_end == iv.t_start) {
                if (!(b.t_start > t.intervals[k - 1].t_start))
                    throw validation_error("boundary edit at index " + std::to_string(k) + " crosses the previous interval");
                t.intervals[k - 1].t_end = b.t_start;
            } else if (k > 0 && b.t_start < t.intervals[k - 1].t_end) {
                throw validation_error("boundary edit at index " + std::to_string(k) + " overlaps the previous interval");
            }
            if (k + 1 < t.intervals.size() && t.intervals[k + 1].t_start == iv.t_end) {
                if (!(b.t_end < t.intervals[k + 1].t_end))
                    throw validation_error("boundary edit at index " + std::to_string(k) + " crosses the next interval");
                t.intervals[k + 1].t_start = b.t_end;
            } else if (k + 1 < t.intervals.size() && b.t_end > t.intervals[k + 1].t_start) {
                throw validation_error("boundary edit at index " + std::to_string(k) + " overlaps the next interval");
            }
            if (b.t_start < t.xmin || b.t_end > t.xmax)
                throw validation_error("boundary edit at index " + std::to_string(k) + " leaves the tier span");
            iv.t_start = b.t_start;
            iv.t_end = b.t_end;
        }
    }
    return t;
}

// ---------------------------------------------------------------- tier vocabularies

// Placeholder label sets for the cue tiers; configuration data, not phonology.
inline const std::set<std::string>& tier_vocabulary(const std::string& tier) {
    static const std::set<std::string> nasal{"nas"};
    static const std::set<std::string> glottal{"glot"};
    static const std::set<std::string> cplace{"closure-transition", "release-burst", "release-transition"};
    static const std::set<std::string> vplace{"high", "low", "round", "front", "back"};
    static const std::set<std::string> none;
    if (tier == tiers::Nasal) return nasal;
    if (tier == tiers::Glottal) return glottal;
    if (tier == tiers::Cplace) return cplace;
    if (tier == tiers::Vplace) return vplace;
    return none;
}

// Vplace labels may combine values with '+', e.g. "high+round+back".
inline bool label_in_vocabulary(const std::string& tier, const std::string& label) {
    const auto& v = tier_vocabulary(tier);
    if (v.empty() || label.empty()) return true;
    if (tier == tiers::Vplace) {
        for (auto& part : util::split(label, '+'))
            if (!v.count(part)) return false;
        return true;
    }
    return v.count(label) > 0;
}

}  // namespace lamit
