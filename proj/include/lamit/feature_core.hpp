#pragma once
// Distinctive-feature inventories: the phoneme-by-feature matrices and queries over them.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamit/util.hpp"

namespace lamit {

enum class Value : uint8_t { Unspecified, Plus, Minus, PlusMinus };

inline const char* to_cell(Value v) {
    switch (v) {
        case Value::Plus: return "+";
        case Value::Minus: return "-";
        case Value::PlusMinus: return "±";
        default: return ".";
    }
}

inline std::optional<Value> value_from_cell(std::string_view c) {
    if (c == "+") return Value::Plus;
    if (c == "-" || c == "−") return Value::Minus;
    if (c == "±") return Value::PlusMinus;
    if (c == "." || c.empty()) return Value::Unspecified;
    return std::nullopt;
}

enum class FeatureKind { ArticulatorFree, ArticulatorBound };
enum class ArticulatorGroup { None, OralCavity, PharyngealLaryngeal, SoftPalate, VocalFolds };
enum class MajorClass { Vowel, Glide, Consonant };

inline const char* to_string(MajorClass c) {
    switch (c) {
        case MajorClass::Vowel: return "vowel";
        case MajorClass::Glide: return "glide";
        default: return "consonant";
    }
}

struct FeatureName {
    std::string name;
    FeatureKind kind = FeatureKind::ArticulatorBound;
    ArticulatorGroup group = ArticulatorGroup::None;
    bool operator==(const FeatureName&) const = default;
};

// Kind and articulator group are fixed by the feature name.
inline FeatureName make_feature(const std::string& n) {
    static const std::set<std::string> free_ = {"vowel", "glide", "cons", "cont", "son", "strid"};
    static const std::set<std::string> oral = {"lips", "round", "blade", "ant", "dist", "lat",
                                                "rhot", "body", "high", "low", "back"};
    static const std::set<std::string> phar = {"atr", "ctr", "spread", "constr"};
    FeatureName f{n, FeatureKind::ArticulatorBound, ArticulatorGroup::None};
    if (free_.count(n)) f.kind = FeatureKind::ArticulatorFree;
    else if (oral.count(n)) f.group = ArticulatorGroup::OralCavity;
    else if (phar.count(n)) f.group = ArticulatorGroup::PharyngealLaryngeal;
    else if (n == "nasal") f.group = ArticulatorGroup::SoftPalate;
    else if (n == "stiff" || n == "slack") f.group = ArticulatorGroup::VocalFolds;
    return f;
}

// Ordered feature list shared by every bundle of one inventory.
class FeatureSchema {
public:
    explicit FeatureSchema(std::vector<FeatureName> f) : features_(std::move(f)) {
        for (size_t i = 0; i < features_.size(); ++i) {
            if (!index_.emplace(features_[i].name, i).second)
                throw validation_error("duplicate feature column '" + features_[i].name + "'");
        }
    }
    size_t size() const { return features_.size(); }
    const FeatureName& operator[](size_t i) const { return features_[i]; }
    const std::vector<FeatureName>& features() const { return features_; }
    std::optional<size_t> find(const std::string& n) const {
        auto it = index_.find(n);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    size_t index(const std::string& n) const {
        auto i = find(n);
        if (!i) throw lookup_error("unknown feature '" + n + "'");
        return *i;
    }
    bool operator==(const FeatureSchema& o) const { return features_ == o.features_; }

private:
    std::vector<FeatureName> features_;
    std::unordered_map<std::string, size_t> index_;
};

using SchemaPtr = std::shared_ptr<const FeatureSchema>;

class FeatureBundle {
public:
    FeatureBundle() = default;
    explicit FeatureBundle(SchemaPtr s) : schema_(std::move(s)), values_(schema_ ? schema_->size() : 0) {}

    const SchemaPtr& schema() const { return schema_; }
    size_t size() const { return values_.size(); }
    Value at(size_t i) const { return values_.at(i); }
    Value get(const std::string& n) const { return values_[schema_->index(n)]; }
    void set(size_t i, Value v) { values_.at(i) = v; }
    void set(const std::string& n, Value v) { values_[schema_->index(n)] = v; }
    const std::vector<Value>& values() const { return values_; }

    // Only the specified assignments, in schema order.
    std::vector<std::pair<std::string, Value>> assignments() const {
        std::vector<std::pair<std::string, Value>> out;
        for (size_t i = 0; i < values_.size(); ++i)
            if (values_[i] != Value::Unspecified) out.emplace_back((*schema_)[i].name, values_[i]);
        return out;
    }

    bool same_schema(const FeatureBundle& o) const {
        return schema_ == o.schema_ || (schema_ && o.schema_ && *schema_ == *o.schema_);
    }
    bool operator==(const FeatureBundle& o) const { return same_schema(o) && values_ == o.values_; }

private:
    SchemaPtr schema_;
    std::vector<Value> values_;
};

inline MajorClass classify_major(const FeatureBundle& b) {
    if (!b.schema()) throw Error(ErrorKind::Classification, "bundle has no feature schema");
    int plus = 0;
    MajorClass c = MajorClass::Consonant;
    const std::pair<const char*, MajorClass> keys[] = {
        {"vowel", MajorClass::Vowel}, {"glide", MajorClass::Glide}, {"cons", MajorClass::Consonant}};
    for (auto& [n, mc] : keys) {
        auto i = b.schema()->find(n);
        if (i && b.at(*i) == Value::Plus) {
            ++plus;
            c = mc;
        }
    }
    if (plus != 1)
        throw Error(ErrorKind::Classification,
                    "expected exactly one of vowel/glide/cons to be +, found " + std::to_string(plus));
    return c;
}

struct Phoneme {
    std::string ipa;
    std::string arpabet;
    MajorClass major = MajorClass::Consonant;
    bool geminate = false;
    std::optional<size_t> singleton_base;  // index into the inventory
    bool operator==(const Phoneme&) const = default;
};

using PhonemeId = size_t;

class FeatureInventory {
public:
    std::string language_tag;

    const FeatureSchema& schema() const { return *schema_; }
    const SchemaPtr& schema_ptr() const { return schema_; }
    const std::vector<Phoneme>& phonemes() const { return phonemes_; }
    const Phoneme& phoneme(PhonemeId p) const {
        if (p >= phonemes_.size()) throw lookup_error("unknown phoneme id " + std::to_string(p));
        return phonemes_[p];
    }
    size_t size() const { return phonemes_.size(); }

    std::optional<PhonemeId> find_arpabet(const std::string& a) const {
        auto it = by_arpabet_.find(a);
        if (it == by_arpabet_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<PhonemeId> find_ipa(const std::string& s) const {
        auto it = by_ipa_.find(s);
        if (it == by_ipa_.end()) return std::nullopt;
        return it->second;
    }
    // Accepts an ARPAbet label or an IPA symbol (with or without slashes).
    PhonemeId id(const std::string& s) const {
        if (auto a = find_arpabet(s)) return *a;
        std::string t = s;
        if (t.size() > 2 && t.front() == '/' && t.back() == '/') t = t.substr(1, t.size() - 2);
        if (auto b = find_ipa(t)) return *b;
        throw lookup_error("unknown phoneme '" + s + "'");
    }

    const FeatureBundle& features_of(PhonemeId p) const {
        const auto& ph = phoneme(p);
        return bundles_[ph.geminate ? *ph.singleton_base : p];
    }
    const FeatureBundle& features_of(const std::string& s) const { return features_of(id(s)); }

    std::vector<PhonemeId> singletons() const {
        std::vector<PhonemeId> out;
        for (PhonemeId i = 0; i < phonemes_.size(); ++i)
            if (!phonemes_[i].geminate) out.push_back(i);
        return out;
    }
    std::vector<PhonemeId> geminates() const {
        std::vector<PhonemeId> out;
        for (PhonemeId i = 0; i < phonemes_.size(); ++i)
            if (phonemes_[i].geminate) out.push_back(i);
        return out;
    }

    bool operator==(const FeatureInventory& o) const {
        return language_tag == o.language_tag && *schema_ == *o.schema_ && phonemes_ == o.phonemes_ &&
               bundles_ == o.bundles_;
    }

    // Builds and validates; used by the loader and by tests constructing small inventories.
    static FeatureInventory build(std::string tag, SchemaPtr schema, std::vector<Phoneme> phonemes,
                                  std::vector<FeatureBundle> bundles);

private:
    SchemaPtr schema_;
    std::vector<Phoneme> phonemes_;
    std::vector<FeatureBundle> bundles_;
    std::unordered_map<std::string, PhonemeId> by_arpabet_, by_ipa_;
};

inline FeatureInventory FeatureInventory::build(std::string tag, SchemaPtr schema, std::vector<Phoneme> phonemes,
                                                std::vector<FeatureBundle> bundles) {
    FeatureInventory inv;
    inv.language_tag = std::move(tag);
    inv.schema_ = std::move(schema);
    if (phonemes.empty()) throw parse_error("no phoneme rows");
    for (PhonemeId i = 0; i < phonemes.size(); ++i) {
        if (!inv.by_arpabet_.emplace(phonemes[i].arpabet, i).second)
            throw validation_error("duplicate phoneme " + phonemes[i].arpabet);
        if (!inv.by_ipa_.emplace(phonemes[i].ipa, i).second)
            throw validation_error("duplicate phoneme " + phonemes[i].ipa + " (" + phonemes[i].arpabet + ")");
    }
    auto cont = inv.schema_->find("cont");
    for (PhonemeId i = 0; i < phonemes.size(); ++i) {
        auto& p = phonemes[i];
        const auto& b = bundles[i];
        try {
            p.major = classify_major(b);
        } catch (const Error& e) {
            throw validation_error("phoneme " + p.arpabet + ": " + e.what());
        }
        for (size_t f = 0; f < b.size(); ++f)
            if (b.at(f) == Value::PlusMinus && (!cont || f != *cont))
                throw validation_error("phoneme " + p.arpabet + ": ± allowed only on cont, found on " +
                                       (*inv.schema_)[f].name);
        if (p.geminate) {
            if (!p.singleton_base) throw validation_error("geminate " + p.arpabet + " has no base");
            const auto& base = phonemes.at(*p.singleton_base);
            if (base.geminate) throw validation_error("geminate " + p.arpabet + " has a geminate base");
            if (p.arpabet != base.arpabet + base.arpabet)
                throw validation_error("geminate " + p.arpabet + " is not the doubled label of " + base.arpabet);
            if (!(b == bundles[*p.singleton_base]))
                throw validation_error("geminate " + p.arpabet + " does not inherit the bundle of " + base.arpabet);
        } else if (p.singleton_base) {
            throw validation_error("singleton " + p.arpabet + " has a base");
        }
    }
    for (PhonemeId i = 0; i < phonemes.size(); ++i) {
        if (phonemes[i].geminate) continue;
        for (PhonemeId j = 0; j < i; ++j) {
            if (phonemes[j].geminate) continue;
            if (bundles[i] == bundles[j])
                throw validation_error("phonemes " + phonemes[j].arpabet + " and " + phonemes[i].arpabet +
                                       " have identical feature bundles");
        }
    }
    inv.phonemes_ = std::move(phonemes);
    inv.bundles_ = std::move(bundles);
    return inv;
}

// Inventory file: tab-separated, header "phoneme\tarpabet\t<features...>[\tbase]",
// cells + - ± . ; "#" comment lines; "# language: xx" sets the tag.
inline FeatureInventory load_inventory(std::string_view document) {
    std::string text = util::strip_bom(std::string(document));
    auto ls = util::lines(text);
    std::string tag;
    std::vector<std::string> header;
    size_t header_line = 0;
    std::optional<size_t> base_col;
    SchemaPtr schema;
    std::vector<Phoneme> phonemes;
    std::vector<FeatureBundle> bundles;
    std::vector<std::pair<std::string, size_t>> pending_base;  // base label, phoneme row

    for (size_t ln = 0; ln < ls.size(); ++ln) {
        const std::string& line = ls[ln];
        auto t = util::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            auto body = util::trim(t.substr(1));
            if (util::starts_with(body, "language:")) tag = std::string(util::trim(body.substr(9)));
            continue;
        }
        auto cells = util::split(line, '\t');
        for (auto& c : cells) c = std::string(util::trim(c));
        if (header.empty()) {
            if (cells.size() < 3 || cells[0] != "phoneme" || cells[1] != "arpabet")
                throw parse_error("line " + std::to_string(ln + 1) + ": expected header 'phoneme<TAB>arpabet<TAB>...'");
            header = cells;
            header_line = ln + 1;
            std::vector<FeatureName> fs;
            for (size_t c = 2; c < cells.size(); ++c) {
                if (cells[c] == "base") {
                    if (c != cells.size() - 1)
                        throw parse_error("line " + std::to_string(ln + 1) + ": 'base' must be the last column");
                    base_col = c;
                    break;
                }
                fs.push_back(make_feature(cells[c]));
            }
            schema = std::make_shared<FeatureSchema>(std::move(fs));
            continue;
        }
        if (cells.size() != header.size())
            throw parse_error("line " + std::to_string(ln + 1) + ": expected " + std::to_string(header.size()) +
                              " cells, found " + std::to_string(cells.size()));
        Phoneme p;
        p.ipa = cells[0];
        p.arpabet = cells[1];
        if (p.ipa.empty() || p.arpabet.empty())
            throw parse_error("line " + std::to_string(ln + 1) + ": empty phoneme or arpabet cell");
        FeatureBundle b(schema);
        for (size_t f = 0; f < schema->size(); ++f) {
            auto v = value_from_cell(cells[2 + f]);
            if (!v)
                throw parse_error("line " + std::to_string(ln + 1) + ": bad cell '" + cells[2 + f] + "' for " +
                                  (*schema)[f].name);
            b.set(f, *v);
        }
        if (base_col && cells[*base_col] != "." && !cells[*base_col].empty()) {
            p.geminate = true;
            pending_base.emplace_back(cells[*base_col], phonemes.size());
        }
        phonemes.push_back(std::move(p));
        bundles.push_back(std::move(b));
    }
    (void)header_line;
    if (phonemes.empty()) throw parse_error("no phoneme rows");
    for (auto& [lab, row] : pending_base) {
        auto it = std::find_if(phonemes.begin(), phonemes.end(), [&](const Phoneme& q) { return q.arpabet == lab; });
        if (it == phonemes.end())
            throw validation_error("geminate " + phonemes[row].arpabet + " references unknown base " + lab);
        phonemes[row].singleton_base = static_cast<size_t>(it - phonemes.begin());
    }
    return FeatureInventory::build(tag, schema, std::move(phonemes), std::move(bundles));
}

inline std::string serialize_inventory(const FeatureInventory& inv) {
    std::string out;
    if (!inv.language_tag.empty()) out += "# language: " + inv.language_tag + "\n";
    out += "phoneme\tarpabet";
    for (auto& f : inv.schema().features()) out += "\t" + f.name;
    bool any_gem = !inv.geminates().empty();
    if (any_gem) out += "\tbase";
    out += "\n";
    for (PhonemeId i = 0; i < inv.size(); ++i) {
        const auto& p = inv.phoneme(i);
        out += p.ipa + "\t" + p.arpabet;
        for (Value v : inv.features_of(i).values()) out += std::string("\t") + to_cell(v);
        if (any_gem) out += "\t" + (p.geminate ? inv.phoneme(*p.singleton_base).arpabet : std::string("."));
        out += "\n";
    }
    return out;
}

inline FeatureInventory load_inventory_file(const std::string& path) { return load_inventory(util::read_file(path)); }

// Features whose values differ; Unspecified against anything else counts as a difference.
inline std::vector<std::string> distinguishing_features(const FeatureInventory& inv, PhonemeId a, PhonemeId b) {
    const auto& x = inv.features_of(a);
    const auto& y = inv.features_of(b);
    std::vector<std::string> out;
    for (size_t f = 0; f < x.size(); ++f)
        if (x.at(f) != y.at(f)) out.push_back(inv.schema()[f].name);
    return out;
}

using Constraints = std::map<std::string, Value>;

inline bool satisfies(Value have, Value want) {
    if (have == want) return true;
    return have == Value::PlusMinus && (want == Value::Plus || want == Value::Minus);
}

// Singletons whose bundle matches every constraint.
inline std::vector<PhonemeId> natural_class(const FeatureInventory& inv, const Constraints& cs) {
    std::vector<std::pair<size_t, Value>> idx;
    for (auto& [n, v] : cs) idx.emplace_back(inv.schema().index(n), v);
    std::vector<PhonemeId> out;
    for (PhonemeId p : inv.singletons()) {
        const auto& b = inv.features_of(p);
        bool ok = std::all_of(idx.begin(), idx.end(), [&](auto& c) { return satisfies(b.at(c.first), c.second); });
        if (ok) out.push_back(p);
    }
    return out;
}

}  // namespace lamit
