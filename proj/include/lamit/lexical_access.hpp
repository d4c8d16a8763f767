#pragma once
// From landmarks and parameter frames to estimated feature bundles, and cohort
// matching of those bundles against the lexicon.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamit/annotation.hpp"
#include "lamit/dsp.hpp"
#include "lamit/landmarks.hpp"
#include "lamit/lexicon.hpp"

namespace lamit {

struct EstimatedSegment {
    double t_start = 0, t_end = 0;
    FeatureBundle bundle;
    std::vector<size_t> source_landmarks;

    double midpoint() const { return 0.5 * (t_start + t_end); }
};

struct DistanceWeights {
    double w_free = 2.0;
    double w_bound = 1.0;
    double unspecified_cost = 0.25;
};

inline void validate_weights(const DistanceWeights& w) {
    if (!(w.w_free > 0) || !(w.w_bound > 0) || !(w.unspecified_cost >= 0))
        throw config_error("weights must satisfy w_free > 0, w_bound > 0, unspecified_cost >= 0");
}

// Stand-in cue rules for articulator-bound features.
struct CueRules {
    double low_ratio_db = 1.5;    // F1-proxy minus low band at or above this: [+low]
    double high_ratio_db = -4.0;  // at or below this: [+high]
    bool tilt_rule = true;
    double back_tilt = -25.0;     // dB/octave at or below: [+back] [+round]
    double front_tilt = -3.0;     // at or above: [-back]
    double voiced_fraction = 0.8; // F0 present on this share of the consonant interval: [+slack]
    bool stiff_when_unvoiced = false;
    double vowel_halfwidth = 0.050;
    double cons_before = 0.050, cons_after = 0.080;
};

namespace la_detail {
inline std::vector<size_t> frames_between(const std::vector<ParameterFrame>& fr, double a, double b) {
    std::vector<size_t> out;
    for (size_t i = 0; i < fr.size(); ++i)
        if (fr[i].time >= a - 1e-9 && fr[i].time <= b + 1e-9) out.push_back(i);
    return out;
}
inline const ParameterFrame* nearest(const std::vector<ParameterFrame>& fr, double t) {
    const ParameterFrame* best = nullptr;
    for (auto& f : fr)
        if (!best || std::abs(f.time - t) < std::abs(best->time - t)) best = &f;
    return best;
}
}  // namespace la_detail

// One segment per vowel/glide landmark and per closure-release pair; an unpaired
// consonant landmark gets a segment of its own with only major class and manner.
inline std::vector<EstimatedSegment> cues_to_bundles(const LandmarkSequence& seq, const std::vector<ParameterFrame>& frames,
                                                     const SchemaPtr& schema, const CueRules& rules = {}) {
    std::vector<EstimatedSegment> out;
    const auto& L = seq.items;
    for (size_t i = 0; i < L.size(); ++i) {
        const auto& l = L[i];
        EstimatedSegment s;
        s.bundle = FeatureBundle(schema);
        if (l.kind == LandmarkKind::Vowel || l.kind == LandmarkKind::Glide) {
            s.t_start = l.time - rules.vowel_halfwidth;
            s.t_end = l.time + rules.vowel_halfwidth;
            s.source_landmarks = {i};
            s.bundle.set(l.kind == LandmarkKind::Vowel ? "vowel" : "glide", Value::Plus);
            if (const auto* f = la_detail::nearest(frames, l.time)) {
                double ratio = f->f1_proxy_dB - f->low_band_dB;
                if (ratio >= rules.low_ratio_db) s.bundle.set("low", Value::Plus);
                else if (ratio <= rules.high_ratio_db) s.bundle.set("high", Value::Plus);
                if (rules.tilt_rule) {
                    if (f->spectral_tilt <= rules.back_tilt) {
                        s.bundle.set("back", Value::Plus);
                        s.bundle.set("round", Value::Plus);
                    } else if (f->spectral_tilt >= rules.front_tilt) {
                        s.bundle.set("back", Value::Minus);
                    }
                }
            }
            out.push_back(std::move(s));
            continue;
        }
        // consonant
        const Landmark* cl = nullptr;
        const Landmark* rel = nullptr;
        if (l.kind == LandmarkKind::ConsonantClosure && i + 1 < L.size() &&
            L[i + 1].kind == LandmarkKind::ConsonantRelease) {
            cl = &l;
            rel = &L[i + 1];
            s.source_landmarks = {i, i + 1};
            ++i;
        } else {
            (l.kind == LandmarkKind::ConsonantClosure ? cl : rel) = &l;
            s.source_landmarks = {i};
        }
        double t0 = cl ? cl->time : rel->time;
        double t1 = rel ? rel->time : cl->time;
        s.t_start = t0 - rules.cons_before;
        s.t_end = t1 + rules.cons_after;
        s.bundle.set("cons", Value::Plus);
        std::optional<Manner> m = rel && rel->manner ? rel->manner : (cl ? cl->manner : std::nullopt);
        if (cl && rel && cl->manner && rel->manner && *cl->manner != *rel->manner) {
            if (*cl->manner == Manner::Noncontinuant || *rel->manner == Manner::Noncontinuant) m = Manner::Noncontinuant;
        }
        if (m) {
            if (*m == Manner::Sonorant) s.bundle.set("son", Value::Plus);
            else if (*m == Manner::Continuant) s.bundle.set("cont", Value::Plus);
            else s.bundle.set("cont", Value::Minus);
        }
        if ((cl && cl->strident) || (rel && rel->strident)) s.bundle.set("strid", Value::Plus);
        if (cl && rel) {
            auto idx = la_detail::frames_between(frames, t0, t1);
            if (!idx.empty()) {
                size_t voiced = 0;
                for (size_t k : idx) voiced += frames[k].f0.has_value();
                double share = double(voiced) / idx.size();
                if (share >= rules.voiced_fraction) s.bundle.set("slack", Value::Plus);
                else if (rules.stiff_when_unvoiced && share <= 1.0 - rules.voiced_fraction)
                    s.bundle.set("stiff", Value::Plus);
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

// Conflict counts from which the score is computed; equal counts give bitwise-equal scores.
struct Cost {
    int free_conflicts = 0;
    int bound_conflicts = 0;
    int unspecified = 0;

    double score(const DistanceWeights& w) const {
        return free_conflicts * w.w_free + bound_conflicts * w.w_bound + unspecified * w.unspecified_cost;
    }
    Cost& operator+=(const Cost& o) {
        free_conflicts += o.free_conflicts;
        bound_conflicts += o.bound_conflicts;
        unspecified += o.unspecified;
        return *this;
    }
    bool operator==(const Cost&) const = default;
};

// est Unspecified against a specified lexical value costs unspecified_cost; any other
// disagreement costs the feature's weight, except that a ± lexical value accepts + and -.
inline Cost feature_cost(const FeatureBundle& est, const FeatureBundle& lex) {
    if (!est.same_schema(lex)) throw validation_error("feature bundles come from different inventories");
    Cost c;
    const auto& sch = *lex.schema();
    for (size_t f = 0; f < lex.size(); ++f) {
        Value e = est.at(f), l = lex.at(f);
        if (e == l) continue;
        if (l == Value::PlusMinus && (e == Value::Plus || e == Value::Minus)) continue;
        if (e == Value::Unspecified) {
            ++c.unspecified;
            continue;
        }
        if (sch[f].kind == FeatureKind::ArticulatorFree) ++c.free_conflicts;
        else ++c.bound_conflicts;
    }
    return c;
}

inline double feature_distance(const FeatureBundle& est, const FeatureBundle& lex, const DistanceWeights& w = {}) {
    return feature_cost(est, lex).score(w);
}

struct MatchResult {
    std::string word;
    double score = 0;
    int cohort_rank = 0;
    Cost cost;
};

using WordFrequency = std::map<std::string, long>;

inline long frequency_of(const WordFrequency* f, const std::string& w) {
    if (!f) return 0;
    auto it = f->find(w);
    return it == f->end() ? 0 : it->second;
}

// Score ascending; ties by higher corpus frequency, then orthography.
inline void rank_results(std::vector<MatchResult>& rs, const WordFrequency* freq) {
    std::sort(rs.begin(), rs.end(), [&](const MatchResult& a, const MatchResult& b) {
        if (a.score != b.score) return a.score < b.score;
        long fa = frequency_of(freq, a.word), fb = frequency_of(freq, b.word);
        if (fa != fb) return fa > fb;
        return a.word < b.word;
    });
    for (size_t i = 0; i < rs.size(); ++i) rs[i].cohort_rank = static_cast<int>(i + 1);
}

struct CohortTrace {
    std::vector<size_t> cohort_sizes;  // after each segment
};

// Incremental left-to-right matching with branch-and-bound pruning. A candidate is
// dropped only when its lower bound exceeds the k-th best upper bound, so the
// top-k equals exhaustive scoring.
inline std::vector<MatchResult> cohort_match(const std::vector<EstimatedSegment>& segments, const Lexicon& lex,
                                             const DistanceWeights& w, int k, const WordFrequency* freq = nullptr,
                                             CohortTrace* trace = nullptr) {
    validate_weights(w);
    if (k < 1) throw config_error("k must be at least 1");
    if (lex.size() == 0) throw validation_error("empty lexicon");
    if (segments.empty()) throw validation_error("no segments to match");
    const auto& inv = lex.inventory();
    const size_t S = segments.size(), P = inv.size();

    // cost of each segment against each phoneme
    std::vector<Cost> table(S * P);
    std::vector<double> worst(S, 0.0);
    for (size_t s = 0; s < S; ++s)
        for (size_t p = 0; p < P; ++p) {
            table[s * P + p] = feature_cost(segments[s].bundle, inv.features_of(p));
            worst[s] = std::max(worst[s], table[s * P + p].score(w));
        }

    struct Cand {
        const LexEntry* e;
        Cost cost;
        double lb;  // score so far plus the fixed length penalty
    };
    std::vector<Cand> cohort;
    cohort.reserve(lex.size());
    for (auto& [key, e] : lex.entries()) {
        Cand c{&e, {}, 0};
        long gap = std::labs(long(e.phonemes.size()) - long(S));
        c.cost.free_conflicts += static_cast<int>(gap);
        c.lb = c.cost.score(w);
        cohort.push_back(c);
    }
    // suffix sums of the worst per-segment cost, for upper bounds
    std::vector<double> suffix(S + 1, 0.0);
    for (size_t s = S; s-- > 0;) suffix[s] = suffix[s + 1] + worst[s];

    const double eps = 1e-9;
    for (size_t s = 0; s < S; ++s) {
        std::vector<double> ubs;
        ubs.reserve(cohort.size());
        for (auto& c : cohort) {
            if (s < c.e->phonemes.size()) {
                c.cost += table[s * P + c.e->phonemes[s].phoneme];
                c.lb = c.cost.score(w);
            }
            size_t aligned = std::min(S, c.e->phonemes.size());
            double rest = aligned > s + 1 ? suffix[s + 1] - suffix[aligned] : 0.0;
            ubs.push_back(c.lb + rest);
        }
        if (cohort.size() > size_t(k)) {
            std::nth_element(ubs.begin(), ubs.begin() + (k - 1), ubs.end());
            double tau = ubs[k - 1];
            cohort.erase(std::remove_if(cohort.begin(), cohort.end(), [&](const Cand& c) { return c.lb > tau + eps; }),
                         cohort.end());
        }
        if (trace) trace->cohort_sizes.push_back(cohort.size());
    }
    std::vector<MatchResult> rs;
    rs.reserve(cohort.size());
    for (auto& c : cohort) rs.push_back({c.e->orthography, c.cost.score(w), 0, c.cost});
    rank_results(rs, freq);
    if (rs.size() > size_t(k)) rs.resize(k);
    return rs;
}

struct WordMatch {
    size_t interval_index = 0;  // 1-based position in the Word tier
    std::string label;
    std::vector<size_t> segments;
    std::vector<MatchResult> results;
    bool no_evidence = false;
};

struct WordMatches {
    std::vector<WordMatch> words;
    std::vector<size_t> orphans;  // segments outside every word interval
};

inline WordMatches match_in_word_intervals(const AnnotationDocument& doc, const std::vector<EstimatedSegment>& segments,
                                           const Lexicon& lex, const DistanceWeights& w, int k,
                                           const WordFrequency* freq = nullptr) {
    const Tier* wt = doc.find(tiers::Word);
    if (!wt || wt->kind != TierKind::Interval) throw lookup_error("document has no Word interval tier");
    WordMatches out;
    std::vector<int> owner(segments.size(), -1);
    for (size_t i = 0; i < wt->intervals.size(); ++i) {
        const auto& iv = wt->intervals[i];
        if (is_pause_label(iv.label)) continue;
        WordMatch wm;
        wm.interval_index = i + 1;
        wm.label = iv.label;
        for (size_t s = 0; s < segments.size(); ++s) {
            double m = segments[s].midpoint();
            bool last = i + 1 == wt->intervals.size();
            if (owner[s] < 0 && m >= iv.t_start && (m < iv.t_end || (last && m <= iv.t_end))) {
                owner[s] = static_cast<int>(i);
                wm.segments.push_back(s);
            }
        }
        if (wm.segments.empty()) {
            wm.no_evidence = true;
        } else {
            std::vector<EstimatedSegment> seg;
            for (size_t s : wm.segments) seg.push_back(segments[s]);
            wm.results = cohort_match(seg, lex, w, k, freq);
        }
        out.words.push_back(std::move(wm));
    }
    for (size_t s = 0; s < segments.size(); ++s)
        if (owner[s] < 0) out.orphans.push_back(s);
    return out;
}

inline std::string match_csv(const WordMatches& m) {
    std::string out = "word_interval_index,candidate,score,rank\n";
    for (auto& w : m.words) {
        if (w.no_evidence) {
            out += std::to_string(w.interval_index) + ",<no evidence>,,\n";
            continue;
        }
        for (auto& r : w.results)
            out += std::to_string(w.interval_index) + "," + r.word + "," + util::fixed(r.score, 2) + "," +
                   std::to_string(r.cohort_rank) + "\n";
    }
    return out;
}

// Estimated segments as "t_start,t_end,features" with features written "+cons -cont".
inline std::string segment_csv(const std::vector<EstimatedSegment>& segs) {
    std::string out = "t_start,t_end,features\n";
    for (auto& s : segs) {
        std::string f;
        for (auto& [name, v] : s.bundle.assignments()) f += (f.empty() ? "" : " ") + std::string(to_cell(v)) + name;
        out += util::fixed(s.t_start, 6) + "," + util::fixed(s.t_end, 6) + "," + f + "\n";
    }
    return out;
}

inline std::vector<EstimatedSegment> parse_segment_csv(std::string_view doc, const SchemaPtr& schema) {
    std::vector<EstimatedSegment> out;
    auto ls = util::lines(doc);
    for (size_t i = 0; i < ls.size(); ++i) {
        auto t = util::trim(ls[i]);
        if (t.empty() || (i == 0 && util::starts_with(t, "t_start"))) continue;
        std::string where = "segment line " + std::to_string(i + 1);
        auto cells = util::split(t, ',');
        if (cells.size() != 3) throw parse_error(where + ": expected t_start,t_end,features");
        EstimatedSegment s{util::parse_double(cells[0], where), util::parse_double(cells[1], where), FeatureBundle(schema), {}};
        if (!(s.t_start < s.t_end)) throw parse_error(where + ": t_start must precede t_end");
        for (auto& tok : util::split_ws(cells[2])) {
            Value v = tok[0] == '+' ? Value::Plus : tok[0] == '-' ? Value::Minus : Value::Unspecified;
            if (v == Value::Unspecified || tok.size() < 2) throw parse_error(where + ": bad feature '" + tok + "'");
            try {
                s.bundle.set(tok.substr(1), v);
            } catch (const Error&) {
                throw parse_error(where + ": unknown feature '" + tok.substr(1) + "'");
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace lamit
