#pragma once
// Vowel, glide and consonant landmark detection over band-energy tracks.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lamit/annotation.hpp"
#include "lamit/dsp.hpp"

namespace lamit {

enum class LandmarkKind { Vowel, Glide, ConsonantClosure, ConsonantRelease };
enum class Manner { Sonorant, Continuant, Noncontinuant };

inline bool is_consonant(LandmarkKind k) {
    return k == LandmarkKind::ConsonantClosure || k == LandmarkKind::ConsonantRelease;
}

inline const char* to_string(LandmarkKind k) {
    switch (k) {
        case LandmarkKind::Vowel: return "Vowel";
        case LandmarkKind::Glide: return "Glide";
        case LandmarkKind::ConsonantClosure: return "ConsonantClosure";
        default: return "ConsonantRelease";
    }
}
inline const char* short_name(LandmarkKind k) {
    switch (k) {
        case LandmarkKind::Vowel: return "V";
        case LandmarkKind::Glide: return "G";
        case LandmarkKind::ConsonantClosure: return "Ccl";
        default: return "Crel";
    }
}
inline const char* to_string(Manner m) {
    switch (m) {
        case Manner::Sonorant: return "sonorant";
        case Manner::Continuant: return "continuant";
        default: return "noncontinuant";
    }
}
inline std::optional<LandmarkKind> kind_from_string(const std::string& s) {
    for (auto k : {LandmarkKind::Vowel, LandmarkKind::Glide, LandmarkKind::ConsonantClosure, LandmarkKind::ConsonantRelease})
        if (s == to_string(k) || s == short_name(k)) return k;
    return std::nullopt;
}
inline std::optional<Manner> manner_from_string(const std::string& s) {
    for (auto m : {Manner::Sonorant, Manner::Continuant, Manner::Noncontinuant})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

struct Landmark {
    double time = 0;
    LandmarkKind kind = LandmarkKind::Vowel;
    std::optional<Manner> manner;  // consonant landmarks only
    double strength = 0;           // dB
    bool strident = false;         // continuant landmarks with strong high-band noise
    bool operator==(const Landmark&) const = default;
};

struct LandmarkSequence {
    std::vector<Landmark> items;

    std::vector<std::string> broad_class_string() const {
        std::vector<std::string> out;
        for (auto& l : items) out.push_back(short_name(l.kind));
        return out;
    }
};

struct LandmarkParams {
    double P_v = 9.0;        // vowel peak prominence, dB
    double D_v = 0.060;      // minimum vowel landmark separation, s
    double P_g = 6.0;        // glide dip depth, dB
    double W_g = 0.150;      // glide search window around vowels, s
    double R_c = 300.0;      // consonant rate-of-rise threshold, dB/s
    double S_son = 10.0;     // sonorant low-band continuity, dB
    double N_ms = 0.030;     // sustained noise duration for continuants, s
    double T_merge = 0.015;  // collision window for merging, s
    double noise_margin = 0.0;   // high band minus low band that counts as frication, dB
    double noise_range_db = 30.0;  // frication must be within this of the loudest frame
    double strid_margin = 10.0;  // high band above the neighbouring vowel's, dB
    double ror_window = 0.020;
    double gate_db = 60, gate_min = 0.100;
};

namespace lm_detail {

inline bool inside(const std::optional<std::pair<size_t, size_t>>& span, size_t i) {
    return span && i >= span->first && i <= span->second;
}

inline std::optional<std::pair<size_t, size_t>> span_of(const BandEnergyTracks& t, const LandmarkParams& p) {
    return utterance_span(gate_energy(t), t.frame_step, t.floor_db, p.gate_db, p.gate_min);
}

// Topographic prominence of the peak at i.
inline double prominence(const std::vector<double>& x, size_t i) {
    double left_min = x[i], right_min = x[i];
    for (size_t j = i; j-- > 0;) {
        if (x[j] > x[i]) break;
        left_min = std::min(left_min, x[j]);
    }
    for (size_t j = i + 1; j < x.size(); ++j) {
        if (x[j] > x[i]) break;
        right_min = std::min(right_min, x[j]);
    }
    return x[i] - std::max(left_min, right_min);
}

// Local maxima; a plateau reports its middle frame.
inline std::vector<size_t> local_maxima(const std::vector<double>& x) {
    std::vector<size_t> out;
    size_t n = x.size();
    for (size_t i = 1; i + 1 < n;) {
        if (x[i] > x[i - 1]) {
            size_t j = i;
            while (j + 1 < n && x[j + 1] == x[i]) ++j;
            if (j + 1 < n && x[j + 1] < x[i]) out.push_back((i + j) / 2);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

inline std::vector<size_t> local_minima(const std::vector<double>& x) {
    std::vector<double> neg(x.size());
    for (size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    return local_maxima(neg);
}

inline size_t frame_at(const BandEnergyTracks& t, double time) {
    auto it = std::lower_bound(t.times.begin(), t.times.end(), time);
    if (it == t.times.end()) return t.times.size() - 1;
    size_t i = static_cast<size_t>(it - t.times.begin());
    if (i > 0 && time - t.times[i - 1] < t.times[i] - time) --i;
    return i;
}

// Frames [a, b] all carry loud frication.
inline bool noisy(const BandEnergyTracks& t, const LandmarkParams& p, long a, long b) {
    const auto& low = t.track("low");
    const auto& high = t.track("high");
    const long n = static_cast<long>(low.size());
    if (a < 0 || b >= n || a > b) return false;
    auto ge = gate_energy(t);
    const double loud = *std::max_element(ge.begin(), ge.end()) - p.noise_range_db;
    for (long j = a; j <= b; ++j)
        if (high[j] - low[j] < p.noise_margin || high[j] < loud) return false;
    return true;
}

// The N_ms window of frication beside frame i, after it first, then before it.
inline std::optional<std::pair<long, long>> noise_window(const BandEnergyTracks& t, const LandmarkParams& p, long i) {
    const long nn = std::max<long>(1, std::lround(p.N_ms / t.frame_step));
    if (noisy(t, p, i + 1, i + nn)) return std::make_pair(i + 1, i + nn);
    if (noisy(t, p, i - nn, i - 1)) return std::make_pair(i - nn, i - 1);
    return std::nullopt;
}

}  // namespace lm_detail

inline std::vector<Landmark> detect_vowel_landmarks(const BandEnergyTracks& t, const LandmarkParams& p = {}) {
    const auto low = smooth_track(t.track("low"), t.frame_step, p.ror_window);
    auto span = lm_detail::span_of(t, p);
    std::vector<std::pair<double, size_t>> cands;
    for (size_t i : lm_detail::local_maxima(low)) {
        if (!lm_detail::inside(span, i)) continue;
        double prom = lm_detail::prominence(low, i);
        if (prom >= p.P_v) cands.emplace_back(prom, i);
    }
    std::stable_sort(cands.begin(), cands.end(), [](auto& a, auto& b) { return a.first > b.first; });
    std::vector<std::pair<size_t, double>> kept;
    for (auto& [prom, i] : cands) {
        bool ok = std::all_of(kept.begin(), kept.end(),
                              [&](auto& k) { return std::abs(t.times[k.first] - t.times[i]) >= p.D_v - 1e-9; });
        if (ok) kept.emplace_back(i, prom);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<Landmark> out;
    for (auto& [i, prom] : kept) out.push_back({t.times[i], LandmarkKind::Vowel, std::nullopt, prom, false});
    return out;
}

// Low-band dips next to a vowel landmark, deep enough but without abrupt edges.
inline std::vector<Landmark> detect_glide_landmarks(const BandEnergyTracks& t, const std::vector<Landmark>& vowels,
                                                    const LandmarkParams& p = {}) {
    const auto low = smooth_track(t.track("low"), t.frame_step, p.ror_window);
    auto span = lm_detail::span_of(t, p);
    const long wg = std::lround(p.W_g / t.frame_step);
    const long n = static_cast<long>(low.size());
    std::vector<std::vector<double>> ror;
    for (auto& e : t.energy) ror.push_back(rate_of_rise(e, t.frame_step, p.ror_window));
    std::vector<Landmark> out;
    for (size_t i : lm_detail::local_minima(low)) {
        if (!lm_detail::inside(span, i)) continue;
        bool near_vowel = std::any_of(vowels.begin(), vowels.end(),
                                      [&](const Landmark& v) { return std::abs(v.time - t.times[i]) <= p.W_g + 1e-9; });
        if (!near_vowel) continue;
        long a = std::max<long>(0, long(i) - wg), b = std::min<long>(n - 1, long(i) + wg);
        long lmax = long(i), rmax = long(i);
        for (long j = a; j < long(i); ++j)
            if (low[j] > low[lmax]) lmax = j;
        for (long j = long(i) + 1; j <= b; ++j)
            if (low[j] > low[rmax]) rmax = j;
        double depth = std::min(low[lmax], low[rmax]) - low[i];
        if (depth < p.P_g) continue;
        double steepest = 0;
        for (auto& r : ror)
            for (long j = lmax; j <= rmax; ++j) steepest = std::max(steepest, std::abs(r[j]));
        if (steepest >= p.R_c) continue;
        out.push_back({t.times[i], LandmarkKind::Glide, std::nullopt, depth, false});
    }
    return out;
}

inline std::vector<Landmark> detect_consonant_landmarks(const BandEnergyTracks& t, const LandmarkParams& p = {}) {
    const auto& low = t.track("low");
    const auto& high = t.track("high");
    std::vector<const std::vector<double>*> use = {&low, &t.track("mid"), &high};
    std::vector<std::vector<double>> ror;
    for (auto* e : use) ror.push_back(rate_of_rise(*e, t.frame_step, p.ror_window));
    auto span = lm_detail::span_of(t, p);
    const size_t n = low.size();
    const long hw = std::max<long>(1, std::lround(p.ror_window / t.frame_step));

    std::vector<Landmark> out;
    for (int sign : {+1, -1}) {
        std::vector<int> hits(n, 0);
        for (size_t i = 0; i < n; ++i)
            for (auto& r : ror) hits[i] += (sign * r[i] > p.R_c);
        for (size_t i = 0; i < n;) {
            if (hits[i] < 2) {
                ++i;
                continue;
            }
            size_t j = i;
            while (j + 1 < n && hits[j + 1] >= 2) ++j;
            size_t best = i;
            double best_v = -1;
            for (size_t k = i; k <= j; ++k) {
                double v = 0;
                for (auto& r : ror) v += std::max(0.0, sign * r[k]);
                if (v > best_v) {
                    best_v = v;
                    best = k;
                }
            }
            i = j + 1;
            if (!lm_detail::inside(span, best)) continue;
            long a = std::max<long>(0, long(best) - hw), b = std::min<long>(n - 1, long(best) + hw);
            double strength = 0;
            for (auto* e : use) strength = std::max(strength, std::abs((*e)[b] - (*e)[a]));
            Landmark l;
            l.time = t.times[best];
            l.kind = sign > 0 ? LandmarkKind::ConsonantRelease : LandmarkKind::ConsonantClosure;
            l.strength = strength;
            if (std::abs(low[b] - low[a]) <= p.S_son) l.manner = Manner::Sonorant;
            else if (lm_detail::noise_window(t, p, long(best))) l.manner = Manner::Continuant;
            else l.manner = Manner::Noncontinuant;
            out.push_back(l);
        }
    }
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.time < b.time; });
    return out;
}

// Merge, sort, and collapse collisions closer than T_merge (consonant > vowel > glide).
inline LandmarkSequence landmark_sequence(const std::vector<Landmark>& v, const std::vector<Landmark>& g,
                                          const std::vector<Landmark>& c, const LandmarkParams& p = {}) {
    auto rank = [](LandmarkKind k) { return is_consonant(k) ? 0 : k == LandmarkKind::Vowel ? 1 : 2; };
    std::vector<Landmark> all;
    all.insert(all.end(), c.begin(), c.end());
    all.insert(all.end(), v.begin(), v.end());
    all.insert(all.end(), g.begin(), g.end());
    // priority order first so that higher-priority items claim their neighbourhood
    std::stable_sort(all.begin(), all.end(), [&](auto& a, auto& b) {
        if (rank(a.kind) != rank(b.kind)) return rank(a.kind) < rank(b.kind);
        return a.strength > b.strength;
    });
    std::vector<Landmark> kept;
    for (auto& l : all) {
        bool clash = std::any_of(kept.begin(), kept.end(),
                                 [&](const Landmark& k) { return std::abs(k.time - l.time) < p.T_merge - 1e-12; });
        if (!clash) kept.push_back(l);
    }
    std::sort(kept.begin(), kept.end(), [&](auto& a, auto& b) {
        if (a.time != b.time) return a.time < b.time;
        return rank(a.kind) < rank(b.kind);
    });
    return {kept};
}

// Continuant landmarks whose noise is much stronger in the high band than the nearest vowel's.
inline void assign_strident(LandmarkSequence& seq, const BandEnergyTracks& t, const LandmarkParams& p = {}) {
    const auto& high = t.track("high");
    for (auto& l : seq.items) {
        if (!l.manner || *l.manner != Manner::Continuant) continue;
        const Landmark* nearest = nullptr;
        for (auto& v : seq.items)
            if (v.kind == LandmarkKind::Vowel && (!nearest || std::abs(v.time - l.time) < std::abs(nearest->time - l.time)))
                nearest = &v;
        if (!nearest) continue;
        auto w = lm_detail::noise_window(t, p, static_cast<long>(lm_detail::frame_at(t, l.time)));
        if (!w) continue;
        auto [a, b] = *w;
        double noise = 0;
        for (long j = a; j <= b; ++j) noise += high[j];
        noise /= double(b - a + 1);
        double vowel_high = high[lm_detail::frame_at(t, nearest->time)];
        l.strident = noise >= vowel_high + p.strid_margin;
    }
}

inline LandmarkSequence detect_landmarks(const BandEnergyTracks& t, const LandmarkParams& p = {}) {
    auto v = detect_vowel_landmarks(t, p);
    auto g = detect_glide_landmarks(t, v, p);
    auto c = detect_consonant_landmarks(t, p);
    auto seq = landmark_sequence(v, g, c, p);
    assign_strident(seq, t, p);
    return seq;
}

inline std::string landmark_label(const Landmark& l) {
    switch (l.kind) {
        case LandmarkKind::Vowel: return "V";
        case LandmarkKind::Glide: return "G";
        default: break;
    }
    std::string s = l.kind == LandmarkKind::ConsonantClosure ? "C-cl" : "C-rel";
    if (l.manner) {
        switch (*l.manner) {
            case Manner::Sonorant: s += ":+son"; break;
            case Manner::Continuant: s += ":+cont"; break;
            case Manner::Noncontinuant: s += ":-cont"; break;
        }
    }
    if (l.strident) s += ":+strid";
    return s;
}

inline Tier landmark_tier_from(const std::vector<Landmark>& lms, double xmin, double xmax) {
    Tier t;
    t.name = tiers::Landmark;
    t.kind = TierKind::Point;
    t.xmin = xmin;
    t.xmax = xmax;
    for (size_t i = 0; i < lms.size(); ++i) {
        if (i > 0 && !(lms[i].time > lms[i - 1].time)) throw validation_error("landmarks are not time-ordered");
        t.points.push_back({lms[i].time, landmark_label(lms[i])});
    }
    return t;
}

inline std::string landmark_csv(const LandmarkSequence& seq) {
    std::string out = "time_s,kind,manner,strength_dB\n";
    for (auto& l : seq.items)
        out += util::fixed(l.time, 6) + "," + to_string(l.kind) + "," + (l.manner ? to_string(*l.manner) : "") + "," +
               util::fixed(l.strength, 2) + "\n";
    return out;
}

inline LandmarkSequence parse_landmark_csv(std::string_view doc) {
    LandmarkSequence seq;
    auto ls = util::lines(util::strip_bom(std::string(doc)));
    for (size_t ln = 0; ln < ls.size(); ++ln) {
        auto t = util::trim(ls[ln]);
        if (t.empty() || t[0] == '#') continue;
        if (ln == 0 && util::starts_with(t, "time_s")) continue;
        auto c = util::split(t, ',');
        if (c.size() < 3) throw parse_error("landmark CSV line " + std::to_string(ln + 1) + ": expected 4 columns");
        Landmark l;
        l.time = util::parse_double(c[0], "time_s");
        auto k = kind_from_string(std::string(util::trim(c[1])));
        if (!k) throw parse_error("landmark CSV line " + std::to_string(ln + 1) + ": unknown kind '" + c[1] + "'");
        l.kind = *k;
        auto mtxt = std::string(util::trim(c[2]));
        if (!mtxt.empty()) {
            auto m = manner_from_string(mtxt);
            if (!m) throw parse_error("landmark CSV line " + std::to_string(ln + 1) + ": unknown manner '" + mtxt + "'");
            l.manner = m;
        }
        if (is_consonant(l.kind) != l.manner.has_value())
            throw parse_error("landmark CSV line " + std::to_string(ln + 1) + ": manner must accompany consonant kinds only");
        if (c.size() > 3 && !util::trim(c[3]).empty()) l.strength = util::parse_double(c[3], "strength_dB");
        seq.items.push_back(l);
    }
    for (size_t i = 1; i < seq.items.size(); ++i)
        if (!(seq.items[i].time > seq.items[i - 1].time)) throw parse_error("landmark CSV is not time-ordered");
    return seq;
}

}  // namespace lamit
