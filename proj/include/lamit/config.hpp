#pragma once
// key=value configuration: analysis, landmark, cue-rule and distance parameters.
// Precedence is built-in default < config file < explicit override.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lamit/dsp.hpp"
#include "lamit/landmarks.hpp"
#include "lamit/lexical_access.hpp"

namespace lamit {

struct Settings {
    AnalysisParams analysis;
    LandmarkParams landmarks;
    CueRules cues;
    DistanceWeights weights;
    int topk = 5;
};

namespace config_detail {

struct Key {
    std::string name;
    std::string help;
    std::function<std::string(const Settings&)> get;
    std::function<void(Settings&, const std::string&)> set;
};

inline double num(const std::string& k, const std::string& v) {
    try {
        return util::parse_double(v, k);
    } catch (const Error&) {
        throw config_error("bad value '" + v + "' for " + k);
    }
}

inline bool boolean(const std::string& k, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error("bad boolean '" + v + "' for " + k);
}

#define LAMIT_NUM(key, field, help)                                                      \
    Key {                                                                                \
        key, help, [](const Settings& s) { return util::compact(s.field, 6); },          \
            [](Settings& s, const std::string& v) { s.field = num(key, v); }             \
    }
#define LAMIT_BOOL(key, field, help)                                                     \
    Key {                                                                                \
        key, help, [](const Settings& s) { return std::string(s.field ? "true" : "false"); }, \
            [](Settings& s, const std::string& v) { s.field = boolean(key, v); }         \
    }

inline Key band_key(const std::string& name, const std::string& help) {
    auto find = [name](Settings& s) -> Band& {
        for (auto& b : s.analysis.bands)
            if (b.name == name) return b;
        s.analysis.bands.push_back({name, 0, 1});
        return s.analysis.bands.back();
    };
    return Key{"band." + name, help,
               [name](const Settings& s) {
                   for (auto& b : s.analysis.bands)
                       if (b.name == name) return util::compact(b.f_lo, 3) + "," + util::compact(b.f_hi, 3);
                   return std::string();
               },
               [find, name](Settings& s, const std::string& v) {
                   auto parts = util::split(v, ',');
                   if (parts.size() != 2) throw config_error("band." + name + " expects 'lo,hi' in Hz");
                   Band& b = find(s);
                   b.f_lo = num("band." + name, parts[0]);
                   b.f_hi = num("band." + name, parts[1]);
                   if (!(b.f_lo < b.f_hi)) throw config_error("band." + name + " must have lo < hi");
               }};
}

inline const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        LAMIT_NUM("analysis.frame_length", analysis.frame_length, "analysis frame length, s"),
        LAMIT_NUM("analysis.frame_step", analysis.frame_step, "analysis frame step, s"),
        LAMIT_NUM("analysis.floor_db", analysis.floor_db, "spectral floor, dB"),
        band_key("low", "vowel/glide landmark band, Hz"),
        band_key("f1", "F1 proxy band, Hz"),
        band_key("mid", "mid band, Hz"),
        band_key("high", "frication band, Hz"),
        LAMIT_NUM("analysis.ror_window", analysis.ror_window, "rate-of-rise smoothing window, s"),
        LAMIT_NUM("f0.min", analysis.f0_min, "lowest F0, Hz"),
        LAMIT_NUM("f0.max", analysis.f0_max, "highest F0, Hz"),
        LAMIT_NUM("f0.window", analysis.f0_window, "autocorrelation window, s"),
        LAMIT_NUM("f0.voicing_threshold", analysis.voicing_threshold, "normalized autocorrelation needed for voicing"),
        LAMIT_NUM("gate.db", analysis.gate_db, "utterance gate below peak energy, dB"),
        LAMIT_NUM("gate.min", analysis.gate_min, "shortest run that sets the utterance edges, s"),
        LAMIT_NUM("landmark.P_v", landmarks.P_v, "vowel peak prominence, dB"),
        LAMIT_NUM("landmark.D_v", landmarks.D_v, "minimum vowel separation, s"),
        LAMIT_NUM("landmark.P_g", landmarks.P_g, "glide dip depth, dB"),
        LAMIT_NUM("landmark.W_g", landmarks.W_g, "glide window around vowels, s"),
        LAMIT_NUM("landmark.R_c", landmarks.R_c, "consonant rate-of-rise threshold, dB/s"),
        LAMIT_NUM("landmark.S_son", landmarks.S_son, "sonorant low-band continuity, dB"),
        LAMIT_NUM("landmark.N_ms", landmarks.N_ms, "sustained noise for continuants, s"),
        LAMIT_NUM("landmark.T_merge", landmarks.T_merge, "landmark collision window, s"),
        LAMIT_NUM("landmark.noise_margin", landmarks.noise_margin, "high minus low band counted as frication, dB"),
        LAMIT_NUM("landmark.noise_range_db", landmarks.noise_range_db, "frication must lie within this of the loudest frame, dB"),
        LAMIT_NUM("landmark.strid_margin", landmarks.strid_margin, "high band above neighbouring vowel for [+strid], dB"),
        LAMIT_NUM("cue.low_ratio_db", cues.low_ratio_db, "F1 proxy minus low band for [+low], dB"),
        LAMIT_NUM("cue.high_ratio_db", cues.high_ratio_db, "F1 proxy minus low band for [+high], dB"),
        LAMIT_BOOL("cue.tilt_rule", cues.tilt_rule, "derive [back]/[round] from spectral tilt"),
        LAMIT_NUM("cue.back_tilt", cues.back_tilt, "tilt for [+back][+round], dB/octave"),
        LAMIT_NUM("cue.front_tilt", cues.front_tilt, "tilt for [-back], dB/octave"),
        LAMIT_NUM("cue.voiced_fraction", cues.voiced_fraction, "voiced share of a consonant interval for [+slack]"),
        LAMIT_BOOL("cue.stiff_when_unvoiced", cues.stiff_when_unvoiced, "mark unvoiced consonants [+stiff]"),
        LAMIT_NUM("weights.w_free", weights.w_free, "articulator-free feature mismatch cost"),
        LAMIT_NUM("weights.w_bound", weights.w_bound, "articulator-bound feature mismatch cost"),
        LAMIT_NUM("weights.unspecified_cost", weights.unspecified_cost, "cost of an unspecified estimate"),
        Key{"match.topk", "candidates reported per word", [](const Settings& s) { return std::to_string(s.topk); },
            [](Settings& s, const std::string& v) {
                double d = num("match.topk", v);
                if (d != std::floor(d)) throw config_error("match.topk must be an integer");
                s.topk = static_cast<int>(d);
            }},
    };
    return k;
}

#undef LAMIT_NUM
#undef LAMIT_BOOL

}  // namespace config_detail

inline void set_option(Settings& s, const std::string& key, const std::string& value) {
    for (auto& k : config_detail::keys())
        if (k.name == key) {
            k.set(s, std::string(util::trim(value)));
            // the analysis gate and smoothing are shared with landmark detection
            s.landmarks.ror_window = s.analysis.ror_window;
            s.landmarks.gate_db = s.analysis.gate_db;
            s.landmarks.gate_min = s.analysis.gate_min;
            return;
        }
    throw config_error("unknown configuration key '" + key + "'");
}

// Parses "key = value" lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    auto ls = util::lines(text);
    for (size_t i = 0; i < ls.size(); ++i) {
        std::string l = ls[i];
        if (auto h = l.find('#'); h != std::string::npos) l = l.substr(0, h);
        auto t = util::trim(l);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string_view::npos) throw config_error("config line " + std::to_string(i + 1) + ": expected key = value");
        out.emplace_back(std::string(util::trim(t.substr(0, eq))), std::string(util::trim(t.substr(eq + 1))));
    }
    return out;
}

inline void apply_config(Settings& s, std::string_view text) {
    for (auto& [k, v] : parse_config(text)) set_option(s, k, v);
}

inline std::string show_config(const Settings& s) {
    std::string out;
    for (auto& k : config_detail::keys()) out += k.name + " = " + k.get(s) + "    # " + k.help + "\n";
    return out;
}

}  // namespace lamit
