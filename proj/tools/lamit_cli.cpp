// lamit: corpus statistics, LEXI generation, landmark detection and lexical matching.
//
// Exit codes: 0 success, 1 validation failure, 2 usage or I/O error, 3 data-resolution error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lamit/lamit.hpp"

namespace fs = std::filesystem;
using namespace lamit;

namespace {

enum Exit { Ok = 0, Invalid = 1, Usage = 2, Unresolved = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Lookup: return Unresolved;
        case ErrorKind::Validation:
        case ErrorKind::Classification: return Invalid;
        default: return Usage;
    }
}

std::string data_dir() {
    if (const char* env = std::getenv("LAMIT_DATA_DIR"); env && *env) return env;
#ifdef LAMIT_DEFAULT_DATA_DIR
    return LAMIT_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

struct Options {
    std::string inventory, lexicon, corpus, sentences, wav, textgrid, transcription, landmarks, segments;
    std::string weights, config, out = ".";
    std::optional<int> topk;
    int sentence = 0;
    bool show_config = false, count_doubling = false;
    std::vector<std::string> overrides;

    std::string or_default(const std::string& v, const std::string& file) const {
        return v.empty() ? data_dir() + "/" + file : v;
    }
};

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("missing --") + what);
    if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " file not found: " + path);
}

// Defaults < --config < --weights < --set < --topk.
Settings settings_from(const Options& o) {
    Settings s;
    if (!o.config.empty()) {
        require_file(o.config, "config");
        apply_config(s, util::read_file(o.config));
    }
    if (!o.weights.empty()) {
        require_file(o.weights, "weights");
        for (auto& [k, v] : parse_config(util::read_file(o.weights)))
            set_option(s, util::starts_with(k, "weights.") ? k : "weights." + k, v);
    }
    for (auto& kv : o.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        set_option(s, std::string(util::trim(kv.substr(0, eq))), kv.substr(eq + 1));
    }
    if (o.topk) s.topk = *o.topk;
    return s;
}

class Outputs {
public:
    Outputs(std::string dir, std::vector<std::string> inputs) : dir_(std::move(dir)), inputs_(std::move(inputs)) {}

    void write(const std::string& name, const std::string& content) {
        fs::create_directories(dir_);
        fs::path p = fs::path(dir_) / name;
        for (auto& in : inputs_)
            if (!in.empty() && fs::exists(in) && fs::exists(p) && fs::equivalent(in, p))
                throw UsageError("refusing to overwrite input " + in);
        util::write_file(p.string(), content);
        std::cerr << "wrote " << p.string() << "\n";
    }

private:
    std::string dir_;
    std::vector<std::string> inputs_;
};

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

InventoryPtr load_inv(const Options& o) {
    auto path = o.or_default(o.inventory, "italian.inventory.tsv");
    require_file(path, "inventory");
    return std::make_shared<const FeatureInventory>(load_inventory_file(path));
}

Lexicon load_lex(const Options& o, InventoryPtr inv) {
    auto path = o.or_default(o.lexicon, "lamit_lexicon.tsv");
    require_file(path, "lexicon");
    auto lex = load_lexicon_file(path, std::move(inv));
    for (auto& w : lex.warnings()) std::cerr << "warning: " << w << "\n";
    return lex;
}

// ---- commands

int cmd_stats(const Options& o) {
    auto corpus_path = o.or_default(o.corpus, "lamit_transcriptions.txt");
    require_file(corpus_path, "corpus");
    auto inv = load_inv(o);
    auto sentences = parse_corpus(util::read_file(corpus_path), *inv);
    auto ft = phoneme_frequencies(sentences, *inv, {o.count_doubling});
    Outputs(o.out, {corpus_path}).write("phoneme_frequencies.csv", frequency_csv(ft, *inv));
    std::cout << "sentences " << sentences.size() << ", phoneme tokens " << ft.total << "\n";
    std::cout << "phoneme  arpabet   count  percent\n";
    for (PhonemeId p : frequency_order(ft)) {
        const auto& ph = inv->phoneme(p);
        std::printf("%-8s %-8s %6ld  %6s\n", ph.ipa.c_str(), ph.arpabet.c_str(), ft.counts[p],
                    util::fixed(ft.percentages[p], 2).c_str());
    }
    return Ok;
}

int cmd_lexi(const Options& o) {
    require_file(o.textgrid, "textgrid");
    auto inv = load_inv(o);
    auto lex = load_lex(o, inv);
    auto doc = parse_textgrid(util::read_file(o.textgrid));
    const Tier* words = doc.find(tiers::Word);
    if (!words) throw lookup_error("TextGrid has no Word tier: " + o.textgrid);

    std::optional<TranscribedSentence> tr;
    if (!o.transcription.empty()) {
        require_file(o.transcription, "transcription");
        if (o.sentence <= 0) throw UsageError("--transcription needs --sentence N");
        for (auto& s : parse_corpus(util::read_file(o.transcription), *inv))
            if (s.id == o.sentence) tr = s;
        if (!tr) throw lookup_error("sentence " + std::to_string(o.sentence) + " not in " + o.transcription);
    }
    auto lexi = generate_lexi_tier(*words, lex, tr ? &*tr : nullptr);
    doc.put(lexi);
    Outputs(o.out, {o.textgrid, o.transcription}).write(stem(o.textgrid) + ".lexi.TextGrid", serialize_textgrid(doc));
    std::cout << lexi.intervals.size() << " LEXI intervals\n";
    return Ok;
}

int cmd_landmarks(const Options& o) {
    require_file(o.wav, "wav");
    auto s = settings_from(o);
    auto audio = read_wav(o.wav);
    auto an = analyze(audio, s.analysis);
    auto seq = detect_landmarks(an.tracks, s.landmarks);
    AnnotationDocument doc;
    doc.xmin = 0;
    doc.xmax = audio.duration();
    doc.tiers.push_back(landmark_tier_from(seq.items, doc.xmin, doc.xmax));
    Outputs out(o.out, {o.wav});
    out.write(stem(o.wav) + ".landmarks.csv", landmark_csv(seq));
    out.write(stem(o.wav) + ".landmarks.TextGrid", serialize_textgrid(doc));
    std::cout << seq.items.size() << " landmarks\n";
    return Ok;
}

int cmd_match(const Options& o) {
    require_file(o.textgrid, "textgrid");
    auto s = settings_from(o);
    if (s.topk < 1) throw UsageError("--topk must be at least 1");
    validate_weights(s.weights);
    int sources = !o.wav.empty() + !o.landmarks.empty() + !o.segments.empty();
    if (sources != 1) throw UsageError("match needs exactly one of --wav, --landmarks, --segments");

    auto inv = load_inv(o);
    auto lex = load_lex(o, inv);
    auto doc = parse_textgrid(util::read_file(o.textgrid));

    std::vector<EstimatedSegment> segs;
    std::string input;
    if (!o.segments.empty()) {
        require_file(input = o.segments, "segments");
        segs = parse_segment_csv(util::read_file(o.segments), inv->schema_ptr());
    } else if (!o.landmarks.empty()) {
        // no parameter frames: only the major class and manner are estimated
        require_file(input = o.landmarks, "landmarks");
        segs = cues_to_bundles(parse_landmark_csv(util::read_file(o.landmarks)), {}, inv->schema_ptr(), s.cues);
    } else {
        require_file(input = o.wav, "wav");
        auto an = analyze(read_wav(o.wav), s.analysis);
        segs = cues_to_bundles(detect_landmarks(an.tracks, s.landmarks), an.frames, inv->schema_ptr(), s.cues);
    }

    WordFrequency freq;
    auto sent_path = o.or_default(o.sentences, "lamit_sentences.txt");
    if (fs::is_regular_file(sent_path)) freq = word_frequencies(parse_sentence_words(util::read_file(sent_path)));

    auto m = match_in_word_intervals(doc, segs, lex, s.weights, s.topk, &freq);
    Outputs out(o.out, {o.textgrid, input});
    std::string base = stem(o.textgrid);
    out.write(base + ".match.csv", match_csv(m));
    if (o.segments.empty()) out.write(base + ".segments.csv", segment_csv(segs));
    if (!m.orphans.empty()) {
        std::string log;
        for (size_t i : m.orphans)
            log += "orphan segment " + std::to_string(i + 1) + " at " + util::fixed(segs[i].t_start, 6) + "-" +
                   util::fixed(segs[i].t_end, 6) + " lies outside every word interval\n";
        out.write(base + ".orphans.log", log);
        std::cerr << "warning: " << m.orphans.size() << " orphan segment(s)\n";
    }
    size_t empty = 0;
    for (auto& w : m.words) empty += w.no_evidence;
    std::cout << m.words.size() << " words matched, " << empty << " without evidence\n";
    return Ok;
}

// ---- validate

struct Suite {
    std::string detail;
    bool ok = false;
};

Suite check_inventory(const Options& o) {
    Suite r;
    auto inv = load_inv(o);
    std::vector<PhonemeId> singles;
    size_t nv = 0, ng = 0, nc = 0, gem = 0;
    for (PhonemeId p = 0; p < inv->size(); ++p) {
        const auto& ph = inv->phoneme(p);
        if (ph.geminate) {
            ++gem;
            if (!(inv->features_of(p) == inv->features_of(*ph.singleton_base))) {
                r.detail = "geminate " + ph.ipa + " differs from its singleton";
                return r;
            }
            continue;
        }
        singles.push_back(p);
        auto c = classify_major(inv->features_of(p));
        nv += c == MajorClass::Vowel;
        ng += c == MajorClass::Glide;
        nc += c == MajorClass::Consonant;
    }
    for (size_t i = 0; i < singles.size(); ++i)
        for (size_t j = i + 1; j < singles.size(); ++j)
            if (distinguishing_features(*inv, singles[i], singles[j]).empty()) {
                r.detail = inv->phoneme(singles[i]).ipa + " and " + inv->phoneme(singles[j]).ipa + " are not distinguished";
                return r;
            }
    r.detail = std::to_string(singles.size()) + " singletons (" + std::to_string(nv) + "/" + std::to_string(ng) + "/" +
               std::to_string(nc) + "), " + std::to_string(gem) + " geminates";
    r.ok = singles.size() == 30 && gem == 20 && nv == 7 && ng == 2 && nc == 21;
    return r;
}

Suite check_lexicon(const Options& o) {
    Suite r;
    auto lex = load_lex(o, load_inv(o));
    for (auto& [k, e] : lex.entries()) {
        int primary = 0;
        for (auto& t : e.phonemes) primary += t.stressed;
        if (primary > 1) {
            r.detail = k + " has " + std::to_string(primary) + " primary stresses";
            return r;
        }
    }
    r.detail = std::to_string(lex.size()) + " entries, " + std::to_string(lex.warnings().size()) + " warnings";
    r.ok = lex.size() == 563 && lex.warnings().empty();
    return r;
}

FrequencyTable shipped_frequencies(const Options& o, const FeatureInventory& inv) {
    auto path = o.or_default(o.corpus, "lamit_transcriptions.txt");
    require_file(path, "corpus");
    return phoneme_frequencies(parse_corpus(util::read_file(path), inv), inv);
}

Suite check_counting(const Options& o) {
    Suite r;
    auto inv = load_inv(o);
    auto ft = shipped_frequencies(o, *inv);
    auto ref_path = data_dir() + "/lamit_counts.reference.tsv";
    require_file(ref_path, "reference counts");
    size_t rows = 0;
    for (auto& l : util::lines(util::read_file(ref_path))) {
        auto c = util::split(l, '\t');
        if (c.size() != 2) continue;
        long want = util::parse_long(c[1], ref_path);
        long got = c[0] == "total" ? ft.total : ft.counts[inv->id(c[0])];
        if (got != want) {
            r.detail = c[0] + ": counted " + std::to_string(got) + ", reference " + std::to_string(want);
            return r;
        }
        ++rows;
    }
    r.detail = std::to_string(rows) + " reference rows agree, " + std::to_string(ft.total) + " tokens";
    r.ok = rows == inv->size() + 1;
    return r;
}

Suite check_reproduction(const Options& o) {
    Suite r;
    auto inv = load_inv(o);
    auto ft = shipped_frequencies(o, *inv);
    auto path = data_dir() + "/lamit_published_frequencies.tsv";
    require_file(path, "published frequencies");
    size_t rows = 0;
    double worst = 0;
    std::string worst_at;
    for (auto& l : util::lines(util::read_file(path))) {
        if (l.empty() || l[0] == '#' || util::starts_with(l, "phoneme")) continue;
        auto c = util::split(l, '\t');
        double d = std::abs(ft.percentages[inv->id(c[0])] - util::parse_double(c.at(2), path));
        if (d > worst) worst = d, worst_at = c[0];
        ++rows;
    }
    r.detail = std::to_string(rows) + " rows, worst deviation " + util::fixed(worst, 3) + " at /" + worst_at + "/";
    r.ok = rows == 50 && worst <= 0.15;
    return r;
}

int cmd_validate(const Options& o) {
    const std::pair<const char*, Suite (*)(const Options&)> suites[] = {
        {"inventory distinctness", check_inventory},
        {"lexicon resolution", check_lexicon},
        {"corpus counting oracle", check_counting},
        {"frequency reproduction", check_reproduction},
    };
    int failed = 0;
    for (auto& [name, check] : suites) {
        Suite r;
        try {
            r = check(o);
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        std::cout << (r.ok ? "PASS " : "FAIL ") << name << ": " << r.detail << "\n";
        failed += !r.ok;
    }
    std::cout << (4 - failed) << " of 4 suites passed\n";
    return failed ? Invalid : Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landmark-based lexical access tools for the LaMIT corpus"};
    app.require_subcommand(0, 1);
    Options o;
    app.add_option("--inventory", o.inventory, "feature inventory TSV");
    app.add_option("--lexicon", o.lexicon, "lexicon TSV (orthography, ARPAbet)");
    app.add_option("--corpus", o.corpus, "IPA transcription file");
    app.add_option("--config", o.config, "key=value analysis configuration");
    app.add_option("--weights", o.weights, "key=value distance weights");
    app.add_option("--set", o.overrides, "override one configuration key (key=value)");
    app.add_option("--out", o.out, "output directory");
    app.add_flag("--show-config", o.show_config, "print the effective configuration and exit");

    auto* stats = app.add_subcommand("stats", "phoneme frequencies of a transcription file");
    stats->add_flag("--count-doubling", o.count_doubling, "count syntactic doublings as geminates");

    auto* lexi = app.add_subcommand("lexi", "add a LEXI tier to a word-aligned TextGrid");
    lexi->add_option("--textgrid", o.textgrid, "TextGrid with a Word tier")->required();
    lexi->add_option("--transcription", o.transcription, "IPA transcription file for syntactic doubling");
    lexi->add_option("--sentence", o.sentence, "sentence id within --transcription");

    auto* lms = app.add_subcommand("landmarks", "detect landmarks in a WAV file");
    lms->add_option("--wav", o.wav, "mono WAV, at least 16 kHz")->required();

    auto* match = app.add_subcommand("match", "rank lexicon candidates inside each word interval");
    match->add_option("--textgrid", o.textgrid, "TextGrid with a Word tier")->required();
    match->add_option("--wav", o.wav, "audio to analyze");
    match->add_option("--landmarks", o.landmarks, "landmark CSV");
    match->add_option("--segments", o.segments, "estimated segment CSV (t_start,t_end,features)");
    match->add_option("--sentences", o.sentences, "headword sentence list for frequency tie-breaks");
    match->add_option("--topk", o.topk, "candidates per word");

    auto* validate = app.add_subcommand("validate", "check the shipped data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Usage;
    }

    try {
        if (o.show_config) {
            std::cout << show_config(settings_from(o));
            return Ok;
        }
        if (*stats) return cmd_stats(o);
        if (*lexi) return cmd_lexi(o);
        if (*lms) return cmd_landmarks(o);
        if (*match) return cmd_match(o);
        if (*validate) return cmd_validate(o);
        std::cerr << app.help();
        return Usage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    }
}
