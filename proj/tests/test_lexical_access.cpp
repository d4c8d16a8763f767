#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <set>

#include "oracles/brute_matcher.hpp"
#include "synth.hpp"
#include "test_support.hpp"

using namespace lamit;
using testdata::italian;
using testdata::lexicon;

namespace {

std::vector<EstimatedSegment> segments_of(const std::vector<FeatureBundle>& bs, double t0 = 0, double step = 0.1) {
    std::vector<EstimatedSegment> out;
    for (size_t i = 0; i < bs.size(); ++i) out.push_back({t0 + step * i, t0 + step * (i + 1), bs[i], {}});
    return out;
}

std::vector<EstimatedSegment> word(const std::string& w) { return segments_of(expand_word(lexicon(), w)); }

std::vector<FeatureBundle> bundles(const std::vector<EstimatedSegment>& s) {
    std::vector<FeatureBundle> out;
    for (auto& x : s) out.push_back(x.bundle);
    return out;
}

Lexicon random_subset(std::mt19937& rng, size_t n) {
    std::vector<const LexEntry*> all;
    for (auto& [k, e] : lexicon().entries()) all.push_back(&e);
    std::shuffle(all.begin(), all.end(), rng);
    Lexicon sub(italian());
    for (size_t i = 0; i < n && i < all.size(); ++i) sub.insert(*all[i]);
    return sub;
}

// A perturbed copy of a random entry: features dropped or flipped, length jittered.
std::vector<FeatureBundle> random_estimate(std::mt19937& rng, const Lexicon& lex) {
    auto it = lex.entries().begin();
    std::advance(it, rng() % lex.size());
    auto bs = expand_phonemes(*italian(), it->second.phonemes);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto& b : bs)
        for (size_t f = 0; f < b.size(); ++f) {
            double r = u(rng);
            if (r < 0.3) b.set(f, Value::Unspecified);
            else if (r < 0.4) b.set(f, Value::Plus);
            else if (r < 0.5) b.set(f, Value::Minus);
        }
    int jitter = static_cast<int>(rng() % 5) - 2;
    while (jitter > 0) {
        bs.push_back(bs[rng() % bs.size()]);
        --jitter;
    }
    while (jitter < 0 && bs.size() > 1) {
        bs.pop_back();
        ++jitter;
    }
    return bs;
}

bool same_ranking(const std::vector<MatchResult>& got, const std::vector<oracle::Ranked>& want) {
    if (got.size() != want.size()) return false;
    for (size_t i = 0; i < got.size(); ++i)
        if (got[i].word != want[i].word || got[i].score != want[i].score || got[i].cohort_rank != want[i].rank)
            return false;
    return true;
}

}  // namespace

// ---- cue extraction

TEST(CuesToBundles, OpenVowelGivesVowelPlusLowPlus) {
    auto an = analyze(synth::rise_fall());
    auto seq = detect_landmarks(an.tracks);
    auto segs = cues_to_bundles(seq, an.frames, italian()->schema_ptr());
    const EstimatedSegment* v = nullptr;
    for (auto& s : segs)
        if (s.bundle.get("vowel") == Value::Plus) v = &s;
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->bundle.assignments(),
              (std::vector<std::pair<std::string, Value>>{{"vowel", Value::Plus}, {"low", Value::Plus}}));
}

TEST(CuesToBundles, StridentFricationPair) {
    auto an = analyze(synth::vsv());
    auto seq = detect_landmarks(an.tracks);
    auto segs = cues_to_bundles(seq, an.frames, italian()->schema_ptr());
    const EstimatedSegment* c = nullptr;
    for (auto& s : segs)
        if (s.bundle.get("cons") == Value::Plus && s.source_landmarks.size() == 2) c = &s;
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->bundle.assignments(), (std::vector<std::pair<std::string, Value>>{
                                           {"cons", Value::Plus}, {"cont", Value::Plus}, {"strid", Value::Plus}}));
}

TEST(CuesToBundles, NoRuleFiringLeavesOnlyClassAndManner) {
    LandmarkSequence seq;
    seq.items = {{0.10, LandmarkKind::ConsonantRelease, Manner::Noncontinuant, 400},
                 {0.20, LandmarkKind::Vowel, std::nullopt, 12},
                 {0.30, LandmarkKind::Glide, std::nullopt, 8}};
    auto segs = cues_to_bundles(seq, {}, italian()->schema_ptr());
    ASSERT_EQ(segs.size(), 3u);
    using A = std::vector<std::pair<std::string, Value>>;
    EXPECT_EQ(segs[0].bundle.assignments(), (A{{"cons", Value::Plus}, {"cont", Value::Minus}}));
    EXPECT_EQ(segs[1].bundle.assignments(), (A{{"vowel", Value::Plus}}));
    EXPECT_EQ(segs[2].bundle.assignments(), (A{{"glide", Value::Plus}}));
    EXPECT_TRUE(cues_to_bundles(LandmarkSequence{}, {}, italian()->schema_ptr()).empty());
}

TEST(CuesToBundles, ExactlyOneMajorClassOnEveryFixture) {
    for (auto a : {synth::cv(), synth::vcv(), synth::vgv(), synth::vsv(), synth::ama()}) {
        auto an = analyze(a);
        for (auto& s : cues_to_bundles(detect_landmarks(an.tracks), an.frames, italian()->schema_ptr())) {
            int plus = (s.bundle.get("vowel") == Value::Plus) + (s.bundle.get("glide") == Value::Plus) +
                       (s.bundle.get("cons") == Value::Plus);
            EXPECT_EQ(plus, 1);
            EXPECT_LT(s.t_start, s.t_end);
        }
    }
}

// ---- distance

TEST(FeatureDistance, Examples) {
    const auto& inv = *italian();
    EXPECT_EQ(feature_distance(inv.features_of("a"), inv.features_of("a")), 0.0);
    auto b = inv.features_of("n");
    b.set("nasal", Value::Minus);
    EXPECT_EQ(feature_distance(b, inv.features_of("n"), {2, 1, 0.25}), 1.0);
    EXPECT_EQ(feature_distance(inv.features_of("t"), inv.features_of("d"), {2, 1, 0.25}), 2.0);
}

TEST(FeatureDistance, UnspecifiedAndPlusMinus) {
    const auto& inv = *italian();
    FeatureBundle est(inv.schema_ptr());
    est.set("cons", Value::Plus);
    auto specified = inv.features_of("ts").assignments().size();
    EXPECT_DOUBLE_EQ(feature_distance(est, inv.features_of("ts"), {2, 1, 0.25}), 0.25 * double(specified - 1));
    auto ts = inv.features_of("ts");
    auto plus = ts, minus = ts;
    plus.set("cont", Value::Plus);
    minus.set("cont", Value::Minus);
    EXPECT_EQ(feature_distance(plus, ts), 0.0);
    EXPECT_EQ(feature_distance(minus, ts), 0.0);
    // the distance is directed: what the estimate leaves open costs less than a conflict
    auto t = inv.features_of("t");
    auto s = inv.features_of("s");
    EXPECT_NE(feature_distance(t, s), feature_distance(s, t));
}

TEST(FeatureDistance, MismatchedSchemasRejected) {
    auto other = std::make_shared<const FeatureSchema>(std::vector<FeatureName>{make_feature("vowel"), make_feature("nasal")});
    EXPECT_THROW(feature_distance(FeatureBundle(other), italian()->features_of("a")), Error);
    // same columns in the same order count as the same schema
    EXPECT_NO_THROW(feature_distance(testdata::english()->features_of("AA"), italian()->features_of("a")));
}

// ---- cohort matching

TEST(CohortMatch, CasaIsRankOneAtZero) {
    auto r = cohort_match(word("CASA"), lexicon(), {}, 5);
    ASSERT_FALSE(r.empty());
    EXPECT_EQ(r[0].word, "CASA");
    EXPECT_EQ(r[0].score, 0.0);
    EXPECT_EQ(r[0].cohort_rank, 1);
    EXPECT_GT(r[1].score, 0.0);
    auto brute = oracle::brute_match(bundles(word("CASA")), lexicon(), {}, 563);
    EXPECT_EQ(std::count_if(brute.begin(), brute.end(), [](auto& x) { return x.score == 0.0; }), 1);
}

TEST(CohortMatch, UnspecifiedFinalVowelLeavesCasaAndCaso) {
    auto segs = word("CASA");
    segs.back().bundle = FeatureBundle(italian()->schema_ptr());
    segs.back().bundle.set("vowel", Value::Plus);
    auto r = cohort_match(segs, lexicon(), {}, 2);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ((std::set<std::string>{r[0].word, r[1].word}), (std::set<std::string>{"CASA", "CASO"}));
    auto third = cohort_match(segs, lexicon(), {}, 3);
    EXPECT_GT(third[2].score, third[1].score);
}

TEST(CohortMatch, WordOutsideTheLexiconScoresAboveZero) {
    auto segs = word("ZOO");
    Lexicon without = lexicon();
    without.erase("ZOO");
    auto r = cohort_match(segs, without, {}, 1);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_GT(r[0].score, 0.0);
}

TEST(CohortMatch, Errors) {
    EXPECT_THROW(cohort_match(word("CASA"), Lexicon(italian()), {}, 1), Error);
    EXPECT_THROW(cohort_match(word("CASA"), lexicon(), {}, 0), Error);
    EXPECT_THROW(cohort_match({}, lexicon(), {}, 1), Error);
    EXPECT_THROW(cohort_match(word("CASA"), lexicon(), {0, 1, 0.25}, 1), Error);
}

TEST(CohortMatch, CohortShrinksAsSegmentsArrive) {
    CohortTrace tr;
    cohort_match(word("VOGLIONO"), lexicon(), {}, 5, nullptr, &tr);
    ASSERT_EQ(tr.cohort_sizes.size(), 6u);  // V O LL O N O
    for (size_t i = 1; i < tr.cohort_sizes.size(); ++i) EXPECT_LE(tr.cohort_sizes[i], tr.cohort_sizes[i - 1]);
    EXPECT_LT(tr.cohort_sizes.back(), lexicon().size());
}

TEST(CohortMatch, TiesBreakByFrequencyThenOrthography) {
    auto a = word("A");
    auto plain = cohort_match(a, lexicon(), {}, 2);
    ASSERT_EQ(plain.size(), 2u);
    EXPECT_EQ(plain[0].word, "A");
    EXPECT_EQ(plain[1].word, "HA");
    WordFrequency f{{"HA", 9}, {"A", 1}};
    auto freq = cohort_match(a, lexicon(), {}, 2, &f);
    EXPECT_EQ(freq[0].word, "HA");
    EXPECT_EQ(freq[0].score, 0.0);
    EXPECT_EQ(freq[1].score, 0.0);
}

// ---- properties

TEST(MatchProperties, IncrementalEqualsBruteForceOnRandomSubsets) {
    std::mt19937 rng(2024);
    auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        auto sub = random_subset(rng, 50);
        auto est = random_estimate(rng, sub);
        auto got = cohort_match(segments_of(est), sub, {}, 10);
        auto want = oracle::brute_match(est, sub, {}, 10);
        ASSERT_TRUE(same_ranking(got, want)) << "trial " << trial;
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
}

TEST(MatchProperties, IncrementalEqualsBruteForceWithFrequenciesAndOtherWeights) {
    std::mt19937 rng(77);
    WordFrequency freq = word_frequencies(parse_sentence_words(util::read_file(testdata::data("lamit_sentences.txt"))));
    for (int trial = 0; trial < 100; ++trial) {
        auto sub = random_subset(rng, 50);
        auto est = random_estimate(rng, sub);
        DistanceWeights w{1.0 + rng() % 4, 1.0, 0.25 * (rng() % 3)};
        int k = 1 + static_cast<int>(rng() % 12);
        ASSERT_TRUE(same_ranking(cohort_match(segments_of(est), sub, w, k, &freq),
                                 oracle::brute_match(est, sub, w, size_t(k), &freq)))
            << "trial " << trial;
    }
}

TEST(MatchProperties, SelfRetrievalOfEveryEntry) {
    std::set<std::string> zero_ties;
    for (auto& [k, e] : lexicon().entries()) {
        auto r = cohort_match(word(k), lexicon(), {}, 3);
        ASSERT_FALSE(r.empty());
        EXPECT_EQ(r[0].score, 0.0) << k;
        bool found = false;
        for (auto& m : r) {
            if (m.word == k) found = m.score == 0.0;
            if (m.score == 0.0 && m.word != k) zero_ties.insert(k);
        }
        EXPECT_TRUE(found) << k;
        if (!zero_ties.count(k)) {
            EXPECT_EQ(r[0].word, k);
        }
    }
    // A and HA share a transcription; a fricative /ʃ/ estimate also fits the cont± of /tʃ/ in CI
    EXPECT_EQ(zero_ties, (std::set<std::string>{"A", "HA", "SCI"}));
}

TEST(MatchProperties, WeightScaleLeavesRankingUnchanged) {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        auto est = random_estimate(rng, lexicon());
        auto ref = cohort_match(segments_of(est), lexicon(), {}, 10);
        // scales chosen so that every score stays exactly representable
        for (double c : {0.5, 3.0, 10.0}) {
            auto r = cohort_match(segments_of(est), lexicon(), {2 * c, 1 * c, 0.25 * c}, 10);
            ASSERT_EQ(r.size(), ref.size());
            for (size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i].word, ref[i].word);
        }
    }
}

TEST(MatchProperties, ScoreGrowsWithEachAddedConflict) {
    const auto& inv = *italian();
    std::mt19937 rng(4);
    DistanceWeights w;
    for (int trial = 0; trial < 300; ++trial) {
        PhonemeId p = rng() % inv.size();
        const auto& lexb = inv.features_of(p);
        FeatureBundle est = lexb;
        double prev = feature_distance(est, lexb, w);
        EXPECT_EQ(prev, 0.0);
        std::vector<size_t> order(lexb.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t f : order) {
            Value l = lexb.at(f);
            if (l != Value::Plus && l != Value::Minus) continue;
            est.set(f, l == Value::Plus ? Value::Minus : Value::Plus);
            double now = feature_distance(est, lexb, w);
            double wf = inv.schema()[f].kind == FeatureKind::ArticulatorFree ? w.w_free : w.w_bound;
            EXPECT_DOUBLE_EQ(now, prev + wf);
            prev = now;
        }
    }
}

// ---- word-interval scoping

namespace {

AnnotationDocument sentence36() { return parse_textgrid(util::read_file(testdata::fixture("sentence36_word.TextGrid"))); }

std::vector<EstimatedSegment> exact_segments(const AnnotationDocument& doc) {
    std::vector<EstimatedSegment> out;
    for (auto& iv : doc.find(tiers::Word)->intervals) {
        if (iv.label.empty()) continue;
        auto bs = expand_word(lexicon(), iv.label);
        double step = (iv.t_end - iv.t_start) / double(bs.size());
        auto s = segments_of(bs, iv.t_start, step);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

}  // namespace

TEST(MatchInWords, ExactBundlesRetrieveEveryWord) {
    auto doc = sentence36();
    auto m = match_in_word_intervals(doc, exact_segments(doc), lexicon(), {}, 3);
    ASSERT_EQ(m.words.size(), 6u);
    EXPECT_TRUE(m.orphans.empty());
    for (auto& w : m.words) {
        ASSERT_FALSE(w.no_evidence);
        EXPECT_EQ(w.results[0].word, util::to_upper(w.label));
        EXPECT_EQ(w.results[0].score, 0.0);
    }
    EXPECT_EQ(m.words[0].interval_index, 2u);
    auto csv = match_csv(m);
    EXPECT_TRUE(util::starts_with(csv, "word_interval_index,candidate,score,rank\n2,MAMMA,0.00,1\n"));
}

TEST(MatchInWords, WordWithoutSegmentsIsFlagged) {
    auto doc = sentence36();
    auto segs = exact_segments(doc);
    const auto& ti = doc.find(tiers::Word)->intervals[4];  // "ti"
    segs.erase(std::remove_if(segs.begin(), segs.end(),
                              [&](auto& s) { return s.midpoint() >= ti.t_start && s.midpoint() < ti.t_end; }),
               segs.end());
    auto m = match_in_word_intervals(doc, segs, lexicon(), {}, 3);
    EXPECT_TRUE(m.words[3].no_evidence);
    EXPECT_TRUE(m.words[3].results.empty());
    EXPECT_NE(match_csv(m).find("5,<no evidence>,,\n"), std::string::npos);
}

TEST(MatchInWords, StraddlingSegmentGoesByMidpoint) {
    auto doc = sentence36();
    const auto& ivs = doc.find(tiers::Word)->intervals;
    double boundary = ivs[1].t_end;  // mamma | e
    EstimatedSegment s{boundary - 0.01, boundary + 0.05, italian()->features_of("e"), {}};
    auto m = match_in_word_intervals(doc, {s}, lexicon(), {}, 1);
    EXPECT_TRUE(m.words[0].no_evidence);
    ASSERT_EQ(m.words[1].segments.size(), 1u);
    EstimatedSegment t{boundary - 0.05, boundary + 0.01, italian()->features_of("a"), {}};
    m = match_in_word_intervals(doc, {t}, lexicon(), {}, 1);
    EXPECT_EQ(m.words[0].segments.size(), 1u);
}

TEST(MatchInWords, SegmentsInPausesAreOrphans) {
    auto doc = sentence36();
    EstimatedSegment s{0.05, 0.10, italian()->features_of("a"), {}};
    auto m = match_in_word_intervals(doc, {s}, lexicon(), {}, 1);
    EXPECT_EQ(m.orphans, std::vector<size_t>{0});
    for (auto& w : m.words) EXPECT_TRUE(w.no_evidence);
}

TEST(MatchInWords, MissingWordTierIsAnError) {
    auto doc = parse_textgrid(util::read_file(testdata::fixture("no_word_tier.TextGrid")));
    EXPECT_THROW(match_in_word_intervals(doc, {}, lexicon(), {}, 1), Error);
}

TEST(SegmentCsv, RoundTripAndErrors) {
    auto segs = word("PAPÀ");
    auto csv = segment_csv(segs);
    EXPECT_TRUE(util::starts_with(csv, "t_start,t_end,features\n0.000000,0.100000,+cons -cont"));
    auto back = parse_segment_csv(csv, italian()->schema_ptr());
    ASSERT_EQ(back.size(), segs.size());
    for (size_t i = 0; i < segs.size(); ++i) {
        EXPECT_EQ(back[i].bundle, segs[i].bundle);
        EXPECT_DOUBLE_EQ(back[i].t_end, segs[i].t_end);
    }
    auto sch = italian()->schema_ptr();
    EXPECT_THROW(parse_segment_csv("0.1,0.2,+bogus\n", sch), Error);
    EXPECT_THROW(parse_segment_csv("0.2,0.1,+cons\n", sch), Error);
    EXPECT_THROW(parse_segment_csv("0.1,0.2\n", sch), Error);
    EXPECT_EQ(parse_segment_csv("0.1,0.2,\n", sch)[0].bundle.assignments().size(), 0u);
}
