#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace lamit;

TEST(Config, DefaultsMatchTheComponentStructs) {
    Settings s;
    EXPECT_EQ(s.weights.w_free, DistanceWeights{}.w_free);
    EXPECT_EQ(s.topk, 5);
    auto shown = show_config(s);
    EXPECT_NE(shown.find("weights.w_free = 2    #"), std::string::npos);
    EXPECT_NE(shown.find("landmark.noise_range_db = 30"), std::string::npos);
}

TEST(Config, ShowConfigListsEveryKeyOnce) {
    auto shown = show_config(Settings{});
    for (auto& k : config_detail::keys()) {
        auto first = shown.find("\n" + k.name + " = ");
        bool at_start = util::starts_with(shown, k.name + " = ");
        EXPECT_TRUE(at_start || first != std::string::npos) << k.name;
    }
    EXPECT_EQ(util::lines(shown).size(), config_detail::keys().size());
}

TEST(Config, SetOptionParsesAndValidates) {
    Settings s;
    set_option(s, "weights.w_free", "3.5");
    EXPECT_EQ(s.weights.w_free, 3.5);
    set_option(s, "band.high", " 4000,7000 ");
    EXPECT_EQ(s.analysis.bands.back().f_lo, 4000);
    set_option(s, "cue.tilt_rule", "off");
    EXPECT_FALSE(s.cues.tilt_rule);
    set_option(s, "match.topk", "12");
    EXPECT_EQ(s.topk, 12);

    auto kind = [&](const std::string& k, const std::string& v) {
        try {
            set_option(s, k, v);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::IO;
    };
    EXPECT_EQ(kind("weights.w_fre", "1"), ErrorKind::Config);
    EXPECT_EQ(kind("weights.w_free", "heavy"), ErrorKind::Config);
    EXPECT_EQ(kind("band.low", "300"), ErrorKind::Config);
    EXPECT_EQ(kind("band.low", "900,300"), ErrorKind::Config);
    EXPECT_EQ(kind("match.topk", "2.5"), ErrorKind::Config);
    EXPECT_EQ(kind("cue.tilt_rule", "maybe"), ErrorKind::Config);
}

TEST(Config, SharedGateReachesLandmarkParams) {
    Settings s;
    set_option(s, "gate.db", "35");
    set_option(s, "analysis.ror_window", "0.02");
    EXPECT_EQ(s.landmarks.gate_db, 35);
    EXPECT_EQ(s.landmarks.ror_window, 0.02);
}

TEST(Config, FileParsingAndPrecedence) {
    std::string file = "# tuned for a noisy room\nlandmark.R_c = 12   # dB/s\n\nweights.w_bound=0.5\n";
    auto kv = parse_config(file);
    ASSERT_EQ(kv.size(), 2u);
    EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"landmark.R_c", "12"}));
    Settings s;
    apply_config(s, file);
    set_option(s, "weights.w_bound", "0.75");  // explicit flag after the file
    EXPECT_EQ(s.landmarks.R_c, 12);
    EXPECT_EQ(s.weights.w_bound, 0.75);
    EXPECT_EQ(s.weights.w_free, 2.0);
    try {
        parse_config("ok = 1\nno equals sign\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Config, ShowConfigRoundTrips) {
    Settings s;
    set_option(s, "landmark.P_v", "7.25");
    set_option(s, "band.mid", "1500,3500");
    Settings back;
    apply_config(back, show_config(s));
    EXPECT_EQ(show_config(back), show_config(s));
}
