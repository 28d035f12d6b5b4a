#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ozonecast/config.hpp"
#include "ozonecast/errors.hpp"
#include "ozonecast/synth.hpp"
#include "oracles.hpp"

using namespace ozonecast;

TEST_CASE("synth_table schema and determinism") {
    SynthConfig cfg;
    cfg.rows = 1200;
    cfg.seed = 7;
    const TimeSeriesTable t = synth_table(cfg);
    CHECK(t.n_rows() == 1200);
    CHECK(t.n_cols() == 12);
    CHECK(t.names == default_schema());
    CHECK(t.gap_count() == 0);
    CHECK(t.dates.front() == Date{2015, 1, 1});
    CHECK(t.dates.back() == Date::from_serial(Date{2015, 1, 1}.serial() + 1199));

    const TimeSeriesTable t2 = synth_table(cfg);
    for (std::size_t j = 0; j < t.n_cols(); ++j) CHECK(t.cols[j] == t2.cols[j]);

    // Written files are byte-identical for equal seeds.
    const auto dir = std::filesystem::temp_directory_path();
    write_csv(t, dir / "synth_a.csv");
    write_csv(t2, dir / "synth_b.csv");
    std::ifstream fa(dir / "synth_a.csv"), fb(dir / "synth_b.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().substr(0, 14) == "date,CO,NO,NO2");
}

TEST_CASE("synth_table values stay physical") {
    SynthConfig cfg;
    cfg.rows = 800;
    cfg.seed = 3;
    const TimeSeriesTable t = synth_table(cfg);
    for (const auto& name : t.names) {
        for (double v : t.col(name)) CHECK(v > 0.0);
    }
    for (double v : t.col("RH")) CHECK(v <= 100.0);
    for (double v : t.col("WDR")) CHECK(v <= 360.0);
}

TEST_CASE("synth target hits the requested lag-1 autocorrelation") {
    for (const double ar : {0.3, 0.6, 0.8}) {
        for (const std::uint64_t seed : {1ULL, 2ULL}) {
            SynthConfig cfg;
            cfg.rows = 1200;
            cfg.seed = seed;
            cfg.ar = ar;
            const TimeSeriesTable t = synth_table(cfg);
            const double got = oracle::lag1_direct(t.col("O3"));
            CAPTURE(ar);
            CAPTURE(seed);
            CHECK(std::abs(got - ar) < 0.05);
        }
    }
}

TEST_CASE("synth target moments match the configured scale") {
    SynthConfig cfg;
    cfg.rows = 1500;
    cfg.seed = 11;
    const TimeSeriesTable t = synth_table(cfg);
    const auto& o3 = t.col("O3");
    double mean = 0.0;
    for (double v : o3) mean += v;
    mean /= static_cast<double>(o3.size());
    CHECK(mean == doctest::Approx(30.5).epsilon(0.02));
    double ss = 0.0;
    for (double v : o3) ss += (v - mean) * (v - mean);
    CHECK(std::sqrt(ss / static_cast<double>(o3.size())) == doctest::Approx(9.0).epsilon(0.02));
}

TEST_CASE("run config round trips through its file format") {
    RunConfig cfg;
    cfg.data = "data/input.csv";
    cfg.out = "results";
    cfg.approach = 3;
    cfg.split.mode = SplitSpec::Mode::kSeededRandom;
    cfg.split.train_fraction = 0.7321;
    cfg.split.seed = 99;
    cfg.seed = 1234567;
    cfg.models = {"ols", "gbh"};
    cfg.threads = 3;
    cfg.overrides.set("gb.rounds", "50");
    cfg.overrides.set("svr.c", "2.5");

    const std::string text = cfg.serialize();
    const RunConfig back = RunConfig::parse_text(text);
    CHECK(back.serialize() == text);
    CHECK(back.data == cfg.data);
    CHECK(back.approach == 3);
    CHECK(back.split.mode == SplitSpec::Mode::kSeededRandom);
    CHECK(back.split.train_fraction == cfg.split.train_fraction);
    CHECK(back.models == cfg.models);
    CHECK(back.overrides.get("gb.rounds", "") == "50");
    CHECK(back.fingerprint() == cfg.fingerprint());

    // File round trip.
    const auto path = std::filesystem::temp_directory_path() / "oz_cfg.txt";
    cfg.save(path);
    const RunConfig loaded = RunConfig::load(path);
    CHECK(loaded.serialize() == text);
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(RunConfig::parse_text("approach 2\n"), ParseError);
    CHECK_THROWS_AS(RunConfig::parse_text("split=sideways\n"), ParseError);
    CHECK_THROWS_AS(RunConfig::parse_text("mystery=1\n"), ParseError);
    CHECK_THROWS((void)RunConfig::load("/nonexistent/cfg.txt"));
}

TEST_CASE("key values typed getters") {
    KeyValues kv;
    kv.set("a.b", "2.5");
    kv.set("c", "x");
    CHECK(kv.get_double("a.b", 0.0) == 2.5);
    CHECK(kv.get_int("a.b", 0) == 2);
    CHECK(kv.get_double("missing", 7.0) == 7.0);
    CHECK(kv.get("c", "") == "x");
    CHECK_THROWS(kv.get_double("c", 0.0));
}
