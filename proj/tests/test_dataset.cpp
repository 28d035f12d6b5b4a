#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ozonecast/date.hpp"
#include "ozonecast/errors.hpp"
#include "ozonecast/rng.hpp"
#include "ozonecast/scaler.hpp"
#include "ozonecast/table.hpp"
#include "oracles.hpp"

using namespace ozonecast;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kCleanCsv =
    "date,CO,NO,NO2,NOX,O3,PM10,PM2.5,SO2,RH,TMP,WDR,WSP\n"
    "2015-01-01,0.4,12,20,33,28,40,20,3,55,16,180,2\n"
    "2015-01-02,0.5,13,21,35,30,41,21,4,54,17,181,2.1\n"
    "2015-01-03,0.6,14,22,37,32,42,22,5,53,18,182,2.2\n";

}  // namespace

TEST_CASE("date parsing and arithmetic") {
    const auto d = Date::parse("2015-01-01");
    REQUIRE(d.has_value());
    CHECK(d->year == 2015);
    CHECK(d->month == 1);
    CHECK(d->day == 1);
    CHECK(d->day_of_week() == 3);  // Thursday

    CHECK_FALSE(Date::parse("2015-13-01").has_value());
    CHECK_FALSE(Date::parse("2015-02-29").has_value());
    CHECK(Date::parse("2016-02-29").has_value());  // leap year
    CHECK_FALSE(Date::parse("2015-1-01").has_value());
    CHECK_FALSE(Date::parse("20150101").has_value());

    // Serial round trip over a long range.
    const long base = Date{1995, 1, 1}.serial();
    for (long s = base; s < base + 15000; s += 37) {
        const Date back = Date::from_serial(s);
        CHECK(back.serial() == s);
    }
}

TEST_CASE("day of week matches Zeller's congruence over decades") {
    Date d{1995, 1, 1};
    long serial = d.serial();
    for (int i = 0; i < 13000; ++i) {
        const Date cur = Date::from_serial(serial + i);
        CHECK(cur.day_of_week() == oracle::zeller_day_of_week(cur.year, cur.month, cur.day));
    }
}

TEST_CASE("parse_csv reads a clean table") {
    const auto path = write_temp("oz_clean.csv", kCleanCsv);
    const TimeSeriesTable t = parse_csv(path);
    CHECK(t.n_rows() == 3);
    CHECK(t.n_cols() == 12);
    CHECK(t.gap_count() == 0);
    CHECK(t.names == default_schema());
    CHECK(t.col("O3")[1] == 30.0);
}

TEST_CASE("parse_csv records gaps for empty, NaN, and -99 cells") {
    const auto path = write_temp(
        "oz_gaps.csv",
        "date,CO,NO,NO2,NOX,O3,PM10,PM2.5,SO2,RH,TMP,WDR,WSP\n"
        "2015-01-01,0.4,12,20,33,,40,20,3,55,16,180,2\n"
        "2015-01-02,0.5,NaN,21,35,30,41,21,4,54,17,181,2.1\n"
        "2015-01-03,0.6,14,22,37,32,42,-99,5,53,18,182,2.2\n");
    const TimeSeriesTable t = parse_csv(path);
    CHECK(t.gap_count() == 3);
    CHECK(is_gap(t.col("O3")[0]));
    CHECK(is_gap(t.col("NO")[1]));
    CHECK(is_gap(t.col("PM2.5")[2]));
}

TEST_CASE("parse_csv error paths") {
    SUBCASE("bad date month") {
        const auto path = write_temp(
            "oz_baddate.csv",
            "date,CO,NO,NO2,NOX,O3,PM10,PM2.5,SO2,RH,TMP,WDR,WSP\n"
            "2015-13-01,0.4,12,20,33,28,40,20,3,55,16,180,2\n");
        CHECK_THROWS_AS(parse_csv(path), ParseError);
    }
    SUBCASE("missing schema column") {
        const auto path = write_temp("oz_noo3.csv",
                                     "date,CO,NO\n"
                                     "2015-01-01,0.4,12\n");
        CHECK_THROWS_AS(parse_csv(path), SchemaError);
    }
    SUBCASE("duplicate date") {
        std::string text = kCleanCsv;
        text += "2015-01-03,0.6,14,22,37,32,42,22,5,53,18,182,2.2\n";
        const auto path = write_temp("oz_dup.csv", text);
        CHECK_THROWS_AS(parse_csv(path), DuplicateDateError);
    }
    SUBCASE("unreadable path") {
        CHECK_THROWS_AS(parse_csv("/nonexistent/nope.csv"), Error);
    }
}

TEST_CASE("parse_csv sorts out-of-order rows by date") {
    const auto path = write_temp(
        "oz_unsorted.csv",
        "date,CO,NO,NO2,NOX,O3,PM10,PM2.5,SO2,RH,TMP,WDR,WSP\n"
        "2015-01-02,0.5,13,21,35,30,41,21,4,54,17,181,2.1\n"
        "2015-01-01,0.4,12,20,33,28,40,20,3,55,16,180,2\n");
    const TimeSeriesTable t = parse_csv(path);
    CHECK(t.dates[0] < t.dates[1]);
    CHECK(t.col("O3")[0] == 28.0);
}

TEST_CASE("csv write/read round trip") {
    const auto path = write_temp("oz_rt.csv", kCleanCsv);
    const TimeSeriesTable t = parse_csv(path);
    const auto out = std::filesystem::temp_directory_path() / "oz_rt_out.csv";
    write_csv(t, out);
    const TimeSeriesTable t2 = parse_csv(out);
    REQUIRE(t2.n_rows() == t.n_rows());
    for (std::size_t j = 0; j < t.n_cols(); ++j) {
        for (std::size_t i = 0; i < t.n_rows(); ++i) CHECK(t.cols[j][i] == t2.cols[j][i]);
    }
}

namespace {
TimeSeriesTable single_column(std::vector<double> values) {
    TimeSeriesTable t;
    t.names = {"O3"};
    const long base = Date{2015, 1, 1}.serial();
    for (std::size_t i = 0; i < values.size(); ++i) {
        t.dates.push_back(Date::from_serial(base + static_cast<long>(i)));
    }
    t.cols.push_back(std::move(values));
    return t;
}
}  // namespace

TEST_CASE("fill_gaps interpolation rules") {
    SUBCASE("interior midpoint") {
        const auto filled = fill_gaps(single_column({1.0, gap_cell(), 3.0}), 12, 1.0);
        CHECK(filled.col("O3")[1] == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("leading gap takes nearest value") {
        const auto filled = fill_gaps(single_column({gap_cell(), 5.0, 6.0}), 12, 1.0);
        CHECK(filled.col("O3")[0] == 5.0);
        CHECK(filled.col("O3")[1] == 5.0);
        CHECK(filled.col("O3")[2] == 6.0);
    }
    SUBCASE("trailing gap takes nearest value") {
        const auto filled = fill_gaps(single_column({5.0, 6.0, gap_cell()}), 12, 1.0);
        CHECK(filled.col("O3")[2] == 6.0);
    }
    SUBCASE("interior run interpolates linearly") {
        const auto filled = fill_gaps(single_column({0.0, gap_cell(), gap_cell(), gap_cell(), 4.0}),
                                      12, 1.0);
        CHECK(filled.col("O3")[1] == doctest::Approx(1.0));
        CHECK(filled.col("O3")[2] == doctest::Approx(2.0));
        CHECK(filled.col("O3")[3] == doctest::Approx(3.0));
    }
}

TEST_CASE("fill_gaps validation") {
    SUBCASE("run of 13 exceeds the limit of 12") {
        std::vector<double> v(40, 1.0);
        for (int i = 5; i < 18; ++i) v[static_cast<std::size_t>(i)] = gap_cell();
        CHECK_THROWS_AS(fill_gaps(single_column(std::move(v)), 12, 1.0), GapRunError);
    }
    SUBCASE("run of 12 passes the run check") {
        std::vector<double> v(4000, 1.0);
        for (int i = 5; i < 17; ++i) v[static_cast<std::size_t>(i)] = gap_cell();
        const auto filled = fill_gaps(single_column(std::move(v)), 12, 0.005);
        CHECK(filled.gap_count() == 0);
    }
    SUBCASE("gap fraction above budget") {
        std::vector<double> v(100, 1.0);
        v[10] = gap_cell();
        v[50] = gap_cell();  // 2% > 0.5%
        CHECK_THROWS_AS(fill_gaps(single_column(std::move(v)), 12, 0.005), GapBudgetError);
    }
}

TEST_CASE("fill_gaps never alters observed cells and is idempotent") {
    std::vector<double> v = {3.0, gap_cell(), 7.5, 9.0, gap_cell(), gap_cell(), 1.0, 2.0};
    const TimeSeriesTable raw = single_column(std::move(v));
    const TimeSeriesTable filled = fill_gaps(raw, 12, 1.0);
    for (std::size_t i = 0; i < raw.n_rows(); ++i) {
        if (!is_gap(raw.col("O3")[i])) CHECK(filled.col("O3")[i] == raw.col("O3")[i]);
    }
    const TimeSeriesTable again = fill_gaps(filled, 12, 1.0);
    for (std::size_t i = 0; i < filled.n_rows(); ++i) {
        CHECK(again.col("O3")[i] == filled.col("O3")[i]);
    }
}

TEST_CASE("split modes") {
    SUBCASE("chronological ceiling rule") {
        const SplitIndices s = make_split(10, {SplitSpec::Mode::kChronological, 0.8, 0});
        REQUIRE(s.train.size() == 8);
        REQUIRE(s.test.size() == 2);
        for (int i = 0; i < 8; ++i) CHECK(s.train[static_cast<std::size_t>(i)] == i);
        CHECK(s.test[0] == 8);
        CHECK(s.test[1] == 9);
    }
    SUBCASE("random mode is deterministic per seed") {
        const SplitSpec spec{SplitSpec::Mode::kSeededRandom, 0.8, 7};
        const SplitIndices a = make_split(10, spec);
        const SplitIndices b = make_split(10, spec);
        CHECK(a.train == b.train);
        CHECK(a.test == b.test);
        const SplitIndices c = make_split(10, {SplitSpec::Mode::kSeededRandom, 0.8, 8});
        CHECK(a.train != c.train);
    }
    SUBCASE("degenerate sizes rejected") {
        CHECK_THROWS_AS(make_split(10, {SplitSpec::Mode::kChronological, 0.999, 0}), SplitError);
        CHECK_THROWS_AS(make_split(3, {SplitSpec::Mode::kChronological, 0.5, 0}), SplitError);
    }
    SUBCASE("split always partitions 0..n-1") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const SplitIndices s =
                make_split(37, {SplitSpec::Mode::kSeededRandom, 0.71, seed});
            std::vector<bool> seen(37, false);
            for (int i : s.train) seen[static_cast<std::size_t>(i)] = true;
            for (int i : s.test) {
                CHECK_FALSE(seen[static_cast<std::size_t>(i)]);
                seen[static_cast<std::size_t>(i)] = true;
            }
            for (bool b : seen) CHECK(b);
        }
    }
    SUBCASE("table wrapper requires gap-free input") {
        CHECK_THROWS_AS(split(single_column({1.0, gap_cell(), 3.0, 4.0, 5.0}),
                              {SplitSpec::Mode::kChronological, 0.6, 0}),
                        SplitError);
    }
}

TEST_CASE("scaler moments and degenerate columns") {
    Eigen::MatrixXd X(3, 2);
    X << 1, 5, 2, 5, 3, 5;
    const std::vector<int> rows = {0, 1, 2};
    const Scaler s = fit_scaler(X, {"a", "b"}, rows);
    CHECK(s.mean[0] == doctest::Approx(2.0));
    CHECK(s.sd[0] == doctest::Approx(1.0));  // sample SD of 1,2,3
    CHECK_FALSE(s.degenerate[0]);
    CHECK(s.mean[1] == 5.0);
    CHECK(s.sd[1] == 0.0);
    CHECK(s.degenerate[1]);

    const Eigen::MatrixXd Z = s.transform(X);
    CHECK(Z(1, 0) == 0.0);           // value 2 under mean 2, sd 1
    CHECK(Z.col(1).norm() == 0.0);   // degenerate maps to 0
    Eigen::MatrixXd probe(1, 2);
    probe << 3.5, 5.0;
    CHECK(s.transform(probe)(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("scaler matches a two-pass oracle on random data") {
    Rng rng(42);
    Eigen::MatrixXd X(50, 3);
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = rng.normal(3.0, 2.5);
    }
    std::vector<int> rows(50);
    for (int i = 0; i < 50; ++i) rows[static_cast<std::size_t>(i)] = i;
    const Scaler s = fit_scaler(X, {"a", "b", "c"}, rows);
    for (int j = 0; j < 3; ++j) {
        long double mean = 0.0L;
        for (int i = 0; i < 50; ++i) mean += X(i, j);
        mean /= 50.0L;
        long double ss = 0.0L;
        for (int i = 0; i < 50; ++i) ss += (X(i, j) - mean) * (X(i, j) - mean);
        const double sd = std::sqrt(static_cast<double>(ss) / 49.0);
        CHECK(s.mean[j] == doctest::Approx(static_cast<double>(mean)).epsilon(1e-12));
        CHECK(s.sd[j] == doctest::Approx(sd).epsilon(1e-12));
    }

    // Standardized training columns: mean 0, sample SD 1.
    const Eigen::MatrixXd Z = s.transform(X);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(Z.col(j).mean()) < 1e-12);
        const double sd = std::sqrt(
            (Z.col(j).array() - Z.col(j).mean()).square().sum() / 49.0);
        CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Inverse transform round trip.
    const Eigen::MatrixXd back = s.inverse(Z);
    CHECK((back - X).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scaler table overload and schema errors") {
    const auto path = write_temp("oz_scaler.csv", kCleanCsv);
    const TimeSeriesTable t = parse_csv(path);
    const std::vector<int> rows = {0, 1, 2};
    const Scaler s = fit_scaler(t, rows, {"O3", "TMP"});
    const Eigen::MatrixXd Z = apply_scaler(s, t);
    CHECK(Z.rows() == 3);
    CHECK(Z.cols() == 2);

    TimeSeriesTable missing = t;
    missing.names[4] = "OZONE";
    CHECK_THROWS_AS(apply_scaler(s, missing), SchemaError);
}
