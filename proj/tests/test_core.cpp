#include <catch2/catch_amalgamated.hpp>

#include <boost/math/distributions/normal.hpp>

#include "episignal/csv.hpp"
#include "episignal/date.hpp"
#include "episignal/rng.hpp"
#include "episignal/sha256.hpp"
#include "episignal/stats.hpp"
#include "episignal/textutil.hpp"

using namespace episignal;

TEST_CASE("date parse/format round trip") {
    auto d = Date::parse("2020-03-18");
    REQUIRE(d);
    CHECK(d->to_iso() == "2020-03-18");
    CHECK((*d + 1).to_iso() == "2020-03-19");
    CHECK((*d - Date::from_ymd(2020, 3, 1)) == 17);

    CHECK_FALSE(Date::parse("2020-3-18"));
    CHECK_FALSE(Date::parse("2020-02-30"));
    CHECK_FALSE(Date::parse("20200318"));
    CHECK(Date::parse("2020-02-29"));  // leap year
    CHECK_FALSE(Date::parse("2021-02-29"));
}

TEST_CASE("date ordering across month and year boundaries") {
    CHECK(Date::from_ymd(2020, 12, 31) + 1 == Date::from_ymd(2021, 1, 1));
    CHECK(Date::from_ymd(2020, 2, 29) == *Date::parse("2020-02-29"));
    DateInterval iv{Date::from_ymd(2020, 3, 1), Date::from_ymd(2020, 3, 5)};
    CHECK(iv.length() == 4);
    CHECK(iv.contains(Date::from_ymd(2020, 3, 4)));
    CHECK_FALSE(iv.contains(Date::from_ymd(2020, 3, 5)));
}

TEST_CASE("rng determinism and ranges") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const auto v = r.uniform_int(-3, 3);
        CHECK(v >= -3);
        CHECK(v <= 3);
    }
}

TEST_CASE("rng normal moments") {
    Rng r(123);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::fabs(sum / n) < 0.02);
    CHECK(std::fabs(sq / n - 1.0) < 0.02);
}

TEST_CASE("rng poisson mean/variance at small and large rates") {
    for (double lambda : {2.5, 40.0, 3000.0}) {
        Rng r(99);
        const int n = 20000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<double>(r.poisson(lambda));
            sum += k;
            sq += k * k;
        }
        const double m = sum / n;
        const double var = sq / n - m * m;
        CHECK(std::fabs(m - lambda) < 0.05 * lambda);
        CHECK(std::fabs(var - lambda) < 0.10 * lambda);
    }
}

TEST_CASE("seed derivation separates streams") {
    const auto s1 = derive_seed(1, 0);
    const auto s2 = derive_seed(1, 1);
    const auto s3 = derive_seed(2, 0);
    CHECK(s1 != s2);
    CHECK(s1 != s3);
    CHECK(derive_seed(1, 0) == s1);
}

TEST_CASE("lowercasing and ascii folding") {
    CHECK(to_lower("Hello WORLD") == "hello world");
    CHECK(to_lower("Saarbrücken") == "saarbrücken");
    CHECK(to_lower("ÉCOLE") == "école");
    CHECK(fold_ascii("Saarbrücken") == "saarbrucken");
    CHECK(fold_ascii("Liège") == "liege");
    CHECK(fold_ascii("Straße") == "strasse");
    CHECK(fold_ascii("Łódź") == "lodz");
    CHECK(fold_ascii("ABC-123") == "abc-123");
}

TEST_CASE("csv quoting round trip") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    auto fields = csv_split("a,\"b,c\",\"d\"\"e\"");
    REQUIRE(fields.size() == 3);
    CHECK(fields[0] == "a");
    CHECK(fields[1] == "b,c");
    CHECK(fields[2] == "d\"e");
}

TEST_CASE("float format: fixed 9 significant digits") {
    CHECK(format_float(100.0) == "100");
    CHECK(format_float(0.1) == "0.1");
    CHECK(format_float(1.0 / 3.0) == "0.333333333");
    CHECK(format_float(-0.0) == "0");
    const double v = 0.12345678987654321;
    CHECK(std::stod(format_float_exact(v)) == v);
}

TEST_CASE("pearson on exact linear data") {
    std::vector<double> x{1, 2, 3};
    std::vector<double> up{2, 4, 6};
    std::vector<double> down{3, 2, 1};
    CHECK(pearson(x, up).r == Catch::Approx(1.0));
    CHECK(pearson(x, down).r == Catch::Approx(-1.0));
    CHECK(pearson(x, up).p == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pearson hand-computed case") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y{2, 1, 4, 3, 5};
    auto res = pearson(x, y);
    CHECK(res.r == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(res.p == Catch::Approx(0.10408803866182799).epsilon(1e-9));
}

TEST_CASE("pearson rejects degenerate input") {
    std::vector<double> c{2, 2, 2};
    std::vector<double> x{1, 2, 3};
    CHECK_THROWS_WITH(pearson(x, c), Catch::Matchers::ContainsSubstring("zero variance"));
    std::vector<double> two{1, 2};
    CHECK_THROWS(pearson(two, two));
}

TEST_CASE("pearson invariances") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(12), y(12);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.normal();
            y[i] = rng.normal();
        }
        auto base = pearson(x, y);
        auto swapped = pearson(y, x);
        CHECK(swapped.r == Catch::Approx(base.r).epsilon(1e-12));
        CHECK(swapped.p == Catch::Approx(base.p).margin(1e-12));
        std::vector<double> ax(x.size()), ny(y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            ax[i] = 2.5 * x[i] + 7.0;
            ny[i] = -y[i];
        }
        auto affine = pearson(ax, y);
        CHECK(affine.r == Catch::Approx(base.r).epsilon(1e-9));
        auto negated = pearson(x, ny);
        CHECK(negated.r == Catch::Approx(-base.r).epsilon(1e-12));
        CHECK(negated.p == Catch::Approx(base.p).margin(1e-12));
    }
}

TEST_CASE("mann-kendall directions") {
    std::vector<double> inc;
    for (int i = 1; i <= 20; ++i) inc.push_back(i);
    auto up = mann_kendall(inc);
    CHECK(up.direction == TrendDirection::up);
    CHECK(up.s == 190);
    CHECK(up.p < 0.001);

    std::vector<double> flat(10, 3.0);
    auto none = mann_kendall(flat);
    CHECK(none.direction == TrendDirection::none);
    CHECK(none.p == Catch::Approx(1.0));
    CHECK(none.s == 0);

    // alternating series: S = 4, Var = 92, p ~ 0.754
    std::vector<double> alt{5, 3, 6, 2, 7, 1, 8, 0, 9};
    auto res = mann_kendall(alt);
    CHECK(res.s == 4);
    CHECK(res.var_s == Catch::Approx(92.0));
    CHECK(res.p == Catch::Approx(0.7544541774940892).epsilon(1e-9));
    CHECK(res.direction == TrendDirection::none);

    std::vector<double> tooshort{1, 2, 3};
    CHECK_THROWS(mann_kendall(tooshort));
}

TEST_CASE("normal cdf vs boost") {
    boost::math::normal_distribution<double> nd;
    for (double z : {-3.0, -1.5, 0.0, 0.7, 2.2}) {
        CHECK(normal_cdf(z) == Catch::Approx(boost::math::cdf(nd, z)).epsilon(1e-12));
    }
}

TEST_CASE("sha256 known vectors") {
    CHECK(Sha256::of_string("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(Sha256::of_string("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    // exercise multi-block input
    std::string big(200000, 'x');
    CHECK(Sha256::of_string(big).size() == 64);
}
