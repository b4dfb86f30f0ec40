#include "fer/error.hpp"
#include "fer/featmat.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <fstream>

using namespace fer;

TEST_SUITE("featmat") {

TEST_CASE("csv round trip preserves doubles bit-for-bit") {
    testutil::TempDir td("csv");
    Rng rng(61);
    FeatureMatrix m(7, 5);
    for (double& v : m.data) v = rng.normal() * 1e3;
    m.data[3] = 0.1; // classic non-representable decimal
    m.labels = {1, 2, 1, 3, 2, 1, 3};
    save_csv(m, td.file("m.csv"));
    const FeatureMatrix back = load_csv(td.file("m.csv"));
    REQUIRE(back.rows == 7);
    REQUIRE(back.cols == 5);
    REQUIRE(back.labels == m.labels);
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        CHECK(back.data[i] == m.data[i]); // exact
    }
}

TEST_CASE("csv has a header row, comma separators and LF endings") {
    testutil::TempDir td("csvfmt");
    FeatureMatrix m(1, 2);
    m.data = {1.5, -2.0};
    save_csv(m, td.file("m.csv"));
    std::ifstream in(td.file("m.csv"), std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("f0") != std::string::npos);
    CHECK(all.find(',') != std::string::npos);
    CHECK(all.find("\r") == std::string::npos);
    CHECK(all.back() == '\n');
}

TEST_CASE("unlabeled csv round trips without a label column") {
    testutil::TempDir td("csvnolab");
    FeatureMatrix m(2, 2);
    m.data = {1.0, 2.0, 3.0, 4.0};
    save_csv(m, td.file("m.csv"));
    const FeatureMatrix back = load_csv(td.file("m.csv"));
    CHECK_FALSE(back.has_labels());
    CHECK(back.cols == 2);
}

TEST_CASE("binary format round trips exactly") {
    testutil::TempDir td("bin");
    Rng rng(62);
    FeatureMatrix m(11, 3);
    for (double& v : m.data) v = rng.normal();
    m.labels.assign(11, 1);
    m.labels[5] = 2;
    save_binary(m, td.file("m.bin"));
    const FeatureMatrix back = load_binary(td.file("m.bin"));
    CHECK(back.data == m.data);
    CHECK(back.labels == m.labels);
    // Corrupt magic is rejected.
    std::ofstream bad(td.file("bad.bin"), std::ios::binary);
    bad << "JUNKJUNKJUNK";
    bad.close();
    CHECK_THROWS_AS(load_binary(td.file("bad.bin")), UnsupportedFormat);
}

TEST_CASE("stack_features concatenates columns and propagates the one label set") {
    FeatureMatrix a(2, 2);
    a.data = {1, 2, 3, 4};
    FeatureMatrix b(2, 1);
    b.data = {9, 8};
    b.labels = {1, 2};
    const FeatureMatrix s = stack_features({a, b});
    REQUIRE(s.rows == 2);
    REQUIRE(s.cols == 3);
    CHECK(s.at(0, 2) == 9);
    CHECK(s.at(1, 0) == 3);
    CHECK(s.labels == std::vector<int>{1, 2});

    FeatureMatrix c(3, 1); // row mismatch
    CHECK_THROWS_AS(stack_features({a, c}), ShapeError);

    FeatureMatrix d(2, 1);
    d.labels = {1, 1};
    CHECK_THROWS_AS(stack_features({b, d}), InvalidArgument); // two label carriers
    CHECK_THROWS_AS(stack_features({}), InvalidArgument);
}

TEST_CASE("curves round trip and keep their axis names") {
    testutil::TempDir td("curve");
    CurveSeries c;
    c.x_name = "iteration";
    c.y_name = "cost";
    for (int i = 0; i < 100; ++i) {
        c.x.push_back(i + 1.0);
        c.y.push_back(1.0 / (i + 1.0));
    }
    save_curve(c, td.file("c.csv"));
    const CurveSeries back = load_curve(td.file("c.csv"));
    CHECK(back.x_name == "iteration");
    CHECK(back.y_name == "cost");
    CHECK(back.x == c.x);
    CHECK(back.y == c.y);

    // 100 data rows + 1 header row.
    std::ifstream in(td.file("c.csv"));
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 101);
}

} // TEST_SUITE
