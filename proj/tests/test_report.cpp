#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kraus_reclaim/report.hpp"
#include "kraus_reclaim/verify.hpp"
#include "test_support.hpp"

using namespace kraus_reclaim;
using kraus_reclaim::testing::gram_schmidt_unitary;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

TEST(PGrid, Points) {
    const auto pts = PGrid{0.0, 1.0, 0.25}.points();
    ASSERT_EQ(pts.size(), 5u);
    EXPECT_DOUBLE_EQ(pts.back(), 1.0);
    EXPECT_EQ(PGrid{}.points().size(), 101u);
    EXPECT_EQ((PGrid{0.3, 0.3, 0.1}.points().size()), 1u);
}

TEST(PGrid, Rejects) {
    EXPECT_THROW(PGrid({0.5, 0.4, 0.1}).points(), InvalidInput);
    EXPECT_THROW(PGrid({-0.1, 0.4, 0.1}).points(), InvalidInput);
    EXPECT_THROW(PGrid({0.0, 1.1, 0.1}).points(), InvalidInput);
    EXPECT_THROW(PGrid({0.0, 1.0, 0.0}).points(), InvalidInput);
    EXPECT_THROW(PGrid({0.0, 1.0, -0.1}).points(), InvalidInput);
}

TEST(Sweep, QutritCsv) {
    std::ostringstream out;
    write_csv(out, sweep({3, {0.0, 1.0, 0.5}, std::nullopt}), false);
    const auto lines = lines_of(out.str());
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "p,f_nocorr,f_canonical,f_supermax");
    EXPECT_EQ(lines[1], "0,1,1,1");
    const auto mid = split(lines[2]);
    ASSERT_EQ(mid.size(), 4u);
    EXPECT_NEAR(std::stod(mid[1]), 0.5412578159510714, 1e-9);
    EXPECT_NEAR(std::stod(mid[2]), 0.7912578159510714, 1e-9);
    EXPECT_NEAR(std::stod(mid[3]), 0.8040075530555322, 1e-9);
    const auto last = split(lines[3]);
    EXPECT_NEAR(std::stod(last[1]), 1.0 / 9.0, 1e-9);
    EXPECT_NEAR(std::stod(last[2]), 1.0 / 3.0, 1e-9);
    EXPECT_NEAR(std::stod(last[3]), 1.0 / 3.0, 1e-9);
}

TEST(Sweep, OtherDimensionsLeaveSupermaxEmpty) {
    std::ostringstream out;
    write_csv(out, sweep({2, {0.5, 0.5, 0.1}, std::nullopt}), false);
    const auto lines = lines_of(out.str());
    ASSERT_EQ(lines.size(), 2u);
    const auto row = split(lines[1]);
    ASSERT_EQ(row.size(), 4u);
    EXPECT_TRUE(row[3].empty());
    EXPECT_NEAR(std::stod(row[2]), 0.8535533905932737, 1e-9);
}

TEST(Sweep, SearchColumn) {
    SearchConfig cfg;
    cfg.n_samples = 200;
    cfg.jobs = 1;
    std::ostringstream out;
    const auto rows = sweep({3, {0.5, 0.5, 0.1}, cfg});
    write_csv(out, rows, true);
    const auto lines = lines_of(out.str());
    EXPECT_EQ(lines[0], "p,f_nocorr,f_canonical,f_supermax,f_search");
    const auto row = split(lines[1]);
    ASSERT_EQ(row.size(), 5u);
    const double found = std::stod(row[4]);
    EXPECT_GE(found, std::stod(row[2]) - 1e-9);
    EXPECT_LE(found, std::stod(row[3]) + 1e-9);
}

TEST(Sweep, Svg) {
    std::ostringstream out;
    write_svg(out, sweep({3, {0.0, 1.0, 0.1}, std::nullopt}), 3);
    const std::string svg = out.str();
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) {
        ++polylines;
    }
    EXPECT_EQ(polylines, 3u);
}

TEST(Json, KrausRoundTrip) {
    std::mt19937_64 rng(400);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 3;
        const KrausSet k = mix(amplitude_damping(d, 0.05 * trial), gram_schmidt_unitary(d + 1, rng).leftCols(d));
        const KrausSet back = kraus_from_json(nlohmann::json::parse(to_json(k).dump()));
        ASSERT_EQ(back.size(), k.size());
        for (std::size_t a = 0; a < k.size(); ++a) EXPECT_EQ(max_abs(back[a] - k[a]), 0.0);
    }
    EXPECT_THROW(matrix_from_json(nlohmann::json::parse("[[[1,0],[0,0]],[[0,0]]]")), InvalidInput);
}

TEST(Json, SearchResult) {
    SearchConfig cfg;
    cfg.n_samples = 100;
    cfg.jobs = 1;
    const nlohmann::json j = to_json(random_search(amplitude_damping(3, 0.5), cfg));
    EXPECT_EQ(j.at("samples_evaluated").get<std::size_t>(), 100u);
    EXPECT_EQ(j.at("best_params").at("coeffs").size(), 8u);
    std::uint64_t total = 0;
    for (const auto& bucket : j.at("histogram").at("nonzero_bins")) total += bucket.at(1).get<std::uint64_t>();
    EXPECT_EQ(total, 100u);
    EXPECT_GE(j.at("spread").get<double>(), 0.0);
}

TEST(Json, DilationReport) {
    const nlohmann::json j = dilation_report(4, 0.6);
    EXPECT_EQ(j.at("d").get<int>(), 4);
    EXPECT_NEAR(j.at("p").get<double>(), std::sin(0.6) * std::sin(0.6), 1e-15);
    EXPECT_LE(j.at("abs_deviation").get<double>(), 1e-10);
    EXPECT_LE(j.at("completeness_residual").get<double>(), 1e-12);
    EXPECT_EQ(j.at("kraus").size(), 4u);
    const KrausSet k = kraus_from_json(j.at("kraus"));
    EXPECT_NEAR(j.at("correction_bound").get<double>(), correction_bound(k), 1e-12);
}

TEST(Verify, FastLevelPasses) {
    const auto reports = run_verification({});
    EXPECT_GE(reports.size(), 10u);
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.to_json().dump();
}

TEST(Verify, OffsetFails) {
    VerifyOptions options;
    options.expected_offset = 1.0;
    for (const auto& r : run_verification(options)) EXPECT_FALSE(r.passed) << r.name;
}
