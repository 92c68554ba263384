#include <gtest/gtest.h>

#include <random>
#include <set>

#include "commsense/error.hpp"
#include "commsense/hexbin.hpp"
#include "fixtures.hpp"

using namespace commsense;

namespace {

void expect_partition(std::span<const Point2D> pts, const std::vector<HexBin>& bins, std::size_t cap) {
    std::vector<int> seen(pts.size(), 0);
    std::set<std::string> ids;
    for (const auto& b : bins) {
        EXPECT_GE(b.comments.size(), 1u);
        EXPECT_LE(b.comments.size(), cap);
        EXPECT_TRUE(std::is_sorted(b.comments.begin(), b.comments.end()));
        EXPECT_TRUE(ids.insert(b.bin_id).second) << b.bin_id;
        for (auto c : b.comments) ++seen.at(c);
    }
    for (auto s : seen) EXPECT_EQ(s, 1);
}

} // namespace

TEST(Hexbin, CoincidentPointsSplitIntoSlots) {
    std::vector<Point2D> pts;
    for (std::size_t i = 0; i < 30; ++i) pts.push_back({i, 0.25, -0.25});
    const auto bins = build_hexbins(pts);
    ASSERT_EQ(bins.size(), 2u);
    EXPECT_EQ(bins[0].comments.size(), 15u);
    EXPECT_EQ(bins[1].comments.size(), 15u);
    EXPECT_EQ(bins[0].level, bins[1].level);
    EXPECT_EQ(bins[0].q, bins[1].q);
    EXPECT_NE(bins[0].slot, bins[1].slot);
    expect_partition(pts, bins, 15);
}

TEST(Hexbin, SinglePoint) {
    const std::vector<Point2D> pts{{0, 0.5, 0.5}};
    const auto bins = build_hexbins(pts);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0].comments, std::vector<std::size_t>{0});
    EXPECT_TRUE(build_hexbins(std::span<const Point2D>{}).empty());
}

TEST(Hexbin, CellLookupMatchesNearestCentre) {
    // The containing hexagon is the one whose centre is nearest.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    const double size = 0.3;
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng), y = u(rng);
        const auto cell = hex_cell(x, y, size);
        auto centre = [&](long q, long r) {
            return std::pair{size * std::sqrt(3.0) * (q + r / 2.0), size * 1.5 * r};
        };
        double best = 1e9;
        Axial arg;
        for (long q = cell.q - 2; q <= cell.q + 2; ++q)
            for (long r = cell.r - 2; r <= cell.r + 2; ++r) {
                auto [cx, cy] = centre(q, r);
                const double d = std::hypot(x - cx, y - cy);
                if (d < best) best = d, arg = {q, r};
            }
        EXPECT_EQ(cell, arg) << x << "," << y;
    }
}

TEST(Hexbin, RandomSetsKeepInvariants) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng() % 800;
        std::vector<Point2D> pts;
        std::normal_distribution<double> g(0, 0.3);
        for (std::size_t i = 0; i < n; ++i) {
            // Some exact duplicates to stress the slot split.
            if (i > 0 && rng() % 5 == 0) pts.push_back({i, pts[i - 1].x, pts[i - 1].y});
            else pts.push_back({i, g(rng), g(rng)});
        }
        HexbinParams p{1 + rng() % 20, 0.05 + (rng() % 100) / 400.0, 6};
        const auto a = build_hexbins(pts, p);
        expect_partition(pts, a, p.capacity);
        EXPECT_EQ(a, build_hexbins(pts, p));
    }
}

TEST(Hexbin, RejectsBadParams) {
    const std::vector<Point2D> pts{{0, 0, 0}};
    EXPECT_THROW(build_hexbins(pts, {0, 0.1, 6}), InvalidArgument);
    EXPECT_THROW(build_hexbins(pts, {15, 0.0, 6}), InvalidArgument);
    EXPECT_THROW(build_hexbins(pts, {15, -1.0, 6}), InvalidArgument);
}

TEST(Hexbin, JsonRoundTrip) {
    HexBin b{"b3", 1, -2, 5, 1, 0.5, -0.25, {1, 4, 9}};
    nlohmann::json j = b;
    EXPECT_EQ(j.get<HexBin>(), b);
}

TEST(Rings, WeightsAreDistinctCommentCounts) {
    const auto ws = commsense::testing::fixture_workspace();
    const auto& rings = ws->rings();
    const auto& scheme = ws->scheme();
    ASSERT_EQ(rings.outer.size(), scheme.topics.size());
    std::size_t inner_i = 0;
    for (std::size_t t = 0; t < scheme.topics.size(); ++t) {
        const auto& topic = scheme.topics[t];
        EXPECT_EQ(rings.outer[t].topic_id, topic.topic_id);
        EXPECT_EQ(rings.outer[t].label, topic.category);
        std::set<std::size_t> all;
        for (const auto& kw : topic.keywords) {
            std::set<std::size_t> mine;
            for (const auto& s : ws->spans().at(kw)) mine.insert(s.comment);
            all.insert(mine.begin(), mine.end());
            ASSERT_LT(inner_i, rings.inner.size());
            EXPECT_EQ(rings.inner[inner_i].keyword, kw);
            EXPECT_EQ(rings.inner[inner_i].topic_id, topic.topic_id);
            EXPECT_EQ(rings.inner[inner_i].weight, mine.size());
            ++inner_i;
        }
        EXPECT_EQ(rings.outer[t].weight, all.size());
    }
    EXPECT_EQ(inner_i, rings.inner.size());
}

TEST(Rings, UnmatchedKeywordHasZeroWeight) {
    TopicScheme s;
    s.topics = {{"t1", "Pool", "", {"pool", "sauna"}}};
    s.keywords = {{"pool", 2, 1, "t1"}, {"sauna", 1, 1, "t1"}};
    SpanIndex spans{{"pool", {{0, 0, 4}, {0, 10, 14}, {3, 0, 4}}}, {"sauna", {}}};
    const auto r = build_rings(s, spans);
    ASSERT_EQ(r.inner.size(), 2u);
    EXPECT_EQ(r.inner[0].weight, 2u);
    EXPECT_EQ(r.inner[1].weight, 0u);
    EXPECT_EQ(r.outer[0].weight, 2u);
    nlohmann::json j = r;
    EXPECT_EQ(j.get<RingModel>(), r);
}
