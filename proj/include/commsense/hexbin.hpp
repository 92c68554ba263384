#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/pipeline.hpp"
#include "commsense/projection.hpp"

namespace commsense {

// One hexagonal bin. Top-level cells use the caller's cell size; cells that
// overflow are re-binned on a grid of half the size (level + 1). At the depth
// limit, members still over capacity are dealt into sibling bins that share
// (level, q, r) and differ by `slot`.
struct HexBin {
    std::string bin_id;
    int level = 0;
    long q = 0;
    long r = 0;
    int slot = 0;
    double cx = 0.0;  // centre of the cell in projection space
    double cy = 0.0;
    std::vector<std::size_t> comments;  // corpus indices, ascending

    bool operator==(const HexBin&) const = default;
};

void to_json(nlohmann::json& j, const HexBin& b);
void from_json(const nlohmann::json& j, HexBin& b);

struct HexbinParams {
    std::size_t capacity = 15;
    double cell_size = 0.1;
    int max_depth = 6;
};

struct Axial {
    long q = 0;
    long r = 0;
    bool operator==(const Axial&) const = default;
};

// Pointy-top axial cell containing (x, y) for hexagons of circumradius `size`.
Axial hex_cell(double x, double y, double size);

// Bins partition the points; every bin holds 1..capacity members; output is
// a pure function of (points, params). Throws InvalidArgument for
// capacity == 0 or cell_size <= 0.
std::vector<HexBin> build_hexbins(std::span<const Point2D> points, const HexbinParams& params = {});

struct OuterArc {
    std::string topic_id;
    std::string label;
    std::size_t weight = 0;  // distinct comments matching any keyword of the topic

    bool operator==(const OuterArc&) const = default;
};

struct InnerArc {
    std::string keyword;
    std::string topic_id;
    std::size_t weight = 0;  // distinct comments matching the keyword

    bool operator==(const InnerArc&) const = default;
};

struct RingModel {
    std::vector<OuterArc> outer;
    std::vector<InnerArc> inner;  // grouped by parent, in topic order

    bool operator==(const RingModel&) const = default;
};

void to_json(nlohmann::json& j, const RingModel& r);
void from_json(const nlohmann::json& j, RingModel& r);

RingModel build_rings(const TopicScheme& scheme, const SpanIndex& spans);

} // namespace commsense
