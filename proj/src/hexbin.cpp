#include "commsense/hexbin.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "commsense/error.hpp"

namespace commsense {

using json = nlohmann::json;

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void bin_recursive(std::span<const Point2D> points, std::vector<std::size_t> members, int level,
                   double size, const HexbinParams& params, std::vector<HexBin>& out) {
    std::map<std::pair<long, long>, std::vector<std::size_t>> cells;
    for (auto m : members) {
        const auto cell = hex_cell(points[m].x, points[m].y, size);
        cells[{cell.q, cell.r}].push_back(m);
    }
    for (auto& [key, cell_members] : cells) {
        if (cell_members.size() > params.capacity && level < params.max_depth) {
            bin_recursive(points, std::move(cell_members), level + 1, size / 2.0, params, out);
            continue;
        }
        const auto [q, r] = key;
        const double cx = size * (kSqrt3 * static_cast<double>(q) + kSqrt3 / 2.0 * static_cast<double>(r));
        const double cy = size * 1.5 * static_cast<double>(r);
        int slot = 0;
        for (std::size_t begin = 0; begin < cell_members.size(); begin += params.capacity, ++slot) {
            const auto end = std::min(cell_members.size(), begin + params.capacity);
            HexBin bin;
            bin.level = level;
            bin.q = q;
            bin.r = r;
            bin.slot = slot;
            bin.cx = cx;
            bin.cy = cy;
            for (auto i = begin; i < end; ++i) bin.comments.push_back(points[cell_members[i]].comment);
            out.push_back(std::move(bin));
        }
    }
}

} // namespace

Axial hex_cell(double x, double y, double size) {
    const double qf = (kSqrt3 / 3.0 * x - y / 3.0) / size;
    const double rf = (2.0 / 3.0 * y) / size;
    const double sf = -qf - rf;
    double q = std::round(qf), r = std::round(rf), s = std::round(sf);
    const double dq = std::abs(q - qf), dr = std::abs(r - rf), ds = std::abs(s - sf);
    if (dq > dr && dq > ds) {
        q = -r - s;
    } else if (dr > ds) {
        r = -q - s;
    }
    return {static_cast<long>(q), static_cast<long>(r)};
}

std::vector<HexBin> build_hexbins(std::span<const Point2D> points, const HexbinParams& params) {
    if (params.capacity == 0) throw InvalidArgument("bin capacity must be at least 1");
    if (!(params.cell_size > 0.0)) throw InvalidArgument("cell size must be positive");
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidArgument("non-finite point");
    }

    // Members are positions into `points`, kept in comment order so the
    // overflow deal is canonical.
    std::vector<std::size_t> members(points.size());
    for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        return points[a].comment < points[b].comment;
    });

    std::vector<HexBin> bins;
    bin_recursive(points, std::move(members), 0, params.cell_size, params, bins);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        std::sort(bins[i].comments.begin(), bins[i].comments.end());
        bins[i].bin_id = "b" + std::to_string(i);
    }
    return bins;
}

void to_json(json& j, const HexBin& b) {
    j = json{{"bin_id", b.bin_id}, {"level", b.level}, {"q", b.q}, {"r", b.r}, {"slot", b.slot},
             {"cx", b.cx},         {"cy", b.cy},       {"comments", b.comments}};
}

void from_json(const json& j, HexBin& b) {
    b.bin_id = j.at("bin_id").get<std::string>();
    b.level = j.at("level").get<int>();
    b.q = j.at("q").get<long>();
    b.r = j.at("r").get<long>();
    b.slot = j.at("slot").get<int>();
    b.cx = j.at("cx").get<double>();
    b.cy = j.at("cy").get<double>();
    b.comments = j.at("comments").get<std::vector<std::size_t>>();
}

RingModel build_rings(const TopicScheme& scheme, const SpanIndex& spans) {
    RingModel rings;
    for (const auto& topic : scheme.topics) {
        std::set<std::size_t> topic_docs;
        for (const auto& kw : topic.keywords) {
            std::set<std::size_t> docs;
            if (auto it = spans.find(kw); it != spans.end()) {
                for (const auto& s : it->second) docs.insert(s.comment);
            }
            topic_docs.insert(docs.begin(), docs.end());
            rings.inner.push_back({kw, topic.topic_id, docs.size()});
        }
        rings.outer.push_back({topic.topic_id, topic.category, topic_docs.size()});
    }
    return rings;
}

void to_json(json& j, const RingModel& r) {
    j = json{{"outer", json::array()}, {"inner", json::array()}};
    for (const auto& a : r.outer) {
        j["outer"].push_back({{"topic_id", a.topic_id}, {"label", a.label}, {"weight", a.weight}});
    }
    for (const auto& a : r.inner) {
        j["inner"].push_back({{"keyword", a.keyword}, {"topic_id", a.topic_id}, {"weight", a.weight}});
    }
}

void from_json(const json& j, RingModel& r) {
    r.outer.clear();
    r.inner.clear();
    for (const auto& a : j.at("outer")) {
        r.outer.push_back({a.at("topic_id").get<std::string>(), a.at("label").get<std::string>(),
                           a.at("weight").get<std::size_t>()});
    }
    for (const auto& a : j.at("inner")) {
        r.inner.push_back({a.at("keyword").get<std::string>(), a.at("topic_id").get<std::string>(),
                           a.at("weight").get<std::size_t>()});
    }
}

} // namespace commsense
