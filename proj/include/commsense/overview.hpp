#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/hexbin.hpp"
#include "commsense/session.hpp"

namespace commsense {

struct BinView {
    std::string bin_id;
    int level = 0;
    long q = 0;
    long r = 0;
    int slot = 0;
    double cx = 0.0;
    double cy = 0.0;
    std::vector<std::string> comment_ids;  // restricted to the selection
    std::size_t positive = 0;
    std::size_t neutral = 0;
    std::size_t negative = 0;
    double mask_fraction = 0.0;  // viewed / size

    std::size_t size() const noexcept { return comment_ids.size(); }
    bool operator==(const BinView&) const = default;
};

struct OverviewSnapshot {
    Selection selection;
    std::vector<BinView> bins;  // bins with no selected member are omitted
    RingModel rings;
    Progress progress;
    std::uint64_t seq = 0;

    bool operator==(const OverviewSnapshot&) const = default;
};

void to_json(nlohmann::json& j, const BinView& b);
void to_json(nlohmann::json& j, const OverviewSnapshot& s);

// Throws NotFound for an unknown topic or keyword.
OverviewSnapshot overview_state(const Session& session, const Selection& selection = Selection::all());

} // namespace commsense
