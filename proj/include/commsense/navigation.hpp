#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "commsense/workspace.hpp"

namespace commsense {

// Two semantically similar comments of opposite polarity; `first` is the one
// that comes earlier in corpus order.
struct ContrastPair {
    std::size_t first = 0;
    std::size_t second = 0;
    double similarity = 0.0;

    bool operator==(const ContrastPair&) const = default;
};

struct CommentStream {
    std::string topic_id;
    std::vector<std::size_t> comments;
    std::optional<ContrastPair> pair;
};

// Highest-cosine (positive, negative) pair among `candidates`; ties go to the
// pair whose (earlier, later) corpus indices compare lowest.
std::optional<ContrastPair> find_contrast_pair(const Workspace& ws, std::span<const std::size_t> candidates);
// Throws NotFound for an unknown topic.
std::optional<ContrastPair> find_contrast_pair(const Workspace& ws, std::string_view topic_id);

// Contrast pair first, then polarity alternation (each polarity drawn by
// descending keyword-match count, then corpus order) with a neutral comment
// in every third slot while neutrals remain.
CommentStream order_topic_comments(const Workspace& ws, std::string_view topic_id);

// Unviewed comment of the opposite polarity most similar to `anchor`, drawn
// from `scope` (whole corpus when empty). Neutral anchors have no opposite.
// Throws NotFound for an unknown anchor index.
std::optional<std::size_t> recommend_opposite(const Workspace& ws, const std::unordered_set<std::size_t>& viewed,
                                              std::size_t anchor,
                                              std::optional<std::span<const std::size_t>> scope = std::nullopt);

std::vector<std::size_t> filter_by_selection(const Workspace& ws, const Selection& selection);

} // namespace commsense
