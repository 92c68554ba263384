#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "commsense/pipeline.hpp"

namespace commsense {

struct Point2D {
    std::size_t comment = 0;  // corpus index
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2D&) const = default;
};

enum class ProjectionMethod { linear, tsne };

std::string_view to_string(ProjectionMethod m) noexcept;
ProjectionMethod parse_projection_method(std::string_view name);

// Linear fallback: the two leading principal components of the centred
// embeddings, signs fixed so each component's largest-magnitude loading is
// positive, then uniformly scaled so the largest |coordinate| is 1.
// Seed-independent. Throws InvalidArgument when dim < 2 or there are no rows.
std::vector<Point2D> project_linear(const EmbeddingMatrix& embeddings);

// Exact t-SNE initialised from the linear projection plus seeded jitter;
// output centred and scaled like the linear method. Falls back to the
// linear projection for fewer than 4 points.
std::vector<Point2D> project_tsne(const EmbeddingMatrix& embeddings, std::uint64_t seed,
                                  double perplexity = 30.0, int iterations = 500);

std::vector<Point2D> project_2d(const EmbeddingMatrix& embeddings, ProjectionMethod method,
                                std::uint64_t seed);

} // namespace commsense
