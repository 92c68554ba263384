#include "commsense/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "commsense/error.hpp"

namespace commsense {

std::string_view to_string(ProjectionMethod m) noexcept {
    return m == ProjectionMethod::tsne ? "tsne" : "linear";
}

ProjectionMethod parse_projection_method(std::string_view name) {
    if (name == "linear") return ProjectionMethod::linear;
    if (name == "tsne") return ProjectionMethod::tsne;
    throw InvalidArgument("unknown projection method '" + std::string(name) + "'");
}

namespace {

void center_and_scale(std::vector<Point2D>& pts) {
    if (pts.empty()) return;
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double extent = 0.0;
    for (auto& p : pts) {
        p.x -= mx;
        p.y -= my;
        extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    }
    // Tiny extents are numerical noise around coincident points.
    if (extent < 1e-12) {
        for (auto& p : pts) p.x = p.y = 0.0;
        return;
    }
    for (auto& p : pts) {
        p.x /= extent;
        p.y /= extent;
    }
}

} // namespace

std::vector<Point2D> project_linear(const EmbeddingMatrix& embeddings) {
    const auto n = static_cast<Eigen::Index>(embeddings.size());
    const auto d = static_cast<Eigen::Index>(embeddings.dim);
    if (n == 0) throw InvalidArgument("projection needs at least one vector");
    if (d < 2) throw InvalidArgument("linear projection needs embedding dimension >= 2");

    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = embeddings.row(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    // Eigenvalues ascend; the last two columns are the leading components.
    Eigen::MatrixXd comps(d, 2);
    comps.col(0) = solver.eigenvectors().col(d - 1);
    comps.col(1) = solver.eigenvectors().col(d - 2);
    for (int c = 0; c < 2; ++c) {
        Eigen::Index arg = 0;
        for (Eigen::Index j = 1; j < d; ++j) {
            if (std::abs(comps(j, c)) > std::abs(comps(arg, c)) + 1e-12) arg = j;
        }
        if (comps(arg, c) < 0) comps.col(c) *= -1.0;
    }
    const Eigen::MatrixXd y = x * comps;

    std::vector<Point2D> pts(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        pts[static_cast<std::size_t>(i)] = {static_cast<std::size_t>(i), y(i, 0), y(i, 1)};
    }
    center_and_scale(pts);
    return pts;
}

std::vector<Point2D> project_tsne(const EmbeddingMatrix& embeddings, std::uint64_t seed,
                                  double perplexity, int iterations) {
    auto init = project_linear(embeddings);
    const std::size_t n = init.size();
    if (n < 4) return init;

    perplexity = std::min(perplexity, (static_cast<double>(n) - 1.0) / 3.0);
    const double target_entropy = std::log(perplexity);

    // Squared distances in embedding space.
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = embeddings.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto b = embeddings.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double diff = a[k] - b[k];
                s += diff * diff;
            }
            dist[i * n + j] = dist[j * n + i] = s;
        }
    }

    // Conditional affinities with per-point bandwidth found by bisection.
    std::vector<double> p(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
        for (int step = 0; step < 64; ++step) {
            double sum = 0.0, weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double v = std::exp(-dist[i * n + j] * beta);
                p[i * n + j] = v;
                sum += v;
                weighted += v * dist[i * n + j];
            }
            if (sum <= 0.0) {
                beta /= 2.0;
                hi = beta * 2.0;
                continue;
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            for (std::size_t j = 0; j < n; ++j) p[i * n + j] /= sum;
            const double diff = entropy - target_entropy;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::max((p[i * n + j] + p[j * n + i]) / (2.0 * static_cast<double>(n)), 1e-12);
            p[i * n + j] = p[j * n + i] = v;
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 1e-4);
    std::vector<double> y(2 * n), gains(2 * n, 1.0), update(2 * n, 0.0), grad(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        y[2 * i] = init[i].x * 1e-2 + jitter(rng);
        y[2 * i + 1] = init[i].y * 1e-2 + jitter(rng);
    }

    const double learning_rate = std::max(static_cast<double>(n) / 12.0, 50.0);
    std::vector<double> q(n * n);
    for (int it = 0; it < iterations; ++it) {
        const double exaggeration = it < 100 ? 12.0 : 1.0;
        const double momentum = it < 100 ? 0.5 : 0.8;

        double qsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[2 * i] - y[2 * j];
                const double dy = y[2 * i + 1] - y[2 * j + 1];
                const double v = 1.0 / (1.0 + dx * dx + dy * dy);
                q[i * n + j] = q[j * n + i] = v;
                qsum += 2.0 * v;
            }
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double w = q[i * n + j];
                const double mult = (exaggeration * p[i * n + j] - w / qsum) * w;
                grad[2 * i] += 4.0 * mult * (y[2 * i] - y[2 * j]);
                grad[2 * i + 1] += 4.0 * mult * (y[2 * i + 1] - y[2 * j + 1]);
            }
        }
        for (std::size_t k = 0; k < 2 * n; ++k) {
            const bool same_sign = (grad[k] > 0) == (update[k] > 0);
            gains[k] = same_sign ? std::max(gains[k] * 0.8, 0.01) : gains[k] + 0.2;
            update[k] = momentum * update[k] - learning_rate * gains[k] * grad[k];
            y[k] += update[k];
        }
    }

    std::vector<Point2D> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {i, y[2 * i], y[2 * i + 1]};
    center_and_scale(pts);
    return pts;
}

std::vector<Point2D> project_2d(const EmbeddingMatrix& embeddings, ProjectionMethod method,
                                std::uint64_t seed) {
    return method == ProjectionMethod::tsne ? project_tsne(embeddings, seed) : project_linear(embeddings);
}

} // namespace commsense
