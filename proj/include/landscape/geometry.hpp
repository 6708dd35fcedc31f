#pragma once

#include <vector>

#include "landscape/net.hpp"
#include "landscape/rng.hpp"

namespace landscape {

// Weighted pool-adjacent-violators fit; the exact Euclidean projection onto
// the monotone (nondecreasing or nonincreasing) cone.
std::vector<double> isotonic_fit(const std::vector<double>& y, bool nonincreasing = false);

bool is_monotone(const std::vector<double>& v, double tol = 1e-12);

struct MonotoneProjection {
    double distance_sq = 0.0;
    // projections achieving the distance; two entries when both orientations tie
    std::vector<std::vector<double>> minimizers;
};

// Exact distance from u to the set of monotone vectors (either orientation).
MonotoneProjection monotone_distance(const std::vector<double>& u);

struct ImageCloud {
    std::vector<std::vector<double>> rows; // one prediction vector per draw
};

// Prediction vectors psi(alpha, x_1..x_n) for alpha with entries drawn
// uniformly: weights from [w_lo, w_hi], biases from [b_lo, b_hi].
ImageCloud sample_image(const Architecture& arch, const FiniteMeasure& mu, int draws,
                        double w_lo, double w_hi, double b_lo, double b_hi, std::uint64_t seed,
                        int threads = 1);

struct ProjectionResult {
    double distance_sq = 0.0;
    // distinct near-optimal prediction vectors, best first
    std::vector<std::vector<double>> minimizers;
    std::vector<int> cluster_counts;
    int restarts = 0;
    bool oracle_used = false;    // one-unit monotone architecture cross-check
    double oracle_distance_sq = 0.0;
};

// Multistart projection of u onto the image of the architecture over the
// support; collects all distinct minimizing prediction vectors.
ProjectionResult project_multistart(const Architecture& arch, const FiniteMeasure& mu,
                                    const std::vector<double>& u, int restarts,
                                    std::uint64_t seed, int threads = 1);

struct ScanPoint {
    double t = 0.0;
    std::vector<double> target;
    double distance_sq = 0.0;
    std::vector<double> minimizer;
};

struct ScanJump {
    int index = 0;      // jump between points index and index+1
    double size = 0.0;  // Euclidean distance between the minimizers
};

struct ScanResult {
    std::vector<ScanPoint> points;
    std::vector<ScanJump> jumps;
};

// Projects every target along a parameterized path and flags steps where the
// minimizer moves by at least 0.1 while the path step is at most 1e-2: the
// signature of a set-valued projection tie being crossed.
ScanResult discontinuity_scan(const Architecture& arch, const FiniteMeasure& mu,
                              const std::vector<std::vector<double>>& waypoints,
                              int points_per_segment, int restarts, std::uint64_t seed,
                              int threads = 1);

struct NonconvexityCertificate {
    std::vector<double> z1, z2, midpoint;
    double midpoint_distance_sq = 0.0;
    bool certified = false; // true when the exact monotone oracle was used
};

// Finds two realizable prediction vectors whose midpoint is far from the
// image: direct evidence the image is not convex.
NonconvexityCertificate nonconvexity_certificate(const Architecture& arch,
                                                 const FiniteMeasure& mu, const ImageCloud& cloud,
                                                 int pairs, int restarts, std::uint64_t seed,
                                                 int threads = 1);

// True when every hidden layer has width 1 and every activation is
// nondecreasing; then the realizable prediction vectors are monotone and the
// isotonic oracle applies.
bool monotone_one_unit(const Architecture& arch);

} // namespace landscape
