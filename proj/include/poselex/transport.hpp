#pragma once

#include <cstddef>
#include <vector>

#include "poselex/lexicon.hpp"

namespace poselex {

/// Symmetric, zero-diagonal distance matrix over a lexicon's terms.
class GroundDistance {
public:
    GroundDistance(LexiconPtr lexicon, std::vector<std::vector<double>> matrix);

    const LexiconPtr& lexicon() const { return lexicon_; }
    const std::vector<std::vector<double>>& matrix() const { return matrix_; }
    double at(std::size_t i, std::size_t j) const { return matrix_[i][j]; }
    std::size_t size() const { return matrix_.size(); }

private:
    LexiconPtr lexicon_;
    std::vector<std::vector<double>> matrix_;
};

struct TriangleViolation {
    std::size_t i, j, k;  // d(i,k) > d(i,j) + d(j,k) + tol
    double excess;
};

/// Loaded matrices may legitimately break the triangle inequality; violations
/// are diagnostics, not errors.
std::vector<TriangleViolation> triangle_violations(const GroundDistance& ground,
                                                   double tol = 1e-9);

/// Ground distance over the 24 modal-posture terms.
///
/// Each modal term is an (arm, forearm) combination; the distance is the sum
/// of a per-part contribution graded by adjacency hops:
///   arm part:     0, shoulder_min, or stretch * shoulder_min (2 hops)
///   forearm part: 0, elbow_min,    or stretch * elbow_min    (2 hops)
/// with stretch = max_dist / (shoulder_min + elbow_min) chosen so the global
/// maximum lands exactly on max_dist while one-hop distances stay pinned at
/// shoulder_min / elbow_min. Requires
///   shoulder_min + elbow_min <= max_dist <= 2 * (shoulder_min + elbow_min)
/// so the result stays a metric with the one-hop grades as minima.
GroundDistance build_modal_ground_distance(double max_dist = 3.0,
                                           double shoulder_min = 1.0,
                                           double elbow_min = 0.5);

struct Flow {
    std::size_t source;  // term index in a's lexicon
    std::size_t target;  // term index in b's lexicon
    double amount;
};

struct TransportPlan {
    std::vector<Flow> flows;
    double total_cost = 0.0;
};

/// Minimum cost of moving mass distribution a onto b under the ground costs,
/// solved exactly as a balanced transportation problem.
double transport_distance(const MassVector& a, const MassVector& b,
                          const GroundDistance& ground);

/// The optimal flow itself; its total_cost matches transport_distance and its
/// marginals match a and b.
TransportPlan transport_plan(const MassVector& a, const MassVector& b,
                             const GroundDistance& ground);

}  // namespace poselex
