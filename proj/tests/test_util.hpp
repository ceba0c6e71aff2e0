#pragma once

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "poselex/lexicon.hpp"
#include "poselex/posture.hpp"
#include "poselex/transport.hpp"

namespace testutil {

inline poselex::LexiconPtr tiny_lexicon(std::size_t n) {
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < n; ++i) terms.push_back("t" + std::to_string(i));
    return poselex::make_lexicon("tiny", std::move(terms));
}

/// Strictly positive random masses, normalized by the MassVector constructor.
inline poselex::MassVector random_masses(std::mt19937& rng,
                                         const poselex::LexiconPtr& lexicon) {
    std::exponential_distribution<double> exp(1.0);
    std::vector<double> m(lexicon->size());
    for (double& v : m) v = exp(rng) + 1e-12;
    return poselex::MassVector(lexicon, std::move(m));
}

/// Random masses where roughly half the terms carry nothing.
inline poselex::MassVector random_sparse_masses(std::mt19937& rng,
                                                const poselex::LexiconPtr& lexicon) {
    std::exponential_distribution<double> exp(1.0);
    std::bernoulli_distribution keep(0.5);
    std::vector<double> m(lexicon->size(), 0.0);
    bool any = false;
    for (double& v : m) {
        if (keep(rng)) {
            v = exp(rng) + 1e-12;
            any = true;
        }
    }
    if (!any) m[0] = 1.0;
    return poselex::MassVector(lexicon, std::move(m));
}

/// Euclidean distances between random points: a genuine metric.
inline poselex::GroundDistance random_metric_ground(std::mt19937& rng,
                                                    const poselex::LexiconPtr& lexicon) {
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::vector<std::array<double, 3>> pts(lexicon->size());
    for (auto& p : pts) p = {coord(rng), coord(rng), coord(rng)};
    std::vector<std::vector<double>> m(pts.size(), std::vector<double>(pts.size(), 0.0));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double dx = pts[i][0] - pts[j][0];
            double dy = pts[i][1] - pts[j][1];
            double dz = pts[i][2] - pts[j][2];
            double d = std::sqrt(dx * dx + dy * dy + dz * dz);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    return poselex::GroundDistance(lexicon, std::move(m));
}

// Canonical test body: up = +Y, left->right = +X, facing +Z.
inline poselex::Skeleton base_skeleton() {
    poselex::Skeleton s;
    s.joints["torso"] = {0.0, 0.0, 0.0};
    s.joints["left_shoulder"] = {-0.15, 0.5, 0.0};
    s.joints["right_shoulder"] = {0.15, 0.5, 0.0};
    s.joints["right_elbow"] = {0.15, 0.2, 0.0};   // arm down by default
    s.joints["right_wrist"] = {0.15, -0.05, 0.0};  // extended
    return s;
}

inline poselex::Skeleton skeleton_with_arm(const poselex::Vec3& arm_dir,
                                           const poselex::Vec3& forearm_dir,
                                           double arm_len = 0.3,
                                           double forearm_len = 0.25) {
    poselex::Skeleton s = base_skeleton();
    const poselex::Vec3 shoulder = s.joints["right_shoulder"];
    const poselex::Vec3 elbow = shoulder + poselex::normalized(arm_dir) * arm_len;
    s.joints["right_elbow"] = elbow;
    s.joints["right_wrist"] = elbow + poselex::normalized(forearm_dir) * forearm_len;
    return s;
}

inline poselex::Skeleton random_skeleton(std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> len(0.15, 0.35);
    auto random_dir = [&] {
        while (true) {
            poselex::Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
            if (poselex::norm(v) > 1e-3) return poselex::normalized(v);
        }
    };
    return skeleton_with_arm(random_dir(), random_dir(), len(rng), len(rng));
}

}  // namespace testutil
