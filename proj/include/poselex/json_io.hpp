#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "poselex/decision.hpp"
#include "poselex/lexicon.hpp"
#include "poselex/posture.hpp"
#include "poselex/transport.hpp"

namespace poselex::io {

using nlohmann::json;

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& value);

/// {"lexicon": [terms...], "modal_angles": {term: degrees}, "circular": bool}
FuzzyPartition partition_from_json(const json& j, const std::string& name);
json partition_to_json(const FuzzyPartition& partition);

/// {"rows": [...], "cols": [...], "cells": {"row,col": "out"}, "out": [...]?}
/// When "out" is omitted the output lexicon is inferred from the cell values
/// in row-major first-appearance order.
RuleTable rule_table_from_json(const json& j, const std::string& name);
json rule_table_to_json(const RuleTable& table);

/// {"lexicon": [...], "matrix": [[...]]}
GroundDistance ground_from_json(const json& j);
json ground_to_json(const GroundDistance& ground);

/// Array of {"name", "masses", "tolerance", "action_class", "action_id"};
/// masses are listed in the given lexicon's term order.
std::vector<ReferencePosture> store_from_json(const json& j, const LexiconPtr& lexicon);
json store_to_json(const std::vector<ReferencePosture>& refs);

struct SkeletonFrame {
    std::int64_t frame = 0;
    Skeleton skeleton;
};

/// {"frame": n, "joints": {"right_shoulder": [x,y,z], ...}} (one JSON line)
SkeletonFrame skeleton_frame_from_json(const json& j);
json skeleton_frame_to_json(const SkeletonFrame& frame);

/// {"strategy": ..., "tie_break": ..., "max_distance": number|null}
DecisionConfig decision_config_from_json(const json& j);
json decision_config_to_json(const DecisionConfig& config);

json mass_vector_to_json(const MassVector& mv);
json outcome_to_json(const DecisionOutcome& outcome);

/// Full model configuration document. Every key is optional and falls back to
/// the built-in defaults:
///   {"partitions": {"a_theta", "a_psi", "f_theta", "f_psi"},
///    "tables": {"arm", "forearm", "modal"},
///    "ground": {"max_dist", "shoulder_min", "elbow_min"},
///    "decision": {...}}
struct ModelConfig {
    PostureModel model;
    GroundDistance ground;
    DecisionConfig decision;
};

ModelConfig model_config_from_json(const json& j);
ModelConfig default_model_config();

}  // namespace poselex::io
