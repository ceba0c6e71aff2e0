#include "poselex/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace poselex::io {

namespace {

const json& require_key(const json& j, const char* key, const std::string& what) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw std::invalid_argument(what + " is missing key '" + key + "'");
    }
    return *it;
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
    if (!j.is_array()) throw std::invalid_argument(what + " must be an array");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

void write_json_file(const std::string& path, const json& value) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << value.dump(2) << '\n';
}

FuzzyPartition partition_from_json(const json& j, const std::string& name) {
    auto terms = string_list(require_key(j, "lexicon", "partition '" + name + "'"),
                             "partition lexicon");
    const json& angles = require_key(j, "modal_angles", "partition '" + name + "'");
    std::vector<double> modal;
    modal.reserve(terms.size());
    for (const auto& term : terms) {
        auto it = angles.find(term);
        if (it == angles.end()) {
            throw std::invalid_argument("partition '" + name +
                                        "' has no modal angle for term '" + term + "'");
        }
        modal.push_back(it->get<double>());
    }
    if (angles.size() != terms.size()) {
        throw std::invalid_argument("partition '" + name +
                                    "' lists modal angles for unknown terms");
    }
    bool circular = j.value("circular", false);
    return FuzzyPartition(make_lexicon(name, std::move(terms)), std::move(modal),
                          circular);
}

json partition_to_json(const FuzzyPartition& partition) {
    json angles = json::object();
    for (std::size_t i = 0; i < partition.lexicon()->size(); ++i) {
        angles[partition.lexicon()->term(i)] = partition.modal_angles()[i];
    }
    return json{{"lexicon", partition.lexicon()->terms()},
                {"modal_angles", angles},
                {"circular", partition.circular()}};
}

RuleTable rule_table_from_json(const json& j, const std::string& name) {
    auto rows = string_list(require_key(j, "rows", "rule table '" + name + "'"),
                            "rule table rows");
    auto cols = string_list(require_key(j, "cols", "rule table '" + name + "'"),
                            "rule table cols");
    const json& cells = require_key(j, "cells", "rule table '" + name + "'");

    auto row_lex = make_lexicon(name + "_rows", rows);
    auto col_lex = make_lexicon(name + "_cols", cols);

    std::vector<std::string> cell_terms(rows.size() * cols.size());
    std::vector<bool> seen(cell_terms.size(), false);
    for (const auto& [key, value] : cells.items()) {
        auto comma = key.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("rule table '" + name + "' cell key '" + key +
                                        "' is not 'row,col'");
        }
        std::size_t r = row_lex->index_of(key.substr(0, comma));
        std::size_t c = col_lex->index_of(key.substr(comma + 1));
        std::size_t idx = r * cols.size() + c;
        cell_terms[idx] = value.get<std::string>();
        seen[idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw std::invalid_argument("rule table '" + name + "' has no cell for (" +
                                        rows[i / cols.size()] + ", " +
                                        cols[i % cols.size()] + ")");
        }
    }

    LexiconPtr out_lex;
    if (j.contains("out")) {
        out_lex = make_lexicon(name + "_out", string_list(j["out"], "rule table out"));
    } else {
        std::vector<std::string> out_terms;
        for (const auto& t : cell_terms) {
            if (std::find(out_terms.begin(), out_terms.end(), t) == out_terms.end()) {
                out_terms.push_back(t);
            }
        }
        out_lex = make_lexicon(name + "_out", std::move(out_terms));
    }

    std::vector<std::size_t> cell_indices;
    cell_indices.reserve(cell_terms.size());
    for (const auto& t : cell_terms) cell_indices.push_back(out_lex->index_of(t));
    return RuleTable(std::move(row_lex), std::move(col_lex), std::move(out_lex),
                     std::move(cell_indices));
}

json rule_table_to_json(const RuleTable& table) {
    json cells = json::object();
    for (std::size_t r = 0; r < table.rows()->size(); ++r) {
        for (std::size_t c = 0; c < table.cols()->size(); ++c) {
            cells[table.rows()->term(r) + "," + table.cols()->term(c)] =
                table.cell_term(r, c);
        }
    }
    return json{{"rows", table.rows()->terms()},
                {"cols", table.cols()->terms()},
                {"out", table.out()->terms()},
                {"cells", cells}};
}

GroundDistance ground_from_json(const json& j) {
    auto terms = string_list(require_key(j, "lexicon", "ground file"), "ground lexicon");
    const json& matrix_json = require_key(j, "matrix", "ground file");
    if (!matrix_json.is_array()) {
        throw std::invalid_argument("ground matrix must be an array of rows");
    }
    std::vector<std::vector<double>> matrix;
    matrix.reserve(matrix_json.size());
    for (const auto& row : matrix_json) {
        matrix.push_back(row.get<std::vector<double>>());
    }
    return GroundDistance(make_lexicon("ground", std::move(terms)), std::move(matrix));
}

json ground_to_json(const GroundDistance& ground) {
    return json{{"lexicon", ground.lexicon()->terms()}, {"matrix", ground.matrix()}};
}

std::vector<ReferencePosture> store_from_json(const json& j,
                                              const LexiconPtr& lexicon) {
    if (!j.is_array()) {
        throw std::invalid_argument("reference store must be a JSON array");
    }
    std::vector<ReferencePosture> refs;
    refs.reserve(j.size());
    for (const auto& entry : j) {
        ReferencePosture ref{
            require_key(entry, "name", "store entry").get<std::string>(),
            MassVector(lexicon,
                       require_key(entry, "masses", "store entry")
                           .get<std::vector<double>>()),
            require_key(entry, "tolerance", "store entry").get<double>(),
            action_class_from_string(
                require_key(entry, "action_class", "store entry").get<std::string>()),
            require_key(entry, "action_id", "store entry").get<std::string>()};
        if (!(ref.tolerance >= 0.0)) {
            throw std::invalid_argument("reference '" + ref.name +
                                        "' has a negative tolerance");
        }
        for (const auto& other : refs) {
            if (other.name == ref.name) {
                throw std::invalid_argument("reference store repeats name '" +
                                            ref.name + "'");
            }
        }
        refs.push_back(std::move(ref));
    }
    return refs;
}

json store_to_json(const std::vector<ReferencePosture>& refs) {
    json out = json::array();
    for (const auto& ref : refs) {
        out.push_back(json{{"name", ref.name},
                           {"masses", ref.lfs.masses()},
                           {"tolerance", ref.tolerance},
                           {"action_class", std::string(to_string(ref.action_class))},
                           {"action_id", ref.action_id}});
    }
    return out;
}

SkeletonFrame skeleton_frame_from_json(const json& j) {
    SkeletonFrame out;
    out.frame = require_key(j, "frame", "skeleton frame").get<std::int64_t>();
    const json& joints = require_key(j, "joints", "skeleton frame");
    for (const auto& [name, pos] : joints.items()) {
        if (!pos.is_array() || pos.size() != 3) {
            throw std::invalid_argument("joint '" + name + "' must be [x, y, z]");
        }
        out.skeleton.joints[name] =
            Vec3{pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
    }
    return out;
}

json skeleton_frame_to_json(const SkeletonFrame& frame) {
    json joints = json::object();
    for (const auto& [name, p] : frame.skeleton.joints) {
        joints[name] = json::array({p.x, p.y, p.z});
    }
    return json{{"frame", frame.frame}, {"joints", joints}};
}

DecisionConfig decision_config_from_json(const json& j) {
    DecisionConfig config;
    if (j.contains("strategy")) {
        config.strategy = strategy_from_string(j["strategy"].get<std::string>());
    }
    if (j.contains("tie_break")) {
        config.tie_break = tie_break_from_string(j["tie_break"].get<std::string>());
    }
    if (j.contains("max_distance") && !j["max_distance"].is_null()) {
        config.max_distance = j["max_distance"].get<double>();
        if (!(*config.max_distance >= 0.0)) {
            throw std::invalid_argument("max_distance must be nonnegative");
        }
    }
    return config;
}

json decision_config_to_json(const DecisionConfig& config) {
    json j{{"strategy", std::string(to_string(config.strategy))},
           {"tie_break", std::string(to_string(config.tie_break))}};
    if (config.max_distance) j["max_distance"] = *config.max_distance;
    return j;
}

json mass_vector_to_json(const MassVector& mv) { return json(mv.masses()); }

json outcome_to_json(const DecisionOutcome& outcome) {
    json j{{"recognized", outcome.recognized},
           {"distances", outcome.distances},
           {"rationale", std::string(to_string(outcome.rationale))}};
    j["action"] = outcome.chosen_action ? json(*outcome.chosen_action) : json(nullptr);
    return j;
}

ModelConfig default_model_config() {
    return ModelConfig{PostureModel::defaults(), build_modal_ground_distance(),
                       DecisionConfig{}};
}

ModelConfig model_config_from_json(const json& j) {
    FuzzyPartition a_theta = default_a_theta_partition();
    FuzzyPartition a_psi = default_a_psi_partition();
    FuzzyPartition f_theta = default_f_theta_partition();
    FuzzyPartition f_psi = default_f_psi_partition();
    if (j.contains("partitions")) {
        const json& p = j["partitions"];
        if (p.contains("a_theta")) a_theta = partition_from_json(p["a_theta"], "a_theta");
        if (p.contains("a_psi")) a_psi = partition_from_json(p["a_psi"], "a_psi");
        if (p.contains("f_theta")) f_theta = partition_from_json(p["f_theta"], "f_theta");
        if (p.contains("f_psi")) f_psi = partition_from_json(p["f_psi"], "f_psi");
    }

    RuleTable arm = default_arm_table();
    RuleTable forearm = default_forearm_table();
    RuleTable modal = default_modal_table();
    if (j.contains("tables")) {
        const json& t = j["tables"];
        if (t.contains("arm")) arm = rule_table_from_json(t["arm"], "arm");
        if (t.contains("forearm")) forearm = rule_table_from_json(t["forearm"], "forearm");
        if (t.contains("modal")) modal = rule_table_from_json(t["modal"], "modal");
    }

    double max_dist = 3.0, shoulder_min = 1.0, elbow_min = 0.5;
    if (j.contains("ground")) {
        const json& g = j["ground"];
        max_dist = g.value("max_dist", max_dist);
        shoulder_min = g.value("shoulder_min", shoulder_min);
        elbow_min = g.value("elbow_min", elbow_min);
    }

    DecisionConfig decision;
    if (j.contains("decision")) decision = decision_config_from_json(j["decision"]);

    PostureModel model(std::move(a_theta), std::move(a_psi), std::move(f_theta),
                       std::move(f_psi), std::move(arm), std::move(forearm),
                       std::move(modal));
    return ModelConfig{std::move(model),
                       build_modal_ground_distance(max_dist, shoulder_min, elbow_min),
                       decision};
}

}  // namespace poselex::io
