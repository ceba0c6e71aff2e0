#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "poselex/json_io.hpp"

namespace {

using namespace poselex;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;      // file or parse failures
constexpr int kExitData = 2;    // frame/store validation failures
constexpr int kExitConfig = 3;  // bad model, ground or strategy configuration

struct InputStream {
    std::istream& stream() { return file.is_open() ? file : std::cin; }
    std::ifstream file;
};

InputStream open_input(const std::string& path) {
    InputStream in;
    if (path != "-") {
        in.file.open(path);
        if (!in.file) throw std::runtime_error("cannot open '" + path + "'");
    }
    return in;
}

io::ModelConfig load_model(const std::string& config_path,
                           const std::string& ground_path,
                           const std::string& strategy) {
    io::ModelConfig config = config_path.empty()
                                 ? io::default_model_config()
                                 : io::model_config_from_json(
                                       io::read_json_file(config_path));
    if (!ground_path.empty()) {
        config.ground = io::ground_from_json(io::read_json_file(ground_path));
    }
    if (!strategy.empty()) {
        config.decision.strategy = strategy_from_string(strategy);
    }
    if (!same_lexicon(config.ground.lexicon(), config.model.modal_lexicon())) {
        throw std::invalid_argument(
            "ground matrix lexicon does not match the model's modal lexicon");
    }
    return config;
}

struct FrameStats {
    std::size_t total = 0;
    std::size_t processed = 0;
    std::size_t skipped = 0;
};

/// Runs fn over every JSON line; returns the exit code (0 unless a bad frame
/// stops the run). Parse problems exit 1, data problems exit 2; with
/// skip_bad both are warnings.
int for_each_frame(std::istream& in, bool skip_bad,
                   const std::function<void(const io::SkeletonFrame&)>& fn,
                   FrameStats& stats) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++stats.total;

        io::SkeletonFrame frame;
        try {
            frame = io::skeleton_frame_from_json(json::parse(line));
        } catch (const std::exception& e) {
            // bad JSON or a structurally wrong frame document
            if (skip_bad) {
                std::cerr << "warning: skipping malformed frame at line " << line_no
                          << ": " << e.what() << '\n';
                ++stats.skipped;
                continue;
            }
            std::cerr << "error: malformed frame at line " << line_no << ": "
                      << e.what() << '\n';
            return kExitIo;
        }

        try {
            fn(frame);
            ++stats.processed;
        } catch (const std::exception& e) {
            if (skip_bad) {
                std::cerr << "warning: skipping frame " << frame.frame << " (line "
                          << line_no << "): " << e.what() << '\n';
                ++stats.skipped;
                continue;
            }
            std::cerr << "error: frame " << frame.frame << " (line " << line_no
                      << "): " << e.what() << '\n';
            return kExitData;
        }
    }
    return kExitOk;
}

json top_terms(const MassVector& mv, std::size_t k = 3) {
    std::vector<std::size_t> order(mv.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (mv.masses()[a] != mv.masses()[b]) return mv.masses()[a] > mv.masses()[b];
        return a < b;
    });
    json out = json::array();
    for (std::size_t i = 0; i < order.size() && out.size() < k; ++i) {
        if (mv.masses()[order[i]] <= 0.0) break;
        out.push_back(json{{"term", mv.lexicon()->term(order[i])},
                           {"mass", mv.masses()[order[i]]}});
    }
    return out;
}

std::string format_top_terms(const json& terms) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) os << ' ';
        os << terms[i]["term"].get<std::string>() << '('
           << terms[i]["mass"].get<double>() << ')';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// fuzzify: skeleton frames -> one modal LFS per line
// ---------------------------------------------------------------------------

struct FuzzifyArgs {
    std::string input = "-";
    std::string config_path;
    bool skip_bad = false;
};

int run_fuzzify(const FuzzifyArgs& args) {
    std::optional<io::ModelConfig> config;
    try {
        config.emplace(load_model(args.config_path, "", ""));
    } catch (const std::exception& e) {
        std::cerr << "error: configuration: " << e.what() << '\n';
        return kExitConfig;
    }

    InputStream in;
    try {
        in = open_input(args.input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }

    FrameStats stats;
    int rc = for_each_frame(
        in.stream(), args.skip_bad,
        [&](const io::SkeletonFrame& frame) {
            MassVector lfs = measure_posture(frame.skeleton, config->model);
            json out{{"frame", frame.frame}, {"masses", io::mass_vector_to_json(lfs)}};
            std::cout << out.dump() << '\n';
        },
        stats);
    return rc;
}

// ---------------------------------------------------------------------------
// learn: skeleton frames -> one reference posture appended to the store
// ---------------------------------------------------------------------------

struct LearnArgs {
    std::string input = "-";
    std::string config_path;
    std::string store_path;
    std::string name;
    double tolerance = 0.0;
    std::string action_class = "classical";
    std::string action_id;
    bool skip_bad = false;
};

int run_learn(const LearnArgs& args) {
    std::optional<io::ModelConfig> config;
    ActionClass action_class;
    try {
        config.emplace(load_model(args.config_path, "", ""));
        action_class = action_class_from_string(args.action_class);
    } catch (const std::exception& e) {
        std::cerr << "error: configuration: " << e.what() << '\n';
        return kExitConfig;
    }

    std::vector<ReferencePosture> store;
    try {
        if (std::filesystem::exists(args.store_path)) {
            store = io::store_from_json(io::read_json_file(args.store_path),
                                        config->model.modal_lexicon());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: store: " << e.what() << '\n';
        return kExitIo;
    }

    InputStream in;
    try {
        in = open_input(args.input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }

    std::vector<MassVector> samples;
    FrameStats stats;
    int rc = for_each_frame(
        in.stream(), args.skip_bad,
        [&](const io::SkeletonFrame& frame) {
            samples.push_back(measure_posture(frame.skeleton, config->model));
        },
        stats);
    if (rc != kExitOk) return rc;

    std::optional<ReferencePosture> learned;
    try {
        learned.emplace(learn_reference(
            samples, args.name, args.tolerance, action_class,
            args.action_id.empty() ? args.name : args.action_id));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }

    bool replaced = false;
    for (auto& ref : store) {
        if (ref.name == learned->name) {
            ref = *learned;
            replaced = true;
            break;
        }
    }
    if (!replaced) store.push_back(*learned);

    try {
        io::write_json_file(args.store_path, io::store_to_json(store));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    std::cout << (replaced ? "replaced" : "stored") << " reference '" << learned->name
              << "' from " << samples.size() << " frame(s); store has " << store.size()
              << " reference(s)\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// decide: skeleton frames + store -> per-frame outcomes and a summary
// ---------------------------------------------------------------------------

struct DecideArgs {
    std::string input = "-";
    std::string config_path;
    std::string store_path;
    std::string ground_path;
    std::string strategy;
    bool as_json = false;
    bool skip_bad = false;
};

int run_decide(const DecideArgs& args) {
    std::optional<io::ModelConfig> config;
    try {
        config.emplace(load_model(args.config_path, args.ground_path, args.strategy));
    } catch (const std::exception& e) {
        std::cerr << "error: configuration: " << e.what() << '\n';
        return kExitConfig;
    }

    std::vector<ReferencePosture> store;
    try {
        store = io::store_from_json(io::read_json_file(args.store_path),
                                    config->model.modal_lexicon());
    } catch (const std::exception& e) {
        std::cerr << "error: store: " << e.what() << '\n';
        return kExitIo;
    }
    if (store.empty()) {
        std::cerr << "error: reference store is empty\n";
        return kExitData;
    }

    // Fail fast: strict tolerances must be pairwise disjoint.
    if (config->decision.strategy == Strategy::tolerance_strict) {
        auto overlaps =
            validate_tolerances(store, config->ground, ToleranceMode::strict);
        if (!overlaps.empty()) {
            std::cerr << "error: configuration: tolerance volumes overlap under "
                         "tolerance_strict:\n";
            for (const auto& o : overlaps) {
                std::cerr << "  " << o.first << " <-> " << o.second
                          << " (distance " << o.distance << ")\n";
            }
            return kExitConfig;
        }
    }

    InputStream in;
    try {
        in = open_input(args.input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }

    json records = json::array();
    std::map<std::string, std::size_t> by_rationale;
    FrameStats stats;
    int rc = for_each_frame(
        in.stream(), args.skip_bad,
        [&](const io::SkeletonFrame& frame) {
            AngleQuadruple angles = joints_to_angles(frame.skeleton);
            MassVector lfs = measure_posture(angles, config->model);
            DecisionOutcome outcome = decide(lfs, store, config->ground, config->decision);
            by_rationale[std::string(to_string(outcome.rationale))]++;

            json tops = top_terms(lfs);
            if (args.as_json) {
                records.push_back(json{{"frame", frame.frame},
                                       {"angles",
                                        {{"a_theta", angles.a_theta},
                                         {"a_psi", angles.a_psi},
                                         {"f_theta", angles.f_theta},
                                         {"f_psi", angles.f_psi}}},
                                       {"top_terms", tops},
                                       {"outcome", io::outcome_to_json(outcome)}});
            } else {
                std::cout << "frame " << frame.frame << ": arm("
                          << std::fixed << std::setprecision(1) << angles.a_theta
                          << ", " << angles.a_psi << ") forearm(" << angles.f_theta
                          << ", " << angles.f_psi << ") "
                          << format_top_terms(tops) << " | recognized=[";
                for (std::size_t i = 0; i < outcome.recognized.size(); ++i) {
                    if (i) std::cout << ' ';
                    std::cout << outcome.recognized[i];
                }
                std::cout << "] action="
                          << (outcome.chosen_action ? *outcome.chosen_action : "-")
                          << " rationale=" << to_string(outcome.rationale) << '\n';
            }
        },
        stats);
    if (rc != kExitOk) return rc;

    json summary{{"frames_total", stats.total},
                 {"frames_processed", stats.processed},
                 {"frames_skipped", stats.skipped},
                 {"by_rationale", by_rationale}};
    if (args.as_json) {
        std::cout << json{{"frames", records}, {"summary", summary}}.dump(2) << '\n';
    } else {
        std::cout << "frames: " << stats.processed << " processed, " << stats.skipped
                  << " skipped";
        for (const auto& [tag, count] : by_rationale) {
            std::cout << " | " << tag << ": " << count;
        }
        std::cout << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// distance: pairwise transport distances between stored references
// ---------------------------------------------------------------------------

struct DistanceArgs {
    std::string config_path;
    std::string store_path;
    std::string ground_path;
    bool as_json = false;
};

int run_distance(const DistanceArgs& args) {
    std::optional<io::ModelConfig> config;
    try {
        config.emplace(load_model(args.config_path, args.ground_path, ""));
    } catch (const std::exception& e) {
        std::cerr << "error: configuration: " << e.what() << '\n';
        return kExitConfig;
    }

    std::vector<ReferencePosture> store;
    try {
        store = io::store_from_json(io::read_json_file(args.store_path),
                                    config->model.modal_lexicon());
    } catch (const std::exception& e) {
        std::cerr << "error: store: " << e.what() << '\n';
        return kExitIo;
    }
    if (store.size() < 2) {
        std::cerr << "error: need at least 2 references to compare\n";
        return kExitData;
    }

    std::vector<std::vector<double>> matrix(store.size(),
                                            std::vector<double>(store.size(), 0.0));
    for (std::size_t i = 0; i < store.size(); ++i) {
        for (std::size_t j = i + 1; j < store.size(); ++j) {
            double d = transport_distance(store[i].lfs, store[j].lfs, config->ground);
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }

    if (args.as_json) {
        json names = json::array();
        for (const auto& ref : store) names.push_back(ref.name);
        std::cout << json{{"names", names}, {"matrix", matrix}}.dump(2) << '\n';
        return kExitOk;
    }

    std::size_t width = 8;
    for (const auto& ref : store) width = std::max(width, ref.name.size() + 2);
    std::cout << std::setw(static_cast<int>(width)) << "";
    for (const auto& ref : store) {
        std::cout << std::setw(static_cast<int>(width)) << ref.name;
    }
    std::cout << '\n' << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < store.size(); ++i) {
        std::cout << std::setw(static_cast<int>(width)) << store[i].name;
        for (std::size_t j = 0; j < store.size(); ++j) {
            std::cout << std::setw(static_cast<int>(width)) << matrix[i][j];
        }
        std::cout << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate: check config, ground and store consistency without deciding
// ---------------------------------------------------------------------------

struct ValidateArgs {
    std::string config_path;
    std::string store_path;
    std::string ground_path;
    std::string strategy;
};

int run_validate(const ValidateArgs& args) {
    std::optional<io::ModelConfig> config;
    try {
        config.emplace(load_model(args.config_path, args.ground_path, args.strategy));
    } catch (const std::exception& e) {
        std::cerr << "error: configuration: " << e.what() << '\n';
        return kExitConfig;
    }
    std::cout << "model: partitions and rule tables compose\n";

    auto violations = triangle_violations(config->ground);
    if (violations.empty()) {
        std::cout << "ground: " << config->ground.size()
                  << " terms, triangle inequality holds\n";
    } else {
        std::cout << "ground: " << violations.size()
                  << " triangle-inequality violation(s) (distance properties are not "
                     "guaranteed)\n";
        for (std::size_t i = 0; i < violations.size() && i < 5; ++i) {
            const auto& v = violations[i];
            std::cout << "  d(" << config->ground.lexicon()->term(v.i) << ", "
                      << config->ground.lexicon()->term(v.k) << ") exceeds the path via "
                      << config->ground.lexicon()->term(v.j) << " by " << v.excess
                      << '\n';
        }
    }

    if (args.store_path.empty()) return kExitOk;

    std::vector<ReferencePosture> store;
    try {
        store = io::store_from_json(io::read_json_file(args.store_path),
                                    config->model.modal_lexicon());
    } catch (const std::exception& e) {
        std::cerr << "error: store: " << e.what() << '\n';
        return kExitIo;
    }
    std::cout << "store: " << store.size() << " reference(s)\n";

    auto overlaps = validate_tolerances(
        store, config->ground,
        config->decision.strategy == Strategy::tolerance_strict ? ToleranceMode::strict
                                                               : ToleranceMode::overlap);
    for (const auto& o : overlaps) {
        std::cout << "overlap: " << o.first << " <-> " << o.second << " (distance "
                  << o.distance << ", tolerances sum past it)\n";
    }
    if (!overlaps.empty() &&
        config->decision.strategy == Strategy::tolerance_strict) {
        std::cerr << "error: configuration: tolerance volumes overlap under "
                     "tolerance_strict\n";
        return kExitConfig;
    }
    std::cout << "ok\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Upper-limb posture recognition from skeleton joint streams"};
    app.require_subcommand(1);

    FuzzifyArgs fuzzify_args;
    CLI::App* fuzzify = app.add_subcommand(
        "fuzzify", "Convert skeleton frames to modal-posture mass vectors");
    fuzzify->add_option("input", fuzzify_args.input,
                        "Skeleton JSON-lines file ('-' for stdin)");
    fuzzify->add_option("--config", fuzzify_args.config_path, "Model config JSON");
    fuzzify->add_flag("--skip-bad-frames", fuzzify_args.skip_bad,
                      "Warn and continue on bad frames");

    LearnArgs learn_args;
    CLI::App* learn = app.add_subcommand(
        "learn", "Learn a reference posture from skeleton frames");
    learn->add_option("input", learn_args.input,
                      "Skeleton JSON-lines file ('-' for stdin)");
    learn->add_option("--config", learn_args.config_path, "Model config JSON");
    learn->add_option("--store", learn_args.store_path, "Reference store JSON")
        ->required();
    learn->add_option("--name", learn_args.name, "Reference name")->required();
    learn->add_option("--tolerance", learn_args.tolerance,
                      "Tolerance radius (transport distance)")
        ->required();
    learn->add_option("--action-class", learn_args.action_class,
                      "classical or emergency");
    learn->add_option("--action-id", learn_args.action_id,
                      "Action identifier (defaults to the name)");
    learn->add_flag("--skip-bad-frames", learn_args.skip_bad,
                    "Warn and continue on bad frames");

    DecideArgs decide_args;
    CLI::App* decide = app.add_subcommand(
        "decide", "Recognize stored references in skeleton frames");
    decide->add_option("input", decide_args.input,
                       "Skeleton JSON-lines file ('-' for stdin)");
    decide->add_option("--config", decide_args.config_path, "Model config JSON");
    decide->add_option("--store", decide_args.store_path, "Reference store JSON")
        ->required();
    decide->add_option("--ground", decide_args.ground_path,
                       "Ground distance matrix JSON (overrides the generator)");
    decide->add_option("--strategy", decide_args.strategy,
                       "nearest | tolerance_strict | tolerance_overlap | "
                       "emergency_priority");
    decide->add_flag("--json", decide_args.as_json, "Emit the report as JSON");
    decide->add_flag("--skip-bad-frames", decide_args.skip_bad,
                     "Warn and continue on bad frames");

    DistanceArgs distance_args;
    CLI::App* distance = app.add_subcommand(
        "distance", "Pairwise transport distances between stored references");
    distance->add_option("--config", distance_args.config_path, "Model config JSON");
    distance->add_option("--store", distance_args.store_path, "Reference store JSON")
        ->required();
    distance->add_option("--ground", distance_args.ground_path,
                         "Ground distance matrix JSON");
    distance->add_flag("--json", distance_args.as_json, "Emit the table as JSON");

    ValidateArgs validate_args;
    CLI::App* validate = app.add_subcommand(
        "validate", "Check config, ground and store consistency");
    validate->add_option("--config", validate_args.config_path, "Model config JSON");
    validate->add_option("--store", validate_args.store_path, "Reference store JSON");
    validate->add_option("--ground", validate_args.ground_path,
                         "Ground distance matrix JSON");
    validate->add_option("--strategy", validate_args.strategy,
                         "Strategy whose constraints to enforce");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (fuzzify->parsed()) return run_fuzzify(fuzzify_args);
    if (learn->parsed()) return run_learn(learn_args);
    if (decide->parsed()) return run_decide(decide_args);
    if (distance->parsed()) return run_distance(distance_args);
    if (validate->parsed()) return run_validate(validate_args);
    return kExitConfig;
}
