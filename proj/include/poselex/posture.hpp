#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poselex/lexicon.hpp"

namespace poselex {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
Vec3 normalized(const Vec3& v);

/// Measured joint positions in meters, keyed by joint name.
struct Skeleton {
    std::map<std::string, Vec3> joints;

    /// Joints every angle computation needs.
    static const std::vector<std::string>& required_joints();

    const Vec3& joint(const std::string& name) const;

    /// Throws std::invalid_argument when a required joint is missing or
    /// non-finite, or an arm segment is degenerate.
    void validate() const;
};

/// The four upper-limb angles, in degrees.
///
/// Conventions: the body frame takes torso -> mid-shoulder as up and the
/// left -> right shoulder line as lateral. a_theta is measured from body-down
/// to the arm (0 = down, 90 = horizontal, 180 = up). a_psi is the azimuth of
/// the arm in the horizontal body plane, 0 = front, +90 = inside (across the
/// body), -90 = outside, +/-180 = rear; it defaults to 0 when the arm is
/// vertical. f_theta is the interior elbow angle (0 = forearm folded onto the
/// arm, 180 = fully extended). f_psi is the tilt of the forearm's off-arm
/// component from body-up (0 = vertical, 90 = horizontal); it defaults to 0
/// when the forearm is collinear with the arm.
struct AngleQuadruple {
    double a_theta = 0.0;  // [0, 180]
    double a_psi = 0.0;    // [-180, 180)
    double f_theta = 0.0;  // [0, 180]
    double f_psi = 0.0;    // [0, 90]
};

AngleQuadruple joints_to_angles(const Skeleton& skeleton);

/// Total mapping (row term, col term) -> output term.
class RuleTable {
public:
    RuleTable(LexiconPtr rows, LexiconPtr cols, LexiconPtr out,
              std::vector<std::size_t> cells);

    const LexiconPtr& rows() const { return rows_; }
    const LexiconPtr& cols() const { return cols_; }
    const LexiconPtr& out() const { return out_; }
    std::size_t cell(std::size_t row, std::size_t col) const;
    const std::string& cell_term(std::size_t row, std::size_t col) const;

private:
    LexiconPtr rows_, cols_, out_;
    std::vector<std::size_t> cells_;  // row-major, out-term indices
};

/// Push the outer-product joint mass of the two inputs through the cell map:
/// out[t] = sum of row[r] * col[c] over cells (r, c) mapping to t.
MassVector evaluate_rule_table(const MassVector& row, const MassVector& col,
                               const RuleTable& table);

/// a-psi x a-theta -> arm posture.
RuleTable default_arm_table();
/// f-psi x f-theta -> forearm posture.
RuleTable default_forearm_table();
/// arm posture x forearm posture -> modal posture.
RuleTable default_modal_table();

FuzzyPartition default_a_theta_partition();
FuzzyPartition default_a_psi_partition();
FuzzyPartition default_f_theta_partition();
FuzzyPartition default_f_psi_partition();

/// Everything measure_posture needs: the four angle partitions and the three
/// rule tables. Construction validates that the tables compose.
struct PostureModel {
    FuzzyPartition a_theta;
    FuzzyPartition a_psi;
    FuzzyPartition f_theta;
    FuzzyPartition f_psi;
    RuleTable arm_table;
    RuleTable forearm_table;
    RuleTable modal_table;

    PostureModel(FuzzyPartition a_theta, FuzzyPartition a_psi,
                 FuzzyPartition f_theta, FuzzyPartition f_psi,
                 RuleTable arm_table, RuleTable forearm_table,
                 RuleTable modal_table);

    static PostureModel defaults();

    const LexiconPtr& modal_lexicon() const { return modal_table.out(); }
};

/// Skeleton -> modal-posture mass vector: fuzzify the four angles and combine
/// through the arm, forearm and modal rule tables.
MassVector measure_posture(const Skeleton& skeleton, const PostureModel& model);
MassVector measure_posture(const AngleQuadruple& angles, const PostureModel& model);

enum class ActionClass { classical, emergency };

std::string_view to_string(ActionClass c);
ActionClass action_class_from_string(std::string_view s);

/// A learned posture: a mass vector over the modal lexicon plus the tolerance
/// radius and the action it triggers.
struct ReferencePosture {
    std::string name;
    MassVector lfs;
    double tolerance = 0.0;
    ActionClass action_class = ActionClass::classical;
    std::string action_id;
};

/// Component-wise mean of the samples, renormalized.
ReferencePosture learn_reference(std::span<const MassVector> samples,
                                 std::string name, double tolerance,
                                 ActionClass action_class, std::string action_id);

}  // namespace poselex
