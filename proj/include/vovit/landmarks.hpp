// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vovit::landmarks {

inline constexpr int kNodes = 68;

using Points3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// frames x 68 x dims coordinates, dims = 3 (raw) or 2 (registered).
struct LandmarkSequence {
  std::size_t frames = 0;
  int dims = 3;
  double fps = 25.0;
  std::vector<double> coords;

  LandmarkSequence() = default;
  LandmarkSequence(std::size_t t, int d, double rate)
      : frames(t), dims(d), fps(rate), coords(t * kNodes * d, 0.0) {}

  double& at(std::size_t t, int node, int d) { return coords[(t * kNodes + node) * dims + d]; }
  double at(std::size_t t, int node, int d) const { return coords[(t * kNodes + node) * dims + d]; }
  double duration_s() const { return static_cast<double>(frames) / fps; }
  void validate() const;
};

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double scale = 1.0;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return scale * rotation * p + translation; }
  Points3 apply(const Points3& p) const;
};

enum class KabschMode { kSimilarity, kRigid };

// Least-squares (s, R, t) minimizing sum ||s R p_i + t - q_i||^2 with det R = +1.
RigidTransform kabsch(const Points3& p, const Points3& q, KabschMode mode = KabschMode::kSimilarity);

double rmsd(const Points3& a, const Points3& b);

// The canonical 68-point frontal face used as registration target.
const Points3& canonical_template();

struct Registration {
  LandmarkSequence sequence;  // dims = 2
  std::vector<std::string> warnings;
};

Registration register_sequence(const LandmarkSequence& seq, const Points3& target = canonical_template());

// Per frame: subtract mean landmark, divide by inter-ocular distance.
LandmarkSequence normalize_landmarks(const LandmarkSequence& seq);

struct FaceGraph {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd normalized;
};

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency);

FaceGraph build_face_graph(std::string_view scheme = "ibug68-contours");
FaceGraph graph_from_adjacency(const Eigen::MatrixXd& adjacency);

LandmarkSequence parse_landmarks_json(std::string_view text);
std::string landmarks_to_json(const LandmarkSequence& seq);
LandmarkSequence load_landmarks(const std::string& path);
void save_landmarks(const std::string& path, const LandmarkSequence& seq);

}  // namespace vovit::landmarks
