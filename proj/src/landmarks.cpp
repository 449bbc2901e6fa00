// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/landmarks.hpp"

#include <cmath>
#include <optional>
#include <utility>

#include "json.hpp"
#include "vovit/error.hpp"
#include "vovit/io.hpp"
#include "vovit/parallel.hpp"

namespace vovit::landmarks {

namespace {

Points3 frame_points(const LandmarkSequence& seq, std::size_t t) {
  Points3 p(kNodes, 3);
  for (int i = 0; i < kNodes; ++i)
    for (int d = 0; d < 3; ++d) p(i, d) = seq.at(t, i, d);
  return p;
}

Eigen::Vector2d loop_center(const LandmarkSequence& seq, std::size_t t, int first, int last) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (int i = first; i <= last; ++i) c += Eigen::Vector2d(seq.at(t, i, 0), seq.at(t, i, 1));
  return c / (last - first + 1);
}

}  // namespace

void LandmarkSequence::validate() const {
  if (dims != 2 && dims != 3) throw Error(errc::kInvalidArgument, "landmarks: dims must be 2 or 3");
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(errc::kInvalidArgument, "landmarks: fps must be positive");
  if (coords.size() != frames * kNodes * dims)
    throw Error(errc::kShapeMismatch, "landmarks: coordinate buffer does not match frames x 68 x dims");
  for (double v : coords)
    if (!std::isfinite(v)) throw Error(errc::kInvalidArgument, "landmarks: non-finite coordinate");
}

Points3 RigidTransform::apply(const Points3& p) const {
  Points3 out = (scale * (p * rotation.transpose())).eval();
  out.rowwise() += translation.transpose();
  return out;
}

RigidTransform kabsch(const Points3& p, const Points3& q, KabschMode mode) {
  if (p.rows() != q.rows()) throw Error(errc::kShapeMismatch, "kabsch: point counts differ");
  if (p.rows() < 3) throw Error(errc::kInvalidArgument, "kabsch: need at least 3 points");
  if (!p.allFinite() || !q.allFinite()) throw Error(errc::kInvalidArgument, "kabsch: non-finite coordinates");

  const double n = static_cast<double>(p.rows());
  const Eigen::RowVector3d mu_p = p.colwise().mean();
  const Eigen::RowVector3d mu_q = q.colwise().mean();
  const Points3 pc = p.rowwise() - mu_p;
  const Points3 qc = q.rowwise() - mu_q;

  // Rank test on the centred source cloud: collinear or coincident points
  // leave the rotation undetermined.
  const Eigen::Vector3d spread = Eigen::JacobiSVD<Eigen::Matrix3d>(pc.transpose() * pc).singularValues();
  if (!(spread(0) > 0.0) || spread(1) <= 1e-12 * spread(0))
    throw Error(errc::kDegenerate, "kabsch: degenerate source configuration (rank < 2)");

  const Eigen::Matrix3d cov = qc.transpose() * pc / n;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Vector3d sign(1.0, 1.0, 1.0);
  if (u.determinant() * v.determinant() < 0.0) sign(2) = -1.0;

  RigidTransform tf;
  tf.rotation = u * sign.asDiagonal() * v.transpose();
  if (mode == KabschMode::kSimilarity) {
    const double var_p = pc.squaredNorm() / n;
    tf.scale = svd.singularValues().dot(sign) / var_p;
    if (!(tf.scale > 0.0)) throw Error(errc::kDegenerate, "kabsch: target collapses to a point");
  }
  tf.translation = mu_q.transpose() - tf.scale * tf.rotation * mu_p.transpose();
  return tf;
}

double rmsd(const Points3& a, const Points3& b) {
  if (a.rows() != b.rows()) throw Error(errc::kShapeMismatch, "rmsd: point counts differ");
  if (a.rows() == 0) return 0.0;
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.rows()));
}

Registration register_sequence(const LandmarkSequence& seq, const Points3& target) {
  seq.validate();
  if (seq.dims != 3) throw Error(errc::kInvalidArgument, "register_sequence expects 3-D landmarks");
  if (target.rows() != kNodes) throw Error(errc::kShapeMismatch, "register_sequence: template must have 68 points");

  std::vector<std::optional<RigidTransform>> fits(seq.frames);
  std::vector<std::string> failures(seq.frames);
  parallel_for(seq.frames, [&](std::size_t t) {
    try {
      fits[t] = kabsch(frame_points(seq, t), target);
    } catch (const Error& e) {
      failures[t] = e.what();
    }
  });

  Registration out{LandmarkSequence(seq.frames, 2, seq.fps), {}};
  std::optional<RigidTransform> previous;
  for (std::size_t t = 0; t < seq.frames; ++t) {
    if (!fits[t]) {
      if (!previous)
        throw Error(errc::kDegenerate, "register_sequence: frame " + std::to_string(t) + ": " + failures[t]);
      out.warnings.push_back("frame " + std::to_string(t) + ": " + failures[t] + "; reusing previous transform");
      fits[t] = previous;
    }
    previous = fits[t];
    const Points3 aligned = fits[t]->apply(frame_points(seq, t));
    for (int i = 0; i < kNodes; ++i) {
      out.sequence.at(t, i, 0) = aligned(i, 0);
      out.sequence.at(t, i, 1) = aligned(i, 1);
    }
  }
  return out;
}

LandmarkSequence normalize_landmarks(const LandmarkSequence& seq) {
  seq.validate();
  if (seq.dims != 2) throw Error(errc::kInvalidArgument, "normalize_landmarks expects 2-D landmarks");
  LandmarkSequence out = seq;
  for (std::size_t t = 0; t < seq.frames; ++t) {
    const double iod = (loop_center(seq, t, 36, 41) - loop_center(seq, t, 42, 47)).norm();
    if (!(iod > 1e-12))
      throw Error(errc::kDegenerate, "normalize_landmarks: zero inter-ocular distance at frame " + std::to_string(t));
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int i = 0; i < kNodes; ++i) mean += Eigen::Vector2d(seq.at(t, i, 0), seq.at(t, i, 1));
    mean /= kNodes;
    for (int i = 0; i < kNodes; ++i)
      for (int d = 0; d < 2; ++d) out.at(t, i, d) = (seq.at(t, i, d) - mean(d)) / iod;
  }
  return out;
}

Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency) {
  const Eigen::MatrixXd with_self = adjacency + Eigen::MatrixXd::Identity(adjacency.rows(), adjacency.cols());
  const Eigen::VectorXd inv_sqrt = with_self.rowwise().sum().cwiseSqrt().cwiseInverse();
  return inv_sqrt.asDiagonal() * with_self * inv_sqrt.asDiagonal();
}

FaceGraph graph_from_adjacency(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw Error(errc::kShapeMismatch, "adjacency must be square");
  return {adjacency, normalize_adjacency(adjacency)};
}

FaceGraph build_face_graph(std::string_view scheme) {
  if (scheme != "ibug68-contours")
    throw Error(errc::kUnknownScheme, "unknown face graph scheme '" + std::string(scheme) + "'");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(kNodes, kNodes);
  auto link = [&](int i, int j) { a(i, j) = a(j, i) = 1.0; };
  auto chain = [&](int first, int last, bool closed) {
    for (int i = first; i < last; ++i) link(i, i + 1);
    if (closed) link(last, first);
  };
  chain(0, 16, false);   // jaw
  chain(17, 21, false);  // right brow
  chain(22, 26, false);  // left brow
  chain(27, 30, false);  // nose bridge
  chain(31, 35, false);  // nostrils
  chain(36, 41, true);   // right eye
  chain(42, 47, true);   // left eye
  chain(48, 59, true);   // outer lip
  chain(60, 67, true);   // inner lip
  return graph_from_adjacency(a);
}

LandmarkSequence parse_landmarks_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kFormat, std::string("landmarks: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("fps") || !doc.contains("frames") || !doc["frames"].is_array())
    throw Error(errc::kFormat, "landmarks: expected {\"fps\": number, \"frames\": [...]}");
  const auto& frames = doc["frames"];
  int dims = 3;
  if (!frames.empty() && frames[0].is_array() && !frames[0].empty() && frames[0][0].is_array())
    dims = static_cast<int>(frames[0][0].size());
  if (dims != 2 && dims != 3) throw Error(errc::kFormat, "landmarks: points must be 2- or 3-vectors");

  LandmarkSequence seq(frames.size(), dims, doc["fps"].get<double>());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& f = frames[t];
    if (!f.is_array() || f.size() != kNodes)
      throw Error(errc::kFormat, "landmarks: frame " + std::to_string(t) + " must hold 68 points");
    for (int i = 0; i < kNodes; ++i) {
      const auto& pt = f[i];
      if (!pt.is_array() || static_cast<int>(pt.size()) != dims)
        throw Error(errc::kFormat, "landmarks: frame " + std::to_string(t) + " point " + std::to_string(i) +
                                       " has wrong dimension");
      for (int d = 0; d < dims; ++d) seq.at(t, i, d) = pt[d].get<double>();
    }
  }
  seq.validate();
  return seq;
}

std::string landmarks_to_json(const LandmarkSequence& seq) {
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t t = 0; t < seq.frames; ++t) {
    nlohmann::json f = nlohmann::json::array();
    for (int i = 0; i < kNodes; ++i) {
      nlohmann::json pt = nlohmann::json::array();
      for (int d = 0; d < seq.dims; ++d) pt.push_back(seq.at(t, i, d));
      f.push_back(std::move(pt));
    }
    frames.push_back(std::move(f));
  }
  return nlohmann::json{{"fps", seq.fps}, {"frames", std::move(frames)}}.dump();
}

LandmarkSequence load_landmarks(const std::string& path) {
  return parse_landmarks_json(io::read_text(path));
}

void save_landmarks(const std::string& path, const LandmarkSequence& seq) {
  io::write_text(path, landmarks_to_json(seq));
}

}  // namespace vovit::landmarks
