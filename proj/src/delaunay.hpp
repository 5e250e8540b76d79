#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "glcorner/geometry.hpp"

namespace glc::detail {

/// Planar straight-line graph: points plus segments between them. The region
/// to mesh is whatever is enclosed by the segments (no holes).
struct Pslg {
  std::vector<Vec2> points;
  std::vector<std::array<int, 2>> segments;
};

struct RefineOptions {
  SizingFunction size;  // empty means quality refinement only
  double min_angle_deg = 20.7;
  std::size_t max_vertices = 4'000'000;
};

struct RefinedMesh {
  struct SegmentEdge {
    int a;
    int b;
    int segment;
  };
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  /// Pieces of input segments. Boundary pieces are oriented with the mesh on
  /// the left; interior pieces are listed once.
  std::vector<SegmentEdge> segment_edges;
  std::vector<int> input_to_node;
};

/// Conforming Delaunay refinement (Ruppert style, concentric-shell splitting
/// at acute input vertices). Throws kMeshingFailure on breakdown.
RefinedMesh refine_pslg(const Pslg& pslg, const RefineOptions& options);

}  // namespace glc::detail
