#pragma once

#include <array>
#include <vector>

namespace wsturm {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Simplicial discretization of a bounded domain: intervals in 1D,
/// triangles in 2D. Nodes, connectivity and boundary tags are immutable
/// after construction and safe to share across threads.
struct Mesh {
    /// 1 or 2.
    int dim = 1;
    std::vector<Point> nodes;
    /// Node indices per element; 1D elements use the first two slots and
    /// keep the third at -1. 2D triangles are counterclockwise.
    std::vector<std::array<int, 3>> elements;
    /// Sorted indices of the nodes on the domain boundary.
    std::vector<int> boundary_nodes;
    /// Cached element lengths (1D) or areas (2D), all strictly positive.
    std::vector<double> element_measures;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }
    int nodes_per_element() const { return dim + 1; }
    bool is_boundary(int node) const;
    double total_measure() const;
};

/// Uniform mesh of (a, b) with `elements` cells. Boundary nodes are the
/// two endpoints.
Mesh build_interval_mesh(double a, double b, int elements);

/// Structured triangulation of an axis-aligned rectangle: mx-by-my grid
/// cells, each split into two triangles along the same diagonal.
Mesh build_rectangle_mesh(double x0, double x1, double y0, double y1, int mx, int my);

/// One sweep of uniform refinement: 1D elements are bisected, triangles
/// are split into four via edge midpoints. Conformity is preserved and
/// boundary nodes are re-derived from the refined connectivity.
Mesh refine_uniform(const Mesh& mesh);

/// Checks the structural invariants (positive measures, conformity,
/// boundary tagging consistent with connectivity) and throws on violation.
void validate_mesh(const Mesh& mesh);

} // namespace wsturm
