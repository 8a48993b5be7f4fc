#include "wsturm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wsturm/errors.hpp"

namespace wsturm {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

void compute_measures(Mesh& mesh) {
    mesh.element_measures.resize(mesh.elements.size());
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& el = mesh.elements[e];
        if (mesh.dim == 1) {
            mesh.element_measures[e] = mesh.nodes[el[1]].x - mesh.nodes[el[0]].x;
        } else {
            mesh.element_measures[e] =
                signed_area(mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]]);
        }
    }
}

// Boundary = endpoints touched by one element (1D) / nodes of edges owned
// by exactly one triangle (2D). Derived from connectivity so it survives
// refinement of arbitrary conforming meshes.
void tag_boundary(Mesh& mesh) {
    mesh.boundary_nodes.clear();
    if (mesh.dim == 1) {
        std::vector<int> touch(mesh.nodes.size(), 0);
        for (const auto& el : mesh.elements) {
            ++touch[el[0]];
            ++touch[el[1]];
        }
        for (std::size_t i = 0; i < touch.size(); ++i)
            if (touch[i] == 1) mesh.boundary_nodes.push_back(static_cast<int>(i));
    } else {
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& el : mesh.elements) {
            for (int k = 0; k < 3; ++k) {
                int a = el[k], b = el[(k + 1) % 3];
                ++edge_count[{std::min(a, b), std::max(a, b)}];
            }
        }
        std::vector<char> on_boundary(mesh.nodes.size(), 0);
        for (const auto& [edge, count] : edge_count) {
            if (count == 1) {
                on_boundary[edge.first] = 1;
                on_boundary[edge.second] = 1;
            }
        }
        for (std::size_t i = 0; i < on_boundary.size(); ++i)
            if (on_boundary[i]) mesh.boundary_nodes.push_back(static_cast<int>(i));
    }
}

} // namespace

bool Mesh::is_boundary(int node) const {
    return std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), node);
}

double Mesh::total_measure() const {
    return std::accumulate(element_measures.begin(), element_measures.end(), 0.0);
}

Mesh build_interval_mesh(double a, double b, int elements) {
    if (!(a < b))
        throw std::invalid_argument("build_interval_mesh: requires a < b");
    if (elements < 1)
        throw std::invalid_argument("build_interval_mesh: requires at least one element");

    Mesh mesh;
    mesh.dim = 1;
    mesh.nodes.resize(elements + 1);
    for (int i = 0; i <= elements; ++i) {
        double s = static_cast<double>(i) / elements;
        mesh.nodes[i] = {a + s * (b - a), 0.0};
    }
    mesh.elements.resize(elements);
    for (int e = 0; e < elements; ++e) mesh.elements[e] = {e, e + 1, -1};
    compute_measures(mesh);
    tag_boundary(mesh);
    return mesh;
}

Mesh build_rectangle_mesh(double x0, double x1, double y0, double y1, int mx, int my) {
    if (!(x0 < x1) || !(y0 < y1))
        throw std::invalid_argument("build_rectangle_mesh: degenerate range");
    if (mx < 1 || my < 1)
        throw std::invalid_argument("build_rectangle_mesh: requires mx, my >= 1");

    Mesh mesh;
    mesh.dim = 2;
    mesh.nodes.resize(static_cast<std::size_t>(mx + 1) * (my + 1));
    for (int j = 0; j <= my; ++j) {
        for (int i = 0; i <= mx; ++i) {
            double sx = static_cast<double>(i) / mx;
            double sy = static_cast<double>(j) / my;
            mesh.nodes[static_cast<std::size_t>(j) * (mx + 1) + i] = {x0 + sx * (x1 - x0),
                                                                      y0 + sy * (y1 - y0)};
        }
    }
    mesh.elements.reserve(static_cast<std::size_t>(mx) * my * 2);
    auto node = [mx](int i, int j) { return j * (mx + 1) + i; };
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            int v00 = node(i, j), v10 = node(i + 1, j);
            int v01 = node(i, j + 1), v11 = node(i + 1, j + 1);
            mesh.elements.push_back({v00, v10, v11});
            mesh.elements.push_back({v00, v11, v01});
        }
    }
    compute_measures(mesh);
    tag_boundary(mesh);
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
    validate_mesh(mesh);

    Mesh fine;
    fine.dim = mesh.dim;
    fine.nodes = mesh.nodes;

    if (mesh.dim == 1) {
        fine.elements.reserve(mesh.elements.size() * 2);
        for (const auto& el : mesh.elements) {
            const Point& a = mesh.nodes[el[0]];
            const Point& b = mesh.nodes[el[1]];
            int mid = static_cast<int>(fine.nodes.size());
            fine.nodes.push_back({0.5 * (a.x + b.x), 0.0});
            fine.elements.push_back({el[0], mid, -1});
            fine.elements.push_back({mid, el[1], -1});
        }
    } else {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid_of = [&](int a, int b) {
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            int idx = static_cast<int>(fine.nodes.size());
            fine.nodes.push_back({0.5 * (mesh.nodes[a].x + mesh.nodes[b].x),
                                  0.5 * (mesh.nodes[a].y + mesh.nodes[b].y)});
            midpoint.emplace(key, idx);
            return idx;
        };
        fine.elements.reserve(mesh.elements.size() * 4);
        for (const auto& el : mesh.elements) {
            int a = el[0], b = el[1], c = el[2];
            int ab = mid_of(a, b), bc = mid_of(b, c), ca = mid_of(c, a);
            fine.elements.push_back({a, ab, ca});
            fine.elements.push_back({ab, b, bc});
            fine.elements.push_back({ca, bc, c});
            fine.elements.push_back({ab, bc, ca});
        }
    }
    compute_measures(fine);
    tag_boundary(fine);
    return fine;
}

void validate_mesh(const Mesh& mesh) {
    if (mesh.dim != 1 && mesh.dim != 2)
        throw error("mesh: dim must be 1 or 2");
    if (mesh.nodes.empty() || mesh.elements.empty())
        throw error("mesh: empty node or element list");
    if (mesh.element_measures.size() != mesh.elements.size())
        throw error("mesh: measure cache out of sync");

    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& el = mesh.elements[e];
        int n = mesh.nodes_per_element();
        for (int k = 0; k < n; ++k)
            if (el[k] < 0 || el[k] >= mesh.node_count())
                throw error("mesh: element " + std::to_string(e) + " references missing node");
        if (!(mesh.element_measures[e] > 0.0))
            throw error("mesh: element " + std::to_string(e) + " has non-positive measure");
    }

    if (mesh.dim == 2) {
        // Conformity: every edge is owned by one or two triangles, and the
        // shared edge uses identical node indices (guaranteed here by index
        // identity; over-shared edges indicate a broken triangulation).
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& el : mesh.elements)
            for (int k = 0; k < 3; ++k) {
                int a = el[k], b = el[(k + 1) % 3];
                if (a == b) throw error("mesh: degenerate triangle edge");
                ++edge_count[{std::min(a, b), std::max(a, b)}];
            }
        for (const auto& [edge, count] : edge_count)
            if (count > 2) throw error("mesh: non-conforming edge shared by >2 triangles");
    }

    // Boundary tags must match what connectivity implies.
    Mesh probe = mesh;
    tag_boundary(probe);
    if (probe.boundary_nodes != mesh.boundary_nodes)
        throw error("mesh: boundary tags inconsistent with connectivity");
}

} // namespace wsturm
