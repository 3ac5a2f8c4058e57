#pragma once

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace fdgff {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Lattice-unit integer vertex.
struct Vertex {
    int x = 0;
    int y = 0;
    friend bool operator<(Vertex a, Vertex b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }
    friend bool operator==(Vertex a, Vertex b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Vertex a, Vertex b) { return !(a == b); }
    QPoint qpoint() const { return QPoint::from_lattice(x, y); }
};

// Geometric lattice edge with at least one interior endpoint, identified by
// its endpoints (multi-edges to the wired vertex stay distinguishable).
struct Edge {
    Vertex a, b;  // a < b
    Edge() = default;
    Edge(Vertex u, Vertex v) {
        if (v < u) std::swap(u, v);
        a = u;
        b = v;
    }
    bool horizontal() const { return a.y == b.y; }
    friend bool operator<(Edge e, Edge f) { return e.a != f.a ? e.a < f.a : e.b < f.b; }
    friend bool operator==(Edge e, Edge f) { return e.a == f.a && e.b == f.b; }
};

// A rectilinear Jordan discrete domain at mesh delta: interior and boundary
// primary vertices, the wired-boundary edge multiset, and the Dirichlet
// Laplacian (diagonal -4, +1 for interior nearest neighbours).
class DiscreteDomain {
  public:
    DiscreteDomain(std::vector<Vertex> interior, std::set<Vertex> boundary, double mesh)
        : mesh_(mesh), interior_(std::move(interior)), boundary_(std::move(boundary)) {
        std::sort(interior_.begin(), interior_.end());
        for (size_t i = 0; i < interior_.size(); ++i) index_[interior_[i]] = (int)i;
        check_connected();
        build_edges_and_laplacian();
    }

    double mesh() const { return mesh_; }
    const std::vector<Vertex>& interior() const { return interior_; }
    const std::set<Vertex>& boundary() const { return boundary_; }
    const std::vector<Edge>& wired_edges() const { return wired_edges_; }
    const Eigen::SparseMatrix<double>& laplacian() const { return laplacian_; }

    int interior_index(Vertex v) const {
        auto it = index_.find(v);
        return it == index_.end() ? -1 : it->second;
    }
    bool is_interior(Vertex v) const { return index_.count(v) != 0; }
    bool is_boundary(Vertex v) const { return boundary_.count(v) != 0; }
    bool contains(Vertex v) const { return is_interior(v) || is_boundary(v); }

    size_t n_interior() const { return interior_.size(); }

    // Interior vertex closest to a physical point (ties broken by the
    // lexicographically smallest lattice vertex).
    Vertex closest_interior(double px, double py) const {
        double best = 1e300;
        Vertex best_v = interior_.front();
        for (const Vertex& v : interior_) {
            double dx = v.x * mesh_ - px, dy = v.y * mesh_ - py;
            double d = dx * dx + dy * dy;
            if (d < best - 1e-15) {
                best = d;
                best_v = v;
            }
        }
        return best_v;
    }

  private:
    void check_connected() {
        if (interior_.empty()) throw DomainError("domain has empty interior");
        std::vector<char> seen(interior_.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        size_t visited = 1;
        while (!stack.empty()) {
            Vertex v = interior_[stack.back()];
            stack.pop_back();
            for (auto [dx, dy] : std::initializer_list<std::pair<int, int>>{
                     {1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                int j = interior_index({v.x + dx, v.y + dy});
                if (j >= 0 && !seen[j]) {
                    seen[j] = 1;
                    ++visited;
                    stack.push_back(j);
                }
            }
        }
        if (visited != interior_.size())
            throw DomainError("domain interior is not nearest-neighbour connected");
    }

    void build_edges_and_laplacian() {
        std::vector<Eigen::Triplet<double>> trip;
        for (size_t i = 0; i < interior_.size(); ++i) {
            Vertex v = interior_[i];
            trip.emplace_back((int)i, (int)i, -4.0);
            int incident = 0;
            for (auto [dx, dy] : std::initializer_list<std::pair<int, int>>{
                     {1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                Vertex w{v.x + dx, v.y + dy};
                if (!contains(w))
                    throw DomainError("interior vertex has a neighbour outside the domain");
                ++incident;
                if (dx > 0 || dy > 0 || !is_interior(w)) wired_edges_.emplace_back(v, w);
                int j = interior_index(w);
                if (j >= 0) trip.emplace_back((int)i, j, 1.0);
            }
            if (incident != 4) throw DomainError("interior vertex degree mismatch");
        }
        std::sort(wired_edges_.begin(), wired_edges_.end());
        laplacian_.resize((int)interior_.size(), (int)interior_.size());
        laplacian_.setFromTriplets(trip.begin(), trip.end());
    }

    double mesh_;
    std::vector<Vertex> interior_;
    std::set<Vertex> boundary_;
    std::vector<Edge> wired_edges_;
    std::map<Vertex, int> index_;
    Eigen::SparseMatrix<double> laplacian_;
};

// Rectilinear polygon given by its corner vertices in order (closed implicitly).
// Interior vertices are the lattice points strictly inside; boundary vertices
// are the lattice points on the polygon.
inline DiscreteDomain domain_from_polygon(const std::vector<Vertex>& poly, double mesh) {
    if (poly.size() < 4) throw DomainError("polygon needs at least 4 corners");
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        Vertex a = poly[i], b = poly[(i + 1) % n];
        if (a.x != b.x && a.y != b.y) throw DomainError("polygon must be axis-aligned");
        if (a == b) throw DomainError("repeated polygon corner");
    }
    // Reject self-intersections: boundary lattice points must be visited once.
    std::set<Vertex> boundary;
    for (size_t i = 0; i < n; ++i) {
        Vertex a = poly[i], b = poly[(i + 1) % n];
        int dx = (b.x > a.x) - (b.x < a.x), dy = (b.y > a.y) - (b.y < a.y);
        Vertex p = a;
        while (p != b) {
            Vertex q{p.x + dx, p.y + dy};
            if (q != b && boundary.count(q)) throw DomainError("polygon self-intersects");
            boundary.insert(p);
            p = q;
        }
    }
    auto inside = [&](double px, double py) {
        int crossings = 0;
        for (size_t i = 0; i < n; ++i) {
            Vertex a = poly[i], b = poly[(i + 1) % n];
            if (a.x != b.x) continue;  // vertical segments for a horizontal ray
            double x = a.x, ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
            if (x > px && py > ylo && py < yhi) ++crossings;
        }
        return crossings % 2 == 1;
    };
    int lo_x = poly[0].x, hi_x = lo_x, lo_y = poly[0].y, hi_y = lo_y;
    for (auto& v : poly) {
        lo_x = std::min(lo_x, v.x);
        hi_x = std::max(hi_x, v.x);
        lo_y = std::min(lo_y, v.y);
        hi_y = std::max(hi_y, v.y);
    }
    std::vector<Vertex> interior;
    for (int x = lo_x; x <= hi_x; ++x)
        for (int y = lo_y; y <= hi_y; ++y) {
            Vertex v{x, y};
            if (boundary.count(v)) continue;
            // offset the ray to dodge horizontal boundary segments
            if (inside(x, y + 0.252001)) interior.push_back(v);
        }
    if (interior.empty()) throw DomainError("polygon encloses no interior vertex");
    return DiscreteDomain(std::move(interior), std::move(boundary), mesh);
}

// Builtin shapes. square(n): n x n lattice vertices including the boundary;
// rectangle(nx, ny) likewise; lshape carves the top-right block out of an
// nx x ny rectangle.
inline DiscreteDomain domain_square(int n, double mesh = 1.0) {
    if (n < 3) throw DomainError("square needs n >= 3");
    return domain_from_polygon({{0, 0}, {n - 1, 0}, {n - 1, n - 1}, {0, n - 1}}, mesh);
}

inline DiscreteDomain domain_rectangle(int nx, int ny, double mesh = 1.0) {
    if (nx < 3 || ny < 3) throw DomainError("rectangle needs nx, ny >= 3");
    return domain_from_polygon({{0, 0}, {nx - 1, 0}, {nx - 1, ny - 1}, {0, ny - 1}}, mesh);
}

inline DiscreteDomain domain_lshape(int nx, int ny, int cx, int cy, double mesh = 1.0) {
    if (nx < 3 || ny < 3 || cx < 1 || cy < 1 || cx >= nx - 1 || cy >= ny - 1)
        throw DomainError("bad L-shape parameters");
    return domain_from_polygon({{0, 0},
                                {nx - 1, 0},
                                {nx - 1, ny - 1 - cy},
                                {nx - 1 - cx, ny - 1 - cy},
                                {nx - 1 - cx, ny - 1},
                                {0, ny - 1}},
                               mesh);
}

// Unit-disk approximation at mesh delta = 1/n: interior = lattice vertices
// strictly inside the disk, boundary = outside-adjacent vertices.
inline DiscreteDomain discrete_disk(int n) {
    if (n < 2) throw DomainError("disk mesh too coarse");
    double delta = 1.0 / n;
    std::vector<Vertex> interior;
    std::set<Vertex> candidates;
    for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y)
            if ((double(x) * x + double(y) * y) * delta * delta < 1.0) {
                interior.push_back({x, y});
                candidates.insert({x, y});
            }
    if (interior.empty()) throw DomainError("disk mesh too coarse: no interior");
    std::set<Vertex> boundary;
    for (const Vertex& v : interior)
        for (auto [dx, dy] :
             std::initializer_list<std::pair<int, int>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            Vertex w{v.x + dx, v.y + dy};
            if (!candidates.count(w)) boundary.insert(w);
        }
    return DiscreteDomain(std::move(interior), std::move(boundary), delta);
}

}  // namespace fdgff
