#pragma once

// Convex domains (ball, box, convex polygon, whole space) and the ellipsoids
// E_eps(A, x) = {x + A y : |y| <= eps} with det A = 1.

#include <limits>
#include <string>
#include <vector>

#include "mamv/linalg.hpp"

namespace mamv {

/// Half-space {y : <normal, y> <= offset}, normal of unit length.
struct HalfSpace {
    Vec normal;
    double offset = 0.0;
};

class ConvexDomain {
public:
    enum class Kind { Disc, Box, Polygon, WholeSpace };

    /// Euclidean ball in any dimension (a disc for n = 2).
    static ConvexDomain disc(const Vec& center, double radius);
    static ConvexDomain box(const Vec& lo, const Vec& hi);
    /// Counterclockwise, strictly convex, planar.
    static ConvexDomain polygon(std::vector<Vec> vertices);
    static ConvexDomain whole_space(int n);

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return n_; }
    bool is_whole_space() const noexcept { return kind_ == Kind::WholeSpace; }

    const Vec& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    const Vec& lo() const noexcept { return lo_; }
    const Vec& hi() const noexcept { return hi_; }
    const std::vector<Vec>& vertices() const noexcept { return vertices_; }
    /// Face half-spaces for boxes and polygons; empty otherwise.
    const std::vector<HalfSpace>& faces() const noexcept { return faces_; }

    /// Closed membership with absolute slack.
    bool contains(const Vec& y, double slack = 1e-12) const;
    /// Distance to the boundary, positive inside and negative outside.
    /// +inf for the whole space.
    double boundary_distance(const Vec& y) const;
    /// Smallest t >= 0 with y + t dir on the boundary, for y in the closed domain.
    double ray_exit(const Vec& y, const Vec& dir) const;
    /// +inf for the whole space.
    double diameter() const;
    /// Axis-aligned bounding box; throws InvalidDomain for the whole space.
    void bounding_box(Vec& lo, Vec& hi) const;

    std::string str() const;

private:
    ConvexDomain() = default;

    Kind kind_ = Kind::WholeSpace;
    int n_ = 0;
    Vec center_;
    double radius_ = 0.0;
    Vec lo_, hi_;
    std::vector<Vec> vertices_;
    std::vector<HalfSpace> faces_;
};

class Ellipsoid {
public:
    /// Throws InvalidMatrix unless det shape = 1 within 1e-12, InvalidArgument unless eps > 0.
    Ellipsoid(Vec center, SpdShape shape, double eps);

    const Vec& center() const noexcept { return center_; }
    const SpdShape& shape() const noexcept { return shape_; }
    double scale() const noexcept { return eps_; }

    /// |A^{-1}(y - x)| <= eps.
    bool contains(const Vec& y, double slack = 1e-12) const;
    /// x + A y for |y| <= eps.
    Vec point(const Vec& y) const { return center_ + shape_.apply(y); }
    double volume() const;

private:
    Vec center_;
    SpdShape shape_;
    double eps_;
};

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);
/// Surface measure of the unit sphere in R^n.
double unit_sphere_area(int n);

bool contains_ellipsoid(const ConvexDomain& domain, const Ellipsoid& e);

/// Largest eps with E_eps(shape, x) inside the domain; +inf for the whole
/// space. Throws PointOutsideDomain when x is not in the closed domain.
double max_scale(const ConvexDomain& domain, const Vec& x, const SpdShape& shape);

}  // namespace mamv
