#include "tensiform/geometry.hpp"

namespace tensiform {

double member_length(const Vec3& p, const Vec3& q) { return (p - q).norm(); }

LengthGradient member_length_gradient(const Vec3& p, const Vec3& q)
{
    const Vec3 d = p - q;
    const double length = d.norm();
    if (!(length > kLengthEpsilon)) throw DegenerateGeometry("member length below threshold");
    const Vec3 u = d / length;
    return {u, -u};
}

double triangle_area(const Vec3& p, const Vec3& q, const Vec3& r)
{
    return 0.5 * (q - p).cross(r - p).norm();
}

AreaGradient triangle_area_gradient(const Vec3& p, const Vec3& q, const Vec3& r)
{
    const Vec3 normal = (q - p).cross(r - p);
    const double twice_area = normal.norm();
    if (!(0.5 * twice_area > kAreaEpsilon)) throw DegenerateGeometry("triangle area below threshold");
    const Vec3 n = normal / twice_area;
    return {0.5 * n.cross(r - q), 0.5 * n.cross(p - r), 0.5 * n.cross(q - p)};
}

}  // namespace tensiform
