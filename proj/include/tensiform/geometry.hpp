#pragma once

#include <stdexcept>
#include <string>

#include "tensiform/model.hpp"

namespace tensiform {

/// Below these thresholds the gradient of a length/area is undefined.
constexpr double kLengthEpsilon = 1e-12;
constexpr double kAreaEpsilon = 1e-12;

/// Raised when a gradient is requested for a zero-length member or a
/// zero-area triangle. `entity` names what failed, e.g. "member 7".
class DegenerateGeometry : public std::runtime_error {
public:
    enum class Kind { Member, Element, Unspecified };

    DegenerateGeometry(Kind kind, int id, const std::string& what)
        : std::runtime_error(what), kind_(kind), id_(id)
    {
    }
    explicit DegenerateGeometry(const std::string& what) : DegenerateGeometry(Kind::Unspecified, -1, what) {}

    Kind kind() const { return kind_; }
    int id() const { return id_; }

private:
    Kind kind_;
    int id_;
};

/// dL/dp and dL/dq: two unit vectors, equal and opposite.
struct LengthGradient {
    Vec3 at_p;
    Vec3 at_q;
};

/// dS/dp, dS/dq, dS/dr: each lies in the triangle plane; the three sum to zero.
struct AreaGradient {
    Vec3 at_p;
    Vec3 at_q;
    Vec3 at_r;
};

double member_length(const Vec3& p, const Vec3& q);
LengthGradient member_length_gradient(const Vec3& p, const Vec3& q);

double triangle_area(const Vec3& p, const Vec3& q, const Vec3& r);

/// With unit normal n of (q-p)x(r-p): dS/dp = n x (r-q) / 2, and cyclically.
AreaGradient triangle_area_gradient(const Vec3& p, const Vec3& q, const Vec3& r);

}  // namespace tensiform
