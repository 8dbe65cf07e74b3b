#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "playroom/common/error.hpp"
#include "playroom/common/geometry3.hpp"

namespace playroom::audio {

class BadGeometry : public Error {
 public:
  explicit BadGeometry(const std::string& what) : Error("geometry: " + what) {}
};

// One uniform linear array: collinear, equispaced microphones.
struct UniformArray {
  std::vector<Vec3> mics;
  double spacing = 0.0;  // meters between adjacent mics
  Vec3 axis;             // unit direction from mic 1 to mic N
};

UniformArray make_linear_array(const Vec3& origin, const Vec3& axis, size_t n,
                               double spacing);

struct ArrayGeometry {
  std::vector<UniformArray> arrays;
  double speed_of_sound = 343.0;        // m/s
  Aabb room{{0, 0, 0}, {4, 4, 2}};      // simulated room bounds

  // Checks collinearity/equispacing to 1e-9 m and finiteness.
  void validate() const;
};

// Grid of candidate source positions; lattice points are lo + i*resolution.
struct GridSpec {
  Aabb bounds;
  double resolution = 0.1;

  size_t nx() const;
  size_t ny() const;
  size_t nz() const;
  size_t size() const { return nx() * ny() * nz(); }
  Vec3 point(size_t index) const;
};

nlohmann::ordered_json geometry_to_json(const ArrayGeometry& g);
ArrayGeometry geometry_from_json(const nlohmann::json& j);
ArrayGeometry load_geometry(const std::string& path);
void save_geometry(const ArrayGeometry& g, const std::string& path);

}  // namespace playroom::audio
