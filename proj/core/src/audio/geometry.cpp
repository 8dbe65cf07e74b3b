#include "playroom/audio/geometry.hpp"

#include <cmath>
#include <fstream>

namespace playroom::audio {

UniformArray make_linear_array(const Vec3& origin, const Vec3& axis, size_t n,
                               double spacing) {
  UniformArray a;
  a.axis = axis.normalized();
  a.spacing = spacing;
  for (size_t i = 0; i < n; ++i)
    a.mics.push_back(origin + a.axis * (spacing * static_cast<double>(i)));
  return a;
}

void ArrayGeometry::validate() const {
  if (arrays.empty()) throw BadGeometry("no arrays");
  if (speed_of_sound <= 0.0) throw BadGeometry("speed of sound must be > 0");
  for (size_t ai = 0; ai < arrays.size(); ++ai) {
    const auto& a = arrays[ai];
    if (a.mics.size() < 2)
      throw BadGeometry("array " + std::to_string(ai) + " needs >= 2 mics");
    if (a.spacing <= 0.0)
      throw BadGeometry("array " + std::to_string(ai) + " spacing must be > 0");
    for (const auto& m : a.mics)
      if (!m.finite()) throw BadGeometry("non-finite mic position");
    const Vec3 step = a.axis.normalized() * a.spacing;
    for (size_t i = 1; i < a.mics.size(); ++i) {
      const Vec3 expect = a.mics[0] + step * static_cast<double>(i);
      if (distance(expect, a.mics[i]) > 1e-9)
        throw BadGeometry("array " + std::to_string(ai) +
                          " mics are not collinear/equispaced (mic " +
                          std::to_string(i) + ")");
    }
  }
}

size_t GridSpec::nx() const {
  return static_cast<size_t>(std::floor((bounds.hi.x - bounds.lo.x) / resolution)) + 1;
}
size_t GridSpec::ny() const {
  return static_cast<size_t>(std::floor((bounds.hi.y - bounds.lo.y) / resolution)) + 1;
}
size_t GridSpec::nz() const {
  return static_cast<size_t>(std::floor((bounds.hi.z - bounds.lo.z) / resolution)) + 1;
}

Vec3 GridSpec::point(size_t index) const {
  const size_t plane = ny() * nz();
  const size_t ix = index / plane;
  const size_t iy = (index % plane) / nz();
  const size_t iz = index % nz();
  return {bounds.lo.x + resolution * static_cast<double>(ix),
          bounds.lo.y + resolution * static_cast<double>(iy),
          bounds.lo.z + resolution * static_cast<double>(iz)};
}

namespace {

nlohmann::ordered_json vec_to_json(const Vec3& v) {
  return nlohmann::ordered_json::array({v.x, v.y, v.z});
}

Vec3 vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw BadGeometry("expected [x,y,z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

nlohmann::ordered_json geometry_to_json(const ArrayGeometry& g) {
  nlohmann::ordered_json j;
  j["c"] = g.speed_of_sound;
  j["room"] = {{"lo", vec_to_json(g.room.lo)}, {"hi", vec_to_json(g.room.hi)}};
  j["arrays"] = nlohmann::ordered_json::array();
  for (const auto& a : g.arrays) {
    nlohmann::ordered_json ja;
    ja["d"] = a.spacing;
    ja["axis"] = vec_to_json(a.axis);
    ja["mics"] = nlohmann::ordered_json::array();
    for (const auto& m : a.mics) ja["mics"].push_back(vec_to_json(m));
    j["arrays"].push_back(std::move(ja));
  }
  return j;
}

ArrayGeometry geometry_from_json(const nlohmann::json& j) {
  ArrayGeometry g;
  g.speed_of_sound = j.value("c", 343.0);
  if (j.contains("room")) {
    g.room.lo = vec_from_json(j["room"]["lo"]);
    g.room.hi = vec_from_json(j["room"]["hi"]);
  }
  if (!j.contains("arrays")) throw BadGeometry("missing 'arrays'");
  for (const auto& ja : j["arrays"]) {
    UniformArray a;
    a.spacing = ja.at("d").get<double>();
    a.axis = vec_from_json(ja.at("axis")).normalized();
    for (const auto& m : ja.at("mics")) a.mics.push_back(vec_from_json(m));
    g.arrays.push_back(std::move(a));
  }
  g.validate();
  return g;
}

ArrayGeometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadGeometry("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return geometry_from_json(j);
}

void save_geometry(const ArrayGeometry& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BadGeometry("cannot write " + path);
  out << geometry_to_json(g).dump(2) << "\n";
}

}  // namespace playroom::audio
