#include "hmf/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hmf {

namespace {

using nlohmann::json;

Rat rat_of(const json& j) {
  if (j.is_number_integer()) return Rat(Int(j.get<long>()));
  return parse_rat(j.get<std::string>());
}

Int int_of(const json& j) {
  if (j.is_number_integer()) return Int(j.get<long>());
  return Int(j.get<std::string>());
}

NumberField field_of(const json& j) {
  ZPoly poly;
  for (auto& c : j.at("poly")) poly.push_back(int_of(c));
  int n = int(poly.size()) - 1;
  auto& jb = j.at("basis");
  QMat basis(n, n);
  for (int i = 0; i < n; i++)
    for (int c = 0; c < n; c++) basis.at(i, c) = rat_of(jb.at(i).at(c));
  std::vector<QVec> units;
  for (auto& ju : j.at("units")) {
    QVec u;
    for (auto& c : ju) u.push_back(rat_of(c));
    units.push_back(u);
  }
  return NumberField(poly, basis, int_of(j.at("disc")), units);
}

}  // namespace

NumberField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field fixture: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_field_json(ss.str());
}

NumberField load_field_json(const std::string& json_text) {
  return field_of(nlohmann::json::parse(json_text));
}

}  // namespace hmf
