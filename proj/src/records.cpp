#include "polyforge/records.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polyforge/geometry.hpp"

namespace polyforge {

using nlohmann::json;

namespace {

BondOrder order_from_code(int code) {
  switch (code) {
    case 1: return BondOrder::single;
    case 2: return BondOrder::double_bond;
    case 3: return BondOrder::triple;
    case 4: return BondOrder::aromatic;
    default: throw std::invalid_argument("bond order code must be 1..4, got " + std::to_string(code));
  }
}

int order_code(BondOrder o) { return static_cast<int>(o); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("coordinate must be a 3-array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

System parse_record(const std::string& json_line, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("record is not valid JSON: ") + e.what());
  }

  System sys;
  if (!j.contains("id") || !j.contains("periodic") || !j.contains("elements") ||
      !j.contains("bonds") || !j.contains("cart_coords"))
    throw std::invalid_argument("record missing required field (id/periodic/elements/bonds/cart_coords)");

  sys.id = j.at("id").get<std::string>();
  const bool periodic = j.at("periodic").get<bool>();
  sys.graph.periodic = periodic;
  sys.structure.periodic = periodic;

  int idx = 0;
  for (const auto& el : j.at("elements"))
    sys.graph.atoms.push_back({idx++, element_from_symbol(el.get<std::string>())});
  const int n = sys.graph.atom_count();

  for (const auto& b : j.at("bonds")) {
    if (!b.is_array() || b.size() != 4)
      throw std::invalid_argument("bond entry must be [i, j, order, z_shift]");
    sys.graph.bonds.push_back({b[0].get<int>(), b[1].get<int>(), order_from_code(b[2].get<int>()),
                               b[3].get<int>()});
  }

  for (const auto& c : j.at("cart_coords")) sys.structure.cart.push_back(vec3_from(c));
  if (static_cast<int>(sys.structure.cart.size()) != n)
    throw std::invalid_argument("record '" + sys.id + "': atom count mismatch between graph (" +
                                std::to_string(n) + ") and coordinates (" +
                                std::to_string(sys.structure.cart.size()) + ")");

  if (periodic) {
    if (!j.contains("b_z") || !j.contains("frac_coords"))
      throw std::invalid_argument("periodic record requires b_z and frac_coords");
    const double bz = j.at("b_z").get<double>();
    if (!(bz > 0.0)) throw std::invalid_argument("b_z must be positive");
    sys.structure.cell = Cell{bz};
    for (const auto& c : j.at("frac_coords")) sys.structure.frac.push_back(vec3_from(c));
    if (sys.structure.frac.size() != sys.structure.cart.size())
      throw std::invalid_argument("record '" + sys.id + "': frac/cart coordinate count mismatch");

    for (size_t i = 0; i < sys.structure.frac.size(); ++i) {
      const Vec3 recomputed = cart_to_frac(sys.structure.cart[i], *sys.structure.cell);
      for (int c = 0; c < 3; ++c)
        if (std::fabs(recomputed[c] - sys.structure.frac[i][c]) > 1e-6)
          throw std::invalid_argument("record '" + sys.id + "': fractional coordinate of atom " +
                                      std::to_string(i) +
                                      " inconsistent with Cartesian + cell beyond 1e-6");
      double fz = sys.structure.frac[i][2];
      if (fz < 0.0 || fz >= 1.0) {
        const double wrapped = fz - std::floor(fz);
        if (warnings)
          warnings->push_back("record '" + sys.id + "': fractional z of atom " + std::to_string(i) +
                              " outside [0,1), wrapped");
        sys.structure.frac[i][2] = wrapped;
        sys.structure.cart[i][2] = wrapped * sys.structure.cell->bz;
      }
    }
  } else {
    if (j.contains("frac_coords") && !j.at("frac_coords").empty())
      throw std::invalid_argument("non-periodic record must not carry fractional coordinates");
  }

  sys.graph.validate();
  return sys;
}

std::string to_record(const System& sys) {
  json j;
  j["id"] = sys.id;
  j["periodic"] = sys.graph.periodic;
  json els = json::array();
  for (const AtomNode& a : sys.graph.atoms) els.push_back(element_symbol(a.element));
  j["elements"] = els;
  json bonds = json::array();
  for (const BondEdge& b : sys.graph.bonds)
    bonds.push_back(json::array({b.i, b.j, order_code(b.order), b.z_shift}));
  j["bonds"] = bonds;
  json cart = json::array();
  for (const Vec3& p : sys.structure.cart) cart.push_back(json::array({p[0], p[1], p[2]}));
  j["cart_coords"] = cart;
  if (sys.graph.periodic) {
    j["b_z"] = sys.structure.cell->bz;
    json frac = json::array();
    for (const Vec3& f : sys.structure.frac) frac.push_back(json::array({f[0], f[1], f[2]}));
    j["frac_coords"] = frac;
  }
  return j.dump();
}

std::vector<System> read_jsonl(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open record file: " + path);
  std::vector<System> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line, warnings));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::string& path, const std::vector<System>& systems) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write record file: " + path);
  for (const System& s : systems) out << to_record(s) << "\n";
}

}  // namespace polyforge
