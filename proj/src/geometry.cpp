#include "polyforge/geometry.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace polyforge {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 frac_to_cart(const Vec3& f, const Cell& cell) {
  return {Cell::kXY * f[0], Cell::kXY * f[1], cell.bz * f[2]};
}

Vec3 cart_to_frac(const Vec3& p, const Cell& cell) {
  return {p[0] / Cell::kXY, p[1] / Cell::kXY, p[2] / cell.bz};
}

Vec3 min_image_delta(const Vec3& pi, const Vec3& pj, const Cell& cell) {
  Vec3 d = pj - pi;
  // wrap dz into (-bz/2, bz/2]; ceil keeps the +bz/2 tie on the positive side
  d[2] -= cell.bz * std::ceil(d[2] / cell.bz - 0.5);
  return d;
}

double periodic_angle_diff(double x_deg, double y_deg) {
  double d = std::fmod(std::fabs(x_deg - y_deg), 360.0);
  return std::min(d, 360.0 - d);
}

// ---- internal coordinate enumeration -----------------------------------------

InternalCoordinateSet enumerate_internal_coords(const MolecularGraph& g) {
  InternalCoordinateSet set;
  set.bonds = g.bonds;
  const auto ends = g.incident_ends();

  for (int j = 0; j < g.atom_count(); ++j) {
    const auto& ej = ends[static_cast<size_t>(j)];
    for (size_t a = 0; a < ej.size(); ++a)
      for (size_t b = a + 1; b < ej.size(); ++b) {
        if (ej[a].nbr == ej[b].nbr && ej[a].shift == ej[b].shift) continue;  // same image
        set.angles.push_back({ej[a].nbr, j, ej[b].nbr, ej[a].shift, ej[b].shift});
      }
  }

  for (const BondEdge& e : g.bonds) {
    const int j = e.i, k = e.j, sjk = e.z_shift;
    for (const BondEnd& bi : ends[static_cast<size_t>(j)]) {
      if (bi.nbr == k && bi.shift == sjk) continue;  // the central bond itself
      for (const BondEnd& bl : ends[static_cast<size_t>(k)]) {
        if (bl.nbr == j && bl.shift == -sjk) continue;
        const int sl_abs = sjk + bl.shift;
        if (bi.nbr == bl.nbr && bi.shift == sl_abs) continue;  // i and l coincide
        set.dihedrals.push_back({bi.nbr, j, k, bl.nbr, bi.shift, sjk, sl_abs});
      }
    }
  }
  return set;
}

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

// Nearest-image step from atom a to atom b; self steps use the stated image
// shift since the nearest image of an atom to itself is itself.
Vec3 image_step(const Structure& s, int a, int b, int shift) {
  if (a == b) {
    const double bz = s.periodic ? s.cell->bz : 0.0;
    return {0.0, 0.0, static_cast<double>(shift) * bz};
  }
  if (s.periodic) return min_image_delta(s.cart[static_cast<size_t>(a)], s.cart[static_cast<size_t>(b)], *s.cell);
  return s.cart[static_cast<size_t>(b)] - s.cart[static_cast<size_t>(a)];
}

double angle_deg(const Vec3& u, const Vec3& v) {
  const double nu = norm(u), nv = norm(v);
  double c = dot(u, v) / (nu * nv);
  c = std::max(-1.0, std::min(1.0, c));
  return std::acos(c) * kRadToDeg;
}

// Signed dihedral mapped to [0, 360).
double dihedral_deg(const Vec3& b1, const Vec3& b2, const Vec3& b3) {
  const Vec3 n1 = cross(b1, b2);
  const Vec3 n2 = cross(b2, b3);
  const double nb2 = norm(b2);
  const Vec3 m = cross(n1, {b2[0] / nb2, b2[1] / nb2, b2[2] / nb2});
  const double x = dot(n1, n2);
  const double y = dot(m, n2);
  double tau = std::atan2(y, x) * kRadToDeg;
  if (tau < 0.0) tau += 360.0;
  if (tau >= 360.0) tau -= 360.0;
  return tau;
}

}  // namespace

InternalCoordinateValues measure_internal_coords(const InternalCoordinateSet& set,
                                                 const MolecularGraph& g, const Structure& s) {
  if (s.atom_count() != g.atom_count())
    throw std::invalid_argument("structure/graph atom count mismatch");
  InternalCoordinateValues out;
  out.bond_lengths.reserve(set.bonds.size());
  constexpr double kDegenerate = 1e-10;

  for (size_t b = 0; b < set.bonds.size(); ++b) {
    const BondEdge& e = set.bonds[b];
    const Vec3 d = image_step(s, e.i, e.j, e.z_shift);
    const double len = norm(d);
    if (len < kDegenerate) {
      out.degenerate_bonds.push_back(static_cast<int>(b));
      out.bond_lengths.push_back(0.0);
    } else {
      out.bond_lengths.push_back(len);
    }
  }

  for (size_t a = 0; a < set.angles.size(); ++a) {
    const AngleTriple& t = set.angles[a];
    const Vec3 u = image_step(s, t.j, t.i, t.shift_i);
    const Vec3 v = image_step(s, t.j, t.k, t.shift_k);
    if (norm(u) < kDegenerate || norm(v) < kDegenerate) {
      out.degenerate_angles.push_back(static_cast<int>(a));
      out.angles_deg.push_back(0.0);
    } else {
      out.angles_deg.push_back(angle_deg(u, v));
    }
  }

  for (size_t d = 0; d < set.dihedrals.size(); ++d) {
    const DihedralQuad& q = set.dihedrals[d];
    const Vec3 b2 = image_step(s, q.j, q.k, q.shift_k);
    const Vec3 b1 = -1.0 * image_step(s, q.j, q.i, q.shift_i);
    const Vec3 b3 = image_step(s, q.k, q.l, q.shift_l - q.shift_k);
    const double n1 = norm(cross(b1, b2));
    const double n2 = norm(cross(b2, b3));
    if (norm(b2) < kDegenerate || n1 < kDegenerate || n2 < kDegenerate) {
      out.degenerate_dihedrals.push_back(static_cast<int>(d));
      out.dihedrals_deg.push_back(0.0);
    } else {
      out.dihedrals_deg.push_back(dihedral_deg(b1, b2, b3));
    }
  }
  return out;
}

InternalCoordinateValues internal_coords(const MolecularGraph& g, const Structure& s) {
  return measure_internal_coords(enumerate_internal_coords(g), g, s);
}

// ---- covalent radii ------------------------------------------------------------

const CovalentRadii& CovalentRadii::builtin() {
  static const CovalentRadii table = [] {
    CovalentRadii t;
    t.r_ = {{Element::H, 0.31},  {Element::C, 0.76},  {Element::N, 0.71},
            {Element::O, 0.66},  {Element::S, 1.05},  {Element::F, 0.57},
            {Element::Cl, 1.02}, {Element::Si, 1.11}, {Element::Br, 1.20}};
    return t;
  }();
  return table;
}

CovalentRadii CovalentRadii::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open covalent radii file: " + path);
  CovalentRadii t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string sym, rad;
    if (!std::getline(ls, sym, ',') || !std::getline(ls, rad))
      throw std::runtime_error("malformed radii line: " + line);
    if (sym == "element") continue;  // header
    t.r_[element_from_symbol(sym)] = std::stod(rad);
  }
  for (int e = 0; e < kNumElements; ++e)
    if (!t.r_.count(static_cast<Element>(e)))
      throw std::runtime_error("radii file missing element " +
                               element_symbol(static_cast<Element>(e)));
  return t;
}

double CovalentRadii::radius(Element e) const { return r_.at(e); }

// ---- bond perception -------------------------------------------------------------

MolecularGraph perceive_bonds(const std::vector<Element>& elements, const Structure& s,
                              const CovalentRadii& radii, double scale) {
  if (static_cast<int>(elements.size()) != s.atom_count())
    throw std::invalid_argument("perceive_bonds: element/coordinate count mismatch");
  MolecularGraph g;
  g.periodic = s.periodic;
  for (size_t i = 0; i < elements.size(); ++i)
    g.atoms.push_back({static_cast<int>(i), elements[i]});

  const int n = s.atom_count();
  const double bz = s.periodic ? s.cell->bz : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double cutoff =
          scale * (radii.radius(elements[static_cast<size_t>(i)]) +
                   radii.radius(elements[static_cast<size_t>(j)]));
      if (i == j) {
        if (!s.periodic) continue;
        if (bz < cutoff) g.bonds.push_back({i, i, BondOrder::single, 1});
        continue;
      }
      if (!s.periodic) {
        const Vec3 d = s.cart[static_cast<size_t>(j)] - s.cart[static_cast<size_t>(i)];
        if (norm(d) < cutoff) g.bonds.push_back({i, j, BondOrder::single, 0});
        continue;
      }
      for (int shift = -1; shift <= 1; ++shift) {
        Vec3 d = s.cart[static_cast<size_t>(j)] - s.cart[static_cast<size_t>(i)];
        d[2] += static_cast<double>(shift) * bz;
        if (norm(d) < cutoff) g.bonds.push_back({i, j, BondOrder::single, shift});
      }
    }
  }
  return g;
}

double min_contact_distance(const Structure& s) {
  const int n = s.atom_count();
  double best = std::numeric_limits<double>::infinity();
  const double bz = s.periodic ? s.cell->bz : 0.0;
  for (int i = 0; i < n; ++i) {
    if (s.periodic) best = std::min(best, bz);  // own image along z
    for (int j = i + 1; j < n; ++j) {
      if (s.periodic) {
        for (int shift = -1; shift <= 1; ++shift) {
          Vec3 d = s.cart[static_cast<size_t>(j)] - s.cart[static_cast<size_t>(i)];
          d[2] += static_cast<double>(shift) * bz;
          best = std::min(best, norm(d));
        }
      } else {
        best = std::min(best, norm(s.cart[static_cast<size_t>(j)] - s.cart[static_cast<size_t>(i)]));
      }
    }
  }
  return best;
}

}  // namespace polyforge
