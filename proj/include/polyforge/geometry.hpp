#pragma once

#include <map>
#include <string>
#include <vector>

#include "polyforge/chemgraph.hpp"
#include "polyforge/structure.hpp"

namespace polyforge {

Vec3 frac_to_cart(const Vec3& f, const Cell& cell);
Vec3 cart_to_frac(const Vec3& p, const Cell& cell);

// Displacement pj - pi with the z component wrapped into (-bz/2, bz/2].
// x and y are aperiodic by construction.
Vec3 min_image_delta(const Vec3& pi, const Vec3& pj, const Cell& cell);

// Wrapped absolute difference of two angles in degrees, result in [0, 180].
double periodic_angle_diff(double x_deg, double y_deg);

// Bonded paths of the quotient graph. Angle and dihedral entries may revisit
// an atom index as long as the periodic images are distinct.
struct AngleTriple {
  int i, j, k;          // atoms; j is the apex
  int shift_i, shift_k; // image shifts of i and k relative to j
};
struct DihedralQuad {
  int i, j, k, l;
  int shift_i, shift_k, shift_l;  // image shifts relative to j
};

struct InternalCoordinateSet {
  std::vector<BondEdge> bonds;
  std::vector<AngleTriple> angles;
  std::vector<DihedralQuad> dihedrals;
};

InternalCoordinateSet enumerate_internal_coords(const MolecularGraph& g);

struct InternalCoordinateValues {
  std::vector<double> bond_lengths;     // Angstrom, aligned with set.bonds
  std::vector<double> angles_deg;       // [0, 180]
  std::vector<double> dihedrals_deg;    // [0, 360)
  std::vector<int> degenerate_bonds;    // indices excluded for zero-length vectors
  std::vector<int> degenerate_angles;
  std::vector<int> degenerate_dihedrals;
};

InternalCoordinateValues measure_internal_coords(const InternalCoordinateSet& set,
                                                 const MolecularGraph& g, const Structure& s);

// Convenience: enumerate + measure in one call.
InternalCoordinateValues internal_coords(const MolecularGraph& g, const Structure& s);

// Covalent radii table (Angstrom). Ships as a CSV next to the binaries; the
// built-in table carries the same values for library use without data files.
class CovalentRadii {
 public:
  static const CovalentRadii& builtin();
  static CovalentRadii load_csv(const std::string& path);

  double radius(Element e) const;

 private:
  std::map<Element, double> r_;
};

// Distance-based bond perception: an edge per periodic image closer than
// scale * (r_cov_i + r_cov_j). All orders are reported single.
MolecularGraph perceive_bonds(const std::vector<Element>& elements, const Structure& s,
                              const CovalentRadii& radii = CovalentRadii::builtin(),
                              double scale = 1.25);

// Smallest interatomic min-image distance over all pairs (and self images).
double min_contact_distance(const Structure& s);

}  // namespace polyforge
