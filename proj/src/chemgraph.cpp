#include "polyforge/chemgraph.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <queue>

#include "polyforge/rng.hpp"

namespace polyforge {

namespace {

const std::array<std::string, kNumElements> kSymbols = {"H", "C",  "N", "O", "S",
                                                        "F", "Cl", "Si", "Br"};

// Allowed total valences per element, ascending. Implicit hydrogens fill up
// to the smallest entry that accommodates the explicit bonds.
const std::array<std::vector<int>, kNumElements> kValences = {{
    {1},        // H
    {4},        // C
    {3},        // N
    {2},        // O
    {2, 4, 6},  // S
    {1},        // F
    {1},        // Cl
    {4},        // Si
    {1},        // Br
}};

int max_valence(Element e) { return kValences[static_cast<size_t>(e)].back(); }

}  // namespace

const std::string& element_symbol(Element e) { return kSymbols[static_cast<size_t>(e)]; }

Element element_from_symbol(const std::string& s) {
  for (size_t i = 0; i < kSymbols.size(); ++i)
    if (kSymbols[i] == s) return static_cast<Element>(i);
  throw std::invalid_argument("unsupported element: " + s);
}

bool is_supported_element(const std::string& s) {
  for (const auto& sym : kSymbols)
    if (sym == s) return true;
  return false;
}

double bond_order_value(BondOrder o) {
  switch (o) {
    case BondOrder::single: return 1.0;
    case BondOrder::double_bond: return 2.0;
    case BondOrder::triple: return 3.0;
    case BondOrder::aromatic: return 1.5;
  }
  return 1.0;
}

std::vector<std::vector<BondEnd>> MolecularGraph::incident_ends() const {
  std::vector<std::vector<BondEnd>> ends(atoms.size());
  for (size_t b = 0; b < bonds.size(); ++b) {
    const BondEdge& e = bonds[b];
    if (e.i == e.j) {
      ends[static_cast<size_t>(e.i)].push_back({e.i, e.z_shift, static_cast<int>(b)});
      ends[static_cast<size_t>(e.i)].push_back({e.i, -e.z_shift, static_cast<int>(b)});
    } else {
      ends[static_cast<size_t>(e.i)].push_back({e.j, e.z_shift, static_cast<int>(b)});
      ends[static_cast<size_t>(e.j)].push_back({e.i, -e.z_shift, static_cast<int>(b)});
    }
  }
  return ends;
}

void MolecularGraph::validate() const {
  const int n = atom_count();
  for (int i = 0; i < n; ++i)
    if (atoms[static_cast<size_t>(i)].index != i)
      throw std::invalid_argument("atom indices must be contiguous from 0");
  std::vector<double> valence(static_cast<size_t>(n), 0.0);
  std::map<std::tuple<int, int, int>, int> seen;
  for (const BondEdge& e : bonds) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
      throw std::invalid_argument("bond references unknown atom");
    if (e.z_shift < -1 || e.z_shift > 1) throw std::invalid_argument("z_shift outside {-1,0,+1}");
    if (e.i == e.j && e.z_shift == 0) throw std::invalid_argument("self bond without image shift");
    if (!periodic && e.z_shift != 0)
      throw std::invalid_argument("non-periodic graph has a periodic bond");
    int a = e.i, b = e.j, s = e.z_shift;
    if (a > b) {
      std::swap(a, b);
      s = -s;
    }
    if (a == b) s = std::abs(s);
    if (++seen[{a, b, s}] > 1) throw std::invalid_argument("duplicate bond (i, j, z_shift)");
    const double o = bond_order_value(e.order);
    valence[static_cast<size_t>(e.i)] += o;
    valence[static_cast<size_t>(e.j)] += o;
  }
  for (int i = 0; i < n; ++i)
    if (valence[static_cast<size_t>(i)] >
        static_cast<double>(max_valence(atoms[static_cast<size_t>(i)].element)) + 1e-9)
      throw std::invalid_argument("valence of atom " + std::to_string(i) + " exceeds maximum for " +
                                  element_symbol(atoms[static_cast<size_t>(i)].element));
  if (periodic) {
    if (n == 0) throw std::invalid_argument("empty periodic graph");
    bool has_periodic_bond = false;
    for (const BondEdge& e : bonds) has_periodic_bond |= e.z_shift != 0;
    if (!has_periodic_bond)
      throw std::invalid_argument("periodic graph has no bond crossing the z boundary");
    // connectivity over the quotient graph
    std::vector<char> vis(static_cast<size_t>(n), 0);
    std::queue<int> q;
    q.push(0);
    vis[0] = 1;
    int count = 1;
    auto ends = incident_ends();
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const BondEnd& be : ends[static_cast<size_t>(u)])
        if (!vis[static_cast<size_t>(be.nbr)]) {
          vis[static_cast<size_t>(be.nbr)] = 1;
          ++count;
          q.push(be.nbr);
        }
    }
    if (count != n) throw std::invalid_argument("periodic graph is not connected");
  }
}

// ---- SMILES ----------------------------------------------------------------

namespace {

struct RawAtom {
  bool wildcard = false;
  Element element = Element::C;
  bool aromatic = false;
  int explicit_h = -1;  // -1 = fill implicitly
  size_t pos = 0;
};

struct RawBond {
  int i, j;
  BondOrder order;
  bool order_explicit;
  size_t pos;
};

struct SmilesParser {
  const std::string& s;
  size_t p = 0;
  std::vector<RawAtom> atoms;
  std::vector<RawBond> bonds;

  explicit SmilesParser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& msg, size_t at) const { throw ParseError(msg, at); }

  bool eof() const { return p >= s.size(); }
  char peek() const { return s[p]; }

  int add_atom(RawAtom a) {
    atoms.push_back(a);
    return static_cast<int>(atoms.size()) - 1;
  }

  void add_bond(int i, int j, BondOrder o, bool explicit_order, size_t at) {
    if (i == j) fail("ring bond closes an atom onto itself", at);
    for (const RawBond& b : bonds)
      if ((b.i == i && b.j == j) || (b.i == j && b.j == i))
        fail("duplicate bond between atoms", at);
    bonds.push_back({i, j, o, explicit_order, at});
  }

  // Parses one atom token at p, or returns -1 if none starts here.
  int parse_atom() {
    const size_t at = p;
    const char c = s[p];
    RawAtom a;
    a.pos = at;
    if (c == '[') return parse_bracket_atom();
    if (c == 'C') {
      if (p + 1 < s.size() && s[p + 1] == 'l') {
        a.element = Element::Cl;
        p += 2;
      } else {
        a.element = Element::C;
        ++p;
      }
      return add_atom(a);
    }
    if (c == 'B') {
      if (p + 1 < s.size() && s[p + 1] == 'r') {
        a.element = Element::Br;
        p += 2;
        return add_atom(a);
      }
      fail("unsupported element", at);
    }
    if (c == 'S' && p + 1 < s.size() && s[p + 1] == 'i') {
      a.element = Element::Si;
      p += 2;
      return add_atom(a);
    }
    switch (c) {
      case 'N': a.element = Element::N; break;
      case 'O': a.element = Element::O; break;
      case 'S': a.element = Element::S; break;
      case 'F': a.element = Element::F; break;
      case 'H': a.element = Element::H; break;
      case 'c': a.element = Element::C; a.aromatic = true; break;
      case 'n': a.element = Element::N; a.aromatic = true; break;
      case 'o': a.element = Element::O; a.aromatic = true; break;
      case 's': a.element = Element::S; a.aromatic = true; break;
      default: return -1;
    }
    ++p;
    return add_atom(a);
  }

  int parse_bracket_atom() {
    const size_t at = p;
    ++p;  // '['
    if (eof()) fail("unterminated bracket atom", at);
    RawAtom a;
    a.pos = at;
    if (peek() == '*') {
      a.wildcard = true;
      ++p;
    } else {
      if (std::isdigit(static_cast<unsigned char>(peek()))) fail("isotopes are not supported", p);
      std::string sym;
      if (eof()) fail("unterminated bracket atom", at);
      char c0 = peek();
      if (std::islower(static_cast<unsigned char>(c0))) {
        a.aromatic = true;
        sym += static_cast<char>(std::toupper(static_cast<unsigned char>(c0)));
        ++p;
      } else {
        sym += c0;
        ++p;
        if (!eof() && std::islower(static_cast<unsigned char>(peek()))) {
          const std::string two = sym + peek();
          if (is_supported_element(two)) {
            sym = two;
            ++p;
          }
        }
      }
      if (!is_supported_element(sym)) fail("unsupported element '" + sym + "'", at + 1);
      a.element = element_from_symbol(sym);
      if (a.aromatic && a.element != Element::C && a.element != Element::N &&
          a.element != Element::O && a.element != Element::S)
        fail("aromatic form not supported for this element", at + 1);
    }
    // optional H count, then ignored charges; bracket atoms carry only
    // explicit hydrogens
    a.explicit_h = 0;
    bool saw_h = false;
    while (!eof() && peek() != ']') {
      const char c = peek();
      if (c == 'H' && !a.wildcard) {
        if (saw_h) fail("repeated H count", p);
        saw_h = true;
        ++p;
        int count = 1;
        if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
          count = peek() - '0';
          ++p;
        }
        a.explicit_h = count;
      } else if (c == '+' || c == '-') {
        ++p;  // charge ignored
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++p;
      } else if (c == '@') {
        fail("stereochemistry is not supported", p);
      } else {
        fail("unexpected character in bracket atom", p);
      }
    }
    if (eof()) fail("unterminated bracket atom", at);
    ++p;  // ']'
    (void)saw_h;
    return add_atom(a);
  }

  struct RingSlot {
    int atom;
    BondOrder order;
    bool order_explicit;
    size_t pos;
  };

  void run() {
    std::vector<int> branch_stack;
    std::map<int, RingSlot> rings;
    int prev = -1;
    BondOrder pending = BondOrder::single;
    bool pending_explicit = false;
    size_t pending_pos = 0;

    auto connect = [&](int from, int to, size_t at) {
      BondOrder o = pending;
      if (!pending_explicit && atoms[static_cast<size_t>(from)].aromatic &&
          atoms[static_cast<size_t>(to)].aromatic)
        o = BondOrder::aromatic;
      add_bond(from, to, o, pending_explicit, at);
      pending = BondOrder::single;
      pending_explicit = false;
    };

    while (!eof()) {
      const char c = peek();
      const size_t at = p;
      if (c == '-' || c == '=' || c == '#' || c == ':') {
        if (pending_explicit) fail("two consecutive bond symbols", at);
        pending = c == '-' ? BondOrder::single
                 : c == '=' ? BondOrder::double_bond
                 : c == '#' ? BondOrder::triple
                            : BondOrder::aromatic;
        pending_explicit = true;
        pending_pos = at;
        ++p;
        continue;
      }
      if (c == '/' || c == '\\' || c == '@') fail("stereochemistry is not supported", at);
      if (c == '.') fail("multi-component SMILES is not supported", at);
      if (c == '(') {
        if (prev < 0) fail("branch before any atom", at);
        branch_stack.push_back(prev);
        ++p;
        continue;
      }
      if (c == ')') {
        if (branch_stack.empty()) fail("unmatched ')'", at);
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++p;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure before any atom", at);
        int label;
        if (c == '%') {
          if (p + 2 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[p + 1])) ||
              !std::isdigit(static_cast<unsigned char>(s[p + 2])))
            fail("malformed %nn ring label", at);
          label = (s[p + 1] - '0') * 10 + (s[p + 2] - '0');
          p += 3;
        } else {
          label = c - '0';
          ++p;
        }
        auto it = rings.find(label);
        if (it == rings.end()) {
          rings[label] = {prev, pending, pending_explicit, at};
          pending = BondOrder::single;
          pending_explicit = false;
        } else {
          RingSlot slot = it->second;
          rings.erase(it);
          BondOrder o = BondOrder::single;
          bool expl = false;
          if (slot.order_explicit && pending_explicit) {
            if (slot.order != pending) fail("conflicting ring bond orders", at);
            o = pending;
            expl = true;
          } else if (slot.order_explicit || pending_explicit) {
            o = slot.order_explicit ? slot.order : pending;
            expl = true;
          } else if (atoms[static_cast<size_t>(slot.atom)].aromatic &&
                     atoms[static_cast<size_t>(prev)].aromatic) {
            o = BondOrder::aromatic;
          }
          add_bond(slot.atom, prev, o, expl, at);
          pending = BondOrder::single;
          pending_explicit = false;
        }
        continue;
      }
      const int idx = parse_atom();
      if (idx < 0) fail(std::string("unexpected character '") + c + "'", at);
      if (prev >= 0) connect(prev, idx, at);
      else if (pending_explicit) fail("bond symbol before any atom", pending_pos);
      prev = idx;
    }
    if (!branch_stack.empty()) fail("unmatched '('", s.size());
    if (!rings.empty()) fail("unclosed ring label", rings.begin()->second.pos);
    if (pending_explicit) fail("dangling bond symbol", pending_pos);
    if (atoms.empty()) fail("empty SMILES", 0);
  }
};

}  // namespace

MolecularGraph parse_smiles(const std::string& text) {
  SmilesParser ps(text);
  ps.run();

  // Wildcard handling: exactly two mark the periodic attachment points.
  std::vector<int> wilds;
  for (size_t i = 0; i < ps.atoms.size(); ++i)
    if (ps.atoms[i].wildcard) wilds.push_back(static_cast<int>(i));
  if (!wilds.empty() && wilds.size() != 2)
    throw ParseError("polymer SMILES must contain exactly two [*] wildcards, found " +
                         std::to_string(wilds.size()),
                     ps.atoms[static_cast<size_t>(wilds[0])].pos);

  MolecularGraph g;
  g.periodic = !wilds.empty();

  std::vector<int> remap(ps.atoms.size(), -1);
  for (size_t i = 0; i < ps.atoms.size(); ++i) {
    if (ps.atoms[i].wildcard) continue;
    remap[i] = g.atom_count();
    g.atoms.push_back({g.atom_count(), ps.atoms[i].element});
  }

  int closure_ends[2] = {-1, -1};
  for (const RawBond& b : ps.bonds) {
    const bool wi = ps.atoms[static_cast<size_t>(b.i)].wildcard;
    const bool wj = ps.atoms[static_cast<size_t>(b.j)].wildcard;
    if (wi && wj) throw ParseError("wildcards may not bond to each other", b.pos);
    if (wi || wj) {
      const int w = wi ? b.i : b.j;
      const int other = wi ? b.j : b.i;
      const int slot = w == wilds[0] ? 0 : 1;
      if (closure_ends[slot] != -1)
        throw ParseError("wildcard atom must have exactly one neighbor", b.pos);
      if (b.order_explicit && b.order != BondOrder::single)
        throw ParseError("attachment bond must be single", b.pos);
      closure_ends[slot] = remap[static_cast<size_t>(other)];
      continue;
    }
    g.bonds.push_back({remap[static_cast<size_t>(b.i)], remap[static_cast<size_t>(b.j)], b.order, 0});
  }
  if (g.periodic) {
    if (closure_ends[0] < 0 || closure_ends[1] < 0)
      throw ParseError("each wildcard must bond to one atom",
                       ps.atoms[static_cast<size_t>(wilds[0])].pos);
    int i = closure_ends[1], j = closure_ends[0];  // tail image bonds to head
    int s = 1;
    if (i > j) {
      std::swap(i, j);
      s = -s;
    }
    if (i == j) s = 1;
    g.bonds.push_back({i, j, BondOrder::single, s});
  }

  // Implicit hydrogens to fill standard valences.
  std::vector<double> order_sum(static_cast<size_t>(g.atom_count()), 0.0);
  for (const BondEdge& e : g.bonds) {
    const double o = bond_order_value(e.order);
    order_sum[static_cast<size_t>(e.i)] += o;
    order_sum[static_cast<size_t>(e.j)] += o;
  }
  const int heavy = g.atom_count();
  std::vector<int> h_for_atom;
  for (int i = 0; i < heavy; ++i) {
    // locate the raw atom to honor bracket H counts and report positions
    size_t raw = 0;
    for (size_t r = 0; r < remap.size(); ++r)
      if (remap[r] == i) raw = r;
    const RawAtom& ra = ps.atoms[raw];
    const int need = static_cast<int>(std::ceil(order_sum[static_cast<size_t>(i)] - 1e-9));
    int h = 0;
    if (ra.explicit_h >= 0) {
      h = ra.explicit_h;
      if (need + h > max_valence(ra.element))
        throw ParseError("valence violation on " + element_symbol(ra.element), ra.pos);
    } else {
      const auto& allowed = kValences[static_cast<size_t>(ra.element)];
      int target = -1;
      for (int v : allowed)
        if (v >= need) {
          target = v;
          break;
        }
      if (target < 0) throw ParseError("valence violation on " + element_symbol(ra.element), ra.pos);
      h = target - need;
    }
    for (int k = 0; k < h; ++k) h_for_atom.push_back(i);
  }
  for (int parent : h_for_atom) {
    const int idx = g.atom_count();
    g.atoms.push_back({idx, Element::H});
    g.bonds.push_back({parent, idx, BondOrder::single, 0});
  }

  g.validate();
  return g;
}

// ---- positional encodings ---------------------------------------------------

namespace {

// Quotient multigraph adjacency: each bond adds one unit per direction;
// self-periodic bonds connect an atom to both of its own images.
Eigen::MatrixXd multigraph_adjacency(const MolecularGraph& g) {
  const int n = g.atom_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const BondEdge& e : g.bonds) {
    if (e.i == e.j)
      a(e.i, e.i) += 2.0;
    else {
      a(e.i, e.j) += 1.0;
      a(e.j, e.i) += 1.0;
    }
  }
  return a;
}

void require_connected(const MolecularGraph& g, const char* op) {
  const int n = g.atom_count();
  if (n == 0) throw std::invalid_argument(std::string(op) + ": empty graph");
  auto ends = g.incident_ends();
  std::vector<char> vis(static_cast<size_t>(n), 0);
  std::queue<int> q;
  q.push(0);
  vis[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const BondEnd& be : ends[static_cast<size_t>(u)])
      if (!vis[static_cast<size_t>(be.nbr)]) {
        vis[static_cast<size_t>(be.nbr)] = 1;
        ++count;
        q.push(be.nbr);
      }
  }
  if (count != n) throw std::invalid_argument(std::string(op) + ": graph is not connected");
}

}  // namespace

ad::Array random_walk_pe(const MolecularGraph& g, int steps) {
  require_connected(g, "random_walk_pe");
  const int n = g.atom_count();
  Eigen::MatrixXd a = multigraph_adjacency(g);
  Eigen::VectorXd deg = a.rowwise().sum();
  for (int i = 0; i < n; ++i)
    if (deg(i) <= 0.0)
      throw std::invalid_argument("random_walk_pe: atom " + std::to_string(i) + " is isolated");
  Eigen::MatrixXd p = deg.cwiseInverse().asDiagonal() * a;
  ad::Array out(n, steps);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int t = 0; t < steps; ++t) {
    m = m * p;
    for (int i = 0; i < n; ++i) out.at(i, t) = m(i, i);
  }
  return out;
}

ad::Array laplacian_pe(const MolecularGraph& g, int eigvecs) {
  require_connected(g, "laplacian_pe");
  const int n = g.atom_count();
  Eigen::MatrixXd a = multigraph_adjacency(g);
  Eigen::VectorXd deg = a.rowwise().sum();
  for (int i = 0; i < n; ++i)
    if (deg(i) <= 0.0)
      throw std::invalid_argument("laplacian_pe: atom " + std::to_string(i) + " is isolated");
  Eigen::VectorXd dinv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd lap =
      Eigen::MatrixXd::Identity(n, n) - dinv_sqrt.asDiagonal() * a * dinv_sqrt.asDiagonal();
  // symmetrize against roundoff before the eigensolve
  lap = 0.5 * (lap + lap.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("laplacian_pe: eigendecomposition failed");

  ad::Array out(n, eigvecs);
  int col = 0;
  for (int k = 0; k < n && col < eigvecs; ++k) {
    if (es.eigenvalues()(k) < 1e-8) continue;  // skip the trivial zero mode
    Eigen::VectorXd v = es.eigenvectors().col(k);
    v.normalize();
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v(i)) > std::abs(v(best))) best = i;
    if (v(best) < 0.0) v = -v;
    for (int i = 0; i < n; ++i) out.at(i, col) = v(i);
    ++col;
  }
  return out;  // remaining columns stay zero-padded
}

PositionalEncodings positional_encodings(const MolecularGraph& g) {
  return {random_walk_pe(g, 16), laplacian_pe(g, 2)};
}

// ---- graph-distance classes --------------------------------------------------

DistanceClassTensor distance_class_tensor(const MolecularGraph& g) {
  const int n = g.atom_count();
  auto ends = g.incident_ends();
  std::vector<std::vector<int>> nbrs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const BondEnd& be : ends[static_cast<size_t>(i)])
      if (be.nbr != i) nbrs[static_cast<size_t>(i)].push_back(be.nbr);
    std::sort(nbrs[static_cast<size_t>(i)].begin(), nbrs[static_cast<size_t>(i)].end());
    nbrs[static_cast<size_t>(i)].erase(
        std::unique(nbrs[static_cast<size_t>(i)].begin(), nbrs[static_cast<size_t>(i)].end()),
        nbrs[static_cast<size_t>(i)].end());
  }
  DistanceClassTensor d;
  d.n = n;
  d.cls.assign(static_cast<size_t>(n) * n, 4);
  for (int src = 0; src < n; ++src) {
    std::vector<int> dist(static_cast<size_t>(n), -1);
    std::queue<int> q;
    dist[static_cast<size_t>(src)] = 0;
    q.push(src);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      if (dist[static_cast<size_t>(u)] >= 4) continue;
      for (int v : nbrs[static_cast<size_t>(u)])
        if (dist[static_cast<size_t>(v)] < 0) {
          dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
          q.push(v);
        }
    }
    for (int j = 0; j < n; ++j) {
      const int dd = dist[static_cast<size_t>(j)];
      d.cls[static_cast<size_t>(src) * n + j] =
          static_cast<uint8_t>(dd < 0 || dd >= 4 ? 4 : dd);
    }
  }
  return d;
}

ad::Array DistanceClassTensor::one_hot_rows() const {
  ad::Array out(static_cast<int64_t>(n) * n, 5);
  for (size_t k = 0; k < cls.size(); ++k) out.v[k * 5 + cls[k]] = 1.0;
  return out;
}

// ---- labeled isomorphism ------------------------------------------------------

namespace {

struct IsoGraph {
  int n;
  std::vector<uint8_t> adj;       // boolean quotient adjacency, self-loops on diagonal
  std::vector<std::vector<int>> nbrs;
  std::vector<uint64_t> color;

  explicit IsoGraph(const MolecularGraph& g) : n(g.atom_count()) {
    adj.assign(static_cast<size_t>(n) * n, 0);
    for (const BondEdge& e : g.bonds) {
      adj[static_cast<size_t>(e.i) * n + e.j] = 1;
      adj[static_cast<size_t>(e.j) * n + e.i] = 1;
    }
    nbrs.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && adj[static_cast<size_t>(i) * n + j]) nbrs[static_cast<size_t>(i)].push_back(j);
    color.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const uint64_t self_loop = adj[static_cast<size_t>(i) * n + i];
      color[static_cast<size_t>(i)] =
          splitmix64(static_cast<uint64_t>(g.atoms[static_cast<size_t>(i)].element) * 2 + self_loop);
    }
  }

  bool has(int i, int j) const { return adj[static_cast<size_t>(i) * n + j] != 0; }

  void refine(int rounds) {
    for (int r = 0; r < rounds; ++r) {
      std::vector<uint64_t> next(color.size());
      for (int i = 0; i < n; ++i) {
        std::vector<uint64_t> nb;
        nb.reserve(nbrs[static_cast<size_t>(i)].size());
        for (int j : nbrs[static_cast<size_t>(i)]) nb.push_back(color[static_cast<size_t>(j)]);
        std::sort(nb.begin(), nb.end());
        uint64_t h = splitmix64(color[static_cast<size_t>(i)]);
        for (uint64_t x : nb) h = splitmix64(h ^ x);
        next[static_cast<size_t>(i)] = h;
      }
      color.swap(next);
    }
  }
};

}  // namespace

IsoResult is_isomorphic(const MolecularGraph& g, const MolecularGraph& h, int64_t max_expansions) {
  if (g.atom_count() != h.atom_count()) return {false, false};
  const int n = g.atom_count();
  if (n == 0) return {true, false};

  IsoGraph a(g), b(h);
  const int rounds = std::min(n, 8);
  a.refine(rounds);
  b.refine(rounds);

  {
    std::vector<uint64_t> ca = a.color, cb = b.color;
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    if (ca != cb) return {false, false};
  }

  // candidates per g-node, most constrained first, preferring connectivity
  // to already-ordered nodes so adjacency prunes early.
  std::vector<std::vector<int>> cand(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a.color[static_cast<size_t>(i)] == b.color[static_cast<size_t>(j)])
        cand[static_cast<size_t>(i)].push_back(j);

  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  std::vector<char> placed(static_cast<size_t>(n), 0);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    bool best_touch = false;
    for (int i = 0; i < n; ++i) {
      if (placed[static_cast<size_t>(i)]) continue;
      bool touch = false;
      for (int j : a.nbrs[static_cast<size_t>(i)])
        if (placed[static_cast<size_t>(j)]) touch = true;
      if (best < 0 || (touch && !best_touch) ||
          (touch == best_touch &&
           cand[static_cast<size_t>(i)].size() < cand[static_cast<size_t>(best)].size())) {
        best = i;
        best_touch = touch;
      }
    }
    placed[static_cast<size_t>(best)] = 1;
    order.push_back(best);
  }

  std::vector<int> map_ab(static_cast<size_t>(n), -1);
  std::vector<char> used(static_cast<size_t>(n), 0);
  int64_t expansions = 0;
  bool out_of_budget = false;

  std::function<bool(size_t)> dfs = [&](size_t depth) -> bool {
    if (depth == order.size()) return true;
    const int u = order[depth];
    for (int v : cand[static_cast<size_t>(u)]) {
      if (used[static_cast<size_t>(v)]) continue;
      if (++expansions > max_expansions) {
        out_of_budget = true;
        return false;
      }
      bool ok = true;
      for (size_t d = 0; d < depth && ok; ++d) {
        const int w = order[d];
        if (a.has(u, w) != b.has(v, map_ab[static_cast<size_t>(w)])) ok = false;
      }
      if (!ok) continue;
      map_ab[static_cast<size_t>(u)] = v;
      used[static_cast<size_t>(v)] = 1;
      if (dfs(depth + 1)) return true;
      if (out_of_budget) return false;
      map_ab[static_cast<size_t>(u)] = -1;
      used[static_cast<size_t>(v)] = 0;
    }
    return false;
  };

  const bool found = dfs(0);
  return {found, out_of_budget};
}

}  // namespace polyforge
