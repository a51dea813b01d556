#include "polyforge/conditioner.hpp"

namespace polyforge {

using namespace polyforge::ad;
using nn::Var;

namespace {

int bond_type_index(const BondEdge& e) {
  if (e.z_shift != 0) return 4;  // periodic closure token
  switch (e.order) {
    case BondOrder::single: return 0;
    case BondOrder::double_bond: return 1;
    case BondOrder::triple: return 2;
    case BondOrder::aromatic: return 3;
  }
  return 0;
}

}  // namespace

void Conditioner::declare(ParameterSet& ps) const {
  const int64_t w = cfg_.width;
  ps.declare("cond.atom_embed", kNumElements, w, Init::normal_scaled);
  ps.declare("cond.bond_embed", kBondVocab, w, Init::normal_scaled);
  nn::declare_mlp(ps, "cond.in", w + 16 + 2, w, w);
  for (int l = 0; l < kLayers; ++l) {
    const std::string p = "cond.l" + std::to_string(l);
    ps.declare(p + ".we", w, w);
    ps.declare(p + ".wv", w, w);
    nn::declare_mlp(ps, p + ".fe", 3 * w, w, w);
    nn::declare_mlp(ps, p + ".fv", 2 * w, w, w);
  }
  nn::declare_mlp(ps, "cond.ff", 2 * w, w, cfg_.out_dim);
}

Conditioner::Output Conditioner::forward(Tape& t, ParameterSet& ps, const MolecularGraph& g,
                                         const PositionalEncodings& pe) const {
  const int n = g.atom_count();
  if (pe.rw.rows != n || pe.lap.rows != n)
    throw std::invalid_argument("conditioner: positional encoding length mismatch");

  // one directed edge state per bond direction
  std::vector<int64_t> src, dst, btype;
  for (const BondEdge& e : g.bonds) {
    const int bt = bond_type_index(e);
    src.push_back(e.i);
    dst.push_back(e.j);
    btype.push_back(bt);
    src.push_back(e.j);
    dst.push_back(e.i);
    btype.push_back(bt);
  }

  std::vector<int64_t> atom_type;
  atom_type.reserve(static_cast<size_t>(n));
  for (const AtomNode& a : g.atoms) atom_type.push_back(static_cast<int64_t>(a.element));

  Var atom_emb = gather_rows(t.param(ps.get("cond.atom_embed")), atom_type);
  Var h = nn::mlp(t, ps, "cond.in",
                  concat_cols({atom_emb, t.constant(pe.rw), t.constant(pe.lap)}));
  Var e = gather_rows(t.param(ps.get("cond.bond_embed")), btype);

  for (int l = 0; l < kLayers; ++l) {
    const std::string p = "cond.l" + std::to_string(l);
    Var hi = gather_rows(h, src);
    Var hj = gather_rows(h, dst);
    e = add(matmul(e, t.param(ps.get(p + ".we"))),
            nn::mlp(t, ps, p + ".fe", layer_norm_rows(concat_cols({e, hi, hj}))));
    Var m = segment_sum_rows(e, dst, n);
    h = add(matmul(h, t.param(ps.get(p + ".wv"))),
            nn::mlp(t, ps, p + ".fv", layer_norm_rows(concat_cols({m, h}))));
  }

  Var g_pooled = nn::broadcast_rows(t, sum_rows(h), n);
  Var c = nn::mlp(t, ps, "cond.ff", concat_cols({g_pooled, h}));
  return {c, h};
}

}  // namespace polyforge
