// SPDX-License-Identifier: Apache-2.0
#pragma once

// Framings X1, X2, X3 built from an eigenspinor Phi: the quadratic images of
// Phi, Phi.(1+k)/sqrt2 and Phi.(1+j)/sqrt2. For g = h^2 (flat) those images are
// components along the g-orthonormal frame h^{-1} d/dx_a; Euclidean coordinate
// components are therefore divided by h once.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "spinframe/clifford.hpp"
#include "spinframe/dirac.hpp"
#include "spinframe/domain.hpp"

namespace spinframe {

struct FramingProvenance {
  std::string construction = "eigenspinor";  // e.g. "eigenspinor", "eigenspinor+rescale"
  double lambda = 0.0;
  int cluster_id = -1;
  int cluster_multiplicity = 0;
  double residual = 0.0;
  int rescale_count = 0;
};

struct Framing {
  static constexpr double kDegenerateRatio = 1e-10;

  VectorField x1;
  VectorField x2;
  VectorField x3;
  std::optional<ConformalFactor> metric_h;  // absent: flat
  FramingProvenance provenance;
  double min_length = 0.0;
  double mean_length = 0.0;
  bool degenerate = true;

  const Grid& grid() const { return x1.grid; }
  const VectorField& field(int a) const { return a == 0 ? x1 : (a == 1 ? x2 : x3); }
  VectorField& field(int a) { return a == 0 ? x1 : (a == 1 ? x2 : x3); }
};

/// g-length of each field at every node; g = h^2 (Euclidean).
inline std::array<ScalarField, 3> metric_lengths(const Framing& fr) {
  const Grid& g = fr.grid();
  const ScalarField h = fr.metric_h ? fr.metric_h->samples(g) : ScalarField(g, 1.0);
  std::array<ScalarField, 3> out{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) out[a][i] = h[i] * fr.field(a)[i].norm();
  return out;
}

/// Refreshes min/mean length and the degeneracy flag.
inline void update_length_summary(Framing& fr) {
  const auto len = metric_lengths(fr);
  double mn = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t i = 0; i < fr.grid().size(); ++i) {
    mn = std::min(mn, len[0][i]);
    sum += len[0][i];
  }
  fr.min_length = mn;
  fr.mean_length = sum / static_cast<double>(fr.grid().size());
  fr.degenerate = fr.min_length <= Framing::kDegenerateRatio * fr.mean_length;
}

inline Framing framing_from_eigenspinor(const SpinorField& phi, const OperatorSpec& spec, const FramingProvenance& provenance = {}) {
  require_same_grid(phi.grid(), spec.grid, "framing_from_eigenspinor");
  if (phi.max_abs_component() == 0.0) throw std::invalid_argument("framing_from_eigenspinor: eigenspinor is identically zero");
  const Grid& g = spec.grid;
  const ScalarField h = spec.conformal ? spec.conformal->samples(g) : ScalarField(g, 1.0);
  const auto values = section_values(phi, spec.spin);
  Framing fr{VectorField(g), VectorField(g), VectorField(g), spec.conformal, provenance};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const FrameTriple t = frame_triple(values[i]);
    const double inv_h = 1.0 / h[i];
    fr.x1[i] = inv_h * t.x1;
    fr.x2[i] = inv_h * t.x2;
    fr.x3[i] = inv_h * t.x3;
  }
  update_length_summary(fr);
  return fr;
}

inline Framing framing_from_eigenpair(const EigenPair& pair, const OperatorSpec& spec, int cluster_multiplicity = 0) {
  FramingProvenance prov;
  prov.lambda = pair.lambda;
  prov.cluster_id = pair.cluster_id;
  prov.cluster_multiplicity = cluster_multiplicity;
  prov.residual = pair.residual;
  return framing_from_eigenspinor(pair.field, spec, prov);
}

/// X_a -> f^{-3} X_a for the metric f^2 g'. Divergence-free for f^3 dvol_{g'}
/// whenever the input is divergence-free for dvol_{g'}.
inline Framing conformal_rescale(const Framing& fr, const ConformalFactor& f) {
  const Grid& g = fr.grid();
  if (!f.admissible_on(g)) throw std::invalid_argument("conformal_rescale: factor is not admissible on the framing grid");
  const ScalarField inv_f3 = f.power(g, -3.0);
  Framing out = fr;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) out.field(a)[i] = inv_f3[i] * fr.field(a)[i];
  out.metric_h = fr.metric_h ? (*fr.metric_h) * f : f;
  if (!out.metric_h->admissible_on(g))
    throw std::invalid_argument("conformal_rescale: rescaled metric factor exceeds the grid bandlimit");
  out.provenance.construction += "+rescale";
  ++out.provenance.rescale_count;
  update_length_summary(out);
  return out;
}

/// Nowhere-vanishing certificate: smallest g-length of X1 over the nodes.
inline double min_pointwise_norm(const Framing& fr) {
  const auto len = metric_lengths(fr);
  return *std::min_element(len[0].data.begin(), len[0].data.end());
}

/// A framing of identically zero fields (e.g. a placeholder for failed input).
inline Framing zero_framing(const Grid& g) {
  Framing fr{VectorField(g), VectorField(g), VectorField(g)};
  update_length_summary(fr);
  return fr;
}

}  // namespace spinframe
