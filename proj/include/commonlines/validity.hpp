#pragma once

// Membership certification for the set of valid common lines data: the norm
// equalities, one triangle inequality per triple and one law-of-cosines
// compatibility per pair of triples sharing an edge.

#include <array>
#include <string>
#include <vector>

#include "commonlines/lines.hpp"

namespace commonlines {

struct Tolerances {
  /// Threshold on the norm and law-of-cosines residuals.
  double eq_tol = 1e-8;
  /// Triangle certificates pass only when the Gram value exceeds this margin.
  double ineq_margin = 1e-10;
  /// Determinants (and sines) below this are treated as zero.
  double degenerate_tol = kDefaultTol;

  void validate() const;
};

struct TriangleCertificate {
  std::array<int, 3> indices;
  /// Determinant of the Gram matrix of the three embedded common lines,
  ///   1 - (v_ij.v_ik)^2 - (v_ji.v_jk)^2 - (v_ki.v_kj)^2
  ///     + 2 (v_ij.v_ik)(v_ji.v_jk)(v_ki.v_kj)
  /// on unit representatives.
  double gram_value;
  bool passes;
};

/// Law-of-cosines compatibility of triples (i,j,k) and (i,j,m) sharing the
/// edge (i,j).
struct LocCertificate {
  std::array<int, 3> left;
  std::array<int, 3> right;
  int sigma = 0;
  /// L = a |d1| - sigma b |d2|
  double residual_signed = 0.0;
  /// a^2 d1^2 - 2 d1 d2 a b + b^2 d2^2
  double residual_squared = 0.0;
  /// a^2 d1^2 + b^2 d2^2 + 2 |d1 d2 a b|, the scale of the squared form.
  double squared_scale = 0.0;
  bool degenerate = false;
  bool passes = false;
};

enum class Verdict { Valid, Invalid, Degenerate };
std::string to_string(Verdict v);

struct NormCheck {
  int i, j;
  double residual;
  bool passes;
};

/// One failing certificate, for reporting.
struct Offender {
  enum class Kind { Norm, Triangle, Loc } kind;
  /// Indices of the certificate (0-based): (i,j), (i,j,k) or (i,j,k,i,j,m).
  std::vector<int> indices;
  double value;
  /// How far past its threshold the certificate is; larger is worse.
  double severity;
  bool degenerate = false;

  std::string label() const;
};

struct ValidityReport {
  int n = 0;
  Tolerances tolerances;
  std::vector<NormCheck> norm_checks;
  std::vector<TriangleCertificate> triangle_certificates;
  std::vector<LocCertificate> loc_certificates;
  Verdict verdict = Verdict::Valid;
  /// Failing certificates, worst first.
  std::vector<Offender> offenders;
};

TriangleCertificate triangle_gram(const CommonLinesData& data, int i, int j, int k,
                                  const Tolerances& tol = {});

/// Evaluates L_{ijk,ijm} with
///   a  = v_ki.v_kj - (v_ij.v_ik)(v_ji.v_jk)
///   b  = v_mi.v_mj - (v_ij.v_im)(v_ji.v_jm)
///   d1 = det[v_ij, v_im] det[v_ji, v_jm]
///   d2 = det[v_ij, v_ik] det[v_ji, v_jk]
///   sigma = sign(d1 d2).
/// Throws DegenerateConfiguration if any of the four determinants is below
/// tol.degenerate_tol, since sigma is then undefined.
LocCertificate loc_residual(const CommonLinesData& data, int i, int j, int k, int m,
                            const Tolerances& tol = {});

/// The six (shared edge, other two) splits of each 4-subset p<q<r<s:
/// (p,q|r,s), (p,r|q,s), (p,s|q,r), (q,r|p,s), (q,s|p,r), (r,s|p,q).
/// Each entry is {i, j, k, m} for the triple pair ((i,j,k), (i,j,m)).
std::vector<std::array<int, 4>> loc_enumeration(int n);

/// Evaluates every certificate. The verdict is Invalid if any norm check,
/// triangle or non-degenerate law-of-cosines certificate fails; otherwise
/// Degenerate if any law-of-cosines certificate hit a zero determinant;
/// otherwise Valid.
ValidityReport is_valid(const CommonLinesData& data, const Tolerances& tol = {});

}  // namespace commonlines
