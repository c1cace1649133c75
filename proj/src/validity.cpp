#include "commonlines/validity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace commonlines {

void Tolerances::validate() const {
  if (!(eq_tol > 0) || !(ineq_margin > 0) || !(degenerate_tol > 0)) {
    throw Error(ErrorCode::InvalidData, "tolerances must be positive");
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::Invalid: return "Invalid";
    case Verdict::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

std::string Offender::label() const {
  std::ostringstream out;
  auto tuple = [&](std::size_t from, std::size_t to) {
    out << '(';
    for (std::size_t k = from; k < to; ++k) out << (k > from ? "," : "") << indices[k] + 1;
    out << ')';
  };
  switch (kind) {
    case Kind::Norm:
      out << "norm ";
      tuple(0, 2);
      break;
    case Kind::Triangle:
      out << "triangle ";
      tuple(0, 3);
      break;
    case Kind::Loc:
      out << "loc (";
      tuple(0, 3);
      out << ',';
      tuple(3, 6);
      out << ')';
      break;
  }
  return out.str();
}

TriangleCertificate triangle_gram(const CommonLinesData& data, int i, int j, int k,
                                  const Tolerances& tol) {
  const double ca = data.line(i, j).dot(data.line(i, k));
  const double cb = data.line(j, i).dot(data.line(j, k));
  const double cg = data.line(k, i).dot(data.line(k, j));
  const double gram = 1.0 - ca * ca - cb * cb - cg * cg + 2.0 * ca * cb * cg;
  return TriangleCertificate{{i, j, k}, gram, gram > tol.ineq_margin};
}

LocCertificate loc_residual(const CommonLinesData& data, int i, int j, int k, int m,
                            const Tolerances& tol) {
  const Vec2& v_ij = data.line(i, j);
  const Vec2& v_ji = data.line(j, i);
  const Vec2& v_ik = data.line(i, k);
  const Vec2& v_jk = data.line(j, k);
  const Vec2& v_im = data.line(i, m);
  const Vec2& v_jm = data.line(j, m);

  const double dets[4] = {det2(v_ij, v_ik), det2(v_ij, v_im), det2(v_ji, v_jk), det2(v_ji, v_jm)};
  for (double d : dets) {
    if (std::abs(d) < tol.degenerate_tol) {
      std::ostringstream msg;
      msg << "zero determinant in law-of-cosines certificate ((" << i + 1 << "," << j + 1 << ","
          << k + 1 << "),(" << i + 1 << "," << j + 1 << "," << m + 1 << "))";
      throw Error(ErrorCode::DegenerateConfiguration, msg.str());
    }
  }

  const double a = data.line(k, i).dot(data.line(k, j)) - v_ij.dot(v_ik) * v_ji.dot(v_jk);
  const double b = data.line(m, i).dot(data.line(m, j)) - v_ij.dot(v_im) * v_ji.dot(v_jm);
  const double d1 = dets[1] * dets[3];
  const double d2 = dets[0] * dets[2];

  LocCertificate cert;
  cert.left = {i, j, k};
  cert.right = {i, j, m};
  cert.sigma = (d1 * d2 > 0) ? 1 : -1;
  cert.residual_signed = a * std::abs(d1) - cert.sigma * b * std::abs(d2);
  // expanded polynomial form; clamp the rounding below zero
  cert.residual_squared = std::max(0.0, a * a * d1 * d1 - 2.0 * d1 * d2 * a * b + b * b * d2 * d2);
  cert.squared_scale = a * a * d1 * d1 + std::abs(2.0 * d1 * d2 * a * b) + b * b * d2 * d2;
  cert.passes = std::abs(cert.residual_signed) <= tol.eq_tol;
  return cert;
}

std::vector<std::array<int, 4>> loc_enumeration(int n) {
  std::vector<std::array<int, 4>> out;
  out.reserve(6 * choose4(static_cast<std::size_t>(std::max(n, 0))));
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      for (int r = q + 1; r < n; ++r)
        for (int s = r + 1; s < n; ++s) {
          out.push_back({p, q, r, s});
          out.push_back({p, r, q, s});
          out.push_back({p, s, q, r});
          out.push_back({q, r, p, s});
          out.push_back({q, s, p, r});
          out.push_back({r, s, p, q});
        }
  return out;
}

ValidityReport is_valid(const CommonLinesData& data, const Tolerances& tol) {
  tol.validate();
  ValidityReport report;
  report.n = data.n();
  report.tolerances = tol;
  const int n = data.n();

  bool invalid = false;
  bool degenerate = false;

  report.norm_checks.reserve(data.pairs().size());
  for (const auto& p : data.pairs()) {
    const bool ok = std::abs(p.norm_residual()) <= tol.eq_tol;
    report.norm_checks.push_back({p.i(), p.j(), p.norm_residual(), ok});
    if (!ok) {
      invalid = true;
      report.offenders.push_back({Offender::Kind::Norm, {p.i(), p.j()}, p.norm_residual(),
                                  std::abs(p.norm_residual()) - tol.eq_tol});
    }
  }

  report.triangle_certificates.reserve(choose3(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        auto cert = triangle_gram(data, i, j, k, tol);
        if (!cert.passes) {
          invalid = true;
          report.offenders.push_back({Offender::Kind::Triangle, {i, j, k}, cert.gram_value,
                                      tol.ineq_margin - cert.gram_value});
        }
        report.triangle_certificates.push_back(cert);
      }

  const auto splits = loc_enumeration(n);
  report.loc_certificates.reserve(splits.size());
  for (const auto& [i, j, k, m] : splits) {
    LocCertificate cert;
    try {
      cert = loc_residual(data, i, j, k, m, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateConfiguration) throw;
      cert.left = {i, j, k};
      cert.right = {i, j, m};
      cert.residual_signed = std::nan("");
      cert.residual_squared = std::nan("");
      cert.degenerate = true;
      degenerate = true;
      report.offenders.push_back({Offender::Kind::Loc, {i, j, k, i, j, m}, cert.residual_signed,
                                  0.0, true});
    }
    if (!cert.degenerate && !cert.passes) {
      invalid = true;
      report.offenders.push_back({Offender::Kind::Loc, {i, j, k, i, j, m}, cert.residual_signed,
                                  std::abs(cert.residual_signed) - tol.eq_tol});
    }
    report.loc_certificates.push_back(cert);
  }

  report.verdict = invalid ? Verdict::Invalid : degenerate ? Verdict::Degenerate : Verdict::Valid;
  std::stable_sort(report.offenders.begin(), report.offenders.end(),
                   [](const Offender& x, const Offender& y) { return x.severity > y.severity; });
  return report;
}

}  // namespace commonlines
