#include "state_transport/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "state_transport/errors.hpp"

namespace state_transport {
namespace {

std::shared_ptr<const LowRankSpectrum> spectrum_ptr(RealVector values, Matrix vectors) {
  return std::make_shared<const LowRankSpectrum>(
      LowRankSpectrum{std::move(values), std::move(vectors)});
}

HermitianMatrix from_spectrum(const LowRankSpectrum& s, Index dim) {
  if (s.values.size() == 0) return HermitianMatrix::zero(dim);
  return HermitianMatrix::symmetrized(s.vectors * s.values.cast<Complex>().asDiagonal() *
                                      s.vectors.adjoint());
}

// Concatenates spectra whose eigenvector ranges are mutually orthogonal.
LowRankSpectrum direct_sum(const std::vector<LowRankSpectrum>& parts, Index dim) {
  Index total = 0;
  for (const auto& p : parts) total += p.values.size();
  LowRankSpectrum out{RealVector(total), Matrix(dim, total)};
  Index at = 0;
  for (const auto& p : parts) {
    out.values.segment(at, p.values.size()) = p.values;
    out.vectors.middleCols(at, p.values.size()) = p.vectors;
    at += p.values.size();
  }
  return out;
}

Vector apply_exp(const LowRankSpectrum& s, double t, const Vector& v) {
  if (s.values.size() == 0) return v;
  Vector shift(s.values.size());
  for (Index k = 0; k < shift.size(); ++k) shift(k) = std::polar(1.0, t * s.values(k)) - 1.0;
  return v + s.vectors * (shift.asDiagonal() * (s.vectors.adjoint() * v));
}

Matrix coordinates(const MatrixUnits& mu, const Vector& v) {
  Matrix x(mu.multiplicity(), mu.n());
  for (Index j = 0; j < mu.n(); ++j) x.col(j) = mu.isometry(j).adjoint() * v;
  return x;
}

// Norm of the part of v outside the ranges of the isometries.
double leakage(const MatrixUnits& mu, const Vector& v, const Matrix& coords) {
  Vector rest = v;
  for (Index j = 0; j < mu.n(); ++j) rest -= mu.isometry(j) * coords.col(j);
  return rest.norm();
}

}  // namespace

CommutantGenerator commutant_generator(const MatrixUnits& mu, const Vector& xi, const Vector& eta,
                                       double delta) {
  const Matrix x = coordinates(mu, xi);
  const Matrix y = coordinates(mu, eta);
  const double leak_x = leakage(mu, xi, x);
  const double leak_y = leakage(mu, eta, y);
  if (std::max(leak_x, leak_y) > 1e-10) {
    throw Error(ErrorKind::kPrecondition, "state is not supported in the block",
                std::max(leak_x, leak_y));
  }
  const VectorFamily fx(x);
  const VectorFamily fy(y);
  const double gap = gram_gap(fx, fy);
  if (!(gap < delta)) {
    throw Error(ErrorKind::kPrecondition, "matrix-unit statistics gap is not below delta", gap);
  }
  const Alignment align = align_unitary(fx, fy, delta);
  const Index k = mu.multiplicity();
  const Matrix& s = align.support;

  RealVector angles(0);
  Matrix local(k, 0);
  if (s.cols() > 0) {
    const UnitaryMatrix us = UnitaryMatrix::assume_unitary(s.adjoint() * align.unitary.matrix() * s);
    const HermitianEigen eig = eig_hermitian(spectral_generator(us));
    std::vector<Index> keep;
    for (Index c = 0; c < eig.values.size(); ++c) {
      if (std::abs(eig.values(c)) > 1e-14) keep.push_back(c);
    }
    angles.resize(static_cast<Index>(keep.size()));
    local.resize(k, static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      angles(static_cast<Index>(c)) = eig.values(keep[c]);
      local.col(static_cast<Index>(c)) = s * eig.vectors.matrix().col(keep[c]);
    }
  }
  const Index r = angles.size();
  const Index n = mu.n();
  LowRankSpectrum spec{RealVector(n * r), Matrix(mu.ambient_dim(), n * r)};
  for (Index i = 0; i < n; ++i) {
    spec.values.segment(i * r, r) = angles;
    spec.vectors.middleCols(i * r, r) = mu.isometry(i) * local;
  }
  HermitianMatrix corner =
      r == 0 ? HermitianMatrix::zero(k)
             : HermitianMatrix::symmetrized(local * angles.cast<Complex>().asDiagonal() * local.adjoint());
  Vector end_xi = apply_exp(spec, 1.0, xi);
  return {std::move(spec), std::move(corner), gap, std::move(end_xi)};
}

double geodesic_angle(const Vector& xi, const Vector& eta) {
  const double c = std::clamp(std::real(inner(xi, eta)), -1.0, 1.0);
  return std::acos(c);
}

GeodesicGenerator geodesic_generator(const Vector& xi, const Vector& eta, bool scalar_colinear) {
  const Index dim = xi.size();
  const double r = xi.norm();
  if (eta.size() != dim || !(r > 0.0) || std::abs(eta.norm() - r) > 1e-10 * std::max(1.0, r)) {
    throw Error(ErrorKind::kPrecondition, "geodesic endpoints need equal nonzero norms");
  }
  const Vector x = xi / r;
  const Vector y = eta / r;
  const Complex s = inner(y, x);
  const Vector perp = y - s * x;
  const double pn = perp.norm();

  if (pn <= 1e-12) {
    const double psi = std::arg(s);
    GeodesicGenerator out{HermitianMatrix::zero(dim), nullptr, std::abs(psi), true};
    if (psi == 0.0) {
      out.spectrum = spectrum_ptr(RealVector(0), Matrix(dim, 0));
    } else if (scalar_colinear) {
      out.spectrum = spectrum_ptr(RealVector::Constant(dim, psi), Matrix::Identity(dim, dim));
    } else {
      out.spectrum = spectrum_ptr(RealVector::Constant(1, psi), x);
    }
    out.h = from_spectrum(*out.spectrum, dim);
    return out;
  }

  const double sin_t = std::hypot(std::imag(s), pn);
  const double theta = std::atan2(sin_t, std::real(s));
  const double alpha = theta * std::imag(s) / sin_t;
  const double beta = theta * pn / sin_t;
  Eigen::Matrix2cd hs;
  hs << Complex(alpha, 0.0), Complex(0.0, beta), Complex(0.0, -beta), Complex(-alpha, 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> small(hs);

  Matrix q(dim, 2);
  q.col(0) = x;
  q.col(1) = perp / pn;
  auto spec = spectrum_ptr(small.eigenvalues(), q * small.eigenvectors());
  return {from_spectrum(*spec, dim), spec, theta, false};
}

UnitaryPath geodesic_pair(const StateVector& xi, const StateVector& eta, int segments) {
  if (segments < 1) throw Error(ErrorKind::kPrecondition, "geodesic needs at least one segment");
  const GeodesicGenerator g = geodesic_generator(xi.vector(), eta.vector(), true);
  std::vector<PathSegment> parts;
  parts.reserve(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    const double t0 = static_cast<double>(k) / segments;
    const double t1 = static_cast<double>(k + 1) / segments;
    parts.push_back(PathSegment::make(t0, t1, g.h, UnitaryMatrix::assume_unitary(g.spectrum->exp(t0)),
                                      g.spectrum));
  }
  parts.back().t1 = 1.0;
  return UnitaryPath(std::move(parts), true);
}

LowerBoundCertificate geodesic_lower_bound(const UnitaryPath& path, const StateVector& xi,
                                           const StateVector& eta, int samples) {
  const Index dim = path.dim();
  const Matrix u0 = path.at(path.t_begin()).matrix();
  const Matrix u1 = path.end().matrix();
  const double start_off = op_norm(u0 - Matrix::Identity(dim, dim));
  const double end_off = (u1 * xi.vector() - eta.vector()).norm();
  if (start_off > 1e-8 || end_off > 1e-8) {
    throw Error(ErrorKind::kPrecondition, "path endpoints do not match (I, xi -> eta)",
                std::max(start_off, end_off));
  }
  LowerBoundCertificate cert;
  cert.theta = geodesic_angle(xi.vector(), eta.vector());
  cert.length = path.length();

  std::vector<Complex> spec = unitary_spectrum(UnitaryMatrix::assume_unitary(u1));
  Complex lambda = spec.front();
  for (const Complex& z : spec) {
    if (std::abs(std::arg(z)) > std::abs(std::arg(lambda))) lambda = z;
  }
  cert.phi = std::abs(std::arg(lambda));

  const double span = path.t_end() - path.t_begin();
  Matrix later = u1;
  for (int k = samples - 1; k >= 0; --k) {
    const double t = path.t_begin() + span * k / samples;
    Matrix earlier = path.at(t).matrix();
    cert.chord_sum += op_norm(later - earlier);
    const std::vector<Complex> prev = unitary_spectrum(UnitaryMatrix::assume_unitary(earlier));
    Complex best = prev.front();
    for (const Complex& mu : prev) {
      if (std::abs(mu - lambda) < std::abs(best - lambda)) best = mu;
    }
    cert.chain_sum += std::abs(best - lambda);
    lambda = best;
    later = std::move(earlier);
  }
  if (cert.phi > cert.length + 1e-6) {
    throw Error(ErrorKind::kCertification, "spectral angle exceeds the path length",
                cert.phi - cert.length);
  }
  return cert;
}

Complex spectrum_match(const UnitaryMatrix& u, const UnitaryMatrix& v, Complex lambda) {
  const std::vector<Complex> su = unitary_spectrum(u);
  double miss = std::numeric_limits<double>::infinity();
  for (const Complex& z : su) miss = std::min(miss, std::abs(z - lambda));
  if (miss > 1e-8) throw Error(ErrorKind::kPrecondition, "lambda is not in Spec(u)", miss);
  const std::vector<Complex> sv = unitary_spectrum(v);
  Complex best = sv.front();
  for (const Complex& mu : sv) {
    if (std::abs(mu - lambda) < std::abs(best - lambda)) best = mu;
  }
  return best;
}

ProjectionTransport projection_transport(const HermitianMatrix& e, const StateVector& xi,
                                         const StateVector& eta) {
  const Matrix& p = e.matrix();
  const Index dim = e.dim();
  const double idem = op_norm(p * p - p);
  if (idem > 1e-10) throw Error(ErrorKind::kPrecondition, "e is not a projection", idem);
  const Vector& x = xi.vector();
  const Vector& y = eta.vector();
  const double mass_gap = std::abs(std::real(inner(p * x, x)) - std::real(inner(p * y, y)));
  if (mass_gap > 1e-10) {
    throw Error(ErrorKind::kPrecondition, "xi and eta carry different e-mass", mass_gap);
  }

  const Vector a = p * x;
  const Vector b = p * y;
  const Vector c = x - a;
  const Vector d = y - b;
  const Complex ab = inner(a, b);
  const Complex cd = inner(c, d);

  // Phase lambda with Re(conj(lambda) <a,b>) >= 0 and Re(conj(lambda) <c,d>) >= 0.
  double psi = 0.0;
  const double tiny = 1e-14;
  if (std::abs(ab) > tiny && std::abs(cd) > tiny) {
    const double p1 = std::arg(ab);
    double p2 = std::arg(cd);
    while (p2 - p1 > kPi) p2 -= 2 * kPi;
    while (p1 - p2 > kPi) p2 += 2 * kPi;
    psi = 0.5 * (p1 + p2);
  } else if (std::abs(ab) > tiny) {
    psi = std::arg(ab);
  } else if (std::abs(cd) > tiny) {
    psi = std::arg(cd);
  }
  const Complex lambda = std::polar(1.0, psi);

  const Matrix q = Matrix::Identity(dim, dim) - p;
  std::vector<LowRankSpectrum> parts;
  for (const auto& [from, to, range] :
       {std::tuple<Vector, Vector, const Matrix*>{a, b, &p}, std::tuple<Vector, Vector, const Matrix*>{c, d, &q}}) {
    const double nf = from.norm();
    const double nt = to.norm();
    if (nf <= 1e-12 || nt <= 1e-12) continue;
    const Vector target = lambda * to * (nf / nt);
    LowRankSpectrum part = *geodesic_generator(from, target, false).spectrum;
    // Pull the eigenvectors back into the range (nearest isometry) so that
    // roundoff in near-colinear cases cannot leak across e.
    Eigen::JacobiSVD<Matrix> svd(*range * part.vectors, Eigen::ComputeThinU | Eigen::ComputeThinV);
    part.vectors = svd.matrixU() * svd.matrixV().adjoint();
    parts.push_back(std::move(part));
  }
  const LowRankSpectrum sum = direct_sum(parts, dim);
  auto spec = std::make_shared<const LowRankSpectrum>(sum);
  return {UnitaryPath::one_parameter(from_spectrum(sum, dim), spec), lambda};
}

double commutant_delta(Index n, Index multiplicity, double eps) {
  return delta_for_tolerance(n, multiplicity, eps / std::sqrt(static_cast<double>(n)));
}

CommutantTransport commutant_transport(const MatrixUnits& mu, const StateVector& xi,
                                       const StateVector& eta, double eps, bool repair) {
  return commutant_transport_with_delta(mu, xi.vector(), eta.vector(), eps,
                                        commutant_delta(mu.n(), mu.multiplicity(), eps), repair);
}

CommutantTransport commutant_transport_with_delta(const MatrixUnits& mu, const Vector& xi,
                                                  const Vector& eta, double eps, double delta,
                                                  bool repair) {
  if (!(eps > 0.0)) throw Error(ErrorKind::kPrecondition, "eps must be positive");
  const Index dim = mu.ambient_dim();
  if (xi.size() != dim || eta.size() != dim) {
    throw Error(ErrorKind::kPrecondition, "state dimension does not match the block");
  }
  CommutantGenerator leg = commutant_generator(mu, xi, eta, delta);
  auto spec = std::make_shared<const LowRankSpectrum>(leg.spectrum);
  UnitaryPath path = UnitaryPath::one_parameter(from_spectrum(leg.spectrum, dim), spec);
  const double terminal = (leg.end_xi - eta).norm();
  double repair_length = 0.0;
  if (repair && terminal > 1e-15) {
    const GeodesicGenerator g = geodesic_generator(leg.end_xi, eta, false);
    repair_length = g.theta;
    path = path.then(UnitaryPath::one_parameter(g.h, g.spectrum)).rescaled(0.0, 1.0);
  }
  return {std::move(path), delta, leg.gap, terminal, repair_length, std::move(leg.corner)};
}

Excision excise(const StateVector& xi, const BlockAlgebra& alg, const std::vector<Matrix>& F,
                double eps) {
  (void)eps;
  const Vector& v = xi.vector();
  const Index dim = alg.ambient_dim();
  if (v.size() != dim) throw Error(ErrorKind::kPrecondition, "state dimension mismatch");

  std::optional<HermitianMatrix> found;
  for (const MatrixUnits& block : alg.blocks()) {
    const Matrix x = coordinates(block, v);
    if (x.squaredNorm() < 1.0 - 1e-12) continue;
    // Density of the restricted state; pure iff it has rank one.
    const HermitianMatrix gram = HermitianMatrix::symmetrized(x.adjoint() * x);
    const HermitianEigen eig = eig_hermitian(gram);
    const Index top = eig.values.size() - 1;
    if (eig.values(top) < 1.0 - 1e-12) break;
    const Vector c = eig.vectors.matrix().col(top).conjugate();
    Matrix w = Matrix::Zero(dim, block.multiplicity());
    for (Index i = 0; i < block.n(); ++i) w += c(i) * block.isometry(i);
    found = HermitianMatrix::symmetrized(w * w.adjoint());
    break;
  }
  const bool in_algebra = found.has_value();
  const HermitianMatrix e = in_algebra ? *found : HermitianMatrix::symmetrized(v * v.adjoint());
  double err = 0.0;
  const Matrix& em = e.matrix();
  const Matrix e2 = em * em;
  for (const Matrix& x : F) {
    const Complex omega = inner(x * v, v);
    err = std::max(err, op_norm(em * x * em - omega * e2));
  }
  return {e, err, in_algebra};
}

MultiTransport multi_transport(const std::vector<std::pair<StateVector, StateVector>>& pairs,
                               const BlockAlgebra& alg, const std::vector<Matrix>& F, double eps) {
  const Index dim = alg.ambient_dim();
  MultiTransport out{UnitaryPath::identity(dim), {}, {}, {}, 0.0};
  std::set<Index> used;
  std::vector<LowRankSpectrum> legs;
  std::vector<Vector> moved;
  for (const auto& [xi, eta] : pairs) {
    Index home = -1;
    for (Index b = 0; b < static_cast<Index>(alg.blocks().size()); ++b) {
      const MatrixUnits& block = alg.blocks()[static_cast<std::size_t>(b)];
      const double mx = coordinates(block, xi.vector()).squaredNorm();
      const double my = coordinates(block, eta.vector()).squaredNorm();
      if (mx >= 1.0 - 1e-10 && my >= 1.0 - 1e-10) home = b;
    }
    if (home < 0) {
      throw Error(ErrorKind::kDisjointness, "a pair is not supported in a single block");
    }
    if (!used.insert(home).second) {
      throw Error(ErrorKind::kDisjointness, "two pairs share a block");
    }
    const MatrixUnits& block = alg.blocks()[static_cast<std::size_t>(home)];
    const double delta = commutant_delta(block.n(), block.multiplicity(), eps / 4.0);
    CommutantGenerator leg = commutant_generator(block, xi.vector(), eta.vector(), delta);
    out.block_of_pair.push_back(home);
    out.stat_gaps.push_back(leg.gap);
    legs.push_back(std::move(leg.spectrum));
    moved.push_back(std::move(leg.end_xi));
  }

  const LowRankSpectrum first = direct_sum(legs, dim);
  UnitaryPath path = UnitaryPath::one_parameter(from_spectrum(first, dim),
                                                std::make_shared<const LowRankSpectrum>(first));
  std::vector<LowRankSpectrum> repairs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if ((moved[i] - pairs[i].second.vector()).norm() > 1e-15) {
      repairs.push_back(*geodesic_generator(moved[i], pairs[i].second.vector(), false).spectrum);
    }
  }
  if (!repairs.empty()) {
    const LowRankSpectrum second = direct_sum(repairs, dim);
    path = path.then(UnitaryPath::one_parameter(from_spectrum(second, dim),
                                                std::make_shared<const LowRankSpectrum>(second)))
               .rescaled(0.0, 1.0);
  }
  const Matrix end = path.end().matrix();
  for (const auto& [xi, eta] : pairs) {
    out.terminal_errors.push_back((end * xi.vector() - eta.vector()).norm());
  }
  if (!F.empty()) {
    const std::vector<double> comm = sampled_commutators(path, F, 64);
    out.max_commutator = *std::max_element(comm.begin(), comm.end());
  }
  out.path = std::move(path);
  return out;
}

std::vector<double> sampled_commutators(const UnitaryPath& path, const std::vector<Matrix>& xs,
                                        int samples) {
  std::vector<double> worst(xs.size(), 0.0);
  // Matrix units and similar inputs are mostly zeros; multiply them sparsely.
  std::vector<std::optional<Eigen::SparseMatrix<Complex>>> sparse(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const auto nnz = (xs[j].array() != Complex(0.0, 0.0)).count();
    if (xs[j].size() >= 1024 && nnz * 8 <= xs[j].size()) sparse[j] = xs[j].sparseView();
  }
  const double span = path.t_end() - path.t_begin();
  for (int k = 0; k <= samples; ++k) {
    const Matrix u = path.at(path.t_begin() + span * k / std::max(1, samples)).matrix();
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const Matrix c = sparse[j] ? Matrix(u * *sparse[j] - *sparse[j] * u) : Matrix(u * xs[j] - xs[j] * u);
      worst[j] = std::max(worst[j], op_norm(c));
    }
  }
  return worst;
}

}  // namespace state_transport
