#include "state_transport/spectral_circle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "state_transport/errors.hpp"
#include "state_transport/transport.hpp"

namespace state_transport {
namespace {

double wrap01(double a) {
  double r = std::fmod(a, 1.0);
  if (r < 0.0) r += 1.0;
  if (r >= 1.0) r -= 1.0;
  return r;
}

// Offset of a from t folded into (-1/2, 1/2].
double signed_offset(double a, double t) {
  double d = wrap01(a - t);
  if (d > 0.5) d -= 1.0;
  return d;
}

bool in_arc(double atom, double start, double length) {
  if (length >= 1.0) return true;
  const double d = wrap01(atom - start);
  return d > 0.0 && d <= length;
}

Matrix hcat_all(const std::vector<Matrix>& parts, Index rows) {
  Index cols = 0;
  for (const Matrix& p : parts) cols += p.cols();
  Matrix out(rows, cols);
  Index at = 0;
  for (const Matrix& p : parts) {
    out.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

class CutSearch {
 public:
  CutSearch(const SpectralModel& model, const Vector& xi, const Vector& eta, double eps,
            double eps_prime, const ArcPredicate& accept)
      : atoms_(model.angles()),
        p_(model.masses(xi)),
        q_(model.masses(eta)),
        eps_(eps),
        ep_(eps_prime),
        gamma_(eps * eps_prime / 4.0),
        accept_(accept) {}

  bool run(std::vector<double>& points) {
    for (double c : candidates(0.0, eps_ / 2.0)) {
      points.assign(1, c);
      if (extend(points)) return true;
      if (nodes_ > kBudget) break;
    }
    return false;
  }

  double margin(double t, const std::vector<double>& mass) const {
    double total = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      const double d = signed_offset(atoms_[j], t);
      if (d > -gamma_ / 2.0 && d <= gamma_ / 2.0) total += mass[j];
    }
    return total;
  }

  double arc_mass(double s, double t, const std::vector<double>& mass) const {
    double total = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      if (in_arc(atoms_[j], s, t - s)) total += mass[j];
    }
    return total;
  }

  double gamma() const { return gamma_; }
  long nodes() const { return nodes_; }
  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }

 private:
  static constexpr long kBudget = 200000;

  bool arc_ok(double s, double t) const {
    if (!(std::abs(arc_mass(s, t, p_) - arc_mass(s, t, q_)) < 2.0 * ep_)) return false;
    return !accept_ || accept_(wrap01(s), t - s);
  }

  bool extend(std::vector<double>& points) {
    if (++nodes_ > kBudget) return false;
    const double t = points.back();
    const double first = points.front();
    if (first + 1.0 - t < 1.5 * eps_) return arc_ok(t, first + 1.0);
    for (double c : candidates(t + eps_ / 2.0, t + eps_)) {
      if (!arc_ok(t, c)) continue;
      points.push_back(c);
      if (extend(points)) return true;
      points.pop_back();
      if (nodes_ > kBudget) return false;
    }
    return false;
  }

  // Midpoints of the intervals of (lo, hi) on which margins and arc contents
  // are constant, restricted to admissible margins and ordered by total margin
  // mass, then by position.
  std::vector<double> candidates(double lo, double hi) const {
    std::vector<double> breaks{lo, hi};
    for (double a : atoms_) {
      for (double off : {-gamma_ / 2.0, 0.0, gamma_ / 2.0}) {
        for (int lift = -1; lift <= 2; ++lift) {
          const double x = a + off + lift;
          if (x > lo && x < hi) breaks.push_back(x);
        }
      }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<std::pair<double, double>> scored;
    for (std::size_t k = 1; k < breaks.size(); ++k) {
      const double mid = 0.5 * (breaks[k - 1] + breaks[k]);
      if (!(mid > lo && mid < hi)) continue;
      const double mp = margin(mid, p_);
      const double mq = margin(mid, q_);
      if (mp < ep_ && mq < ep_) scored.emplace_back(mp + mq, mid);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<double> out;
    out.reserve(scored.size());
    for (const auto& s : scored) out.push_back(s.second);
    return out;
  }

  std::vector<double> atoms_;
  std::vector<double> p_;
  std::vector<double> q_;
  double eps_;
  double ep_;
  double gamma_;
  ArcPredicate accept_;
  long nodes_ = 0;
};

}  // namespace

SpectralModel SpectralModel::from_unitary(const UnitaryMatrix& z, double cluster_tol) {
  Eigen::ComplexSchur<Matrix> schur(z.matrix());
  const Matrix& vecs = schur.matrixU();
  const Vector vals = schur.matrixT().diagonal();
  const Index d = vals.size();
  std::vector<double> ang(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) ang[static_cast<std::size_t>(k)] = wrap01(std::arg(vals(k)) / (2 * kPi));
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return ang[static_cast<std::size_t>(a)] < ang[static_cast<std::size_t>(b)];
  });

  std::vector<std::vector<Index>> clusters;
  for (Index idx : order) {
    if (!clusters.empty() &&
        ang[static_cast<std::size_t>(idx)] - ang[static_cast<std::size_t>(clusters.back().back())] <= cluster_tol) {
      clusters.back().push_back(idx);
    } else {
      clusters.push_back({idx});
    }
  }
  if (clusters.size() > 1 &&
      ang[static_cast<std::size_t>(clusters.front().front())] + 1.0 -
              ang[static_cast<std::size_t>(clusters.back().back())] <=
          cluster_tol) {
    clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
    clusters.pop_back();
  }

  std::vector<double> angles;
  std::vector<Matrix> bases;
  for (const auto& c : clusters) {
    Matrix b(d, static_cast<Index>(c.size()));
    Complex sum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      b.col(static_cast<Index>(k)) = vecs.col(c[k]);
      sum += vals(c[k]);
    }
    angles.push_back(wrap01(std::arg(sum) / (2 * kPi)));
    bases.push_back(nearest_isometry(b));
  }
  return from_atoms(std::move(angles), std::move(bases));
}

SpectralModel SpectralModel::from_atoms(std::vector<double> angles, std::vector<Matrix> bases) {
  if (angles.empty() || angles.size() != bases.size()) {
    throw Error(ErrorKind::kInvalidMatrix, "spectral model needs one basis per atom");
  }
  const Index d = bases.front().rows();
  std::vector<std::size_t> order(angles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (double& a : angles) a = wrap01(a);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });
  std::vector<double> sorted_angles;
  std::vector<Matrix> sorted_bases;
  for (std::size_t k : order) {
    sorted_angles.push_back(angles[k]);
    sorted_bases.push_back(bases[k]);
  }
  const Matrix all = hcat_all(sorted_bases, d);
  if (all.cols() != d) {
    throw Error(ErrorKind::kInvalidMatrix, "eigenspaces do not span the space");
  }
  const double ortho = op_norm(all.adjoint() * all - Matrix::Identity(d, d));
  if (ortho > 1e-10) throw Error(ErrorKind::kInvalidMatrix, "eigenspaces are not orthonormal", ortho);
  for (std::size_t k = 1; k < sorted_angles.size(); ++k) {
    if (!(sorted_angles[k] > sorted_angles[k - 1])) {
      throw Error(ErrorKind::kInvalidMatrix, "atoms must be distinct");
    }
  }
  Vector phases(d);
  Index at = 0;
  for (std::size_t k = 0; k < sorted_angles.size(); ++k) {
    const Index m = sorted_bases[k].cols();
    phases.segment(at, m).setConstant(std::polar(1.0, 2 * kPi * sorted_angles[k]));
    at += m;
  }
  UnitaryMatrix z = UnitaryMatrix::assume_unitary(all * phases.asDiagonal() * all.adjoint());
  return SpectralModel(std::move(z), std::move(sorted_angles), std::move(sorted_bases));
}

std::vector<double> SpectralModel::masses(const Vector& v) const {
  std::vector<double> out;
  out.reserve(bases_.size());
  for (const Matrix& b : bases_) out.push_back((b.adjoint() * v).squaredNorm());
  return out;
}

Matrix SpectralModel::arc_projection(double start, double length) const {
  Matrix p = Matrix::Zero(dim(), dim());
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    if (in_arc(angles_[j], start, length)) p += projection(j);
  }
  return p;
}

CirclePartition circle_partition(const SpectralModel& model, const Vector& xi, const Vector& eta,
                                 double eps, double eps_prime) {
  return circle_partition_with(model, xi, eta, eps, eps_prime, nullptr);
}

CirclePartition circle_partition_with(const SpectralModel& model, const Vector& xi,
                                      const Vector& eta, double eps, double eps_prime,
                                      const ArcPredicate& accept_arc) {
  if (!(eps > 0.0 && eps < 2.0) || !(eps_prime > 0.0)) {
    throw Error(ErrorKind::kPrecondition, "need 0 < eps < 2 and eps' > 0");
  }
  if (xi.size() != model.dim() || eta.size() != model.dim()) {
    throw Error(ErrorKind::kPrecondition, "state dimension does not match the model");
  }
  CutSearch search(model, xi, eta, eps, eps_prime, accept_arc);
  std::vector<double> lifted;
  const bool found = search.run(lifted);
  if (!found) {
    std::ostringstream msg;
    msg << "no admissible cut sequence (" << search.nodes() << " search nodes)";
    throw Error(ErrorKind::kInfeasiblePartition, msg.str());
  }

  CirclePartition out;
  out.eps = eps;
  out.eps_prime = eps_prime;
  out.gamma = search.gamma();
  out.search_nodes = search.nodes();
  const std::size_t m = lifted.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double t = lifted[i];
    const double prev = i == 0 ? lifted[m - 1] - 1.0 : lifted[i - 1];
    out.points.push_back(wrap01(t));
    out.gaps.push_back(t - prev);
    out.xi_arc_mass.push_back(search.arc_mass(prev, t, search.p()));
    out.eta_arc_mass.push_back(search.arc_mass(prev, t, search.q()));
    out.xi_margin_mass.push_back(search.margin(t, search.p()));
    out.eta_margin_mass.push_back(search.margin(t, search.q()));
  }

  const std::vector<double>& atoms = model.angles();
  out.moment_order = static_cast<int>(atoms.size()) - 1;
  for (int k = 0; k <= out.moment_order; ++k) {
    Complex diff = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      diff += (search.p()[j] - search.q()[j]) * std::polar(1.0, 2 * kPi * k * atoms[j]);
    }
    out.moment_gap = std::max(out.moment_gap, std::abs(diff));
  }
  return out;
}

WindowFunction::WindowFunction(double start, double length, double gamma)
    : start_(wrap01(start)), length_(length), gamma_(gamma) {}

double WindowFunction::operator()(double angle) const {
  if (length_ >= 1.0) return 1.0;
  const double d = wrap01(angle - start_);
  if (d <= 0.0 || d >= length_) return 0.0;
  const double ramp = gamma_ / 2.0;
  if (ramp <= 0.0) return 1.0;
  return std::min({1.0, d / ramp, (length_ - d) / ramp});
}

double WindowFunction::plateau_length() const {
  return length_ >= 1.0 ? 1.0 : std::max(0.0, length_ - gamma_);
}

Matrix WindowFunction::apply(const SpectralModel& model) const {
  Matrix out = Matrix::Zero(model.dim(), model.dim());
  for (std::size_t j = 0; j < model.angles().size(); ++j) {
    const double w = (*this)(model.angles()[j]);
    if (w != 0.0) out += w * model.projection(j);
  }
  return out;
}

WindowFunction window_function(double start, double length, double gamma) {
  if (!(gamma >= 0.0) || length < gamma || !(length > 0.0)) {
    throw Error(ErrorKind::kDegenerateWindow, "arc is shorter than gamma", length);
  }
  return WindowFunction(start, length, gamma);
}

ArcTransport arc_transport(const MatrixUnits& block, const SpectralModel& model,
                           const StateVector& xi, const StateVector& eta,
                           const std::vector<Matrix>& F, double eps) {
  const Index dim = model.dim();
  if (block.ambient_dim() != dim || xi.dim() != dim || eta.dim() != dim) {
    throw Error(ErrorKind::kPrecondition, "block, model and states must share the dimension");
  }
  const double unital = op_norm(block.identity() - Matrix::Identity(dim, dim));
  if (unital > 1e-10) throw Error(ErrorKind::kPrecondition, "block is not unital", unital);
  const Matrix& z = model.z().matrix();
  for (Index i = 0; i < block.n(); ++i) {
    for (Index j = 0; j < block.n(); ++j) {
      const Matrix e = block.unit(i, j);
      const double c = op_norm(z * e - e * z);
      if (c > 1e-10) throw Error(ErrorKind::kPrecondition, "z does not commute with the block", c);
    }
  }

  const Index n = block.n();
  const Index k = block.multiplicity();
  double delta_prime = std::numeric_limits<double>::infinity();
  for (Index r = 1; r <= k; ++r) delta_prime = std::min(delta_prime, commutant_delta(n, r, eps));
  const double eps_prime = eps * eps * eps * delta_prime / 4.0;

  // Matrix-unit statistics of each atom: G_j(a, b) = <e_ab E_j v, E_j v>.
  auto atom_stats = [&](const Vector& v) {
    std::vector<Matrix> out;
    for (const Matrix& b : model.bases()) {
      const Vector w = b * (b.adjoint() * v);
      Matrix g(n, n);
      for (Index a = 0; a < n; ++a) {
        for (Index c = 0; c < n; ++c) g(a, c) = inner(block.unit(a, c) * w, w);
      }
      out.push_back(std::move(g));
    }
    return out;
  };
  const std::vector<Matrix> sx = atom_stats(xi.vector());
  const std::vector<Matrix> sy = atom_stats(eta.vector());
  const std::vector<double>& atoms = model.angles();
  auto arc_gap = [&](double start, double length) {
    Matrix diff = Matrix::Zero(n, n);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (in_arc(atoms[j], start, length)) diff += sx[j] - sy[j];
    }
    return diff.cwiseAbs().maxCoeff();
  };

  CirclePartition part;
  try {
    part = circle_partition_with(model, xi.vector(), eta.vector(), eps, eps_prime,
                                 [&](double s, double len) { return arc_gap(s, len) < 2.0 * eps_prime; });
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::kInfeasiblePartition) throw;
    throw Error(ErrorKind::kPrecondition,
                "arc statistics hypothesis (gap < 2 eps') fails for every admissible partition",
                2.0 * eps_prime);
  }

  ArcTransport out{UnitaryPath::identity(dim), part, {}, eps_prime, delta_prime, 0.0, 0.0, 0.0};
  const double floor = std::pow(eps, 1.5);
  std::vector<LowRankSpectrum> parts;
  std::vector<Matrix> arc_projections;
  const std::size_t m = part.points.size();
  for (std::size_t i = 0; i < m; ++i) {
    ArcReport rep;
    rep.length = part.gaps[i];
    rep.start = wrap01(part.points[i] - rep.length);
    const Matrix p = model.arc_projection(rep.start, rep.length);
    arc_projections.push_back(p);
    const Vector ex = p * xi.vector();
    const Vector ey = p * eta.vector();
    rep.xi_mass = ex.squaredNorm();
    rep.eta_mass = ey.squaredNorm();
    rep.skipped = std::min(ex.norm(), ey.norm()) <= floor;
    if (!rep.skipped) {
      const Matrix pk = block.isometry(0).adjoint() * p * block.isometry(0);
      const Matrix local = range_basis(HermitianMatrix::symmetrized(pk).matrix(), 1e-9);
      std::vector<Matrix> iso;
      for (Index a = 0; a < n; ++a) iso.push_back(block.isometry(a) * local);
      const MatrixUnits arc_units = MatrixUnits::from_isometries(std::move(iso));
      const double delta = commutant_delta(n, local.cols(), eps);
      CommutantGenerator gen =
          commutant_generator(arc_units, ex / ex.norm(), ey / ey.norm(), delta);
      rep.stat_gap = gen.gap;
      parts.push_back(std::move(gen.spectrum));
    }
    out.arcs.push_back(rep);
  }

  Index total = 0;
  for (const auto& s : parts) total += s.values.size();
  LowRankSpectrum sum{RealVector(total), Matrix(dim, total)};
  Index at = 0;
  for (const auto& s : parts) {
    sum.values.segment(at, s.values.size()) = s.values;
    sum.vectors.middleCols(at, s.values.size()) = s.vectors;
    at += s.values.size();
  }
  const HermitianMatrix h =
      total == 0 ? HermitianMatrix::zero(dim)
                 : HermitianMatrix::symmetrized(sum.vectors * sum.values.cast<Complex>().asDiagonal() *
                                                sum.vectors.adjoint());
  out.path = UnitaryPath::one_parameter(h, std::make_shared<const LowRankSpectrum>(sum));

  const Vector residual = out.path.end().matrix() * xi.vector() - eta.vector();
  out.terminal_error = residual.norm();
  for (std::size_t i = 0; i < m; ++i) {
    out.arcs[i].terminal_contribution = (arc_projections[i] * residual).norm();
  }
  std::vector<Matrix> probes = F;
  probes.push_back(z);
  const std::vector<double> comm = sampled_commutators(out.path, probes, 64);
  out.z_commutator = comm.back();
  for (std::size_t j = 0; j + 1 < comm.size(); ++j) out.f_commutator = std::max(out.f_commutator, comm[j]);
  return out;
}

}  // namespace state_transport
