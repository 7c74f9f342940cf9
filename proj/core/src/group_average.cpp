#include "state_transport/group_average.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include <Eigen/Eigenvalues>

#include "state_transport/errors.hpp"
#include "state_transport/transport.hpp"

namespace state_transport {

namespace {

constexpr double kRepTol = 1e-10;

void require(bool ok, ErrorKind kind, const std::string& msg, double measured = 0.0) {
  if (!ok) throw Error(kind, msg, measured);
}

}  // namespace

double reflection_constant() {
  const double ep = std::exp(kPi);
  return ep - 1.0 + kPi * ep;
}

GroupAction GroupAction::finite(std::vector<std::vector<int>> table,
                                std::vector<UnitaryMatrix> reps) {
  const std::size_t n = table.size();
  require(n > 0 && reps.size() == n, ErrorKind::kUnsupportedGroup,
          "finite group needs a non-empty table with one representative per element");
  for (const auto& row : table) {
    require(row.size() == n, ErrorKind::kUnsupportedGroup, "multiplication table is not square");
    std::vector<bool> seen(n, false);
    for (int v : row) {
      require(v >= 0 && static_cast<std::size_t>(v) < n && !seen[v], ErrorKind::kUnsupportedGroup,
              "multiplication table row is not a permutation");
      seen[v] = true;
    }
  }
  int identity = -1;
  for (std::size_t e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (std::size_t b = 0; b < n && ok; ++b) {
      ok = table[e][b] == static_cast<int>(b) && table[b][e] == static_cast<int>(b);
    }
    if (ok) identity = static_cast<int>(e);
  }
  require(identity >= 0, ErrorKind::kUnsupportedGroup, "multiplication table has no identity");
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        require(table[table[a][b]][c] == table[a][table[b][c]], ErrorKind::kUnsupportedGroup,
                "multiplication table is not associative");
      }
    }
  }
  const Index dim = reps.front().dim();
  for (const auto& r : reps) {
    require(r.dim() == dim, ErrorKind::kInvalidMatrix, "representatives have different sizes");
  }

  GroupAction action;
  action.kind_ = Kind::kFinite;
  action.table_ = std::move(table);
  action.reps_ = std::move(reps);
  action.identity_index_ = identity;
  const double residual = action.multiplicativity_residual(action.elements());
  require(residual <= kRepTol, ErrorKind::kPrecondition, "representation is not multiplicative",
          residual);
  return action;
}

GroupAction GroupAction::lattice(std::vector<UnitaryMatrix> generators) {
  require(!generators.empty(), ErrorKind::kUnsupportedGroup, "Z^d needs d >= 1 generators");
  const Index dim = generators.front().dim();
  for (const auto& g : generators) {
    require(g.dim() == dim, ErrorKind::kInvalidMatrix, "generators have different sizes");
  }
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      const double c = op_norm(commutator(generators[i].matrix(), generators[j].matrix()));
      require(c <= kRepTol, ErrorKind::kUnsupportedGroup,
              "generators of a Z^d action must commute", c);
    }
  }
  GroupAction action;
  action.kind_ = Kind::kLattice;
  for (const auto& g : generators) {
    Eigen::ComplexSchur<Matrix> schur(g.matrix());
    action.eigvecs_.push_back(schur.matrixU());
    Vector vals = schur.matrixT().diagonal();
    for (Index k = 0; k < vals.size(); ++k) vals(k) /= std::abs(vals(k));
    action.eigvals_.push_back(vals);
  }
  action.reps_ = std::move(generators);
  return action;
}

Index GroupAction::dim() const { return reps_.front().dim(); }

std::size_t GroupAction::rank_or_order() const { return reps_.size(); }

bool GroupAction::is_abelian() const {
  if (kind_ == Kind::kLattice) return true;
  const std::size_t n = table_.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (table_[a][b] != table_[b][a]) return false;
    }
  }
  return true;
}

GroupElement GroupAction::identity() const {
  if (kind_ == Kind::kFinite) return {identity_index_};
  return GroupElement(reps_.size(), 0);
}

GroupElement GroupAction::multiply(const GroupElement& a, const GroupElement& b) const {
  if (kind_ == Kind::kFinite) {
    require(a.size() == 1 && b.size() == 1, ErrorKind::kPrecondition, "malformed group element");
    return {table_.at(a[0]).at(b[0])};
  }
  require(a.size() == reps_.size() && b.size() == reps_.size(), ErrorKind::kPrecondition,
          "lattice element has the wrong rank");
  GroupElement out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

UnitaryMatrix GroupAction::rep(const GroupElement& g) const {
  if (kind_ == Kind::kFinite) {
    require(g.size() == 1 && g[0] >= 0 && static_cast<std::size_t>(g[0]) < reps_.size(),
            ErrorKind::kPrecondition, "unknown group element");
    return reps_[g[0]];
  }
  require(g.size() == reps_.size(), ErrorKind::kPrecondition, "lattice element has the wrong rank");
  Matrix out = Matrix::Identity(dim(), dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0) continue;
    Vector powers(eigvals_[i].size());
    for (Index k = 0; k < powers.size(); ++k) {
      powers(k) = std::pow(eigvals_[i](k), static_cast<double>(g[i]));
    }
    out = eigvecs_[i] * powers.asDiagonal() * eigvecs_[i].adjoint() * out;
  }
  return UnitaryMatrix::assume_unitary(std::move(out));
}

std::vector<GroupElement> GroupAction::elements() const {
  require(kind_ == Kind::kFinite, ErrorKind::kUnsupportedGroup, "Z^d has infinitely many elements");
  std::vector<GroupElement> out;
  for (std::size_t i = 0; i < table_.size(); ++i) out.push_back({static_cast<long>(i)});
  return out;
}

std::vector<UnitaryMatrix> GroupAction::generating_unitaries() const { return reps_; }

double GroupAction::multiplicativity_residual(const std::vector<GroupElement>& sample) const {
  const Matrix id = Matrix::Identity(dim(), dim());
  double worst = op_norm(rep(identity()).matrix() - id);
  std::vector<Matrix> mats;
  mats.reserve(sample.size());
  for (const auto& g : sample) mats.push_back(rep(g).matrix());
  for (std::size_t a = 0; a < sample.size(); ++a) {
    for (std::size_t b = 0; b < sample.size(); ++b) {
      const Matrix prod = rep(multiply(sample[a], sample[b])).matrix();
      worst = std::max(worst, op_norm(mats[a] * mats[b] - prod));
    }
  }
  return worst;
}

double folner_defect(const GroupAction& action, const std::vector<GroupElement>& set,
                     const std::vector<GroupElement>& F) {
  if (set.empty()) return 1.0;
  const std::set<GroupElement> base(set.begin(), set.end());
  double worst = 0.0;
  for (const auto& g : F) {
    std::size_t common = 0;
    for (const auto& s : set) {
      if (base.count(action.multiply(s, g)) != 0) ++common;
    }
    // |S triangle Sg| = 2 (|S| - |S cap Sg|) since right translation is injective.
    worst = std::max(worst, 2.0 * static_cast<double>(base.size() - common) /
                                static_cast<double>(base.size()));
  }
  return worst;
}

FolnerSet folner_set(const GroupAction& action, const std::vector<GroupElement>& F, double eps) {
  require(eps > 0.0, ErrorKind::kPrecondition, "Følner tolerance must be positive", eps);
  FolnerSet out;
  if (action.kind() == GroupAction::Kind::kFinite) {
    out.elements = action.elements();
    out.defect = 0.0;
    return out;
  }
  const std::size_t d = action.rank_or_order();
  long radius = 0;
  for (const auto& g : F) {
    require(g.size() == d, ErrorKind::kPrecondition, "generator has the wrong rank");
    long l1 = 0;
    for (long c : g) l1 += std::labs(c);
    radius = std::max(radius, l1);
  }
  const long side = static_cast<long>(std::floor(2.0 * static_cast<double>(radius) / eps)) + 1;
  const long lo = -(side / 2);
  double total = std::pow(static_cast<double>(side), static_cast<double>(d));
  require(total <= 1e6, ErrorKind::kUnsupportedGroup, "Følner box is too large", total);

  GroupElement cur(d, lo);
  while (true) {
    out.elements.push_back(cur);
    std::size_t i = 0;
    while (i < d && ++cur[i] == lo + side) {
      cur[i] = lo;
      ++i;
    }
    if (i == d) break;
  }
  out.defect = folner_defect(action, out.elements, F);
  return out;
}

HermitianMatrix average_conjugates(const HermitianMatrix& h, const FolnerSet& folner,
                                   const GroupAction& action) {
  const double hn = op_norm(h.matrix());
  require(hn <= 1.0 + 1e-12, ErrorKind::kPrecondition, "averaged operator must have norm <= 1", hn);
  require(!folner.elements.empty(), ErrorKind::kPrecondition, "empty Følner set");
  Matrix acc = Matrix::Zero(h.dim(), h.dim());
  for (const auto& g : folner.elements) {
    const Matrix u = action.rep(g).matrix();
    acc.noalias() += u.adjoint() * h.matrix() * u;
  }
  acc /= static_cast<double>(folner.elements.size());
  return HermitianMatrix::symmetrized(acc);
}

HermitianMatrix flip_projection(const VectorFamily& xs, const VectorFamily& zs) {
  require(xs.size() == zs.size() && xs.dim() == zs.dim(), ErrorKind::kPrecondition,
          "flip families must have equal shapes");
  const Matrix diff = xs.columns() - zs.columns();
  const Matrix sum = xs.columns() + zs.columns();
  const Matrix q = range_basis(diff, 1e-10);
  const Matrix e = q * q.adjoint();
  double residual = 0.0;
  double scale = 1.0;
  for (Index j = 0; j < sum.cols(); ++j) {
    residual = std::max(residual, (e * sum.col(j)).norm());
    scale = std::max(scale, sum.col(j).norm());
  }
  require(residual <= 1e-10 * scale, ErrorKind::kFlipInconsistency,
          "sum vectors are not orthogonal to difference vectors", residual);
  return HermitianMatrix::symmetrized(e);
}

namespace {

VectorFamily orbit(const GroupAction& action, const std::vector<GroupElement>& set,
                   const Vector& v) {
  Matrix cols(v.size(), static_cast<Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    cols.col(static_cast<Index>(i)) = action.rep(set[i]).matrix() * v;
  }
  return VectorFamily(std::move(cols));
}

double orbit_overlap(const VectorFamily& a, const VectorFamily& b) {
  const Matrix qa = range_basis(a.columns());
  const Matrix qb = range_basis(b.columns());
  if (qa.cols() == 0 || qb.cols() == 0) return 0.0;
  return op_norm(qa.adjoint() * qb);
}

struct LegResult {
  HermitianMatrix hbar;
  GroupLeg leg;
};

// One reflection leg between vectors whose orbits are orthogonal.
LegResult reflection_leg(const GroupAction& action, const FolnerSet& folner, std::size_t id_pos,
                         const Vector& xi, const Vector& target, double eps) {
  GroupLeg leg;
  leg.eps_prime = eps / (2.0 * reflection_constant());
  const auto n = static_cast<double>(folner.elements.size());
  leg.delta = leg.eps_prime * leg.eps_prime / n;
  const VectorFamily ox = orbit(action, folner.elements, xi);
  const VectorFamily oy = orbit(action, folner.elements, target);
  leg.gram_gap = gram_gap(ox, oy);
  require(leg.gram_gap < leg.delta, ErrorKind::kPrecondition,
          "orbit correlations differ by more than the admissible gap", leg.gram_gap);

  const Matrix avoid = range_basis(ox.columns());
  const VectorFamily zeta = gram_complete_avoiding(oy, gram_matrix(ox), avoid);
  const HermitianMatrix e = flip_projection(ox, zeta);
  leg.flip_residual = op_norm(e.matrix() * e.matrix() - e.matrix());
  for (Index j = 0; j < ox.size(); ++j) {
    leg.flip_residual = std::max(leg.flip_residual, (e.matrix() * (ox[j] + zeta[j])).norm());
    const Vector d = ox[j] - zeta[j];
    leg.flip_residual = std::max(leg.flip_residual, (e.matrix() * d - d).norm());
  }
  HermitianMatrix hbar = average_conjugates(e, folner, action);
  const HermitianMatrix scaled = HermitianMatrix::symmetrized(kPi * hbar.matrix());
  const Matrix u1 = expm_skew(scaled, 1.0).matrix();
  const Vector moved = u1 * xi;
  leg.zeta_error = (moved - zeta[static_cast<Index>(id_pos)]).norm();
  leg.zeta_bound = leg.eps_prime * reflection_constant();
  leg.terminal_error = (moved - target).norm();
  return {std::move(hbar), leg};
}

// Joint eigenspaces of commuting normal matrices, as orthonormal bases.
std::vector<Matrix> joint_eigenspaces(const std::vector<UnitaryMatrix>& us) {
  const Index dim = us.front().dim();
  Matrix generic = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < us.size(); ++j) {
    const double a = 0.7548776662 * static_cast<double>(j + 1);
    generic += std::polar(1.0 + 0.137 * static_cast<double>(j), a) * us[j].matrix();
  }
  Eigen::ComplexSchur<Matrix> schur(generic);
  const Matrix q = schur.matrixU();
  std::vector<Vector> keys;
  std::vector<std::vector<Index>> members;
  for (Index c = 0; c < dim; ++c) {
    Vector key(static_cast<Index>(us.size()));
    for (std::size_t j = 0; j < us.size(); ++j) {
      key(static_cast<Index>(j)) = q.col(c).dot(us[j].matrix() * q.col(c));
    }
    bool placed = false;
    for (std::size_t k = 0; k < keys.size() && !placed; ++k) {
      if ((keys[k] - key).cwiseAbs().maxCoeff() < 1e-7) {
        members[k].push_back(c);
        placed = true;
      }
    }
    if (!placed) {
      keys.push_back(key);
      members.push_back({c});
    }
  }
  std::vector<Matrix> out;
  for (const auto& m : members) {
    Matrix b(dim, static_cast<Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) b.col(static_cast<Index>(i)) = q.col(m[i]);
    out.push_back(nearest_isometry(b));
  }
  return out;
}

// A unit vector with the orbit correlations of eta, orthogonal to the orbits
// of xi and eta: put each character component of eta on a fresh direction of
// the same joint eigenspace.
Vector detour_vector(const GroupAction& action, const Vector& xi, const Vector& eta) {
  if (!action.is_abelian()) {
    throw Error(ErrorKind::kDetourFailure,
                "intermediate vector search is only implemented for abelian actions", 1.0);
  }
  Vector out = Vector::Zero(eta.size());
  double unplaced = 0.0;
  for (const Matrix& b : joint_eigenspaces(action.generating_unitaries())) {
    const Vector a = b.adjoint() * xi;
    const Vector c = b.adjoint() * eta;
    const double mass = c.norm();
    if (mass <= 1e-14) continue;
    Matrix both(b.cols(), 2);
    both << a, c;
    const Matrix room = complement_basis(both, b.cols(), 1e-10);
    if (room.cols() == 0) {
      unplaced += mass * mass;
      continue;
    }
    out += mass * (b * room.col(0));
  }
  if (unplaced > 0.0) {
    throw Error(ErrorKind::kDetourFailure,
                "some joint eigenspace has no room for an orthogonal detour vector", unplaced);
  }
  return out;
}

}  // namespace

GroupTransport group_state_transport(const GroupAction& action, const StateVector& xi,
                                     const StateVector& eta, const std::vector<GroupElement>& F,
                                     double eps) {
  require(xi.dim() == action.dim() && eta.dim() == action.dim(), ErrorKind::kPrecondition,
          "state vectors must live in the representation space");
  require(eps > 0.0, ErrorKind::kPrecondition, "tolerance must be positive", eps);
  FolnerSet folner = folner_set(action, F, eps);
  const GroupElement one = action.identity();
  const auto it = std::find(folner.elements.begin(), folner.elements.end(), one);
  require(it != folner.elements.end(), ErrorKind::kPrecondition, "Følner set misses the identity");
  const auto id_pos = static_cast<std::size_t>(it - folner.elements.begin());

  const Vector& x = xi.vector();
  const Vector& y = eta.vector();
  const double overlap =
      orbit_overlap(orbit(action, folner.elements, x), orbit(action, folner.elements, y));

  GroupTransport out{UnitaryPath::identity(action.dim()), folner, false, {}, Vector(), 0.0, 0.0, 0.0,
                     0.0};
  std::vector<Vector> stops{x};
  if (overlap > 1e-10) {
    out.detour = true;
    out.eta_prime = detour_vector(action, x, y);
    stops.push_back(out.eta_prime);
  }
  stops.push_back(y);

  std::optional<UnitaryPath> path;
  for (std::size_t s = 0; s + 1 < stops.size(); ++s) {
    LegResult leg = reflection_leg(action, folner, id_pos, stops[s], stops[s + 1], eps);
    const HermitianMatrix scaled = HermitianMatrix::symmetrized(kPi * leg.hbar.matrix());
    UnitaryPath piece = UnitaryPath::one_parameter(scaled);
    path = path ? path->then(piece) : piece;
    out.legs.push_back(leg.leg);
    out.commutator_bound += kPi * eps;
    out.terminal_bound += leg.leg.eps_prime * reflection_constant() + 2.0 * leg.leg.eps_prime;
  }
  out.path = path->rescaled(0.0, 1.0);
  out.terminal_error = (out.path.end().matrix() * x - y).norm();

  std::vector<Matrix> reps;
  for (const auto& g : F) reps.push_back(action.rep(g).matrix());
  if (!reps.empty()) {
    const std::vector<double> comm = sampled_commutators(out.path, reps, 32);
    out.commutator = *std::max_element(comm.begin(), comm.end());
  }
  return out;
}

}  // namespace state_transport
