#include "state_transport/intertwine.hpp"

#include <algorithm>
#include <cmath>

#include "state_transport/errors.hpp"
#include "state_transport/transport.hpp"

namespace state_transport {

namespace {

Matrix stacked_isometries(const MatrixUnits& mu) {
  Matrix all(mu.ambient_dim(), mu.n() * mu.multiplicity());
  for (Index i = 0; i < mu.n(); ++i) {
    all.middleCols(i * mu.multiplicity(), mu.multiplicity()) = mu.isometry(i);
  }
  return all;
}

double ad_error(const Matrix& u, const Matrix& x) { return op_norm(u * x - x * u); }

Matrix conjugated(const Matrix& p, const Matrix& x) { return p * x * p.adjoint(); }

}  // namespace

std::size_t AlgebraTower::level_of(const Matrix& x) const {
  const Index d = ambient_dim_;
  const Complex mean = x.trace() / static_cast<double>(d);
  if (op_norm(x - mean * Matrix::Identity(d, d)) <= 1e-10) return 0;
  for (std::size_t l = 1; l <= levels_.size(); ++l) {
    const MatrixUnits& mu = levels_[l - 1];
    const Index k = mu.multiplicity();
    const Matrix all = stacked_isometries(mu);
    Matrix y = all.adjoint() * x * all;
    for (Index i = 0; i < mu.n(); ++i) {
      for (Index j = 0; j < mu.n(); ++j) {
        auto block = y.block(i * k, j * k, k, k);
        const Complex c = block.trace() / static_cast<double>(k);
        block = c * Matrix::Identity(k, k);
      }
    }
    if (op_norm(x - all * y * all.adjoint()) <= 1e-10) return l;
  }
  return levels_.size() + 1;
}

Matrix AlgebraTower::dense_element(std::size_t i) const {
  std::size_t rest = i - 1;
  for (const MatrixUnits& mu : levels_) {
    const auto count = static_cast<std::size_t>(mu.n() * mu.n());
    if (rest < count) {
      return mu.unit(static_cast<Index>(rest) / mu.n(), static_cast<Index>(rest) % mu.n());
    }
    rest -= count;
  }
  throw Error(ErrorKind::kTowerSpec, "dense sequence index exceeds the tower");
}

std::size_t AlgebraTower::dense_level(std::size_t i) const {
  std::size_t rest = i - 1;
  for (std::size_t l = 1; l <= levels_.size(); ++l) {
    const auto n = static_cast<std::size_t>(levels_[l - 1].n());
    if (rest < n * n) return l;
    rest -= n * n;
  }
  throw Error(ErrorKind::kTowerSpec, "dense sequence index exceeds the tower");
}

AlgebraTower build_tower(const std::vector<Index>& branching, Index ambient_dim) {
  if (branching.empty()) throw Error(ErrorKind::kTowerSpec, "tower needs at least one level");
  if (ambient_dim < 1) throw Error(ErrorKind::kTowerSpec, "ambient dimension must be positive");
  std::vector<MatrixUnits> levels;
  Index size = 1;
  for (Index b : branching) {
    if (b < 2) throw Error(ErrorKind::kTowerSpec, "branching factors must be at least 2", b);
    size *= b;
    if (size > ambient_dim || ambient_dim % size != 0) {
      throw Error(ErrorKind::kTowerSpec, "level size does not divide the ambient dimension",
                  static_cast<double>(size));
    }
    levels.push_back(MatrixUnits::tensor(size, ambient_dim));
  }
  return AlgebraTower(ambient_dim, branching, std::move(levels));
}

Schedule make_schedule(const AlgebraTower& tower, std::size_t f_level, double eps, int rounds,
                       bool repair) {
  if (!(eps > 0.0)) throw Error(ErrorKind::kPrecondition, "eps must be positive", eps);
  if (rounds < 0) throw Error(ErrorKind::kPrecondition, "round count must be non-negative");
  if (f_level > tower.depth()) {
    throw Error(ErrorKind::kPrecondition, "the fixed set is not contained in the tower");
  }
  Schedule s;
  s.eps = eps;
  s.rounds = rounds;
  s.repair = repair;
  const std::size_t base = std::max<std::size_t>(1, f_level);
  // Level hosting round n: deep enough to contain F and x_1 .. x_{n-1}.
  auto level_for = [&](int n) {
    return n <= 1 ? base : std::max(base, tower.dense_level(static_cast<std::size_t>(n - 1)));
  };
  auto delta_for = [&](int n) {
    const MatrixUnits& mu = tower.level(level_for(n));
    const double tol = eps * std::ldexp(1.0, -n + 1) / 4.0;
    return commutant_delta(mu.n(), mu.multiplicity(), tol);
  };
  for (int n = 1; n <= rounds; ++n) {
    s.budgets.push_back(eps * std::ldexp(1.0, -n + 1));
    s.tolerances.push_back(s.budgets.back() / 4.0);
    s.levels.push_back(level_for(n));
  }
  for (int n = 1; n <= rounds + 1; ++n) {
    s.deltas.push_back(delta_for(n));
    s.g_levels.push_back(level_for(n));
  }
  return s;
}

IntertwineResult back_and_forth(const AlgebraTower& tower, const StateVector& omega1,
                                const StateVector& omega2, const std::vector<Matrix>& F,
                                const Schedule& schedule) {
  const Index dim = tower.ambient_dim();
  if (omega1.dim() != dim || omega2.dim() != dim) {
    throw Error(ErrorKind::kPrecondition, "state vectors must live in the ambient space");
  }
  if (schedule.deltas.size() != static_cast<std::size_t>(schedule.rounds) + 1) {
    throw Error(ErrorKind::kPrecondition, "schedule is inconsistent with its round count");
  }
  IntertwineResult out{UnitaryMatrix::identity(dim), UnitaryMatrix::identity(dim), schedule,
                       {}, {}, 0.0, 0.0, 0.0, 0.0};
  // a carries w1 Ad(even), b carries w2 Ad(odd).
  Vector a = omega1.vector();
  Vector b = omega2.vector();
  std::vector<Matrix> dense;

  for (int n = 1; n <= schedule.rounds; ++n) {
    if (n >= 2) dense.push_back(tower.dense_element(static_cast<std::size_t>(n - 1)));
    const bool odd = (n % 2) == 1;
    const std::size_t idx = static_cast<std::size_t>(n - 1);
    const MatrixUnits& mu = tower.level(schedule.levels[idx]);
    RoundLog log;
    log.round = n;
    log.level = schedule.levels[idx];
    log.budget = schedule.budgets[idx];
    log.delta_in = schedule.deltas[idx];
    log.delta_out = schedule.deltas[idx + 1];

    const Vector& src = odd ? a : b;
    const Vector& dst = odd ? b : a;
    CommutantTransport tr = [&] {
      try {
        return commutant_transport_with_delta(mu, src, dst, schedule.tolerances[idx],
                                              log.delta_in, schedule.repair);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kPrecondition) throw;
        throw Error(ErrorKind::kRoundFailure,
                    "round " + std::to_string(n) + ": " + std::string(e.what()),
                    statistics_gap(mu, src, dst));
      }
    }();
    log.hypothesis_gap = tr.stat_gap;
    log.terminal_error = tr.terminal_error;
    log.repair_length = tr.repair_length;
    log.path_length = tr.path.length();
    const Matrix u = tr.path.end().matrix();

    // F_{n-1} = F, the x_i, and their twists by the adjoint of the product
    // that u_n is about to extend.
    const Matrix& p = odd ? out.odd_product.matrix() : out.even_product.matrix();
    const Matrix pn = p * u;
    std::vector<Matrix> fset = F;
    for (const Matrix& x : dense) {
      fset.push_back(x);
      fset.push_back(conjugated(p.adjoint(), x));
    }
    log.f_size = fset.size();
    for (const Matrix& x : fset) log.commutation_error = std::max(log.commutation_error, ad_error(u, x));
    for (const Matrix& x : dense) {
      log.forward_drift =
          std::max(log.forward_drift, op_norm(conjugated(pn, x) - conjugated(p, x)));
      log.inverse_drift = std::max(
          log.inverse_drift, op_norm(conjugated(pn.adjoint(), x) - conjugated(p.adjoint(), x)));
    }

    if (odd) {
      out.odd_product = UnitaryMatrix::assume_unitary(pn);
      b = u.adjoint() * b;
    } else {
      out.even_product = UnitaryMatrix::assume_unitary(pn);
      a = u.adjoint() * a;
    }
    log.matching_error = statistics_gap(tower.level(schedule.g_levels[idx + 1]), a, b);
    out.rounds.push_back(log);
    out.round_paths.push_back(std::move(tr.path));
  }

  const Matrix& po = out.odd_product.matrix();
  const Matrix& pe = out.even_product.matrix();
  const Matrix mixed = po * pe.adjoint();
  for (const Matrix& x : F) {
    out.odd_error = std::max(out.odd_error, op_norm(conjugated(po, x) - x));
    out.even_error = std::max(out.even_error, op_norm(conjugated(pe, x) - x));
    out.combined_error = std::max(out.combined_error, op_norm(conjugated(mixed, x) - x));
  }
  out.final_matching = statistics_gap(tower.level(schedule.g_levels.back()), a, b);
  return out;
}

UnitaryPath assemble_path(const IntertwineResult& result) {
  const Index dim = result.odd_product.dim();
  const std::size_t m = static_cast<std::size_t>(result.schedule.rounds);
  if (result.round_paths.size() != m) {
    throw Error(ErrorKind::kAssembly, "one path per round is required",
                static_cast<double>(result.round_paths.size()));
  }
  std::vector<PathSegment> segments;
  UnitaryMatrix prefix = UnitaryMatrix::identity(dim);
  double t = 0.0;
  for (std::size_t r = 0; r < m; r += 2) {
    const UnitaryPath& piece = result.round_paths[r];
    if (!piece.based()) throw Error(ErrorKind::kAssembly, "round paths must start at I");
    const UnitaryPath moved = piece.left_multiplied(prefix).rescaled(t, t + 1.0);
    segments.insert(segments.end(), moved.segments().begin(), moved.segments().end());
    prefix = moved.end();
    t += 1.0;
  }
  if (segments.empty()) return UnitaryPath::identity(dim);
  const double gap = op_norm(prefix.matrix() - result.odd_product.matrix());
  if (gap > 1e-8) {
    throw Error(ErrorKind::kAssembly, "assembled path does not end at the odd product", gap);
  }
  return UnitaryPath(std::move(segments), true).rescaled(0.0, 1.0);
}

double sampled_sup_commutation(const UnitaryPath& path, const std::vector<Matrix>& F, int samples) {
  if (F.empty()) return 0.0;
  const std::vector<double> worst = sampled_commutators(path, F, samples);
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace state_transport
