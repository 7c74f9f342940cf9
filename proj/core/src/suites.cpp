#include "state_transport/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include "state_transport/errors.hpp"
#include "state_transport/gram_align.hpp"
#include "state_transport/group_average.hpp"
#include "state_transport/instances.hpp"
#include "state_transport/intertwine.hpp"
#include "state_transport/random.hpp"
#include "state_transport/spectral_circle.hpp"
#include "state_transport/transport.hpp"

namespace state_transport {

namespace {

struct Measure {
  std::string name;
  double measured;
  double bound;
};
using Measures = std::vector<Measure>;
using InstanceFn = Measures (*)(Rng&, std::size_t);

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Measures gram_instance(Rng& rng, std::size_t i) {
  const Index dim = 2 + static_cast<Index>(i % 15);
  const Index n = rng.integer(1, dim);
  const Index rank = (i % 4 == 3) ? rng.integer(1, n) : n;
  const VectorFamily x = random_family(rng, dim, n, rank);
  const VectorFamily target_family = random_family(rng, n, n, rng.integer(1, n));
  const HermitianMatrix c = gram_matrix(target_family);
  const VectorFamily y = gram_complete(x, c);

  const HermitianMatrix d = gram_matrix(x);
  const Matrix diff = psd_sqrt(c).matrix() - psd_sqrt(d).matrix();
  const Matrix expected = diff * diff;
  double disp = 0.0;
  for (Index k = 0; k < n; ++k) {
    disp = std::max(disp, std::abs((y[k] - x[k]).squaredNorm() - expected(k, k).real()));
  }
  return {{"gram.target_residual", max_abs(gram_matrix(y).matrix() - c.matrix()), 1e-10},
          {"gram.displacement_identity", disp, 1e-8}};
}

Measures align_instance(Rng& rng, std::size_t i) {
  const bool deficient = (i % 2) == 1;
  Index dim;
  Index n;
  if (deficient) {
    dim = rng.integer(1, 4);
    n = dim + rng.integer(1, 5);
  } else {
    dim = rng.integer(2, 10);
    n = rng.integer(1, dim);
  }
  const VectorFamily src = random_family(rng, dim, n, n);
  Matrix moved = haar_unitary(rng, dim).matrix() * src.columns();
  moved += std::pow(10.0, -rng.uniform(3.0, 7.0)) * ginibre(rng, dim, n) / std::sqrt(double(dim * n));
  moved /= std::max(1.0, moved.norm());
  const VectorFamily dst(moved);
  const double delta = gram_gap(src, dst) * (1.0 + 1e-3) + 1e-15;
  const Alignment al = align_unitary(src, dst, delta);
  if (deficient) {
    return {{"align.deficient_stated_bound", al.max_residual - al.stated_bound, 1e-8},
            {"align.deficient_certified_bound", al.max_residual - al.bound, 1e-12}};
  }
  return {{"align.full_rank_certified_bound", al.max_residual - al.bound, 1e-12}};
}

// Competing paths from I to some w with w xi = eta: a one-parameter group and
// a two-leg path through a random unitary.
Measures geodesic_instance(Rng& rng, std::size_t i) {
  const Index dim = 2 + static_cast<Index>(i % 7);
  const Vector x = random_unit_vector(rng, dim);
  Vector y = random_unit_vector(rng, dim);
  if (i % 10 == 4) y = std::polar(1.0, rng.uniform(-3.0, 3.0)) * x;
  const StateVector xi = StateVector::normalized(x);
  const StateVector eta = StateVector::normalized(y);
  const UnitaryPath path = geodesic_pair(xi, eta);
  const double theta = geodesic_angle(x, y);

  Measures out;
  out.push_back({"geodesic.length_equals_angle", std::abs(path.length() - theta), 1e-8});
  out.push_back({"geodesic.endpoint", (path.end().matrix() * x - y).norm(), 1e-8});

  const Matrix g = path.end().matrix();
  const Matrix perp = Matrix::Identity(dim, dim) - x * x.adjoint();
  double worst_gain = -1e300;
  double worst_cert = -1e300;
  for (int c = 0; c < 200; ++c) {
    const HermitianMatrix hr = random_hermitian(rng, dim, rng.uniform(0.0, 3.0));
    const HermitianMatrix fix = HermitianMatrix::symmetrized(perp * hr.matrix() * perp);
    const UnitaryMatrix w = UnitaryMatrix::assume_unitary(g * expm_skew(fix, 1.0).matrix());
    double length;
    UnitaryPath competitor = UnitaryPath::identity(dim);
    if (c % 2 == 0) {
      const HermitianMatrix h = spectral_generator(w);
      competitor = UnitaryPath::one_parameter(h);
    } else {
      const HermitianMatrix h1 = random_hermitian(rng, dim, rng.uniform(0.0, kPi));
      const UnitaryMatrix a = expm_skew(h1, 1.0);
      const HermitianMatrix h2 = spectral_generator(w * a.adjoint());
      competitor = UnitaryPath::one_parameter(h1).then(UnitaryPath::one_parameter(h2));
    }
    length = competitor.length();
    worst_gain = std::max(worst_gain, theta - length);
    if (c % 50 == 0) {
      const LowerBoundCertificate cert = geodesic_lower_bound(competitor, xi, eta, 16);
      worst_cert = std::max(worst_cert, cert.phi - cert.length);
    }
  }
  out.push_back({"geodesic.competitors_not_shorter", worst_gain, 1e-6});
  out.push_back({"geodesic.spectral_certificate", worst_cert, 1e-6});
  return out;
}

// Transport commuting with a projection: the target is a unitary image of xi
// that preserves both e xi and (1 - e) xi up to rotation inside each range.
Measures projection_instance(Rng& rng, std::size_t i) {
  const Index dim = 2 + static_cast<Index>(i % 7);
  const Vector x = random_unit_vector(rng, dim);
  const StateVector xi = StateVector::normalized(x);
  Measures out;
  const Index rank = rng.integer(1, dim - 1 > 0 ? dim - 1 : 1);
  const Matrix basis = haar_unitary(rng, dim).matrix();
  const Matrix pe = basis.leftCols(rank) * basis.leftCols(rank).adjoint();
  const Vector a = pe * x;
  const Vector b = x - a;
  Matrix mix = basis.leftCols(rank) * haar_unitary(rng, rank).matrix() * basis.leftCols(rank).adjoint();
  if (dim - rank > 0) {
    mix += basis.rightCols(dim - rank) * haar_unitary(rng, dim - rank).matrix() *
           basis.rightCols(dim - rank).adjoint();
  }
  const StateVector target = StateVector::normalized(mix * a + mix * b);
  const ProjectionTransport pt =
      projection_transport(HermitianMatrix::symmetrized(pe), xi, target);
  const std::vector<double> comm = sampled_commutators(pt.path, {pe}, 64);
  out.push_back({"projection.commutes", comm.front(), 1e-9});
  out.push_back({"projection.length", pt.path.length(), kPi / 2 + 1e-8});
  out.push_back({"projection.endpoint",
                 (pt.path.end().matrix() * x - pt.phase * target.vector()).norm(), 1e-9});
  return out;
}

Measures spectrum_instance(Rng& rng, std::size_t i) {
  const Index dim = 2 + static_cast<Index>(i % 5);
  const UnitaryMatrix u = haar_unitary(rng, dim);
  UnitaryMatrix v = u;
  switch (i % 3) {
    case 0: v = haar_unitary(rng, dim); break;
    case 1: {
      const HermitianMatrix h = random_hermitian(rng, dim, std::pow(10.0, -rng.uniform(0.0, 6.0)));
      v = u * expm_skew(h, 1.0);
      break;
    }
    default: {
      const HermitianMatrix h = random_hermitian(rng, dim, rng.uniform(0.0, 1.0));
      v = expm_skew(h, 1.0) * u;
    }
  }
  const double dist = op_norm(u.matrix() - v.matrix());
  double worst = -1e300;
  for (const Complex& lambda : unitary_spectrum(u)) {
    const Complex mu = spectrum_match(u, v, lambda);
    worst = std::max(worst, std::abs(lambda - mu) - dist);
  }
  return {{"spectrum.nearest_within_distance", worst, 1e-8}};
}

Measures commutant_instance_check(Rng& rng, std::size_t i) {
  const Index n = (i % 2 == 0) ? 2 : 3;
  const double eps = (i % 4 < 2) ? 0.1 : 0.01;
  const double delta = commutant_delta(n, n, eps);
  const CommutantInstance inst = commutant_instance(rng, n, n, 0.5 * delta);
  const CommutantTransport tr = commutant_transport(inst.units, inst.xi, inst.eta, eps);
  const std::vector<double> comm = sampled_commutators(tr.path, inst.units.units(), 64);
  return {{"commutant.terminal_error_ratio",
           (tr.path.end().matrix() * inst.xi.vector() - inst.eta.vector()).norm() / eps, 1.0},
          {"commutant.commutes_with_units", *std::max_element(comm.begin(), comm.end()), 1e-9}};
}

Measures circle_instance_check(Rng& rng, std::size_t i) {
  const Index n = 1 + static_cast<Index>(i % 2);
  const int atoms = static_cast<int>(rng.integer(2, 5));
  const CircleInstance inst = circle_instance(rng, n, atoms);
  const double eps = 0.1;
  const ArcTransport tr =
      arc_transport(inst.block, inst.model, inst.xi, inst.eta, inst.block.units(), eps);
  const CirclePartition& p = tr.partition;
  double gap_violation = -1e300;
  for (double g : p.gaps) gap_violation = std::max({gap_violation, eps / 2 - g, g - 1.5 * eps});
  double margin = -1e300;
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    margin = std::max({margin, p.xi_margin_mass[k] - p.eps_prime, p.eta_margin_mass[k] - p.eps_prime});
  }
  return {{"circle.gap_invariant", gap_violation, 0.0},
          {"circle.margin_invariant", margin, 0.0},
          {"arc.z_commutator", tr.z_commutator, 3 * kPi * eps},
          {"arc.terminal_error", tr.terminal_error, 2 * std::sqrt(3.0) * eps},
          {"arc.unit_commutator", tr.f_commutator, 1e-9}};
}

Measures group_instance_check(Rng& rng, std::size_t i) {
  const Index m = 2 + static_cast<Index>(i % 4);
  const double eps_list[] = {0.1, 0.2, 0.25};
  const double eps = eps_list[i % 3];
  const GroupInstance inst = padded_group_instance(rng, m);
  const std::vector<GroupElement> F{{1}, {-1}};
  const FolnerSet fs = folner_set(inst.action, F, eps);
  const double L = static_cast<double>(fs.elements.size());

  Measures out;
  out.push_back({"group.defect_is_two_over_length", std::abs(fs.defect - 2.0 / L), 1e-15});
  out.push_back({"group.defect_below_eps", fs.defect, eps});
  const HermitianMatrix h = random_hermitian(rng, 2 * m, rng.uniform(0.1, 1.0));
  const HermitianMatrix hbar = average_conjugates(h, fs, inst.action);
  const double hn = op_norm(h.matrix());
  double worst = -1e300;
  for (const auto& g : F) {
    const Matrix r = inst.action.rep(g).matrix();
    worst = std::max(worst, op_norm(commutator(r, hbar.matrix())) - 2.0 * hn * fs.defect);
  }
  out.push_back({"group.average_commutator", worst, 1e-10});
  out.push_back({"group.average_norm", op_norm(hbar.matrix()) - hn, 1e-12});

  const GroupTransport tr = group_state_transport(inst.action, inst.xi, inst.eta, F, eps);
  const GroupLeg& leg = tr.legs.front();
  out.push_back({"group.flip_relations", leg.flip_residual, 1e-10});
  out.push_back({"group.zeta_error", leg.zeta_error - leg.zeta_bound, 0.0});
  out.push_back({"group.terminal_error", tr.terminal_error - tr.terminal_bound, 0.0});
  out.push_back({"group.commutator", tr.commutator - tr.commutator_bound, 0.0});
  out.push_back({"group.length", tr.path.length(), kPi * static_cast<double>(tr.legs.size()) + 1e-10});
  return out;
}

Measures intertwine_instance_check(Rng& rng, std::size_t i) {
  static const std::vector<std::vector<Index>> towers{{2, 2, 2}, {2, 2, 2, 2}, {3, 3}, {2, 3, 2}};
  const auto& branching = towers[i % towers.size()];
  const double eps = 0.1;
  const int rounds = 4 + static_cast<int>(i % 3);
  const IntertwineInstance inst = intertwine_instance(rng, branching);
  const Schedule s = make_schedule(inst.tower, 1, eps, rounds);
  const IntertwineResult r = back_and_forth(inst.tower, inst.omega1, inst.omega2, inst.F, s);
  double budget_ratio = 0.0;
  double drift_ratio = 0.0;
  double matching = -1e300;
  for (const RoundLog& log : r.rounds) {
    budget_ratio = std::max(budget_ratio, log.commutation_error / log.budget);
    drift_ratio = std::max({drift_ratio, log.forward_drift / log.budget, log.inverse_drift / log.budget});
    matching = std::max(matching, log.matching_error - log.delta_out);
  }
  const UnitaryPath path = assemble_path(r);
  const double sup = sampled_sup_commutation(path, inst.F, 64);
  return {{"intertwine.round_budget_ratio", budget_ratio, 1.0},
          {"intertwine.telescoping_drift_ratio", drift_ratio, 1.0},
          {"intertwine.round_matching", matching, 0.0},
          {"intertwine.odd_product", r.odd_error, 4 * eps / 3},
          {"intertwine.even_product", r.even_error, 2 * eps / 3},
          {"intertwine.combined", r.combined_error, 2 * eps},
          {"intertwine.final_matching", r.final_matching, s.deltas.back()},
          {"intertwine.path_sup_commutation", sup, 4 * eps / 3 + 1e-6}};
}

const std::map<std::string, InstanceFn>& registry() {
  static const std::map<std::string, InstanceFn> r{
      {"gram", gram_instance},
      {"align", align_instance},
      {"geodesic", geodesic_instance},
      {"projection", projection_instance},
      {"spectrum", spectrum_instance},
      {"commutant", commutant_instance_check},
      {"circle", circle_instance_check},
      {"group", group_instance_check},
      {"intertwine", intertwine_instance_check},
  };
  return r;
}

}  // namespace

long SuiteSummary::violations() const {
  long v = errors;
  for (const auto& p : properties) v += p.failed;
  return v;
}

const PropertyTally* SuiteSummary::find(const std::string& name) const {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Json SuiteSummary::to_json() const {
  Json props = Json::array();
  for (const auto& p : properties) {
    props.push_back({{"name", p.name},
                     {"passed", p.passed},
                     {"failed", p.failed},
                     {"max_measured", p.max_measured},
                     {"max_excess", p.max_excess}});
  }
  Json out{{"suite", suite},
           {"seed", seed},
           {"instances", instances},
           {"properties", std::move(props)},
           {"errors", errors},
           {"violations", violations()},
           {"pass", violations() == 0}};
  if (errors > 0) out["first_error"] = first_error;
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gram",     "align",     "geodesic", "projection",
                                              "spectrum", "commutant", "circle",   "group",
                                              "intertwine"};
  return names;
}

unsigned worker_count() {
  if (const char* env = std::getenv("STATE_TRANSPORT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

SuiteSummary verify_suite(const std::string& suite, std::uint64_t seed, long instances) {
  const auto it = registry().find(suite);
  if (it == registry().end()) throw std::invalid_argument("unknown suite '" + suite + "'");
  if (instances < 0) throw std::invalid_argument("instance count must be non-negative");
  const InstanceFn fn = it->second;

  struct Outcome {
    Measures measures;
    std::string error;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(instances));
  parallel_for(outcomes.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    try {
      outcomes[i].measures = fn(rng, i);
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  });

  SuiteSummary summary;
  summary.suite = suite;
  summary.seed = seed;
  summary.instances = instances;
  std::map<std::string, std::size_t> index;
  for (const Outcome& o : outcomes) {
    if (!o.error.empty()) {
      if (summary.errors++ == 0) summary.first_error = o.error;
      continue;
    }
    for (const Measure& m : o.measures) {
      auto [pos, inserted] = index.emplace(m.name, summary.properties.size());
      if (inserted) summary.properties.push_back(PropertyTally{m.name});
      PropertyTally& t = summary.properties[pos->second];
      const bool ok = m.measured <= m.bound;
      (ok ? t.passed : t.failed) += 1;
      t.max_measured = std::max(t.max_measured, m.measured);
      t.max_excess = std::max(t.max_excess, m.measured - m.bound);
    }
  }
  return summary;
}

}  // namespace state_transport
