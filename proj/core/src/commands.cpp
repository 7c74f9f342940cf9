#include "state_transport/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "state_transport/errors.hpp"
#include "state_transport/gram_align.hpp"
#include "state_transport/group_average.hpp"
#include "state_transport/instances.hpp"
#include "state_transport/intertwine.hpp"
#include "state_transport/random.hpp"
#include "state_transport/spectral_circle.hpp"
#include "state_transport/suites.hpp"
#include "state_transport/transport.hpp"

namespace state_transport {

namespace {

using Handler = std::function<void(const Json&, Rng&, TransportReport&, CsvTable*)>;

StateVector state_or_random(const Json& cfg, const char* key, Rng& rng, Index dim) {
  if (cfg.contains(key)) return StateVector::checked(vector_from_json(cfg.at(key)));
  return StateVector::normalized(random_unit_vector(rng, dim));
}

VectorFamily family_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("a family must be a non-empty array of vectors");
  std::vector<Vector> vs;
  for (const Json& v : j) vs.push_back(vector_from_json(v));
  return VectorFamily::from_vectors(vs.front().size(), vs);
}

void sample_path(const UnitaryPath& path, int samples, CsvTable* csv,
                 const std::function<std::vector<double>(double, const Matrix&)>& row) {
  if (csv == nullptr) return;
  for (int k = 0; k <= samples; ++k) {
    const double t = path.t_begin() + (path.t_end() - path.t_begin()) * k / samples;
    std::vector<double> r{t};
    const std::vector<double> rest = row(t, path.at(t).matrix());
    r.insert(r.end(), rest.begin(), rest.end());
    csv->add_row(std::move(r));
  }
}

void cmd_gram(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable*) {
  VectorFamily fam;
  HermitianMatrix target = HermitianMatrix::zero(1);
  if (cfg.contains("family")) {
    fam = family_from_json(cfg.at("family"));
    target = HermitianMatrix::checked(matrix_from_json(cfg.at("target")));
  } else {
    const Index dim = cfg.value("dim", 6);
    const Index n = cfg.value("n", 4);
    fam = random_family(rng, dim, n, n);
    target = gram_matrix(random_family(rng, n, n, n));
  }
  const VectorFamily out = gram_complete(fam, target);
  const Matrix diff = psd_sqrt(target).matrix() - psd_sqrt(gram_matrix(fam)).matrix();
  const Matrix expected = diff * diff;
  double disp = 0.0;
  for (Index i = 0; i < fam.size(); ++i) {
    disp = std::max(disp, std::abs((out[i] - fam[i]).squaredNorm() - expected(i, i).real()));
  }
  rep.check("target_residual", (gram_matrix(out).matrix() - target.matrix()).cwiseAbs().maxCoeff(),
            1e-10);
  rep.check("displacement_identity", disp, 1e-8);
  Json vs = Json::array();
  for (Index i = 0; i < out.size(); ++i) vs.push_back(to_json(Vector(out[i])));
  rep.note("completed_family", std::move(vs));
}

void cmd_align(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable*) {
  VectorFamily src;
  VectorFamily dst;
  double delta = 0.0;
  if (cfg.contains("src")) {
    src = family_from_json(cfg.at("src"));
    dst = family_from_json(cfg.at("dst"));
    delta = cfg.at("delta").get<double>();
  } else {
    const Index dim = cfg.value("dim", 6);
    const Index n = cfg.value("n", 4);
    const double noise = cfg.value("noise", 1e-6);
    src = random_family(rng, dim, n, n);
    Matrix moved = haar_unitary(rng, dim).matrix() * src.columns() + noise * ginibre(rng, dim, n);
    moved /= std::max(1.0, moved.norm());
    dst = VectorFamily(moved);
    delta = gram_gap(src, dst) * (1.0 + 1e-3) + 1e-15;
  }
  const Alignment al = align_unitary(src, dst, delta);
  rep.check("max_residual", al.max_residual, al.bound);
  if (al.rank_deficient) rep.check("max_residual_vs_stated", al.max_residual, al.stated_bound + 1e-8);
  rep.note("gram_gap", al.gram_gap);
  rep.note("rank_deficient", al.rank_deficient);
  rep.note("pivots", al.pivots);
  rep.note("unitary", to_json(al.unitary.matrix()));
}

void cmd_geodesic(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable* csv) {
  const Index dim = cfg.contains("xi") ? static_cast<Index>(cfg.at("xi").size()) : cfg.value("dim", 4);
  const StateVector xi = state_or_random(cfg, "xi", rng, dim);
  const StateVector eta = state_or_random(cfg, "eta", rng, dim);
  const UnitaryPath path = geodesic_pair(xi, eta, cfg.value("segments", 64));
  const double theta = geodesic_angle(xi.vector(), eta.vector());
  rep.check("length_minus_angle", std::abs(path.length() - theta), 1e-8);
  rep.check("endpoint_error", (path.end().matrix() * xi.vector() - eta.vector()).norm(), 1e-8);
  const LowerBoundCertificate cert = geodesic_lower_bound(path, xi, eta);
  rep.check("spectral_angle_minus_length", cert.phi - cert.length, 1e-6);
  rep.note("theta", theta);
  rep.note("length", path.length());
  if (csv) *csv = CsvTable({"t", "distance_to_eta", "distance_from_identity"});
  const Matrix id = Matrix::Identity(dim, dim);
  sample_path(path, cfg.value("samples", 64), csv, [&](double, const Matrix& u) {
    return std::vector<double>{(u * xi.vector() - eta.vector()).norm(), op_norm(u - id)};
  });
}

void cmd_spectrum(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable*) {
  UnitaryMatrix u = UnitaryMatrix::identity(1);
  UnitaryMatrix v = UnitaryMatrix::identity(1);
  if (cfg.contains("u")) {
    u = UnitaryMatrix::checked(matrix_from_json(cfg.at("u")));
    v = UnitaryMatrix::checked(matrix_from_json(cfg.at("v")));
  } else {
    const Index dim = cfg.value("dim", 4);
    u = haar_unitary(rng, dim);
    v = haar_unitary(rng, dim);
  }
  const double dist = op_norm(u.matrix() - v.matrix());
  double worst = 0.0;
  Json pairs = Json::array();
  for (const Complex& lambda : unitary_spectrum(u)) {
    const Complex mu = spectrum_match(u, v, lambda);
    worst = std::max(worst, std::abs(lambda - mu));
    pairs.push_back({to_json(lambda), to_json(mu)});
  }
  rep.check("max_nearest_distance", worst, dist + 1e-8);
  rep.note("matches", std::move(pairs));
}

void cmd_projection(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable* csv) {
  HermitianMatrix e = HermitianMatrix::zero(1);
  Index dim;
  if (cfg.contains("e")) {
    e = HermitianMatrix::checked(matrix_from_json(cfg.at("e")));
    dim = e.dim();
  } else {
    dim = cfg.value("dim", 4);
    const Index rank = cfg.value("rank", 2);
    const Matrix b = haar_unitary(rng, dim).matrix().leftCols(rank);
    e = HermitianMatrix::symmetrized(b * b.adjoint());
  }
  const StateVector xi = state_or_random(cfg, "xi", rng, dim);
  StateVector eta = xi;
  if (cfg.contains("eta")) {
    eta = StateVector::checked(vector_from_json(cfg.at("eta")));
  } else {
    const Matrix& p = e.matrix();
    const Matrix q = Matrix::Identity(dim, dim) - p;
    const UnitaryMatrix w1 = haar_unitary(rng, dim);
    const UnitaryMatrix w2 = haar_unitary(rng, dim);
    // Rotate each part inside its own range, keeping the e-mass.
    const Vector a = p * w1.matrix() * p * xi.vector();
    const Vector b = q * w2.matrix() * q * xi.vector();
    const double na = (p * xi.vector()).norm();
    const double nb = (q * xi.vector()).norm();
    Vector y = Vector::Zero(dim);
    if (a.norm() > 0) y += a * (na / a.norm());
    if (b.norm() > 0) y += b * (nb / b.norm());
    eta = StateVector::normalized(y);
  }
  const ProjectionTransport pt = projection_transport(e, xi, eta);
  const std::vector<double> comm = sampled_commutators(pt.path, {e.matrix()}, 64);
  rep.check("commutator_with_e", comm.front(), 1e-9);
  rep.check("length", pt.path.length(), kPi / 2 + 1e-8);
  rep.check("endpoint_error", (pt.path.end().matrix() * xi.vector() - pt.phase * eta.vector()).norm(),
            1e-9);
  rep.note("phase", to_json(pt.phase));
  if (csv) *csv = CsvTable({"t", "commutator_with_e"});
  sample_path(pt.path, 64, csv, [&](double, const Matrix& u) {
    return std::vector<double>{op_norm(commutator(u, e.matrix()))};
  });
}

void cmd_commutant(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable* csv) {
  const Index n = cfg.value("n", 2);
  const Index k = cfg.value("k", 2);
  const double eps = cfg.value("eps", 0.1);
  const bool repair = cfg.value("repair", false);
  MatrixUnits mu = MatrixUnits::tensor(n, n * k);
  Vector xi;
  Vector eta;
  if (cfg.contains("xi")) {
    xi = StateVector::checked(vector_from_json(cfg.at("xi"))).vector();
    eta = StateVector::checked(vector_from_json(cfg.at("eta"))).vector();
  } else {
    const CommutantInstance inst = commutant_instance(rng, n, k, 0.5 * commutant_delta(n, k, eps));
    xi = inst.xi.vector();
    eta = inst.eta.vector();
  }
  const CommutantTransport tr = commutant_transport(mu, StateVector::checked(xi),
                                                    StateVector::checked(eta), eps, repair);
  const std::vector<Matrix> units = mu.units();
  const std::vector<double> comm = sampled_commutators(tr.path, units, 64);
  rep.check("terminal_error", (tr.path.end().matrix() * xi - eta).norm(), eps);
  rep.check("unit_commutator", *std::max_element(comm.begin(), comm.end()), repair ? 2 * eps : 1e-9);
  rep.note("statistics_gap", tr.stat_gap);
  rep.note("delta", tr.delta);
  rep.note("length", tr.path.length());
  if (csv) *csv = CsvTable({"t", "distance_to_eta"});
  sample_path(tr.path, 64, csv, [&](double, const Matrix& u) {
    return std::vector<double>{(u * xi - eta).norm()};
  });
}

void cmd_circle(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable* csv) {
  const Index n = cfg.value("n", 2);
  const double eps = cfg.value("eps", 0.1);
  const CircleInstance inst = circle_instance(rng, n, cfg.value("atoms", 3));
  const ArcTransport tr = arc_transport(inst.block, inst.model, inst.xi, inst.eta, inst.block.units(), eps);
  const CirclePartition& p = tr.partition;
  double min_gap = 1.0;
  double max_gap = 0.0;
  double margin = 0.0;
  for (double g : p.gaps) {
    min_gap = std::min(min_gap, g);
    max_gap = std::max(max_gap, g);
  }
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    margin = std::max({margin, p.xi_margin_mass[i], p.eta_margin_mass[i]});
  }
  rep.check("half_eps_minus_min_gap", eps / 2 - min_gap, 0.0);
  rep.check("max_gap", max_gap, 1.5 * eps);
  rep.check("margin_mass", margin, p.eps_prime);
  rep.check("z_commutator", tr.z_commutator, 3 * kPi * eps);
  rep.check("terminal_error", tr.terminal_error, 2 * std::sqrt(3.0) * eps);
  rep.note("cut_points", p.points);
  rep.note("angles", inst.model.angles());
  if (csv) *csv = CsvTable({"t", "z_commutator", "distance_to_eta"});
  sample_path(tr.path, 64, csv, [&](double, const Matrix& u) {
    return std::vector<double>{op_norm(commutator(u, inst.model.z().matrix())),
                               (u * inst.xi.vector() - inst.eta.vector()).norm()};
  });
}

void cmd_group(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable* csv) {
  const double eps = cfg.value("eps", 0.1);
  std::vector<GroupElement> F{{1}, {-1}};
  if (cfg.contains("F")) F = cfg.at("F").get<std::vector<GroupElement>>();
  std::optional<GroupAction> action;
  std::optional<StateVector> xi;
  std::optional<StateVector> eta;
  if (cfg.contains("action")) {
    action = group_action_from_json(cfg.at("action"));
    xi = StateVector::checked(vector_from_json(cfg.at("xi")));
    eta = StateVector::checked(vector_from_json(cfg.at("eta")));
  } else {
    GroupInstance inst = padded_group_instance(rng, cfg.value("m", 3));
    action = std::move(inst.action);
    xi = inst.xi;
    eta = inst.eta;
  }
  const GroupTransport tr = group_state_transport(*action, *xi, *eta, F, eps);
  rep.check("defect", tr.folner.defect, eps);
  rep.check("commutator", tr.commutator, tr.commutator_bound);
  rep.check("terminal_error", tr.terminal_error, tr.terminal_bound);
  for (std::size_t i = 0; i < tr.legs.size(); ++i) {
    const std::string leg = "leg" + std::to_string(i + 1) + ".";
    rep.check(leg + "flip_residual", tr.legs[i].flip_residual, 1e-10);
    rep.check(leg + "zeta_error", tr.legs[i].zeta_error, tr.legs[i].zeta_bound);
  }
  rep.note("folner_size", tr.folner.elements.size());
  rep.note("detour", tr.detour);
  rep.note("length", tr.path.length());
  if (csv) *csv = CsvTable({"t", "distance_to_eta"});
  sample_path(tr.path, 64, csv, [&](double, const Matrix& u) {
    return std::vector<double>{(u * xi->vector() - eta->vector()).norm()};
  });
}

Json round_json(const RoundLog& r) {
  return {{"round", r.round},
          {"level", r.level},
          {"budget", r.budget},
          {"delta_in", r.delta_in},
          {"delta_out", r.delta_out},
          {"hypothesis_gap", r.hypothesis_gap},
          {"commutation_error", r.commutation_error},
          {"forward_drift", r.forward_drift},
          {"inverse_drift", r.inverse_drift},
          {"matching_error", r.matching_error},
          {"terminal_error", r.terminal_error},
          {"repair_length", r.repair_length},
          {"path_length", r.path_length},
          {"f_size", r.f_size}};
}

void cmd_intertwine(const Json& cfg, Rng& rng, TransportReport& rep, CsvTable* csv) {
  std::vector<Index> branching{2, 2, 2};
  if (cfg.contains("tower")) {
    const Json& t = cfg.at("tower");
    branching = (t.is_object() ? t.at("branching") : t).get<std::vector<Index>>();
  }
  const double eps = cfg.value("eps", 0.1);
  const int rounds = cfg.value("rounds", 6);
  const IntertwineInstance inst = intertwine_instance(rng, branching, cfg.value("noise", 0.0));
  const Schedule s = make_schedule(inst.tower, 1, eps, rounds, cfg.value("repair", true));
  const IntertwineResult r = back_and_forth(inst.tower, inst.omega1, inst.omega2, inst.F, s);
  Json logs = Json::array();
  for (const RoundLog& log : r.rounds) {
    rep.check("round" + std::to_string(log.round) + ".commutation_error", log.commutation_error,
              log.budget);
    rep.check("round" + std::to_string(log.round) + ".matching_error", log.matching_error,
              log.delta_out);
    logs.push_back(round_json(log));
  }
  rep.check("odd_product_error", r.odd_error, 4 * eps / 3);
  rep.check("even_product_error", r.even_error, 2 * eps / 3);
  rep.check("combined_error", r.combined_error, 2 * eps);
  rep.check("final_matching", r.final_matching, s.deltas.back());
  const UnitaryPath path = assemble_path(r);
  const int samples = cfg.value("samples", 64);
  rep.check("path_sup_commutation", sampled_sup_commutation(path, inst.F, samples),
            4 * eps / 3 + 1e-6);
  rep.note("rounds", logs);
  rep.note("ambient_dim", inst.tower.ambient_dim());
  if (cfg.contains("log")) {
    std::ofstream f(cfg.at("log").get<std::string>());
    if (!f) throw UsageError("cannot open round log for writing");
    for (const Json& l : logs) f << l.dump() << '\n';
  }
  if (csv) *csv = CsvTable({"t", "sup_commutation"});
  sample_path(path, samples, csv, [&](double, const Matrix& u) {
    double worst = 0.0;
    for (const Matrix& x : inst.F) worst = std::max(worst, op_norm(commutator(u, x)));
    return std::vector<double>{worst};
  });
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"gram", cmd_gram},           {"align", cmd_align},         {"geodesic", cmd_geodesic},
      {"spectrum", cmd_spectrum},   {"projection", cmd_projection}, {"commutant", cmd_commutant},
      {"circle", cmd_circle},       {"group", cmd_group},         {"intertwine", cmd_intertwine},
  };
  return h;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : handlers()) v.push_back(name);
    return v;
  }();
  return names;
}

TransportReport run_json(const Json& config, std::uint64_t seed, CsvTable* csv) {
  if (!config.is_object() || !config.contains("command") || !config.at("command").is_string()) {
    throw UsageError("config must be an object with a string \"command\" field");
  }
  const std::string name = config.at("command").get<std::string>();
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw UsageError("unknown command '" + name + "'");
  TransportReport report(name, config);
  Rng rng(seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    it->second(config, rng, report, csv);
  } catch (const Error& e) {
    report.reject(e);
  }
  report.set_wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return report;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(config.config_path);
    if (!in) throw UsageError("cannot read config '" + config.config_path + "'");
    const Json cfg = Json::parse(in);
    std::uint64_t seed = config.seed.value_or(cfg.value("seed", std::uint64_t{0}));
    CsvTable csv({"t"});
    const TransportReport report = run_json(cfg, seed, config.csv_path.empty() ? nullptr : &csv);
    const std::string text = report.to_json().dump(2) + "\n";
    if (config.out_path.empty()) {
      out << text;
    } else {
      write_text(config.out_path, text);
    }
    if (!config.csv_path.empty()) {
      std::ostringstream os;
      csv.write(os);
      write_text(config.csv_path, os.str());
    }
    return report.pass() ? 0 : 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const Json::exception& e) {
    err << "error: malformed config: " << e.what() << '\n';
  }
  return 2;
}

int verify_command(const VerifyConfig& config, std::ostream& out, std::ostream& err) {
  SuiteSummary summary;
  try {
    summary = verify_suite(config.suite, config.seed, config.instances);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const std::string text = summary.to_json().dump(2) + "\n";
  try {
    if (config.out_path.empty()) {
      out << text;
    } else {
      write_text(config.out_path, text);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return summary.violations() == 0 ? 0 : 1;
}

}  // namespace state_transport
