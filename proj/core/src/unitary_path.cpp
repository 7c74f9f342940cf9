#include "state_transport/unitary_path.hpp"

#include <algorithm>
#include <cmath>

#include "state_transport/errors.hpp"

namespace state_transport {

LowRankSpectrum LowRankSpectrum::of(const HermitianMatrix& h) {
  const HermitianEigen full = eig_hermitian(h);
  const double scale = std::max(1.0, full.values.cwiseAbs().maxCoeff());
  std::vector<Index> keep;
  for (Index k = 0; k < full.values.size(); ++k) {
    if (std::abs(full.values(k)) > 1e-14 * scale) keep.push_back(k);
  }
  LowRankSpectrum out{RealVector(static_cast<Index>(keep.size())),
                      Matrix(h.dim(), static_cast<Index>(keep.size()))};
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.values(static_cast<Index>(c)) = full.values(keep[c]);
    out.vectors.col(static_cast<Index>(c)) = full.vectors.matrix().col(keep[c]);
  }
  return out;
}

Matrix LowRankSpectrum::exp(double t) const {
  const Index dim = vectors.rows();
  Matrix out = Matrix::Identity(dim, dim);
  if (values.size() == 0 || t == 0.0) return out;
  Vector shift(values.size());
  for (Index k = 0; k < shift.size(); ++k) shift(k) = std::polar(1.0, t * values(k)) - 1.0;
  out.noalias() += vectors * shift.asDiagonal() * vectors.adjoint();
  return out;
}

Matrix LowRankSpectrum::apply(double t, const Matrix& m) const {
  if (values.size() == 0 || t == 0.0) return m;
  Vector shift(values.size());
  for (Index k = 0; k < shift.size(); ++k) shift(k) = std::polar(1.0, t * values(k)) - 1.0;
  Matrix out = m;
  out.noalias() += vectors * (shift.asDiagonal() * (vectors.adjoint() * m));
  return out;
}

double LowRankSpectrum::norm() const {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

PathSegment PathSegment::make(double t0, double t1, const HermitianMatrix& h,
                              const UnitaryMatrix& base) {
  return make(t0, t1, h, base, std::make_shared<const LowRankSpectrum>(LowRankSpectrum::of(h)));
}

PathSegment PathSegment::make(double t0, double t1, const HermitianMatrix& h,
                              const UnitaryMatrix& base,
                              std::shared_ptr<const LowRankSpectrum> spectrum) {
  if (!(t1 >= t0) || h.dim() != base.dim()) {
    throw Error(ErrorKind::kAssembly, "segment needs t1 >= t0 and matching dimensions");
  }
  return PathSegment{t0, t1, h, base, std::move(spectrum)};
}

UnitaryMatrix PathSegment::at(double t) const {
  if (spectrum->values.size() == 0 || t == t0) return base;
  return UnitaryMatrix::assume_unitary(spectrum->apply(t - t0, base.matrix()));
}

UnitaryPath::UnitaryPath(std::vector<PathSegment> segments, bool based)
    : segments_(std::move(segments)), based_(based) {
  if (segments_.empty()) throw Error(ErrorKind::kAssembly, "path has no segments");
  const Index dim = segments_.front().base.dim();
  for (std::size_t k = 1; k < segments_.size(); ++k) {
    const PathSegment& prev = segments_[k - 1];
    const PathSegment& next = segments_[k];
    if (next.base.dim() != dim || std::abs(next.t0 - prev.t1) > 1e-12) {
      throw Error(ErrorKind::kAssembly, "segments are not contiguous");
    }
    const Matrix gap = prev.at(prev.t1).matrix() - next.base.matrix();
    // The Frobenius norm bounds the operator norm, so it settles most joints cheaply.
    const double jump = gap.norm() <= 1e-10 ? 0.0 : op_norm(gap);
    if (jump > 1e-10) throw Error(ErrorKind::kAssembly, "path is discontinuous at a joint", jump);
  }
  if (based_) {
    const double off = op_norm(segments_.front().base.matrix() - Matrix::Identity(dim, dim));
    if (off > 1e-10) throw Error(ErrorKind::kAssembly, "based path does not start at I", off);
  }
}

UnitaryPath UnitaryPath::constant(const UnitaryMatrix& u) {
  const bool is_identity = (u.matrix() - Matrix::Identity(u.dim(), u.dim())).norm() <= 1e-10;
  return UnitaryPath({PathSegment::make(0.0, 1.0, HermitianMatrix::zero(u.dim()), u,
                                        std::make_shared<const LowRankSpectrum>(LowRankSpectrum{
                                            RealVector(0), Matrix(u.dim(), 0)}))},
                     is_identity);
}

UnitaryPath UnitaryPath::identity(Index dim) { return constant(UnitaryMatrix::identity(dim)); }

UnitaryPath UnitaryPath::one_parameter(const HermitianMatrix& h, double t0, double t1) {
  return one_parameter(h, std::make_shared<const LowRankSpectrum>(LowRankSpectrum::of(h)), t0, t1);
}

UnitaryPath UnitaryPath::one_parameter(const HermitianMatrix& h,
                                       std::shared_ptr<const LowRankSpectrum> s, double t0,
                                       double t1) {
  return UnitaryPath({PathSegment::make(t0, t1, h, UnitaryMatrix::identity(h.dim()), std::move(s))},
                     true);
}

UnitaryMatrix UnitaryPath::at(double t) const {
  t = std::clamp(t, t_begin(), t_end());
  for (const PathSegment& s : segments_) {
    if (t <= s.t1) return s.at(t);
  }
  return segments_.back().at(t);
}

double UnitaryPath::length() const {
  double total = 0.0;
  for (const PathSegment& s : segments_) total += (s.t1 - s.t0) * s.speed();
  return total;
}

double UnitaryPath::chord_sum(int pieces) const {
  if (pieces < 1) return 0.0;
  double total = 0.0;
  Matrix prev = at(t_begin()).matrix();
  for (int k = 1; k <= pieces; ++k) {
    const double t = t_begin() + (t_end() - t_begin()) * k / pieces;
    Matrix cur = at(t).matrix();
    total += op_norm(cur - prev);
    prev = std::move(cur);
  }
  return total;
}

UnitaryPath UnitaryPath::then(const UnitaryPath& next) const {
  if (!next.based()) throw Error(ErrorKind::kAssembly, "appended leg must start at I");
  const UnitaryMatrix joint = end();
  const double shift = t_end() - next.t_begin();
  std::vector<PathSegment> out = segments_;
  for (const PathSegment& s : next.segments()) {
    out.push_back(PathSegment::make(s.t0 + shift, s.t1 + shift, s.generator, s.base * joint,
                                    s.spectrum));
  }
  return UnitaryPath(std::move(out), based_);
}

UnitaryPath UnitaryPath::left_multiplied(const UnitaryMatrix& w) const {
  std::vector<PathSegment> out;
  out.reserve(segments_.size());
  for (const PathSegment& s : segments_) {
    auto spec = std::make_shared<const LowRankSpectrum>(
        LowRankSpectrum{s.spectrum->values, w.matrix() * s.spectrum->vectors});
    out.push_back(PathSegment::make(
        s.t0, s.t1, HermitianMatrix::symmetrized(w.matrix() * s.generator.matrix() * w.matrix().adjoint()),
        w * s.base, std::move(spec)));
  }
  const bool is_identity = (w.matrix() - Matrix::Identity(w.dim(), w.dim())).norm() <= 1e-10;
  return UnitaryPath(std::move(out), based_ && is_identity);
}

UnitaryPath UnitaryPath::rescaled(double a, double b) const {
  const double span = t_end() - t_begin();
  if (!(b > a) || !(span > 0.0)) throw Error(ErrorKind::kAssembly, "rescaling needs b > a");
  const double factor = span / (b - a);
  auto map = [&](double t) { return a + (t - t_begin()) / factor; };
  std::vector<PathSegment> out;
  out.reserve(segments_.size());
  for (const PathSegment& s : segments_) {
    auto spec = std::make_shared<const LowRankSpectrum>(
        LowRankSpectrum{s.spectrum->values * factor, s.spectrum->vectors});
    out.push_back(PathSegment::make(map(s.t0), map(s.t1),
                                    HermitianMatrix::symmetrized(s.generator.matrix() * factor),
                                    s.base, std::move(spec)));
  }
  out.back().t1 = b;
  return UnitaryPath(std::move(out), based_);
}

}  // namespace state_transport
