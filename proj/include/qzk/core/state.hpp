// Copyright 2026 The qzk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qzk/core/kernel.hpp"
#include "qzk/core/layout.hpp"
#include "qzk/core/linalg.hpp"

namespace qzk {

class PureState {
 public:
  PureState(Vector amplitudes, RegisterLayout layout) : amp_(std::move(amplitudes)), layout_(std::move(layout)) {
    if (static_cast<std::size_t>(amp_.size()) != layout_.dim())
      throw DimensionError("PureState: " + std::to_string(amp_.size()) + " amplitudes for layout " + layout_.describe());
    if (std::abs(amp_.norm() - 1.0) > kTol)
      throw PreconditionError("PureState: norm " + std::to_string(amp_.norm()) + " differs from 1");
  }

  /// Normalizes v; throws on a zero vector.
  static PureState normalized(Vector v, RegisterLayout layout) {
    const double n = v.norm();
    if (n < 1e-300) throw PreconditionError("PureState::normalized: zero vector");
    return PureState(v / n, std::move(layout));
  }

  /// Computational basis state |index> on the layout.
  static PureState basis(RegisterLayout layout, std::size_t index = 0) {
    return PureState(basis_state(layout.dim(), index), std::move(layout));
  }

  const Vector& amplitudes() const { return amp_; }
  const RegisterLayout& layout() const { return layout_; }
  std::size_t dim() const { return layout_.dim(); }
  Matrix density() const { return amp_ * amp_.adjoint(); }

 private:
  Vector amp_;
  RegisterLayout layout_;
};

class MixedState {
 public:
  MixedState(Matrix rho, RegisterLayout layout) : rho_(std::move(rho)), layout_(std::move(layout)) {
    if (static_cast<std::size_t>(rho_.rows()) != layout_.dim() || !is_square(rho_))
      throw DimensionError("MixedState: matrix size does not match layout " + layout_.describe());
    if (!is_hermitian(rho_)) throw PreconditionError("MixedState: matrix is not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > kTol)
      throw PreconditionError("MixedState: trace " + std::to_string(rho_.trace().real()) + " differs from 1");
    if (min_eigenvalue(rho_) < -kTol) throw PreconditionError("MixedState: matrix is not positive semidefinite");
  }

  explicit MixedState(const PureState& p) : rho_(p.density()), layout_(p.layout()) {}

  /// Normalizes a PSD matrix by its trace.
  static MixedState normalized(const Matrix& m, RegisterLayout layout) {
    const double t = m.trace().real();
    if (t < 1e-300) throw PreconditionError("MixedState::normalized: zero trace");
    return MixedState(m / t, std::move(layout));
  }

  static MixedState maximally_mixed(RegisterLayout layout) {
    const auto d = layout.dim();
    return MixedState(Matrix::Identity(d, d) / static_cast<double>(d), std::move(layout));
  }

  const Matrix& matrix() const { return rho_; }
  const RegisterLayout& layout() const { return layout_; }
  std::size_t dim() const { return layout_.dim(); }
  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  Matrix rho_;
  RegisterLayout layout_;
};

/// A unitary acting on named registers, in the listed order.
class UnitaryOp {
 public:
  UnitaryOp(Matrix m, std::vector<std::string> acts_on) : m_(std::move(m)), acts_on_(std::move(acts_on)) {
    if (!is_unitary(m_)) throw PreconditionError("UnitaryOp: matrix is not unitary");
  }
  const Matrix& matrix() const { return m_; }
  const std::vector<std::string>& acts_on() const { return acts_on_; }
  UnitaryOp adjoint() const { return UnitaryOp(m_.adjoint(), acts_on_); }

 private:
  Matrix m_;
  std::vector<std::string> acts_on_;
};

class ProjectiveMeasurement {
 public:
  ProjectiveMeasurement(std::vector<Matrix> projectors, std::vector<std::string> acts_on)
      : p_(std::move(projectors)), acts_on_(std::move(acts_on)) {
    if (p_.empty()) throw PreconditionError("ProjectiveMeasurement: no projectors");
    Matrix sum = Matrix::Zero(p_[0].rows(), p_[0].cols());
    for (const auto& p : p_) {
      if (p.rows() != sum.rows() || !is_projector(p)) throw PreconditionError("ProjectiveMeasurement: element is not a projector");
      sum += p;
    }
    if (max_abs(sum - Matrix::Identity(sum.rows(), sum.cols())) > kTol)
      throw PreconditionError("ProjectiveMeasurement: projectors do not sum to identity");
  }

  /// {Id - P, P}: outcome 1 is "in the image of P".
  static ProjectiveMeasurement binary(const Matrix& p, std::vector<std::string> acts_on) {
    return ProjectiveMeasurement({Matrix::Identity(p.rows(), p.cols()) - p, p}, std::move(acts_on));
  }

  /// Computational-basis measurement of every qubit of the listed registers.
  static ProjectiveMeasurement computational(int qubits, std::vector<std::string> acts_on) {
    std::vector<Matrix> ps;
    for (std::size_t i = 0; i < pow2(qubits); ++i) {
      Matrix p = Matrix::Zero(pow2(qubits), pow2(qubits));
      p(i, i) = 1;
      ps.push_back(p);
    }
    return ProjectiveMeasurement(std::move(ps), std::move(acts_on));
  }

  const std::vector<Matrix>& projectors() const { return p_; }
  const std::vector<std::string>& acts_on() const { return acts_on_; }

 private:
  std::vector<Matrix> p_;
  std::vector<std::string> acts_on_;
};

class Povm {
 public:
  Povm(std::vector<Matrix> elements, std::vector<std::string> acts_on) : e_(std::move(elements)), acts_on_(std::move(acts_on)) {
    if (e_.empty()) throw PreconditionError("Povm: no elements");
    Matrix sum = Matrix::Zero(e_[0].rows(), e_[0].cols());
    for (const auto& e : e_) {
      if (e.rows() != sum.rows() || !is_psd(e)) throw PreconditionError("Povm: element is not PSD");
      sum += e;
    }
    if (max_abs(sum - Matrix::Identity(sum.rows(), sum.cols())) > kTol) throw PreconditionError("Povm: elements do not sum to identity");
  }
  const std::vector<Matrix>& elements() const { return e_; }
  const std::vector<std::string>& acts_on() const { return acts_on_; }

 private:
  std::vector<Matrix> e_;
  std::vector<std::string> acts_on_;
};

template <class State>
struct Outcome {
  double probability = 0.0;
  std::optional<State> post;  // empty for zero-probability outcomes
};

namespace detail {

inline std::vector<int> wires(const RegisterLayout& l, const std::vector<std::string>& regs, const Matrix& op, const char* what) {
  auto q = l.qubits(regs);
  if (static_cast<std::size_t>(op.rows()) != pow2(static_cast<int>(q.size())))
    throw DimensionError(std::string(what) + ": operator dimension does not match registers");
  return q;
}

inline void require_disjoint(const RegisterLayout& a, const RegisterLayout& b) {
  for (const auto& r : b.registers())
    if (a.contains(r.name)) throw RegisterError("tensor: register name '" + r.name + "' used on both sides");
}

}  // namespace detail

inline PureState tensor(const PureState& a, const PureState& b) {
  detail::require_disjoint(a.layout(), b.layout());
  return PureState(kron(a.amplitudes(), b.amplitudes()), a.layout().concat(b.layout()));
}

inline MixedState tensor(const MixedState& a, const MixedState& b) {
  detail::require_disjoint(a.layout(), b.layout());
  return MixedState(kron(a.matrix(), b.matrix()), a.layout().concat(b.layout()));
}

inline MixedState tensor(const MixedState& a, const PureState& b) { return tensor(a, MixedState(b)); }
inline MixedState tensor(const PureState& a, const MixedState& b) { return tensor(MixedState(a), b); }

inline MixedState partial_trace(const PureState& s, const std::vector<std::string>& drop) {
  RegisterLayout kept = s.layout().without(drop);
  auto q = s.layout().qubits(kept.names());
  return MixedState::normalized(kernel::reduce(s.amplitudes(), s.layout().total_qubits(), q), kept);
}

inline MixedState partial_trace(const MixedState& s, const std::vector<std::string>& drop) {
  RegisterLayout kept = s.layout().without(drop);
  auto q = s.layout().qubits(kept.names());
  return MixedState::normalized(kernel::reduce(s.matrix(), s.layout().total_qubits(), q), kept);
}

/// Reduced state on exactly `keep`, in that order.
inline MixedState reduced(const PureState& s, const std::vector<std::string>& keep) {
  auto q = s.layout().qubits(keep);
  return MixedState::normalized(kernel::reduce(s.amplitudes(), s.layout().total_qubits(), q), s.layout().select(keep));
}

inline MixedState reduced(const MixedState& s, const std::vector<std::string>& keep) {
  auto q = s.layout().qubits(keep);
  return MixedState::normalized(kernel::reduce(s.matrix(), s.layout().total_qubits(), q), s.layout().select(keep));
}

inline PureState apply_unitary(const PureState& s, const UnitaryOp& u) {
  auto q = detail::wires(s.layout(), u.acts_on(), u.matrix(), "apply_unitary");
  Vector v = s.amplitudes();
  kernel::apply(v, s.layout().total_qubits(), q, u.matrix());
  return PureState::normalized(std::move(v), s.layout());
}

inline MixedState apply_unitary(const MixedState& s, const UnitaryOp& u) {
  auto q = detail::wires(s.layout(), u.acts_on(), u.matrix(), "apply_unitary");
  Matrix rho = s.matrix();
  kernel::conjugate(rho, s.layout().total_qubits(), q, u.matrix());
  return MixedState(0.5 * (rho + rho.adjoint()), s.layout());
}

inline std::vector<Outcome<PureState>> measure(const PureState& s, const ProjectiveMeasurement& m) {
  std::vector<Outcome<PureState>> out;
  double total = 0;
  for (const auto& p : m.projectors()) {
    auto q = detail::wires(s.layout(), m.acts_on(), p, "measure");
    Vector v = s.amplitudes();
    kernel::apply(v, s.layout().total_qubits(), q, p);
    const double prob = v.squaredNorm();
    total += prob;
    Outcome<PureState> o;
    o.probability = prob;
    if (prob > kZeroProb) o.post = PureState(v / std::sqrt(prob), s.layout());
    out.push_back(std::move(o));
  }
  if (std::abs(total - 1.0) > kTol) throw PreconditionError("measure: probabilities do not sum to 1");
  return out;
}

inline std::vector<Outcome<MixedState>> measure(const MixedState& s, const ProjectiveMeasurement& m) {
  std::vector<Outcome<MixedState>> out;
  double total = 0;
  for (const auto& p : m.projectors()) {
    auto q = detail::wires(s.layout(), m.acts_on(), p, "measure");
    Matrix rho = s.matrix();
    kernel::conjugate(rho, s.layout().total_qubits(), q, p);
    const double prob = rho.trace().real();
    total += prob;
    Outcome<MixedState> o;
    o.probability = prob;
    if (prob > kZeroProb) o.post = MixedState(0.5 * (rho + rho.adjoint()) / prob, s.layout());
    out.push_back(std::move(o));
  }
  if (std::abs(total - 1.0) > kTol) throw PreconditionError("measure: probabilities do not sum to 1");
  return out;
}

/// Outcome probabilities Tr(E_j rho).
inline std::vector<double> probabilities(const MixedState& s, const Povm& m) {
  std::vector<double> out;
  for (const auto& e : m.elements()) {
    auto q = detail::wires(s.layout(), m.acts_on(), e, "probabilities");
    Matrix full = kernel::embed(e, s.layout().total_qubits(), q);
    out.push_back((full * s.matrix()).trace().real());
  }
  return out;
}

inline std::vector<double> probabilities(const PureState& s, const Povm& m) { return probabilities(MixedState(s), m); }

}  // namespace qzk
