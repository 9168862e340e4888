// Copyright 2026 The pfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Jones-calculus model of the photonic gates: wave plates, the phase gate
// built from qwp-hwp-qwp sandwiches, and the split/compensate/merge network
// realizing an arbitrary 3x3 transfer matrix up to attenuation.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pfsim/tensor_core.hpp"

namespace pfsim {

using Jones = Eigen::Matrix2cd;

/// Half-wave plate with its fast axis at theta.
inline Jones hwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  Jones m;
  m << c, s, s, -c;
  return m;
}

/// Quarter-wave plate with its fast axis at theta.
inline Jones qwp(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex off = Complex{1.0, -1.0} * s * c;
  Jones m;
  m << Complex{c * c, s * s}, off, off, Complex{s * s, c * c};
  return m;
}

inline double degrees(double radians) { return radians * 180.0 / kPi; }
inline double radians(double degrees) { return degrees * kPi / 180.0; }

enum class JonesKind {
  hwp,
  qwp,
  compensator,  // common phase e^{i phi} on both polarizations
  filter        // common amplitude transmission in [0, 1]
};

inline const char* to_string(JonesKind k) {
  switch (k) {
    case JonesKind::hwp: return "hwp";
    case JonesKind::qwp: return "qwp";
    case JonesKind::compensator: return "compensator";
    case JonesKind::filter: return "filter";
  }
  return "?";
}

struct JonesElement {
  JonesKind kind;
  double value;  // angle (plates), phase (compensator) or transmission (filter)

  Jones matrix() const {
    switch (kind) {
      case JonesKind::hwp: return hwp(value);
      case JonesKind::qwp: return qwp(value);
      case JonesKind::compensator: return std::polar(1.0, value) * Jones::Identity();
      case JonesKind::filter:
        if (!(value >= 0.0 && value <= 1.0)) throw InvalidArgument("filter transmission outside [0, 1]");
        return value * Jones::Identity();
    }
    throw InvalidArgument("unknown Jones element");
  }
};

// ---------------------------------------------------------------------------
// Phase gate.

/// diag(e^{-2i theta_k}): one hwp at theta_k between two qwp(pi/4) per path.
inline Operator phase_gate(const std::array<double, 3>& thetas) {
  return Operator::diagonal({std::polar(1.0, -2.0 * thetas[0]), std::polar(1.0, -2.0 * thetas[1]),
                             std::polar(1.0, -2.0 * thetas[2])});
}

/// Horizontal output amplitude of qwp(pi/4) hwp(theta) qwp(pi/4) acting on |H>.
inline Complex phase_path_response(double theta) {
  const Eigen::Vector2cd out = qwp(kPi / 4) * hwp(theta) * qwp(kPi / 4) * Eigen::Vector2cd(1.0, 0.0);
  return out(0);
}

/// Jones-level P gate: each path response divided by the theta = 0 response,
/// which removes the common global phase of the sandwich.
inline Operator phase_gate_simulate(const std::array<double, 3>& thetas) {
  const Complex ref = phase_path_response(0.0);
  return Operator::diagonal({phase_path_response(thetas[0]) / ref, phase_path_response(thetas[1]) / ref,
                             phase_path_response(thetas[2]) / ref});
}

/// Plate angles in [0, pi) giving diag(e^{i phi_k}).
inline std::array<double, 3> compile_phase(const std::array<double, 3>& phases) {
  std::array<double, 3> t{};
  for (std::size_t k = 0; k < 3; ++k) {
    double th = std::fmod(-phases[k] / 2.0, kPi);
    if (th < 0.0) th += kPi;
    if (std::abs(th - kPi) < 1e-15) th = 0.0;
    t[k] = th;
  }
  return t;
}

/// Phases of a diagonal unitary target.
inline std::array<double, 3> compile_phase(const Operator& diagonal_target, double tol = 1e-10) {
  if (diagonal_target.dim() != 3) throw InvalidArgument("compile_phase: expected 3x3");
  std::array<double, 3> ph{};
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (i != j && std::abs(diagonal_target(i, j)) > tol) throw InvalidArgument("compile_phase: target not diagonal");
    }
    if (std::abs(std::abs(diagonal_target(i, i)) - 1.0) > tol) {
      throw InvalidArgument("compile_phase: diagonal entries must have unit modulus");
    }
    ph[static_cast<std::size_t>(i)] = std::arg(diagonal_target(i, i));
  }
  return compile_phase(ph);
}

// ---------------------------------------------------------------------------
// Mode network.

enum class Pol { H = 0, V = 1 };

struct Mode {
  int row;
  int col;
  auto operator<=>(const Mode&) const = default;
};

struct ElementStage {
  JonesElement element;
  std::vector<Mode> modes;
  std::string label;
};

/// Beam displacer: moves the `pol` component of each source mode to its
/// destination; all moves happen at once.
struct DisplacerStage {
  Pol pol;
  std::vector<std::pair<Mode, Mode>> routes;
  std::string label;
};

using NetworkStage = std::variant<ElementStage, DisplacerStage>;

/// Inputs enter horizontally polarized; outputs read the horizontal
/// component (polarizing beam splitter).
struct OpticalNetwork {
  std::vector<Mode> inputs;
  std::vector<Mode> outputs;
  std::vector<NetworkStage> stages;

  /// outputs x inputs transfer matrix. Throws RoutingCollision when a
  /// displacer sends two routes into the same slot, or light onto a slot
  /// that still carries light (amplitude above `dark_tol`) and is not itself
  /// being moved.
  Matrix transfer(double dark_tol = 1e-12) const {
    using Slot = std::pair<Mode, int>;
    const Eigen::Index n_in = static_cast<Eigen::Index>(inputs.size());
    std::map<Slot, Eigen::RowVectorXcd> field;  // slot -> amplitude per input
    for (Eigen::Index i = 0; i < n_in; ++i) {
      Slot s{inputs[static_cast<std::size_t>(i)], static_cast<int>(Pol::H)};
      if (field.count(s)) throw RoutingCollision("two inputs share a mode");
      Eigen::RowVectorXcd a = Eigen::RowVectorXcd::Zero(n_in);
      a(i) = 1.0;
      field[s] = a;
    }
    const auto zero = Eigen::RowVectorXcd::Zero(n_in);
    for (const auto& stage : stages) {
      if (const auto* el = std::get_if<ElementStage>(&stage)) {
        const Jones j = el->element.matrix();
        for (const Mode& m : el->modes) {
          const Slot h{m, 0}, v{m, 1};
          const bool has_h = field.count(h) > 0, has_v = field.count(v) > 0;
          if (!has_h && !has_v) continue;  // acting on an empty mode does nothing
          const Eigen::RowVectorXcd ah = has_h ? field[h] : Eigen::RowVectorXcd(zero);
          const Eigen::RowVectorXcd av = has_v ? field[v] : Eigen::RowVectorXcd(zero);
          field[h] = j(0, 0) * ah + j(0, 1) * av;
          field[v] = j(1, 0) * ah + j(1, 1) * av;
        }
      } else {
        const auto& bd = std::get<DisplacerStage>(stage);
        const int p = static_cast<int>(bd.pol);
        std::set<Mode> sources, dests;
        for (const auto& [from, to] : bd.routes) {
          if (!sources.insert(from).second) throw RoutingCollision(bd.label + ": repeated source");
          if (!dests.insert(to).second) throw RoutingCollision(bd.label + ": two routes share a destination");
        }
        std::map<Slot, Eigen::RowVectorXcd> moved;
        for (const auto& [from, to] : bd.routes) {
          auto it = field.find({from, p});
          if (it == field.end()) continue;
          moved[{to, p}] = it->second;
          field.erase(it);
        }
        for (auto& [slot, amp] : moved) {
          auto hit = field.find(slot);
          if (hit != field.end() && hit->second.cwiseAbs().maxCoeff() > dark_tol &&
              amp.cwiseAbs().maxCoeff() > dark_tol) {
            throw RoutingCollision(bd.label + ": destination slot occupied");
          }
          if (hit != field.end() && amp.cwiseAbs().maxCoeff() <= dark_tol) continue;
          field[slot] = std::move(amp);
        }
      }
    }
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(outputs.size()), n_in);
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      auto it = field.find({outputs[o], 0});
      if (it != field.end()) t.row(static_cast<Eigen::Index>(o)) = it->second;
    }
    return t;
  }
};

/// Three independent paths, each qwp(pi/4) hwp(theta_k) qwp(pi/4).
inline OpticalNetwork phase_gate_network(const std::array<double, 3>& thetas) {
  OpticalNetwork net;
  for (int k = 0; k < 3; ++k) {
    net.inputs.push_back({0, k});
    net.outputs.push_back({0, k});
  }
  const std::vector<Mode> all{{0, 0}, {0, 1}, {0, 2}};
  net.stages.emplace_back(ElementStage{{JonesKind::qwp, kPi / 4}, all, "bulk qwp"});
  for (int k = 0; k < 3; ++k) {
    net.stages.emplace_back(ElementStage{{JonesKind::hwp, thetas[static_cast<std::size_t>(k)]}, {{0, k}}, "phase hwp"});
  }
  net.stages.emplace_back(ElementStage{{JonesKind::qwp, kPi / 4}, all, "bulk qwp"});
  return net;
}

// ---------------------------------------------------------------------------
// R gate on a 3x3 mode array: row i carries input i, column j feeds output j.

struct RGateSettings {
  std::array<double, 3> split_angles{};   // hwp on the home mode (i, i)
  std::array<double, 3> route_angles{};   // hwp on the displaced mode (i, i+2)
  std::array<double, 3> transmissions{1.0, 1.0, 1.0};  // per-input filter before the split
  std::array<std::array<double, 3>, 3> phases{};  // compensator on mode (i, j)
  std::array<double, 2> merge_angles{kPi / 8.0, 0.5 * std::atan(1.0 / std::sqrt(2.0))};
};

inline OpticalNetwork r_gate_network(const RGateSettings& s) {
  OpticalNetwork net;
  for (int i = 0; i < 3; ++i) net.inputs.push_back({i, i});
  for (int j = 0; j < 3; ++j) net.outputs.push_back({2, j});
  auto el = [&](JonesKind k, double v, std::vector<Mode> modes, std::string label) {
    net.stages.emplace_back(ElementStage{{k, v}, std::move(modes), std::move(label)});
  };
  auto bd = [&](Pol p, std::vector<std::pair<Mode, Mode>> routes, std::string label) {
    net.stages.emplace_back(DisplacerStage{p, std::move(routes), std::move(label)});
  };
  const auto wrap = [](int c) { return ((c % 3) + 3) % 3; };

  for (int i = 0; i < 3; ++i) {
    el(JonesKind::filter, s.transmissions[static_cast<std::size_t>(i)], {{i, i}}, "input filter");
    el(JonesKind::hwp, s.split_angles[static_cast<std::size_t>(i)], {{i, i}}, "split hwp");
  }
  // Split: V moves two columns along its row, is rotated, and V moves again.
  std::vector<std::pair<Mode, Mode>> first, second;
  for (int i = 0; i < 3; ++i) first.push_back({{i, i}, {i, wrap(i + 2)}});
  bd(Pol::V, first, "split displacer 1");
  for (int i = 0; i < 3; ++i) {
    el(JonesKind::hwp, s.route_angles[static_cast<std::size_t>(i)], {{i, wrap(i + 2)}}, "route hwp");
  }
  for (int i = 0; i < 3; ++i) second.push_back({{i, wrap(i + 2)}, {i, wrap(i + 1)}});
  bd(Pol::V, second, "split displacer 2");
  for (int i = 0; i < 3; ++i) el(JonesKind::hwp, kPi / 4.0, {{i, wrap(i + 1)}}, "V to H");

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      el(JonesKind::compensator, s.phases[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], {{i, j}},
         "compensator");
    }
  }
  // Merge rows 0 and 2 arrive vertically polarized, row 1 horizontally.
  for (int j = 0; j < 3; ++j) el(JonesKind::hwp, kPi / 4.0, {{0, j}, {2, j}}, "merge prep");
  std::vector<std::pair<Mode, Mode>> down1, down2;
  for (int j = 0; j < 3; ++j) down1.push_back({{0, j}, {1, j}});
  bd(Pol::V, down1, "merge displacer 1");
  for (int j = 0; j < 3; ++j) el(JonesKind::hwp, s.merge_angles[0], {{1, j}}, "merge hwp 1");
  for (int j = 0; j < 3; ++j) down2.push_back({{1, j}, {2, j}});
  bd(Pol::H, down2, "merge displacer 2");
  for (int j = 0; j < 3; ++j) el(JonesKind::hwp, s.merge_angles[1], {{2, j}}, "merge hwp 2");
  return net;
}

/// Effective 3x3 transfer matrix (output j, input i).
inline Operator r_gate_simulate(const RGateSettings& s) { return Operator(r_gate_network(s).transfer()); }

/// |amplitude|^2 with which each row reaches the merged output, for the
/// merge stage alone.
inline std::array<double, 3> merge_weights(const std::array<double, 2>& merge_angles) {
  RGateSettings s;
  s.merge_angles = merge_angles;
  const Matrix t = r_gate_network(s).transfer();  // split plates at 0: row i stays in column i
  return {std::norm(t(0, 0)), std::norm(t(1, 1)), std::norm(t(2, 2))};
}

struct CompiledRGate {
  RGateSettings settings;
  double scale;     // simulate(settings) = scale * target
  double distance;  // max entry |simulate - scale * target|
};

/// Settings whose transfer matrix equals g * target with the largest g the
/// passive network allows: g = 1/(sqrt3 * max column norm).
inline CompiledRGate compile_r_gate(const Operator& target) {
  if (target.dim() != 3) throw InvalidArgument("compile_r_gate: expected 3x3");
  const Matrix& t = target.matrix();
  if (!t.allFinite()) throw InvalidArgument("compile_r_gate: non-finite target");
  double max_norm = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) max_norm = std::max(max_norm, t.col(i).norm());
  if (!(max_norm > 0.0)) throw InvalidArgument("compile_r_gate: zero target");

  RGateSettings s;
  for (int i = 0; i < 3; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double cn = t.col(i).norm();
    s.transmissions[ui] = cn / max_norm;
    if (cn == 0.0) continue;
    const double home = std::abs(t(i, i)) / cn;
    const double c1 = std::abs(t((i + 1) % 3, i)) / cn;
    const double c2 = std::abs(t((i + 2) % 3, i)) / cn;
    s.split_angles[ui] = 0.5 * std::acos(std::clamp(home, 0.0, 1.0));
    s.route_angles[ui] = (c1 == 0.0 && c2 == 0.0) ? 0.0 : 0.5 * std::atan2(c2, -c1);
  }
  const Matrix native = r_gate_network(s).transfer();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (std::abs(native(j, i)) < 1e-14 || std::abs(t(j, i)) == 0.0) continue;
      s.phases[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          std::arg(t(j, i)) - std::arg(native(j, i));
    }
  }
  const double g = 1.0 / (std::sqrt(3.0) * max_norm);
  const Matrix out = r_gate_network(s).transfer();
  const double dist = (out - g * t).cwiseAbs().maxCoeff();
  return {s, g, dist};
}

}  // namespace pfsim
