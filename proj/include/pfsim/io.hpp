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

// JSON and CSV serialization: complex matrices, process matrices, count
// tables and optical parts lists. Needs nlohmann/json on the include path.

#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pfsim/optics.hpp"
#include "pfsim/tomography.hpp"

namespace pfsim::io {

using json = nlohmann::json;

/// {"real": [[...]], "imag": [[...]]}
inline json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"real", std::move(re)}, {"imag", std::move(im)}};
}

inline Matrix matrix_from_json(const json& j) {
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  const auto rows = static_cast<Eigen::Index>(re.size());
  if (rows == 0 || im.size() != re.size()) throw InvalidArgument("matrix_from_json: shape mismatch");
  const auto cols = static_cast<Eigen::Index>(re.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& a = re.at(static_cast<std::size_t>(r));
    const auto& b = im.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(a.size()) != cols || static_cast<Eigen::Index>(b.size()) != cols) {
      throw InvalidArgument("matrix_from_json: ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = Complex{a.at(static_cast<std::size_t>(c)).get<double>(), b.at(static_cast<std::size_t>(c)).get<double>()};
    }
  }
  return m;
}

inline json vector_to_json(const Vector& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"real", std::move(re)}, {"imag", std::move(im)}};
}

inline json to_json(const ProcessMatrix& chi) {
  json j = matrix_to_json(chi.matrix());
  j["basis"] = "E0=sqrt(2/3) I, E1..E8=Gell-Mann";
  return j;
}

inline ProcessMatrix process_matrix_from_json(const json& j) { return ProcessMatrix(matrix_from_json(j)); }

/// prep,meas,count rows with a header; shots and seed as comment lines.
inline void write_counts_csv(std::ostream& os, const CountTable& t) {
  os << "# shots=" << t.shots << "\n# seed=" << t.seed << "\nprep,meas,count\n";
  for (Eigen::Index m = 0; m < 9; ++m) {
    for (Eigen::Index n = 0; n < 9; ++n) os << m << ',' << n << ',' << t.counts(m, n) << '\n';
  }
}

inline CountTable read_counts_csv(std::istream& is) {
  CountTable t;
  std::string line;
  bool header = false;
  int cells = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# shots=", 0) == 0) {
      t.shots = std::stoll(line.substr(8));
    } else if (line.rfind("# seed=", 0) == 0) {
      t.seed = std::stoull(line.substr(7));
    } else if (line == "prep,meas,count") {
      header = true;
    } else {
      if (!header) throw InvalidArgument("read_counts_csv: missing header");
      std::istringstream ss(line);
      long m = -1, n = -1;
      long long c = -1;
      char c1 = 0, c2 = 0;
      if (!(ss >> m >> c1 >> n >> c2 >> c) || c1 != ',' || c2 != ',' || m < 0 || m > 8 || n < 0 || n > 8) {
        throw InvalidArgument("read_counts_csv: bad row '" + line + "'");
      }
      t.counts(m, n) = c;
      ++cells;
    }
  }
  if (cells != 81) throw InvalidArgument("read_counts_csv: expected 81 cells");
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Parts lists. Plate angles and compensator phases are in degrees.

inline json to_json(const OpticalNetwork& net) {
  const auto mode_list = [](const std::vector<Mode>& ms) {
    json a = json::array();
    for (const Mode& m : ms) a.push_back({m.row, m.col});
    return a;
  };
  json stages = json::array();
  for (const auto& st : net.stages) {
    if (const auto* el = std::get_if<ElementStage>(&st)) {
      json e{{"kind", to_string(el->element.kind)}, {"modes", mode_list(el->modes)}, {"label", el->label}};
      switch (el->element.kind) {
        case JonesKind::hwp:
        case JonesKind::qwp: e["angle_deg"] = degrees(el->element.value); break;
        case JonesKind::compensator: e["phase_deg"] = degrees(el->element.value); break;
        case JonesKind::filter: e["transmission"] = el->element.value; break;
      }
      stages.push_back(std::move(e));
    } else {
      const auto& bd = std::get<DisplacerStage>(st);
      json routes = json::array();
      for (const auto& [a, b] : bd.routes) routes.push_back({{a.row, a.col}, {b.row, b.col}});
      stages.push_back({{"kind", "displacer"},
                        {"polarization", bd.pol == Pol::H ? "H" : "V"},
                        {"routes", std::move(routes)},
                        {"label", bd.label}});
    }
  }
  return {{"inputs", mode_list(net.inputs)}, {"outputs", mode_list(net.outputs)}, {"stages", std::move(stages)}};
}

inline OpticalNetwork network_from_json(const json& j) {
  const auto modes = [](const json& a) {
    std::vector<Mode> ms;
    for (const auto& m : a) ms.push_back({m.at(0).get<int>(), m.at(1).get<int>()});
    return ms;
  };
  OpticalNetwork net;
  net.inputs = modes(j.at("inputs"));
  net.outputs = modes(j.at("outputs"));
  for (const auto& s : j.at("stages")) {
    const std::string kind = s.at("kind").get<std::string>();
    const std::string label = s.value("label", "");
    if (kind == "displacer") {
      DisplacerStage bd{s.at("polarization").get<std::string>() == "H" ? Pol::H : Pol::V, {}, label};
      for (const auto& r : s.at("routes")) {
        bd.routes.push_back({{r.at(0).at(0).get<int>(), r.at(0).at(1).get<int>()},
                             {r.at(1).at(0).get<int>(), r.at(1).at(1).get<int>()}});
      }
      net.stages.emplace_back(std::move(bd));
    } else if (kind == "hwp" || kind == "qwp") {
      net.stages.emplace_back(ElementStage{{kind == "hwp" ? JonesKind::hwp : JonesKind::qwp,
                                            radians(s.at("angle_deg").get<double>())},
                                           modes(s.at("modes")), label});
    } else if (kind == "compensator") {
      net.stages.emplace_back(
          ElementStage{{JonesKind::compensator, radians(s.at("phase_deg").get<double>())}, modes(s.at("modes")), label});
    } else if (kind == "filter") {
      net.stages.emplace_back(
          ElementStage{{JonesKind::filter, s.at("transmission").get<double>()}, modes(s.at("modes")), label});
    } else {
      throw InvalidArgument("network_from_json: unknown element kind '" + kind + "'");
    }
  }
  return net;
}

}  // namespace pfsim::io
